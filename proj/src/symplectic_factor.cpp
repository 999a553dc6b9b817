#include "sympen/symplectic_factor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "sympen/errors.hpp"

namespace sympen {

namespace {

struct SchurPair {
    Index first;
    Index second;
    double d;
};

} // namespace

SkewBlockForm skew_block_form(const Eigen::MatrixXd& k) {
    if (k.rows() != k.cols() || k.rows() % 2 != 0) {
        throw ArgumentError("skew_block_form: expected an even square matrix, got " +
                            std::to_string(k.rows()) + "x" + std::to_string(k.cols()));
    }
    const Index dim = k.rows();
    const Index m = dim / 2;
    const Eigen::MatrixXd skew = 0.5 * (k - k.transpose());

    Eigen::RealSchur<Eigen::MatrixXd> schur(skew);
    if (schur.info() != Eigen::Success) {
        throw NumericalError("skew_block_form: real Schur iteration did not converge");
    }
    const Eigen::MatrixXd& t = schur.matrixT();
    Eigen::MatrixXd u = schur.matrixU();

    std::vector<SchurPair> pairs;
    std::vector<Index> singles; // 1x1 blocks: numerically zero eigenvalues
    for (Index i = 0; i < dim;) {
        if (i + 1 < dim && t(i + 1, i) != 0.0) {
            pairs.push_back({i, i + 1, 0.5 * (t(i, i + 1) - t(i + 1, i))});
            i += 2;
        } else {
            singles.push_back(i);
            i += 1;
        }
    }
    // Zero eigenvalues of a skew matrix come in even number; pair them up in order.
    for (std::size_t s = 0; s + 1 < singles.size(); s += 2) {
        const auto a = u.col(singles[s]);
        const auto b = u.col(singles[s + 1]);
        pairs.push_back({singles[s], singles[s + 1], a.dot(skew * b)});
    }
    if (static_cast<Index>(pairs.size()) != m) {
        throw NumericalError("skew_block_form: could not pair the Schur blocks");
    }

    for (auto& pr : pairs) {
        if (pr.d < 0.0) {
            std::swap(pr.first, pr.second);
            pr.d = -pr.d;
        }
    }
    std::stable_sort(pairs.begin(), pairs.end(),
                     [](const SchurPair& a, const SchurPair& b) { return a.d < b.d; });

    SkewBlockForm out;
    out.q.resize(dim, dim);
    out.d.resize(m);
    for (Index j = 0; j < m; ++j) {
        const auto& pr = pairs[static_cast<std::size_t>(j)];
        out.q.col(j) = u.col(pr.first);
        out.q.col(m + j) = u.col(pr.second);
        out.d(j) = pr.d;
    }
    return out;
}

Eigen::VectorXd SsvdFactors::sigma_doubled() const {
    Eigen::VectorXd out(2 * sigma.size());
    out << sigma, sigma;
    return out;
}

SsvdFactors ssvd(const Basis& x, double rel_tol) {
    check_basis(x, "ssvd");
    if (x.rows() % 2 != 0 || x.cols() == 0) {
        throw ArgumentError("ssvd: expected a 2n x 2p matrix");
    }
    const Eigen::MatrixXd gram = x.transpose() * x;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> norm_solver(gram, Eigen::EigenvaluesOnly);
    const double norm2 = std::sqrt(std::max(0.0, norm_solver.eigenvalues().maxCoeff()));

    SkewBlockForm form = skew_block_form(symplectic_gram(x));
    const Eigen::VectorXd sigma = form.d.cwiseMax(0.0).cwiseSqrt();

    const double threshold = rel_tol * norm2;
    const auto deficient =
        static_cast<int>(std::count_if(sigma.begin(), sigma.end(),
                                       [threshold](double s) { return !(s > threshold); }));
    if (deficient > 0) {
        throw RankDeficientError("ssvd: " + std::to_string(deficient) +
                                     " symplectic singular value(s) below tolerance",
                                 deficient);
    }

    SsvdFactors f;
    f.sigma = sigma;
    f.t = std::move(form.q);
    f.s = x * f.t * f.sigma_doubled().cwiseInverse().asDiagonal();
    return f;
}

WilliamsonForm williamson_small(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols() || m.rows() == 0 || m.rows() % 2 != 0) {
        throw ArgumentError("williamson_small: expected an even square matrix, got " +
                            std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
    if (!m.allFinite()) {
        throw NumericalError("williamson_small: non-finite input");
    }
    const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
    if (eig.info() != Eigen::Success) {
        throw NumericalError("williamson_small: symmetric eigendecomposition failed");
    }
    const Eigen::VectorXd& lambda = eig.eigenvalues();
    if (!(lambda.minCoeff() > 0.0)) {
        throw NumericalError("williamson_small: matrix is not positive definite (min eigenvalue " +
                             std::to_string(lambda.minCoeff()) + ")");
    }
    const Eigen::MatrixXd& v = eig.eigenvectors();
    const Eigen::MatrixXd root = v * lambda.cwiseSqrt().asDiagonal() * v.transpose();
    const Eigen::MatrixXd root_inv = v * lambda.cwiseSqrt().cwiseInverse().asDiagonal() * v.transpose();

    // K = R J R is skew-symmetric with eigenvalues +-i d.
    const Eigen::MatrixXd k = root * j_left(root);
    SkewBlockForm form = skew_block_form(k);
    if (!(form.d.minCoeff() > 0.0)) {
        throw NumericalError("williamson_small: vanishing symplectic eigenvalue");
    }

    Eigen::VectorXd scale(m.rows());
    scale << form.d.cwiseSqrt(), form.d.cwiseSqrt();

    WilliamsonForm w;
    w.s = root_inv * form.q * scale.asDiagonal();
    w.d = std::move(form.d);
    return w;
}

RitzPairs srr(const SpdOperator& op, const Basis& x) {
    const SsvdFactors f = ssvd(x);
    const Basis as = op.apply(f.s);
    const Eigen::MatrixXd projected = f.s.transpose() * as;
    const WilliamsonForm w = williamson_small(0.5 * (projected + projected.transpose()));
    return {f.s * w.s, w.d};
}

Basis restart_point(const Basis& s, const Eigen::VectorXd& d, double beta) {
    if (!(beta > 0.0)) {
        throw ArgumentError("restart_point: beta must be positive");
    }
    if (s.cols() != 2 * d.size()) {
        throw ArgumentError("restart_point: basis has " + std::to_string(s.cols()) +
                            " columns, expected " + std::to_string(2 * d.size()));
    }
    const Eigen::VectorXd half = (1.0 - d.array() / beta).cwiseMax(1e-12).sqrt().matrix();
    Eigen::VectorXd scale(s.cols());
    scale << half, half;
    return s * scale.asDiagonal();
}

} // namespace sympen
