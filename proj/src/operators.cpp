#include "sympen/operators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sympen/errors.hpp"
#include "sympen/rng.hpp"

namespace sympen {

std::string_view to_string(OperatorKind kind) {
    switch (kind) {
    case OperatorKind::Dense:
        return "dense";
    case OperatorKind::SparseCsr:
        return "sparse";
    case OperatorKind::SparsePlusLowRank:
        return "slr";
    }
    return "unknown";
}

namespace {

Index checked_half_dim(Index rows, Index cols) {
    if (rows != cols) {
        throw ArgumentError("operator must be square, got " + std::to_string(rows) + "x" +
                            std::to_string(cols));
    }
    if (rows == 0 || rows % 2 != 0) {
        throw ArgumentError("operator dimension must be even and positive, got " +
                            std::to_string(rows));
    }
    return rows / 2;
}

} // namespace

SpdOperator SpdOperator::dense(Eigen::MatrixXd a) {
    SpdOperator op;
    op.n_ = checked_half_dim(a.rows(), a.cols());
    op.kind_ = OperatorKind::Dense;
    op.dense_ = std::move(a);
    return op;
}

SpdOperator SpdOperator::sparse(SparseCsr b) {
    SpdOperator op;
    op.n_ = checked_half_dim(b.rows(), b.cols());
    op.kind_ = OperatorKind::SparseCsr;
    b.makeCompressed();
    op.sparse_ = std::move(b);
    return op;
}

SpdOperator SpdOperator::sparse_plus_low_rank(SparseCsr b, Eigen::MatrixXd c) {
    SpdOperator op;
    op.n_ = checked_half_dim(b.rows(), b.cols());
    if (c.rows() != b.rows() || c.cols() == 0) {
        throw ArgumentError("low-rank factor must be " + std::to_string(b.rows()) +
                            " x m with m >= 1, got " + std::to_string(c.rows()) + "x" +
                            std::to_string(c.cols()));
    }
    op.kind_ = OperatorKind::SparsePlusLowRank;
    b.makeCompressed();
    op.sparse_ = std::move(b);
    op.factor_ = std::move(c);
    return op;
}

Basis SpdOperator::apply(const Basis& x) const {
    if (x.rows() != dim() || x.cols() > dim()) {
        throw ArgumentError("apply: expected " + std::to_string(dim()) + " rows and at most " +
                            std::to_string(dim()) + " columns, got " +
                            std::to_string(x.rows()) + "x" + std::to_string(x.cols()));
    }
    switch (kind_) {
    case OperatorKind::Dense:
        return dense_ * x;
    case OperatorKind::SparseCsr:
        return sparse_ * x;
    case OperatorKind::SparsePlusLowRank: {
        Basis y = sparse_ * x;
        const Eigen::MatrixXd ctx = factor_.transpose() * x;
        y.noalias() += factor_ * ctx;
        return y;
    }
    }
    return {};
}

double SpdOperator::apply_flops(Index cols) const {
    const double c = static_cast<double>(cols);
    switch (kind_) {
    case OperatorKind::Dense:
        return static_cast<double>(dim()) * static_cast<double>(dim()) * c;
    case OperatorKind::SparseCsr:
        return static_cast<double>(sparse_.nonZeros()) * c;
    case OperatorKind::SparsePlusLowRank:
        return static_cast<double>(sparse_.nonZeros()) * c +
               2.0 * static_cast<double>(factor_.size()) * c;
    }
    return 0.0;
}

Index SpdOperator::nnz() const {
    return kind_ == OperatorKind::Dense ? dim() * dim() : sparse_.nonZeros();
}

double SpdOperator::trace() const {
    switch (kind_) {
    case OperatorKind::Dense:
        return dense_.trace();
    case OperatorKind::SparseCsr:
        return sparse_.diagonal().sum();
    case OperatorKind::SparsePlusLowRank:
        return sparse_.diagonal().sum() + factor_.squaredNorm();
    }
    return 0.0;
}

double SpdOperator::frobenius_norm() const {
    switch (kind_) {
    case OperatorKind::Dense:
        return dense_.norm();
    case OperatorKind::SparseCsr:
        return sparse_.norm();
    case OperatorKind::SparsePlusLowRank: {
        // ||B + CC^T||^2 = ||B||^2 + 2 tr(C^T B C) + ||C^T C||^2
        const Eigen::MatrixXd bc = sparse_ * factor_;
        const double cross = (factor_.transpose() * bc).trace();
        const Eigen::MatrixXd ctc = factor_.transpose() * factor_;
        return std::sqrt(std::max(0.0, sparse_.squaredNorm() + 2.0 * cross + ctc.squaredNorm()));
    }
    }
    return 0.0;
}

Eigen::MatrixXd SpdOperator::densify() const {
    switch (kind_) {
    case OperatorKind::Dense:
        return dense_;
    case OperatorKind::SparseCsr:
        return Eigen::MatrixXd(sparse_);
    case OperatorKind::SparsePlusLowRank: {
        Eigen::MatrixXd a(sparse_);
        a.noalias() += factor_ * factor_.transpose();
        return a;
    }
    }
    return {};
}

Basis j_left(const Basis& x) {
    if (x.rows() % 2 != 0) {
        throw ArgumentError("j_left: odd row count " + std::to_string(x.rows()));
    }
    const Index k = x.rows() / 2;
    Basis y(x.rows(), x.cols());
    y.topRows(k) = x.bottomRows(k);
    y.bottomRows(k) = -x.topRows(k);
    return y;
}

Basis j_left(const Basis& x, Index k) {
    if (x.rows() != 2 * k) {
        throw ArgumentError("j_left: expected " + std::to_string(2 * k) + " rows, got " +
                            std::to_string(x.rows()));
    }
    return j_left(x);
}

Basis j_right(const Basis& x) {
    if (x.cols() % 2 != 0) {
        throw ArgumentError("j_right: odd column count " + std::to_string(x.cols()));
    }
    const Index p = x.cols() / 2;
    Basis y(x.rows(), x.cols());
    y.leftCols(p) = -x.rightCols(p);
    y.rightCols(p) = x.leftCols(p);
    return y;
}

Basis j_right(const Basis& x, Index p) {
    if (x.cols() != 2 * p) {
        throw ArgumentError("j_right: expected " + std::to_string(2 * p) + " columns, got " +
                            std::to_string(x.cols()));
    }
    return j_right(x);
}

Eigen::MatrixXd poisson_matrix(Index k) {
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2 * k, 2 * k);
    j.topRightCorner(k, k).setIdentity();
    j.bottomLeftCorner(k, k) = -Eigen::MatrixXd::Identity(k, k);
    return j;
}

Eigen::MatrixXd symplectic_gram(const Basis& x) {
    Eigen::MatrixXd g = x.transpose() * j_left(x);
    Eigen::MatrixXd skew = 0.5 * (g - g.transpose());
    return skew;
}

Basis canonical_frame(Index n, Index p) {
    if (p < 1 || p > n) {
        throw ArgumentError("canonical_frame: need 1 <= p <= n, got n=" + std::to_string(n) +
                            " p=" + std::to_string(p));
    }
    Basis x = Basis::Zero(2 * n, 2 * p);
    for (Index j = 0; j < p; ++j) {
        x(j, j) = 1.0;
        x(n + j, p + j) = 1.0;
    }
    return x;
}

void check_basis(const Basis& x, std::string_view what) {
    if (x.cols() % 2 != 0) {
        throw ArgumentError(std::string(what) + ": column count must be even, got " +
                            std::to_string(x.cols()));
    }
    if (!x.allFinite()) {
        throw ArgumentError(std::string(what) + ": non-finite entries");
    }
}

double symmetry_defect(const SpdOperator& op, std::uint64_t seed, int probes) {
    Rng rng(seed);
    double worst = 0.0;
    for (int i = 0; i < probes; ++i) {
        const Eigen::VectorXd u = rng.uniform_matrix(op.dim(), 1);
        const Eigen::VectorXd v = rng.uniform_matrix(op.dim(), 1);
        const Eigen::VectorXd au = op.apply(u);
        const Eigen::VectorXd av = op.apply(v);
        const double scale = au.norm() * v.norm();
        if (scale > 0.0) {
            worst = std::max(worst, std::abs(u.dot(av) - v.dot(au)) / scale);
        }
    }
    return worst;
}

bool spd_probe(const SpdOperator& op, std::uint64_t seed, int probes) {
    Rng rng(seed);
    for (int i = 0; i < probes; ++i) {
        const Eigen::VectorXd u = rng.uniform_matrix(op.dim(), 1);
        if (!(u.dot(Eigen::VectorXd(op.apply(u))) > 0.0)) {
            return false;
        }
    }
    return true;
}

bool check_spd_dense(const SpdOperator& op) {
    const Eigen::LLT<Eigen::MatrixXd> llt(op.densify());
    return llt.info() == Eigen::Success;
}

} // namespace sympen
