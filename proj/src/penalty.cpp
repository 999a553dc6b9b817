#include "sympen/penalty.hpp"

#include <cmath>
#include <string>

#include "sympen/errors.hpp"

namespace sympen {

namespace {

void require_positive_beta(double beta) {
    if (!(beta > 0.0)) {
        throw ArgumentError("penalty parameter beta must be positive, got " +
                            std::to_string(beta));
    }
}

// C := C - J_p, in place.
void subtract_poisson(Eigen::MatrixXd& c) {
    const Index p = c.rows() / 2;
    for (Index j = 0; j < p; ++j) {
        c(j, p + j) -= 1.0;
        c(p + j, j) += 1.0;
    }
}

} // namespace

PenaltyEval evaluate_penalty(const SpdOperator& op, const Basis& x, double beta,
                             bool with_gradient) {
    require_positive_beta(beta);
    if (x.rows() != op.dim() || x.cols() % 2 != 0) {
        throw ArgumentError("penalty: iterate must be " + std::to_string(op.dim()) +
                            " x 2p, got " + std::to_string(x.rows()) + "x" +
                            std::to_string(x.cols()));
    }
    const double n = static_cast<double>(op.half_dim());
    const double p = static_cast<double>(x.cols() / 2);

    PenaltyEval e;
    e.ax = op.apply(x);
    e.violation = symplectic_gram(x);
    subtract_poisson(e.violation);

    e.trace_term = 0.5 * x.cwiseProduct(e.ax).sum();
    const double violation_sq = e.violation.squaredNorm();
    e.feasibility = std::sqrt(violation_sq);
    e.value = e.trace_term + 0.25 * beta * violation_sq;

    // A X, X^T (J X), C, <X, AX>, ||C||^2
    e.flops = op.apply_flops(x.cols()) + 8.0 * n * p * p + 4.0 * p * p + 4.0 * n * p +
              4.0 * p * p;

    if (with_gradient) {
        const Basis xc = x * e.violation;
        e.gradient = e.ax - beta * j_left(xc);
        // J X C, A X - beta (J X C)
        e.flops += 8.0 * n * p * p + 4.0 * n * p;
    }
    return e;
}

double objective(const SpdOperator& op, const Basis& x, double beta) {
    return evaluate_penalty(op, x, beta, false).value;
}

PenaltyEval grad(const SpdOperator& op, const Basis& x, double beta) {
    return evaluate_penalty(op, x, beta, true);
}

double hess_quadform(const SpdOperator& op, const Basis& x, const Basis& y, double beta) {
    require_positive_beta(beta);
    if (x.rows() != y.rows() || x.cols() != y.cols()) {
        throw ArgumentError("hess_quadform: direction shape " + std::to_string(y.rows()) + "x" +
                            std::to_string(y.cols()) + " does not match iterate " +
                            std::to_string(x.rows()) + "x" + std::to_string(x.cols()));
    }
    Eigen::MatrixXd violation = symplectic_gram(x);
    subtract_poisson(violation);

    const double curvature = y.cwiseProduct(op.apply(y)).sum();
    const Eigen::MatrixXd yjy = symplectic_gram(y);
    // X^T J Y; then Y^T J X = -(X^T J Y)^T
    const Eigen::MatrixXd xjy = x.transpose() * j_left(y);
    const Eigen::MatrixXd mixed = xjy - xjy.transpose();

    return curvature - beta * (yjy * violation).trace() + 0.5 * beta * mixed.squaredNorm();
}

Basis construct_stationary_point(const Basis& s_hat, const Eigen::VectorXd& d_hat, Index p,
                                 const Eigen::MatrixXd& t, double beta) {
    require_positive_beta(beta);
    const Index q = d_hat.size();
    if (s_hat.cols() != 2 * q) {
        throw ArgumentError("construct_stationary_point: eigenbasis must have 2q = " +
                            std::to_string(2 * q) + " columns");
    }
    if (q > p) {
        throw ArgumentError("construct_stationary_point: need q <= p");
    }
    if (t.rows() != 2 * p || t.cols() != 2 * p) {
        throw ArgumentError("construct_stationary_point: T must be 2p x 2p");
    }
    if (q > 0 && !(beta > d_hat.maxCoeff())) {
        throw ArgumentError("construct_stationary_point: beta must exceed max(d) = " +
                            std::to_string(d_hat.maxCoeff()));
    }
    if (q > 0 && !(d_hat.minCoeff() > 0.0)) {
        throw ArgumentError("construct_stationary_point: eigenvalues must be positive");
    }
    const Eigen::ArrayXd scale = (1.0 - d_hat.array() / beta).sqrt();

    Basis x0 = Basis::Zero(s_hat.rows(), 2 * p);
    x0.leftCols(q) = s_hat.leftCols(q) * scale.matrix().asDiagonal();
    x0.middleCols(p, q) = s_hat.rightCols(q) * scale.matrix().asDiagonal();
    return x0 * t.transpose();
}

} // namespace sympen
