#pragma once

#include <Eigen/Dense>

#include "sympen/operators.hpp"

namespace sympen {

// One evaluation of the trace-penalty function
//   f(X) = 1/2 <X, AX> + beta/4 ||X^T J_n X - J_p||_F^2
// together with the by-products the solver reuses.
struct PenaltyEval {
    double value = 0.0;
    double trace_term = 0.0;   // 1/2 <X, AX>
    double feasibility = 0.0;  // ||X^T J_n X - J_p||_F
    Basis ax;                  // A X
    Eigen::MatrixXd violation; // X^T J_n X - J_p (exactly skew)
    Basis gradient;            // empty unless requested
    double flops = 0.0;        // multiply-adds spent in this evaluation
};

// Zero- and first-order oracle. The gradient is
//   A X - beta J_n X (X^T J_n X - J_p).
PenaltyEval evaluate_penalty(const SpdOperator& op, const Basis& x, double beta,
                             bool with_gradient);

double objective(const SpdOperator& op, const Basis& x, double beta);

PenaltyEval grad(const SpdOperator& op, const Basis& x, double beta);

// Second directional derivative d^2/dt^2 f(X + tY) at t = 0:
//   tr(Y^T A Y) - beta tr((Y^T J Y)(X^T J X - J)) + beta/2 ||Y^T J X + X^T J Y||_F^2
double hess_quadform(const SpdOperator& op, const Basis& x, const Basis& y, double beta);

// Stationary point of f built from q symplectic eigenpairs:
//   X = [S1 (I - D/beta)^{1/2}, 0, S2 (I - D/beta)^{1/2}, 0] T^T
// where s_hat = [S1, S2] is 2n x 2q with s_hat^T A s_hat = D (+) D, and
// T is a 2p x 2p orthosymplectic matrix. Requires q <= p and beta > max(d).
Basis construct_stationary_point(const Basis& s_hat, const Eigen::VectorXd& d_hat, Index p,
                                 const Eigen::MatrixXd& t, double beta);

} // namespace sympen
