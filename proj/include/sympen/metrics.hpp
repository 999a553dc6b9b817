#pragma once

#include <optional>

#include <Eigen/Dense>

#include "sympen/operators.hpp"
#include "sympen/oracle.hpp"

namespace sympen {

// Above this half-dimension golub_werman avoids forming 2n x 2n projectors.
inline constexpr Index kProjectorLimit = 500;

// || X (X^T X)^{-1} X^T - Y (Y^T Y)^{-1} Y^T ||_F.
// Throws NumericalError when either argument is column-rank deficient.
double golub_werman(const Basis& x, const Basis& x_ref);

// || A X - J_n X J_p^T (D (+) D) ||_F / || A X ||_F with D = diag(d).
double residue(const SpdOperator& op, const Basis& x, const Eigen::VectorXd& d);

struct MetricsReport {
    double golub_werman = 0.0;   // NaN without a reference
    double residue = 0.0;
    double feasibility = 0.0;    // ||X^T J X - J||_F of the eigenbasis
    double objective = 0.0;      // f_beta at the penalty iterate
    Eigen::VectorXd abs_error;   // |d - d_ref|, empty without a reference
    Eigen::VectorXd rel_error;   // |d - d_ref| / d_ref
};

// `basis`/`d`: the computed symplectic eigenbasis and eigenvalues;
// `iterate`/`beta`: the penalty iterate the objective is reported for.
MetricsReport report(const SpdOperator& op, const Basis& basis, const Eigen::VectorXd& d,
                     const Basis& iterate, double beta,
                     const ReferenceSpectrum* reference = nullptr);

} // namespace sympen
