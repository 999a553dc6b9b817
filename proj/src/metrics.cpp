#include "sympen/metrics.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/QR>

#include "sympen/errors.hpp"
#include "sympen/penalty.hpp"

namespace sympen {

namespace {

// Thin orthonormal factor via unpivoted Householder QR, after a rank check.
Eigen::MatrixXd orthonormal_factor(const Basis& x, const char* which) {
    if (x.cols() == 0 || x.cols() > x.rows()) {
        throw ArgumentError(std::string("golub_werman: ") + which + " must be tall");
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
    const Eigen::VectorXd r_diag = qr.matrixQR().diagonal().cwiseAbs();
    const double tol = std::numeric_limits<double>::epsilon() * static_cast<double>(x.rows()) *
                       r_diag.maxCoeff();
    if (!(r_diag.minCoeff() > tol)) {
        throw NumericalError(std::string("golub_werman: ") + which + " is rank deficient");
    }
    return qr.householderQ() * Eigen::MatrixXd::Identity(x.rows(), x.cols());
}

} // namespace

double golub_werman(const Basis& x, const Basis& x_ref) {
    if (x.rows() != x_ref.rows()) {
        throw ArgumentError("golub_werman: row counts differ");
    }
    const Eigen::MatrixXd qx = orthonormal_factor(x, "X");
    const Eigen::MatrixXd qr = orthonormal_factor(x_ref, "X_ref");

    if (x.rows() <= 2 * kProjectorLimit) {
        const Eigen::MatrixXd diff = qx * qx.transpose() - qr * qr.transpose();
        return diff.norm();
    }
    // ||P - Q||_F^2 = rank P + rank Q - 2 ||Qx^T Qr||_F^2
    //               = ||(I - P) Qr||^2 + ||(I - Q) Qx||^2,
    // evaluated in the cancellation-free form.
    const Eigen::MatrixXd rx = qr - qx * (qx.transpose() * qr);
    const Eigen::MatrixXd rr = qx - qr * (qr.transpose() * qx);
    return std::sqrt(rx.squaredNorm() + rr.squaredNorm());
}

double residue(const SpdOperator& op, const Basis& x, const Eigen::VectorXd& d) {
    if (x.cols() != 2 * d.size()) {
        throw ArgumentError("residue: basis has " + std::to_string(x.cols()) +
                            " columns, expected " + std::to_string(2 * d.size()));
    }
    if (d.size() > 0 && !(d.minCoeff() > 0.0)) {
        throw ArgumentError("residue: eigenvalues must be positive");
    }
    const Basis ax = op.apply(x);
    const double denom = ax.norm();
    if (!(denom > 0.0)) {
        throw ArgumentError("residue: A X vanishes (X = 0?)");
    }
    Eigen::VectorXd dd(x.cols());
    dd << d, d;
    // J_p^T = -J_p
    const Basis rhs = j_left(-j_right(x)) * dd.asDiagonal();
    return (ax - rhs).norm() / denom;
}

MetricsReport report(const SpdOperator& op, const Basis& basis, const Eigen::VectorXd& d,
                     const Basis& iterate, double beta, const ReferenceSpectrum* reference) {
    MetricsReport r;
    r.residue = residue(op, basis, d);
    Eigen::MatrixXd c = symplectic_gram(basis);
    const Index p = d.size();
    for (Index j = 0; j < p; ++j) {
        c(j, p + j) -= 1.0;
        c(p + j, j) += 1.0;
    }
    r.feasibility = c.norm();
    r.objective = objective(op, iterate, beta);
    r.golub_werman = std::numeric_limits<double>::quiet_NaN();
    if (reference != nullptr) {
        const Eigen::VectorXd ref_d = reference->d.head(p);
        r.abs_error = (d - ref_d).cwiseAbs();
        r.rel_error = r.abs_error.cwiseQuotient(ref_d);
        const Basis x_ref = reference->x_ref.cols() == 2 * p
                                ? reference->x_ref
                                : leading_pairs(reference->s_full, p);
        r.golub_werman = golub_werman(basis, x_ref);
    }
    return r;
}

} // namespace sympen
