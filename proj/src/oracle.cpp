#include "sympen/oracle.hpp"

#include <complex>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <unsupported/Eigen/MatrixFunctions>

#include "sympen/errors.hpp"
#include "sympen/symplectic_factor.hpp"

namespace sympen {

ReferenceSpectrum reference(const SpdOperator& op, Index p) {
    const Index n = op.half_dim();
    if (p < 1 || p > n) {
        throw ArgumentError("reference: need 1 <= p <= n, got p=" + std::to_string(p) +
                            " n=" + std::to_string(n));
    }
    if (op.dim() > kDenseBudget) {
        throw ArgumentError("reference: 2n = " + std::to_string(op.dim()) +
                            " exceeds the dense budget of " + std::to_string(kDenseBudget) +
                            "; reduce n");
    }
    WilliamsonForm w = williamson_small(op.densify());
    ReferenceSpectrum ref;
    ref.x_ref = leading_pairs(w.s, p);
    ref.d = std::move(w.d);
    ref.s_full = std::move(w.s);
    return ref;
}

Basis leading_pairs(const Eigen::MatrixXd& s_full, Index p) {
    const Index n = s_full.cols() / 2;
    Basis x(s_full.rows(), 2 * p);
    x.leftCols(p) = s_full.leftCols(p);
    x.rightCols(p) = s_full.middleCols(n, p);
    return x;
}

Eigen::MatrixXd random_symplectic(Index n, Rng& rng, double scale) {
    Eigen::MatrixXd h = rng.uniform_matrix(2 * n, 2 * n);
    h = 0.5 * (h + h.transpose()).eval();
    // ||J H||_2 = ||H||_2 since J is orthogonal.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h, Eigen::EigenvaluesOnly);
    const double norm = eig.eigenvalues().cwiseAbs().maxCoeff();
    if (norm > 0.0) {
        h *= scale / norm;
    }
    const Eigen::MatrixXd hamiltonian = j_left(h);
    Eigen::MatrixXd s = hamiltonian.exp();
    if (!s.allFinite()) {
        throw NumericalError("random_symplectic: matrix exponential failed");
    }
    return s;
}

Basis random_symplectic_frame(Index n, Index p, Rng& rng, double scale) {
    return leading_pairs(random_symplectic(n, rng, scale), p);
}

Eigen::MatrixXd random_orthosymplectic(Index p, Rng& rng) {
    Eigen::MatrixXcd z(p, p);
    for (Index j = 0; j < p; ++j) {
        for (Index i = 0; i < p; ++i) {
            z(i, j) = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        }
    }
    const Eigen::MatrixXcd u = Eigen::HouseholderQR<Eigen::MatrixXcd>(z).householderQ();
    Eigen::MatrixXd t(2 * p, 2 * p);
    t.topLeftCorner(p, p) = u.real();
    t.topRightCorner(p, p) = -u.imag();
    t.bottomLeftCorner(p, p) = u.imag();
    t.bottomRightCorner(p, p) = u.real();
    return t;
}

} // namespace sympen
