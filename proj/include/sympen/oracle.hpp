#pragma once

#include <Eigen/Dense>

#include "sympen/operators.hpp"
#include "sympen/rng.hpp"

namespace sympen {

// Largest 2n the dense reference path accepts.
inline constexpr Index kDenseBudget = 4000;

// Full Williamson form of A and the reference basis for its p smallest
// symplectic eigenvalues: x_ref = [S(:, 1..p), S(:, n+1..n+p)].
struct ReferenceSpectrum {
    Eigen::VectorXd d;       // n values, ascending
    Eigen::MatrixXd s_full;  // 2n x 2n symplectic, s_full^T A s_full = D (+) D
    Basis x_ref;             // 2n x 2p

    Eigen::VectorXd smallest(Index p) const { return d.head(p); }
};

// Densifies A and runs williamson_small on it. Throws ArgumentError when
// 2n exceeds kDenseBudget.
ReferenceSpectrum reference(const SpdOperator& op, Index p);

// Reference basis columns for the p smallest pairs of a full symplectic S.
Basis leading_pairs(const Eigen::MatrixXd& s_full, Index p);

// exp(J_n H) for a random symmetric H scaled so ||J_n H||_2 = scale.
Eigen::MatrixXd random_symplectic(Index n, Rng& rng, double scale = 2.0);

// Random point of Sp(2p, 2n): exp(J_n H) times the canonical frame.
Basis random_symplectic_frame(Index n, Index p, Rng& rng, double scale = 2.0);

// Random 2p x 2p orthogonal symplectic matrix [[Re U, -Im U], [Im U, Re U]]
// built from a random unitary U.
Eigen::MatrixXd random_orthosymplectic(Index p, Rng& rng);

} // namespace sympen
