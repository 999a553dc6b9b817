#pragma once

#include <Eigen/Dense>

#include "sympen/operators.hpp"

namespace sympen {

// Orthogonal Q and d >= 0 (ascending) with Q^T K Q = [[0, D], [-D, 0]] for a
// skew-symmetric 2m x 2m matrix K. Computed from the real Schur form of K:
// each 2x2 block is sign-normalized so its upper off-diagonal is positive,
// blocks are sorted by d, and the interleaved block columns are gathered into
// [first of each pair | second of each pair].
struct SkewBlockForm {
    Eigen::MatrixXd q;
    Eigen::VectorXd d;
};

SkewBlockForm skew_block_form(const Eigen::MatrixXd& k);

// X = S * diag(sigma, sigma) * T^T with S^T J_n S = J_p and T orthogonal.
struct SsvdFactors {
    Basis s;
    Eigen::VectorXd sigma;  // p values, ascending
    Eigen::MatrixXd t;

    Eigen::VectorXd sigma_doubled() const;
};

// Symplectic SVD of a 2n x 2p matrix. Throws RankDeficientError when some
// symplectic singular value is <= rel_tol * ||X||_2.
SsvdFactors ssvd(const Basis& x, double rel_tol = 1e-10);

// S^T M S = diag(d) (+) diag(d) and S^T J S = J for dense SPD M (2k x 2k).
struct WilliamsonForm {
    Eigen::MatrixXd s;
    Eigen::VectorXd d;  // ascending
};

WilliamsonForm williamson_small(const Eigen::MatrixXd& m);

// Symplectic Rayleigh-Ritz: S_fin in Sp(2p, 2n) and Ritz values theta
// (ascending) with S_fin^T A S_fin = diag(theta) (+) diag(theta).
struct RitzPairs {
    Basis s;
    Eigen::VectorXd theta;
};

RitzPairs srr(const SpdOperator& op, const Basis& x);

// S * diag(sqrt(max(1 - d/beta, 1e-12))) with the doubled column pattern.
Basis restart_point(const Basis& s, const Eigen::VectorXd& d, double beta);

} // namespace sympen
