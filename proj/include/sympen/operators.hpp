#pragma once

#include <cstdint>
#include <string_view>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace sympen {

using Index = Eigen::Index;

// A dense 2n x 2p column block: iterates, eigenbases, search directions.
// Finite entries and an even column count are checked at module boundaries
// with check_basis().
using Basis = Eigen::MatrixXd;

// Compressed sparse row storage; both triangles of a symmetric matrix are kept.
using SparseCsr = Eigen::SparseMatrix<double, Eigen::RowMajor, std::int64_t>;

enum class OperatorKind { Dense, SparseCsr, SparsePlusLowRank };

std::string_view to_string(OperatorKind kind);

// Matrix-free symmetric positive-definite operator A of size 2n x 2n.
//
// Immutable after construction; apply() is safe to call concurrently.
// Positive definiteness is an input contract and is only verified on demand
// (see check_spd_dense() and spd_probe()).
class SpdOperator {
public:
    static SpdOperator dense(Eigen::MatrixXd a);
    static SpdOperator sparse(SparseCsr b);
    // A = B + C * C^T, with C of size 2n x m. C * C^T is never formed.
    static SpdOperator sparse_plus_low_rank(SparseCsr b, Eigen::MatrixXd c);

    OperatorKind kind() const noexcept { return kind_; }
    Index half_dim() const noexcept { return n_; }
    Index dim() const noexcept { return 2 * n_; }

    // A * X. Throws ArgumentError unless X has 2n rows and at most 2n columns.
    Basis apply(const Basis& x) const;

    // Multiply-add count of apply() on a block with `cols` columns.
    double apply_flops(Index cols) const;

    // Stored nonzeros of the sparse part (dense: all (2n)^2 entries).
    Index nnz() const;

    double trace() const;
    double frobenius_norm() const;
    Eigen::MatrixXd densify() const;

    const Eigen::MatrixXd& dense_matrix() const { return dense_; }
    const SparseCsr& sparse_part() const { return sparse_; }
    const Eigen::MatrixXd& low_rank_factor() const { return factor_; }

private:
    SpdOperator() = default;

    OperatorKind kind_ = OperatorKind::Dense;
    Index n_ = 0;
    Eigen::MatrixXd dense_;
    SparseCsr sparse_;
    Eigen::MatrixXd factor_;
};

// J_k * X for the Poisson matrix J_k = [[0, I], [-I, 0]], as a row block swap.
Basis j_left(const Basis& x);
Basis j_left(const Basis& x, Index k);

// X * J_p, as a column block swap.
Basis j_right(const Basis& x);
Basis j_right(const Basis& x, Index p);

// Dense J_k. Reference use only (tests, small factorizations); the solver
// path never materializes it.
Eigen::MatrixXd poisson_matrix(Index k);

// X^T J_n X, skew-symmetrized.
Eigen::MatrixXd symplectic_gram(const Basis& x);

// Columns 1..p and n+1..n+p of I_{2n}.
Basis canonical_frame(Index n, Index p);

// Throws ArgumentError for non-finite entries or an odd column count.
void check_basis(const Basis& x, std::string_view what);

// Largest |<u, A v> - <v, A u>| / (||A u|| ||v||) over random probes.
double symmetry_defect(const SpdOperator& op, std::uint64_t seed, int probes = 8);

// True when <u, A u> > 0 on all random probes.
bool spd_probe(const SpdOperator& op, std::uint64_t seed, int probes = 8);

// Cholesky of the densified operator. O(n^3); for the `check` verb and tests.
bool check_spd_dense(const SpdOperator& op);

} // namespace sympen
