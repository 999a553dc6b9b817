#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include <Eigen/Dense>

#include "sympen/operators.hpp"
#include "sympen/oracle.hpp"

namespace sympen {

enum class Family { Dense, Sparse, SparsePlusLowRank, PrescribedSpectrum };

std::string_view to_string(Family f);
Family parse_family(std::string_view s);

struct GeneratorSpec {
    Family family = Family::Dense;
    Index n = 0;
    std::optional<double> density;    // default 10/n, capped at 1
    Index rank = 10;                  // m, width of the low-rank factor
    std::uint64_t seed = 0;
    std::optional<Eigen::VectorXd> spectrum; // prescribed family; default d_i = i

    double resolved_density() const;
    void validate() const;
};

struct GeneratedInstance {
    SpdOperator op;
    std::optional<ReferenceSpectrum> reference; // prescribed family only
};

// A = c N N^T + lambda I with N_ij ~ U[-1, 1], affinely mapped so the extreme
// eigenvalues are (1, n).
SpdOperator gen_dense(Index n, std::uint64_t seed);

// Random sparse R at density sigma/2, sym(R) = (R + R^T)/2, shifted to be
// positive definite and affinely mapped to extreme eigenvalues (1, n).
SpdOperator gen_sparse(Index n, double density, std::uint64_t seed);

// B from gen_sparse plus C C^T with C_ij ~ U[-1, 1] scaled so
// sigma_max(C C^T) = n. Kept in factored form.
SpdOperator gen_slr(Index n, double density, Index rank, std::uint64_t seed);

// A = S^{-T} (D (+) D) S^{-1} with S = exp(J H) random symplectic; the exact
// Williamson form is returned alongside.
GeneratedInstance gen_prescribed(Index n, const Eigen::VectorXd& d_hat, std::uint64_t seed);

GeneratedInstance generate(const GeneratorSpec& request);

// Extreme eigenvalues of a symmetric operator: dense eigensolver for
// 2n <= kDenseBudget, Lanczos with full reorthogonalization above it.
std::pair<double, double> extreme_eigenvalues(const SpdOperator& op, std::uint64_t seed = 0);

// The matrix-free branch of extreme_eigenvalues, usable at any size.
std::pair<double, double> lanczos_extremes(const SpdOperator& op, std::uint64_t seed = 0);

} // namespace sympen
