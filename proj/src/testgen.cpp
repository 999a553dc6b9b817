#include "sympen/testgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_set>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "sympen/errors.hpp"
#include "sympen/rng.hpp"

namespace sympen {

namespace {

// Stream ids keep the generators' random draws independent for a shared seed.
enum Stream : std::uint64_t { kDenseStream = 11, kSparseStream = 12, kFactorStream = 13,
                              kPrescribedStream = 14, kLanczosStream = 15 };

std::pair<double, double> affine_targets(double lo, double hi, double target_lo,
                                         double target_hi) {
    if (hi - lo <= 0.0) {
        if (target_hi == target_lo) {
            return {0.0, target_lo};
        }
        throw NumericalError("generator: degenerate spectrum (sigma_max == sigma_min)");
    }
    const double c = (target_hi - target_lo) / (hi - lo);
    return {c, target_lo - c * lo};
}

std::pair<double, double> tridiagonal_extremes(const Eigen::VectorXd& alpha,
                                               const Eigen::VectorXd& beta, Index m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
    tri.computeFromTridiagonal(alpha.head(m), beta.head(std::max<Index>(m - 1, 0)),
                               Eigen::EigenvaluesOnly);
    return {tri.eigenvalues().minCoeff(), tri.eigenvalues().maxCoeff()};
}

SparseCsr random_symmetric_sparse(Index n, double density, Rng& rng) {
    const Index dim = 2 * n;
    const double cells = static_cast<double>(dim) * static_cast<double>(dim);
    const auto count = static_cast<Index>(std::llround(0.5 * density * cells));
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(static_cast<std::size_t>(count) * 2);
    std::vector<Eigen::Triplet<double, std::int64_t>> triplets;
    triplets.reserve(static_cast<std::size_t>(2 * count));
    while (static_cast<Index>(seen.size()) < count) {
        const auto cell = rng.below(static_cast<std::uint64_t>(dim) * static_cast<std::uint64_t>(dim));
        if (!seen.insert(cell).second) {
            continue;
        }
        const auto i = static_cast<Index>(cell / static_cast<std::uint64_t>(dim));
        const auto j = static_cast<Index>(cell % static_cast<std::uint64_t>(dim));
        const double v = 0.5 * rng.uniform(-1.0, 1.0);
        triplets.emplace_back(i, j, v);
        triplets.emplace_back(j, i, v);
    }
    SparseCsr r(dim, dim);
    r.setFromTriplets(triplets.begin(), triplets.end());
    return r;
}

SparseCsr identity_csr(Index dim) {
    SparseCsr id(dim, dim);
    id.setIdentity();
    return id;
}

} // namespace

std::string_view to_string(Family f) {
    switch (f) {
    case Family::Dense:
        return "dense";
    case Family::Sparse:
        return "sparse";
    case Family::SparsePlusLowRank:
        return "slr";
    case Family::PrescribedSpectrum:
        return "prescribed";
    }
    return "unknown";
}

Family parse_family(std::string_view s) {
    if (s == "dense") {
        return Family::Dense;
    }
    if (s == "sparse") {
        return Family::Sparse;
    }
    if (s == "slr") {
        return Family::SparsePlusLowRank;
    }
    if (s == "prescribed") {
        return Family::PrescribedSpectrum;
    }
    throw ArgumentError("unknown matrix family '" + std::string(s) +
                        "' (expected dense, sparse, slr or prescribed)");
}

double GeneratorSpec::resolved_density() const {
    if (density) {
        return *density;
    }
    return std::min(1.0, 10.0 / static_cast<double>(n));
}

void GeneratorSpec::validate() const {
    if (n < 1) {
        throw ArgumentError("generator: n must be positive");
    }
    const double sigma = resolved_density();
    if (!(sigma > 0.0 && sigma <= 1.0)) {
        throw ArgumentError("generator: density must lie in (0, 1]");
    }
    if (rank < 1) {
        throw ArgumentError("generator: low-rank width m must be >= 1");
    }
    if (spectrum && spectrum->size() != n) {
        throw ArgumentError("generator: prescribed spectrum needs n = " + std::to_string(n) +
                            " values");
    }
}

// Lanczos with full reorthogonalization; stops once both extreme Ritz values
// settle to a relative change below 1e-10 over ten steps.
std::pair<double, double> lanczos_extremes(const SpdOperator& op, std::uint64_t seed) {
    const Index dim = op.dim();
    const Index steps = std::min<Index>(dim, 300);
    Rng rng = Rng::stream(seed, kLanczosStream);
    Eigen::MatrixXd q(dim, steps);
    Eigen::VectorXd alpha(steps);
    Eigen::VectorXd beta(steps);
    Eigen::VectorXd v = rng.uniform_matrix(dim, 1);
    v.normalize();
    std::pair<double, double> last{0.0, 0.0};
    Index m = 0;
    while (m < steps) {
        q.col(m) = v;
        Eigen::VectorXd w = op.apply(v);
        alpha(m) = v.dot(w);
        for (int pass = 0; pass < 2; ++pass) {
            w -= q.leftCols(m + 1) * (q.leftCols(m + 1).transpose() * w);
        }
        beta(m) = w.norm();
        ++m;
        if (beta(m - 1) < 1e-12 * std::abs(alpha(m - 1))) {
            break;
        }
        if (m % 10 == 0) {
            const auto now = tridiagonal_extremes(alpha, beta, m);
            const bool settled = std::abs(now.first - last.first) <= 1e-10 * now.second &&
                                 std::abs(now.second - last.second) <= 1e-10 * now.second;
            last = now;
            if (settled) {
                break;
            }
        }
        v = w / beta(m - 1);
    }
    return tridiagonal_extremes(alpha, beta, m);
}

std::pair<double, double> extreme_eigenvalues(const SpdOperator& op, std::uint64_t seed) {
    if (op.dim() <= kDenseBudget) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(op.densify(), Eigen::EigenvaluesOnly);
        if (eig.info() != Eigen::Success) {
            throw NumericalError("extreme_eigenvalues: eigensolver failed");
        }
        return {eig.eigenvalues().minCoeff(), eig.eigenvalues().maxCoeff()};
    }
    return lanczos_extremes(op, seed);
}

SpdOperator gen_dense(Index n, std::uint64_t seed) {
    if (n < 1 || 2 * n > kDenseBudget) {
        throw ArgumentError("gen_dense: need 1 <= n and 2n <= " + std::to_string(kDenseBudget));
    }
    Rng rng = Rng::stream(seed, kDenseStream);
    const Eigen::MatrixXd factor = rng.uniform_matrix(2 * n, 2 * n);
    Eigen::MatrixXd a = factor * factor.transpose();
    a = 0.5 * (a + a.transpose()).eval();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a, Eigen::EigenvaluesOnly);
    const auto [c, shift] = affine_targets(eig.eigenvalues().minCoeff(),
                                           eig.eigenvalues().maxCoeff(), 1.0,
                                           static_cast<double>(n));
    a *= c;
    a.diagonal().array() += shift;
    return SpdOperator::dense(std::move(a));
}

SpdOperator gen_sparse(Index n, double density, std::uint64_t seed) {
    if (n < 1) {
        throw ArgumentError("gen_sparse: n must be positive");
    }
    if (!(density > 0.0 && density <= 1.0)) {
        throw ArgumentError("gen_sparse: density must lie in (0, 1]");
    }
    const double dim = 2.0 * static_cast<double>(n);
    if (density * dim * dim < dim) {
        throw ArgumentError("gen_sparse: density too low for a 2n x 2n matrix");
    }
    Rng rng = Rng::stream(seed, kSparseStream);
    SparseCsr sym = random_symmetric_sparse(n, density, rng);

    // Shift so that lambda_min = 1, then map the extremes to (1, n).
    const auto [lo, hi] = extreme_eigenvalues(SpdOperator::sparse(sym), seed);
    SparseCsr shifted = sym + (1.0 - lo) * identity_csr(sym.rows());
    const auto [c, shift] = affine_targets(1.0, hi + (1.0 - lo), 1.0, static_cast<double>(n));
    SparseCsr a = c * shifted + shift * identity_csr(sym.rows());
    a.prune(0.0);
    return SpdOperator::sparse(std::move(a));
}

SpdOperator gen_slr(Index n, double density, Index rank, std::uint64_t seed) {
    if (rank < 1 || rank >= 2 * n) {
        throw ArgumentError("gen_slr: need 1 <= m < 2n");
    }
    SpdOperator b = gen_sparse(n, density, seed);
    Rng rng = Rng::stream(seed, kFactorStream);
    Eigen::MatrixXd factor = rng.uniform_matrix(2 * n, rank);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(factor);
    const double smax = svd.singularValues()(0);
    if (!(smax > 0.0)) {
        throw NumericalError("gen_slr: zero low-rank factor");
    }
    factor *= std::sqrt(static_cast<double>(n)) / smax;
    return SpdOperator::sparse_plus_low_rank(b.sparse_part(), std::move(factor));
}

GeneratedInstance gen_prescribed(Index n, const Eigen::VectorXd& d_hat, std::uint64_t seed) {
    if (n < 1 || 2 * n > kDenseBudget) {
        throw ArgumentError("gen_prescribed: need 1 <= n and 2n <= " +
                            std::to_string(kDenseBudget));
    }
    if (d_hat.size() != n || !(d_hat.minCoeff() > 0.0)) {
        throw ArgumentError("gen_prescribed: need n positive symplectic eigenvalues");
    }
    Rng rng = Rng::stream(seed, kPrescribedStream);
    const Eigen::MatrixXd s = random_symplectic(n, rng);

    // S^{-1} = J^T S^T J = -J S^T J
    const Eigen::MatrixXd s_inv = -j_right(j_left(Eigen::MatrixXd(s.transpose())));
    Eigen::VectorXd dd(2 * n);
    dd << d_hat, d_hat;
    Eigen::MatrixXd a = s_inv.transpose() * dd.asDiagonal() * s_inv;
    a = 0.5 * (a + a.transpose()).eval();
    if (!a.allFinite()) {
        throw NumericalError("gen_prescribed: non-finite matrix");
    }

    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index i, Index j) { return d_hat(i) < d_hat(j); });
    ReferenceSpectrum ref;
    ref.d.resize(n);
    ref.s_full.resize(2 * n, 2 * n);
    for (Index j = 0; j < n; ++j) {
        const Index src = order[static_cast<std::size_t>(j)];
        ref.d(j) = d_hat(src);
        ref.s_full.col(j) = s.col(src);
        ref.s_full.col(n + j) = s.col(n + src);
    }
    return {SpdOperator::dense(std::move(a)), std::move(ref)};
}

GeneratedInstance generate(const GeneratorSpec& request) {
    request.validate();
    switch (request.family) {
    case Family::Dense:
        return {gen_dense(request.n, request.seed), std::nullopt};
    case Family::Sparse:
        return {gen_sparse(request.n, request.resolved_density(), request.seed), std::nullopt};
    case Family::SparsePlusLowRank:
        return {gen_slr(request.n, request.resolved_density(), request.rank, request.seed), std::nullopt};
    case Family::PrescribedSpectrum: {
        Eigen::VectorXd d = request.spectrum
                                ? *request.spectrum
                                : Eigen::VectorXd::LinSpaced(request.n, 1.0,
                                                             static_cast<double>(request.n));
        return gen_prescribed(request.n, d, request.seed);
    }
    }
    throw ArgumentError("generate: unknown family");
}

} // namespace sympen
