#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "sympen/operators.hpp"

namespace sympen {

enum class Variant {
    Basic,    // fixed beta, deterministic BB steps, single run to an absolute gradient tolerance
    Enhanced, // randomized steps, SRR restarts, adaptive beta, tolerance schedule
};

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view s);

struct SolverParams {
    std::optional<double> beta0;  // nullopt: tr(A)/(n-p+1)
    double gamma0 = 1e-4;
    double gamma_lo = 1e-8;
    double gamma_hi = 1e5;
    double xi_lo = 0.99;
    double xi_hi = 1.0;
    long k_max = 5000;
    double eps0 = 0.1;
    double eps_decay = 0.1;       // delta_eps
    double delta = 0.5;           // backtracking factor
    double lambda = 1e-8;         // sufficient decrease
    int memory = 50;              // L
    double eta = 1.1;
    int outer_max = 20;
    double target_tol = 1e-8;     // residue target ending the outer loop
    double basic_grad_tol = 1e-7; // ||G||_F threshold of the basic variant
    bool rank_safeguard = false;
    Variant variant = Variant::Enhanced;
    std::uint64_t seed = 0;

    // Throws ArgumentError when a bound is violated.
    void validate() const;
};

enum class SolveStatus { Converged, MaxIterations, NumericalFailure };

std::string_view to_string(SolveStatus s);

struct InnerRecord {
    long k = 0;           // global, monotone across stages
    long stage_k = 0;     // iteration index within the stage
    int stage = 0;
    double f = 0.0;
    double gnorm = 0.0;
    double ax_norm = 0.0;
    double gamma = 0.0;   // step before backtracking
    double step = 0.0;    // accepted delta^t gamma
    int backtracks = 0;
    bool capped = false;
    bool safeguarded = false;
    double beta = 0.0;
    double window_max = 0.0; // GLL reference at this iteration
};

struct StageRecord {
    int stage = 0;
    double beta = 0.0;
    double eps = 0.0;
    long iterations = 0;
    bool reached_tol = false;
    double final_gnorm = 0.0;
    double final_ax_norm = 0.0;
    double sigma_min_start = 0.0; // singular values of the stage's starting point
    double sigma_max_start = 0.0;
    Eigen::VectorXd ritz;
    double residue = 0.0;
    bool srr_retried = false;
    double elapsed_seconds = 0.0; // cumulative since solve() started
};

struct SolveTrace {
    std::vector<InnerRecord> inner;
    std::vector<StageRecord> stages;
};

struct SympEigResult {
    Eigen::VectorXd eigenvalues; // ascending
    Basis eigenbasis;            // symplectic, 2n x 2p
    Basis x;                     // last penalty iterate
    double beta = 0.0;           // penalty parameter x was computed with
    SolveStatus status = SolveStatus::MaxIterations;
    std::string message;
    long iterations = 0;         // inner iterations over all stages
    double residue = 0.0;
    double feasibility = 0.0;
    double seconds = 0.0;
    SolveTrace trace;
};

// tr(A) / (n - p + 1). Requires p < n.
double beta_suggest(const SpdOperator& op, Index p);

// (3 + sqrt 5)/2 * d_p.
double beta_best(double d_p);

// min(gamma, 0.9 sigma_min(X) / ||G||_2).
double rank_safeguard(const Basis& x, const Basis& g, double gamma);

struct BasicRun {
    Basis x;               // last iterate
    double f = 0.0;        // f_beta(x)
    double gnorm = 0.0;    // ||grad f_beta(x)||_F
    long iterations = 0;
    SolveStatus status = SolveStatus::MaxIterations;
    std::string message;
    SolveTrace trace;      // inner records only
};

// Fixed-beta BB / GLL descent from x0 without step randomization, stopped at
// ||G||_F < params.basic_grad_tol or params.k_max. No eigenvalue extraction.
BasicRun solve_basic(const SpdOperator& op, const Basis& x0, double beta,
                     const SolverParams& params);

// Smallest symplectic eigenvalues of A by trace-penalty minimization.
// Starts from the canonical frame unless `x0` is given.
SympEigResult solve(const SpdOperator& op, Index p, const SolverParams& params,
                    const std::optional<Basis>& x0 = std::nullopt);

} // namespace sympen
