#include "sympen/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>
#include <tuple>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "sympen/errors.hpp"
#include "sympen/metrics.hpp"
#include "sympen/penalty.hpp"
#include "sympen/rng.hpp"
#include "sympen/stepper.hpp"
#include "sympen/symplectic_factor.hpp"

namespace sympen {

std::string_view to_string(Variant v) {
    return v == Variant::Basic ? "basic" : "enhanced";
}

Variant parse_variant(std::string_view s) {
    if (s == "basic") {
        return Variant::Basic;
    }
    if (s == "enhanced") {
        return Variant::Enhanced;
    }
    throw ArgumentError("unknown solver variant '" + std::string(s) +
                        "' (expected basic or enhanced)");
}

std::string_view to_string(SolveStatus s) {
    switch (s) {
    case SolveStatus::Converged:
        return "converged";
    case SolveStatus::MaxIterations:
        return "max_iterations";
    case SolveStatus::NumericalFailure:
        return "numerical_failure";
    }
    return "unknown";
}

void SolverParams::validate() const {
    auto require = [](bool ok, const std::string& what) {
        if (!ok) {
            throw ArgumentError("invalid solver parameters: " + what);
        }
    };
    require(!beta0 || *beta0 > 0.0, "beta0 must be positive");
    require(gamma_lo > 0.0 && gamma_lo <= gamma0 && gamma0 <= gamma_hi,
            "need 0 < gamma_lo <= gamma0 <= gamma_hi");
    require(xi_lo > 0.0 && xi_lo <= xi_hi, "need 0 < xi_lo <= xi_hi");
    require(k_max >= 1, "k_max must be >= 1");
    require(eps0 > 0.0, "eps0 must be positive");
    require(eps_decay > 0.0 && eps_decay < 1.0, "need 0 < eps_decay < 1");
    require(delta > 0.0 && delta < 1.0, "need 0 < delta < 1");
    require(lambda > 0.0 && lambda < 1.0, "need 0 < lambda < 1");
    require(memory >= 0, "memory must be >= 0");
    require(eta > 1.0, "eta must exceed 1");
    require(outer_max >= 1, "outer_max must be >= 1");
    require(target_tol > 0.0, "target_tol must be positive");
    require(basic_grad_tol > 0.0, "basic_grad_tol must be positive");
}

double beta_suggest(const SpdOperator& op, Index p) {
    const Index n = op.half_dim();
    if (p < 1 || p >= n) {
        throw ArgumentError("beta_suggest: need 1 <= p < n, got p=" + std::to_string(p) +
                            " n=" + std::to_string(n));
    }
    return op.trace() / static_cast<double>(n - p + 1);
}

double beta_best(double d_p) {
    return 0.5 * (3.0 + std::sqrt(5.0)) * d_p;
}

double rank_safeguard(const Basis& x, const Basis& g, double gamma) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> xx(x.transpose() * x, Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> gg(g.transpose() * g, Eigen::EigenvaluesOnly);
    const double sigma_min = std::sqrt(std::max(0.0, xx.eigenvalues().minCoeff()));
    const double g_norm = std::sqrt(std::max(0.0, gg.eigenvalues().maxCoeff()));
    if (!(g_norm > 0.0)) {
        return gamma;
    }
    return std::min(gamma, 0.9 * sigma_min / g_norm);
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct StageOutcome {
    Basis x;
    PenaltyEval eval;
    bool reached_tol = false;
    long iterations = 0;
};

class StageRunner {
public:
    StageRunner(const SpdOperator& op, const SolverParams& params, Rng& rng, SolveTrace& trace)
        : op_(op), params_(params), rng_(rng), trace_(trace) {}

    // One run of the BB / GLL inner loop at fixed beta. The stopping test is
    // ||G|| < eps * max(1, ||AX||) when `relative`, ||G|| < eps otherwise.
    StageOutcome run(const Basis& x_start, double beta, double eps, bool relative,
                     bool randomized, int stage) {
        StepState state(params_.memory);
        StageOutcome out;
        out.x = x_start;
        out.eval = grad(op_, out.x, beta);
        state.window.push(out.eval.value);

        PenaltyEval trial_eval;
        const auto f_eval = [&](const Basis& trial) {
            trial_eval = grad(op_, trial, beta);
            return trial_eval.value;
        };

        for (long k = 0;; ++k) {
            const double gnorm = out.eval.gradient.norm();
            const double ax_norm = out.eval.ax.norm();
            const double threshold = relative ? eps * std::max(1.0, ax_norm) : eps;
            out.iterations = k;
            if (gnorm < threshold) {
                out.reached_tol = true;
                break;
            }
            if (k >= params_.k_max) {
                break;
            }
            if (!std::isfinite(gnorm)) {
                throw NumericalError("non-finite gradient at iteration " + std::to_string(k));
            }

            double gamma = params_.gamma0;
            if (k > 0) {
                state.k = k;
                const double bb = bb_step(state, params_.gamma_hi);
                gamma = randomized ? clamp_randomize(bb, params_.gamma_lo, params_.gamma_hi,
                                                     params_.xi_lo, params_.xi_hi, rng_)
                                   : clamp_step(bb, params_.gamma_lo, params_.gamma_hi);
            }
            bool safeguarded = false;
            if (params_.rank_safeguard) {
                const double capped = rank_safeguard(out.x, out.eval.gradient, gamma);
                safeguarded = capped < gamma;
                gamma = capped;
            }

            const double reference = state.window.max();
            LineSearchResult ls = gll_search(f_eval, out.x, out.eval.gradient, gamma,
                                             params_.delta, params_.lambda, reference);

            InnerRecord rec;
            rec.k = global_k_++;
            rec.stage_k = k;
            rec.stage = stage;
            rec.f = out.eval.value;
            rec.gnorm = gnorm;
            rec.ax_norm = ax_norm;
            rec.gamma = gamma;
            rec.step = ls.step;
            rec.backtracks = ls.backtracks;
            rec.capped = ls.capped;
            rec.safeguarded = safeguarded;
            rec.beta = beta;
            rec.window_max = reference;
            trace_.inner.push_back(rec);

            state.s_prev = ls.x_next - out.x;
            state.z_prev = trial_eval.gradient - out.eval.gradient;
            state.window.push(ls.f_next);
            out.x = std::move(ls.x_next);
            out.eval = std::move(trial_eval);
        }
        return out;
    }

private:
    const SpdOperator& op_;
    const SolverParams& params_;
    Rng& rng_;
    SolveTrace& trace_;
    long global_k_ = 0;
};

std::pair<double, double> extreme_singular_values(const Basis& x) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(x);
    const auto& s = svd.singularValues();
    return {s.minCoeff(), s.maxCoeff()};
}

double symplectic_defect(const Basis& s) {
    Eigen::MatrixXd c = symplectic_gram(s);
    const Index p = s.cols() / 2;
    for (Index j = 0; j < p; ++j) {
        c(j, p + j) -= 1.0;
        c(p + j, j) += 1.0;
    }
    return c.norm();
}

Basis perturb(const Basis& x, Rng& rng) {
    const double scale = 1e-6 * x.norm() / std::sqrt(static_cast<double>(x.size()));
    return x + scale * rng.uniform_matrix(x.rows(), x.cols());
}

} // namespace

BasicRun solve_basic(const SpdOperator& op, const Basis& x0, double beta,
                     const SolverParams& params) {
    params.validate();
    if (!(beta > 0.0)) {
        throw ArgumentError("solve_basic: beta must be positive");
    }
    if (x0.rows() != op.dim() || x0.cols() < 2 || x0.cols() % 2 != 0 || x0.cols() > op.dim()) {
        throw ArgumentError("solve_basic: initial basis must be " + std::to_string(op.dim()) +
                            " x 2p with 1 <= p <= n");
    }
    check_basis(x0, "solve_basic: initial basis");

    BasicRun run;
    Rng rng = Rng::stream(params.seed, 1);
    StageRunner runner(op, params, rng, run.trace);
    try {
        StageOutcome out = runner.run(x0, beta, params.basic_grad_tol, false, false, 0);
        run.x = std::move(out.x);
        run.f = out.eval.value;
        run.gnorm = out.eval.gradient.norm();
        run.iterations = out.iterations;
        run.status = out.reached_tol ? SolveStatus::Converged : SolveStatus::MaxIterations;
        run.message = out.reached_tol ? "gradient tolerance reached" : "iteration limit reached";
    } catch (const NumericalError& e) {
        run.status = SolveStatus::NumericalFailure;
        run.message = e.what();
        run.iterations = static_cast<long>(run.trace.inner.size());
    }
    return run;
}

SympEigResult solve(const SpdOperator& op, Index p, const SolverParams& params,
                    const std::optional<Basis>& x0) {
    params.validate();
    const Index n = op.half_dim();
    if (p < 1 || p >= n) {
        throw ArgumentError("solve: need 1 <= p < n, got p=" + std::to_string(p) +
                            " n=" + std::to_string(n));
    }
    Basis x_bar = x0 ? *x0 : canonical_frame(n, p);
    if (x_bar.rows() != op.dim() || x_bar.cols() != 2 * p) {
        throw ArgumentError("solve: initial basis must be " + std::to_string(op.dim()) + " x " +
                            std::to_string(2 * p));
    }
    check_basis(x_bar, "solve: initial basis");

    const auto start = Clock::now();
    SympEigResult result;
    Rng rng = Rng::stream(params.seed, 1);
    StageRunner runner(op, params, rng, result.trace);

    double beta = params.beta0 ? *params.beta0 : beta_suggest(op, p);
    double eps = params.variant == Variant::Basic ? params.basic_grad_tol : params.eps0;
    const bool enhanced = params.variant == Variant::Enhanced;
    const int stages = enhanced ? params.outer_max : 1;

    auto finish = [&](SolveStatus status, std::string message) {
        result.status = status;
        result.message = std::move(message);
        result.seconds = seconds_since(start);
        result.iterations = static_cast<long>(result.trace.inner.size());
        return result;
    };

    for (int stage = 0; stage < stages; ++stage) {
        StageRecord rec;
        rec.stage = stage;
        rec.beta = beta;
        rec.eps = eps;
        std::tie(rec.sigma_min_start, rec.sigma_max_start) = extreme_singular_values(x_bar);

        StageOutcome out;
        RitzPairs ritz;
        bool ok = false;
        for (int attempt = 0; attempt < 2 && !ok; ++attempt) {
            if (attempt == 1) {
                rec.srr_retried = true;
                x_bar = perturb(x_bar, rng);
            }
            try {
                out = runner.run(x_bar, beta, eps, enhanced, enhanced, stage);
                ritz = srr(op, out.x);
                ok = true;
            } catch (const NumericalError& e) {
                if (attempt == 1) {
                    rec.iterations = out.iterations;
                    result.trace.stages.push_back(rec);
                    return finish(SolveStatus::NumericalFailure, e.what());
                }
            }
        }

        rec.iterations = out.iterations;
        rec.reached_tol = out.reached_tol;
        rec.final_gnorm = out.eval.gradient.norm();
        rec.final_ax_norm = out.eval.ax.norm();
        rec.ritz = ritz.theta;
        rec.residue = residue(op, ritz.s, ritz.theta);
        rec.elapsed_seconds = seconds_since(start);
        result.trace.stages.push_back(rec);

        result.eigenvalues = ritz.theta;
        result.eigenbasis = ritz.s;
        result.x = out.x;
        result.beta = beta;
        result.residue = rec.residue;
        result.feasibility = symplectic_defect(ritz.s);

        if (!enhanced) {
            return finish(out.reached_tol ? SolveStatus::Converged : SolveStatus::MaxIterations,
                          out.reached_tol ? "gradient tolerance reached"
                                          : "iteration limit reached");
        }
        if (rec.residue <= params.target_tol) {
            return finish(SolveStatus::Converged, "residue target reached");
        }

        const double theta_p = ritz.theta(p - 1);
        double next_beta = params.eta * theta_p;
        if (next_beta < beta / 10.0) {
            next_beta = beta_best(theta_p);
        }
        beta = next_beta;
        x_bar = restart_point(ritz.s, ritz.theta, beta);
        eps = std::max(eps * params.eps_decay, 1e-14);
    }
    return finish(SolveStatus::MaxIterations, "outer iteration limit reached");
}

} // namespace sympen
