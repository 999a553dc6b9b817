#include "sympen/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sympen/errors.hpp"

namespace sympen {

namespace {
constexpr double kTinyDenominator = 1e-30;
} // namespace

double ObjectiveWindow::max() const {
    if (values_.empty()) {
        throw ArgumentError("objective window is empty");
    }
    return *std::max_element(values_.begin(), values_.end());
}

double bb_step(const Basis& s, const Basis& z, long k, double fallback) {
    if (s.size() == 0 || s.rows() != z.rows() || s.cols() != z.cols()) {
        throw ArgumentError("bb_step: iterate and gradient differences must be populated");
    }
    const double sz = std::abs(s.cwiseProduct(z).sum());
    if (k % 2 == 0) {
        const double ss = s.squaredNorm();
        return sz < kTinyDenominator ? fallback : ss / sz;
    }
    const double zz = z.squaredNorm();
    return zz < kTinyDenominator ? fallback : sz / zz;
}

double bb_step(const StepState& state, double fallback) {
    return bb_step(state.s_prev, state.z_prev, state.k, fallback);
}

double clamp_step(double gamma, double gamma_lo, double gamma_hi) {
    if (!(gamma_lo > 0.0) || !(gamma_lo <= gamma_hi)) {
        throw ArgumentError("step bounds must satisfy 0 < lo <= hi");
    }
    return std::max(gamma_lo, std::min(gamma_hi, gamma));
}

double clamp_randomize(double gamma, double gamma_lo, double gamma_hi, double xi_lo,
                       double xi_hi, Rng& rng) {
    const double clamped = clamp_step(gamma, gamma_lo, gamma_hi);
    if (!(xi_lo > 0.0) || !(xi_lo <= xi_hi)) {
        throw ArgumentError("randomization bounds must satisfy 0 < xi_lo <= xi_hi");
    }
    const double xi = rng.uniform(xi_lo, xi_hi);
    return xi * clamped;
}

LineSearchResult gll_search(const std::function<double(const Basis&)>& f_eval, const Basis& x,
                            const Basis& g, double gamma, double delta, double lambda,
                            double reference) {
    if (!(delta > 0.0 && delta < 1.0) || !(lambda > 0.0 && lambda < 1.0)) {
        throw ArgumentError("line search needs 0 < delta < 1 and 0 < lambda < 1");
    }
    if (!(gamma > 0.0)) {
        throw ArgumentError("line search needs a positive step, got " + std::to_string(gamma));
    }
    const double g_sq = g.squaredNorm();
    if (!(g_sq > 0.0) || !std::isfinite(g_sq)) {
        throw ArgumentError("line search needs a finite nonzero search direction");
    }

    LineSearchResult r;
    double step = gamma;
    for (int t = 0; t <= kMaxBacktracks; ++t, step *= delta) {
        Basis trial = x - step * g;
        const double f = f_eval(trial);
        const bool last = t == kMaxBacktracks;
        if (std::isfinite(f) && f <= reference - lambda * step * g_sq) {
            r.backtracks = t;
            r.step = step;
            r.x_next = std::move(trial);
            r.f_next = f;
            return r;
        }
        if (last) {
            if (!std::isfinite(f)) {
                throw NumericalError("line search: non-finite objective after " +
                                     std::to_string(kMaxBacktracks) + " backtracks");
            }
            r.backtracks = t;
            r.step = step;
            r.x_next = std::move(trial);
            r.f_next = f;
            r.capped = true;
        }
    }
    return r;
}

} // namespace sympen
