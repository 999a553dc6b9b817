#pragma once

#include <deque>
#include <functional>

#include "sympen/operators.hpp"
#include "sympen/rng.hpp"

namespace sympen {

// Trailing window of the last L+1 objective values for the nonmonotone
// line search.
class ObjectiveWindow {
public:
    explicit ObjectiveWindow(int memory) : capacity_(static_cast<std::size_t>(memory) + 1) {}

    void push(double f) {
        values_.push_back(f);
        if (values_.size() > capacity_) {
            values_.pop_front();
        }
    }
    void clear() { values_.clear(); }
    double max() const;
    std::size_t size() const { return values_.size(); }
    bool empty() const { return values_.empty(); }

private:
    std::size_t capacity_;
    std::deque<double> values_;
};

// Iterate and gradient differences from the previous step plus the
// nonmonotone window. k counts iterations within the current stage.
struct StepState {
    explicit StepState(int memory) : window(memory) {}

    Basis s_prev; // X^{k} - X^{k-1}
    Basis z_prev; // G^{k} - G^{k-1}
    long k = 0;
    ObjectiveWindow window;
};

// Alternating Barzilai-Borwein step: <S,S>/|<S,Z>| for even k, |<S,Z>|/<Z,Z>
// for odd k. Returns `fallback` when the chosen denominator is below 1e-30.
double bb_step(const StepState& state, double fallback);
double bb_step(const Basis& s, const Basis& z, long k, double fallback);

// xi * max(lo, min(hi, gamma)) with xi ~ U[xi_lo, xi_hi].
double clamp_randomize(double gamma, double gamma_lo, double gamma_hi, double xi_lo,
                       double xi_hi, Rng& rng);

// max(lo, min(hi, gamma)), no randomization.
double clamp_step(double gamma, double gamma_lo, double gamma_hi);

struct LineSearchResult {
    int backtracks = 0;    // t
    double step = 0.0;     // delta^t * gamma
    Basis x_next;
    double f_next = 0.0;
    bool capped = false;   // backtracking cap hit; last trial accepted
};

inline constexpr int kMaxBacktracks = 60;

// Smallest t >= 0 with
//   f(X - delta^t gamma G) <= reference - lambda delta^t gamma ||G||_F^2
// where `reference` is the window maximum. Overflowing trials are rejected;
// a non-finite value at the cap raises NumericalError.
LineSearchResult gll_search(const std::function<double(const Basis&)>& f_eval, const Basis& x,
                            const Basis& g, double gamma, double delta, double lambda,
                            double reference);

} // namespace sympen
