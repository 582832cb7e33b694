#include "wpt/safety.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace wpt {

void SarLimit::validate() const {
    if (!(i_max_const_a > 0.0) || !(window_s > 0.0)) {
        throw ConfigError("sar: current limit and window must be positive");
    }
}

SarWindow::SarWindow(SarLimit limit) : limit_(limit) { limit_.validate(); }

void SarWindow::update(double t_s, double i_amplitude_a, double dt_s) {
    if (!(dt_s > 0.0) || !std::isfinite(dt_s)) {
        throw ConfigError("sar update: dt must be positive");
    }
    if (!std::isfinite(i_amplitude_a) || i_amplitude_a < 0.0) {
        throw ConfigError("sar update: amplitude must be finite and non-negative");
    }
    if (started_ && t_s < now_ - 1e-12) {
        throw NonMonotoneTime("sar update at t=" + std::to_string(t_s) +
                              " s precedes current time " + std::to_string(now_) + " s");
    }
    started_ = true;
    const double i2dt = i_amplitude_a * i_amplitude_a * dt_s;
    entries_.push_back({t_s, dt_s, i2dt});
    integral_ += i2dt;
    now_ = t_s + dt_s;
    expire();

    // Running sums drift under long add/subtract streams; rebuild every so
    // often to keep the incremental integral honest.
    if (++ops_since_rebuild_ >= 4096) {
        integral_ = recompute_integral();
        ops_since_rebuild_ = 0;
    }
}

void SarWindow::expire() {
    const double cutoff = now_ - limit_.window_s;
    while (!entries_.empty() && entries_.front().t + entries_.front().dt <= cutoff) {
        integral_ -= entries_.front().i2dt;
        entries_.pop_front();
    }
    // An entry straddling the cutoff stays queued; the windowed integral
    // pro-rates it below.
}

double SarWindow::recompute_integral() const {
    double acc = 0.0;
    for (const Entry& e : entries_) {
        acc += e.i2dt;
    }
    return acc;
}

double SarWindow::mean_i2() const {
    const double cutoff = now_ - limit_.window_s;
    double acc = integral_;
    // Remove the out-of-window fraction of straddling entries (oldest first,
    // there is at most one unless dt spans several windows).
    for (const Entry& e : entries_) {
        if (e.t >= cutoff) {
            break;
        }
        const double outside = std::min(e.dt, cutoff - e.t);
        acc -= e.i2dt * (outside / e.dt);
    }
    return acc / limit_.window_s;
}

bool SarWindow::compliant() const {
    const double limit2 = limit_.i_max_const_a * limit_.i_max_const_a;
    return mean_i2() <= limit2 * (1.0 + 1e-9);
}

double SarWindow::margin() const {
    const double limit2 = limit_.i_max_const_a * limit_.i_max_const_a;
    return 1.0 - mean_i2() / limit2;
}

double SarWindow::headroom(double horizon_s) const {
    if (!(horizon_s > 0.0) || horizon_s > limit_.window_s + 1e-12) {
        throw ConfigError("sar headroom: horizon must lie in (0, window]");
    }
    const double w = limit_.window_s;
    const double budget = limit_.i_max_const_a * limit_.i_max_const_a * w;

    // A window ending tau seconds from now holds past(tau) from history plus
    // i^2 * tau from the candidate amplitude:
    //   i^2 <= (budget - past(tau)) / tau   for all tau in (0, horizon].
    // past(tau) is piecewise linear in tau (the sliding cutoff consumes one
    // rectangle at a time), so on each segment the bound is monotone and the
    // minimum over the continuum is attained at segment boundaries: entry
    // edge crossings and the horizon end.
    const double p0 = mean_i2() * w;

    std::vector<double> knots;
    knots.reserve(2 * entries_.size() + 1);
    for (const Entry& e : entries_) {
        const double start_cross = e.t + w - now_;
        const double end_cross = e.t + e.dt + w - now_;
        if (start_cross > 0.0 && start_cross < horizon_s) {
            knots.push_back(start_cross);
        }
        if (end_cross > 0.0 && end_cross < horizon_s) {
            knots.push_back(end_cross);
        }
    }
    knots.push_back(horizon_s);

    // Knots are generated in time order (entries are ordered), so one sweep
    // over the entries serves every evaluation.
    const double c0 = now_ - w;
    auto part_up_to = [&](const Entry& e, double c1) {
        const double lo = std::max(e.t, c0);
        const double hi = std::min(e.t + e.dt, c1);
        return hi > lo ? e.i2dt * ((hi - lo) / e.dt) : 0.0;
    };

    double i2_allowed = std::numeric_limits<double>::infinity();
    double consumed_full = 0.0;
    std::size_t idx = 0;
    for (double tau : knots) {
        const double c1 = c0 + tau;
        while (idx < entries_.size() && entries_[idx].t + entries_[idx].dt <= c1) {
            consumed_full += part_up_to(entries_[idx], c1);
            ++idx;
        }
        double consumed = consumed_full;
        if (idx < entries_.size()) {
            consumed += part_up_to(entries_[idx], c1);
        }
        const double allowed = (budget - (p0 - consumed)) / tau;
        i2_allowed = std::min(i2_allowed, allowed);
    }
    return i2_allowed > 0.0 ? std::sqrt(i2_allowed) : 0.0;
}

}  // namespace wpt
