#ifndef WPT_SAFETY_HPP
#define WPT_SAFETY_HPP

#include <deque>

#include "wpt/errors.hpp"

namespace wpt {

// Equivalent constant-current SAR limit and its averaging window.
struct SarLimit {
    double i_max_const_a = 14.5;
    double window_s = 360.0;

    void validate() const;
};

// Sliding-window average of squared Tx current amplitude. Windows that are
// not yet full are evaluated as if padded with zeros before the first sample,
// so compliance during startup follows the plain integral / window rule.
class SarWindow {
public:
    explicit SarWindow(SarLimit limit = {});

    // Appends the contribution i^2 * dt covering [t, t + dt) and expires
    // contributions that have fully left the window. Time must not go
    // backwards (throws NonMonotoneTime).
    void update(double t_s, double i_amplitude_a, double dt_s);

    double mean_i2() const;                 // windowed mean of i^2, A^2
    bool compliant() const;                 // mean(i^2) <= i_max^2 (+1e-9 rel)
    double margin() const;                  // 1 - mean(i^2) / i_max^2
    // Largest constant amplitude sustainable for the next horizon seconds
    // such that every sliding window ending within the horizon stays
    // compliant. horizon must lie in (0, window].
    double headroom(double horizon_s) const;

    double integral_a2s() const { return integral_; }
    double now_s() const { return now_; }
    bool empty() const { return entries_.empty(); }
    const SarLimit& limit() const { return limit_; }

    // Exact from-scratch recomputation of the running integral (test aid).
    double recompute_integral() const;

private:
    struct Entry {
        double t;     // start of the covered interval
        double dt;
        double i2dt;
    };

    void expire();

    SarLimit limit_;
    std::deque<Entry> entries_;
    double integral_ = 0.0;
    double now_ = 0.0;
    bool started_ = false;
    int ops_since_rebuild_ = 0;
};

}  // namespace wpt

#endif  // WPT_SAFETY_HPP
