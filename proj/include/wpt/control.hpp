#ifndef WPT_CONTROL_HPP
#define WPT_CONTROL_HPP

#include "wpt/lsk.hpp"

namespace wpt {

// Adjustable power supply limits and actuation granularity.
struct ApsModel {
    double v_min_v = 3.5;
    double v_max_v = 60.0;
    double step_v = 0.25;
    double slew_v_per_s = 50.0;

    void validate() const;
    double clamp(double v) const {
        return v < v_min_v ? v_min_v : (v > v_max_v ? v_max_v : v);
    }
};

struct ControllerState {
    double v_cmd_v = 3.5;
    ToneDecision last_decision = ToneDecision::kNone;
    double loop_period_s = 0.1;
    bool saturated = false;
};

// One iteration of the fixed-step policy:
//   no tone  -> raise the supply one step (received power too low)
//   low tone -> hold (power in band)
//   high tone-> lower one step (power too high)
// The command is clamped to the APS range and to the slew limit.
ControllerState control_step(ToneDecision decision, ControllerState state, const ApsModel& aps);

}  // namespace wpt

#endif  // WPT_CONTROL_HPP
