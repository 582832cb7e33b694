#include "wpt/control.hpp"

#include <algorithm>
#include <cmath>

#include "wpt/errors.hpp"

namespace wpt {

void ApsModel::validate() const {
    if (!(v_min_v > 0.0) || !(v_max_v > v_min_v)) {
        throw ConfigError("aps: need 0 < v_min < v_max");
    }
    if (!(step_v > 0.0) || !(slew_v_per_s > 0.0)) {
        throw ConfigError("aps: step and slew must be positive");
    }
}

ControllerState control_step(ToneDecision decision, ControllerState state, const ApsModel& aps) {
    aps.validate();
    double delta = 0.0;
    switch (decision) {
        case ToneDecision::kNone: delta = aps.step_v; break;       // power too low
        case ToneDecision::kLowTone: delta = 0.0; break;           // in band, hold
        case ToneDecision::kHighTone: delta = -aps.step_v; break;  // power too high
    }
    const double max_move = aps.slew_v_per_s * state.loop_period_s;
    delta = std::clamp(delta, -max_move, max_move);

    const double target = state.v_cmd_v + delta;
    state.v_cmd_v = aps.clamp(target);
    state.saturated = (target != state.v_cmd_v) ||
                      (state.v_cmd_v >= aps.v_max_v && decision == ToneDecision::kNone) ||
                      (state.v_cmd_v <= aps.v_min_v && decision == ToneDecision::kHighTone);
    state.last_decision = decision;
    return state;
}

}  // namespace wpt
