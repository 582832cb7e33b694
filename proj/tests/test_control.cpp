#include <doctest.h>

#include "wpt/control.hpp"

using namespace wpt;

TEST_CASE("fixed-step policy") {
    ApsModel aps;
    ControllerState s;
    s.v_cmd_v = 10.0;

    SUBCASE("no tone raises one step") {
        s = control_step(ToneDecision::kNone, s, aps);
        CHECK(s.v_cmd_v == doctest::Approx(10.25));
        CHECK_FALSE(s.saturated);
    }

    SUBCASE("low tone holds") {
        s = control_step(ToneDecision::kLowTone, s, aps);
        CHECK(s.v_cmd_v == doctest::Approx(10.0));
    }

    SUBCASE("high tone lowers one step") {
        s = control_step(ToneDecision::kHighTone, s, aps);
        CHECK(s.v_cmd_v == doctest::Approx(9.75));
    }

    SUBCASE("four raises from 10 V reach 11 V") {
        for (int i = 0; i < 4; ++i) {
            s = control_step(ToneDecision::kNone, s, aps);
        }
        CHECK(s.v_cmd_v == doctest::Approx(11.0));
    }
}

TEST_CASE("saturation at the supply limits") {
    ApsModel aps;
    ControllerState s;

    s.v_cmd_v = 60.0;
    s = control_step(ToneDecision::kNone, s, aps);
    CHECK(s.v_cmd_v == 60.0);
    CHECK(s.saturated);

    s.v_cmd_v = 3.5;
    s = control_step(ToneDecision::kHighTone, s, aps);
    CHECK(s.v_cmd_v == 3.5);
    CHECK(s.saturated);

    s.v_cmd_v = 30.0;
    s = control_step(ToneDecision::kLowTone, s, aps);
    CHECK_FALSE(s.saturated);
}

TEST_CASE("slew limit caps the per-period move") {
    ApsModel aps;
    aps.step_v = 1.0;
    ControllerState s;
    s.v_cmd_v = 10.0;
    s.loop_period_s = 0.01;  // slew 50 V/s -> at most 0.5 V per period
    s = control_step(ToneDecision::kNone, s, aps);
    CHECK(s.v_cmd_v == doctest::Approx(10.5));
    s = control_step(ToneDecision::kHighTone, s, aps);
    CHECK(s.v_cmd_v == doctest::Approx(10.0));
}

TEST_CASE("decision is recorded") {
    ApsModel aps;
    ControllerState s;
    s = control_step(ToneDecision::kHighTone, s, aps);
    CHECK(s.last_decision == ToneDecision::kHighTone);
}
