#include "wpt/coil.hpp"

#include <cmath>

#include "wpt/errors.hpp"

namespace wpt {

void Pose::validate(const char* what) const {
    if (!position.allFinite()) {
        throw ConfigError(std::string(what) + ": non-finite position");
    }
    const double n = orientation.norm();
    if (!std::isfinite(n) || std::abs(n - 1.0) > 1e-9) {
        throw ConfigError(std::string(what) + ": orientation quaternion is not unit length");
    }
}

void CoilSpec::validate() const {
    if (!(radius_m > 0.0) || !std::isfinite(radius_m)) {
        throw ConfigError("coil '" + label + "': radius must be positive");
    }
    if (turns < 1) {
        throw ConfigError("coil '" + label + "': turns must be >= 1");
    }
    if (!(turn_pitch_m >= 0.0) || !std::isfinite(turn_pitch_m)) {
        throw ConfigError("coil '" + label + "': turn pitch must be non-negative");
    }
    if (!(self_inductance_h > 0.0) || !std::isfinite(self_inductance_h)) {
        throw ConfigError("coil '" + label + "': self inductance must be positive");
    }
    if (!(esr_ohm > 0.0) || !std::isfinite(esr_ohm)) {
        throw ConfigError("coil '" + label + "': ESR must be positive");
    }
}

CoilSpec default_tx_coil() {
    CoilSpec c;
    c.radius_m = 0.10;
    c.turns = 6;
    c.turn_pitch_m = 1.5e-3;
    c.self_inductance_h = 16.7e-6;
    c.esr_ohm = 0.73;
    c.label = "tx";
    return c;
}

CoilSpec default_rx_coil(const std::string& label) {
    CoilSpec c;
    // 1 cm square face -> circular loop of equal area.
    c.radius_m = 0.01 / std::sqrt(kPi);
    // Calibration value: the winding turn count is not a published quantity.
    // 22 turns of the 250 um wire reproduce the target power levels within
    // the SAR current budget; see the README configuration notes.
    c.turns = 22;
    c.turn_pitch_m = 0.25e-3;
    c.self_inductance_h = 6.5e-6;
    c.esr_ohm = 2.9;
    c.label = label;
    return c;
}

FilamentPath discretize_coil(const CoilSpec& spec, const Pose& pose, int segments_per_turn) {
    spec.validate();
    pose.validate(spec.label.empty() ? "coil pose" : spec.label.c_str());
    if (segments_per_turn < 8) {
        throw ConfigError("segments_per_turn must be >= 8");
    }

    FilamentPath path;
    path.turns = spec.turns;
    path.segments_per_turn = segments_per_turn;
    path.points.reserve(static_cast<std::size_t>(spec.turns) * segments_per_turn);

    // Turns are stacked loops centered on the pose position, so the winding
    // centroid coincides with the nominal coil center.
    const double z0 = -0.5 * (spec.turns - 1) * spec.turn_pitch_m;
    for (int t = 0; t < spec.turns; ++t) {
        const double z = z0 + t * spec.turn_pitch_m;
        for (int s = 0; s < segments_per_turn; ++s) {
            const double theta = 2.0 * kPi * s / segments_per_turn;
            const Vec3 local(spec.radius_m * std::cos(theta), spec.radius_m * std::sin(theta), z);
            path.points.push_back(pose.to_world(local));
        }
    }
    return path;
}

FilamentSegments to_segments(const FilamentPath& path) {
    FilamentSegments segs;
    const std::size_t n = path.points.size();
    segs.mx.reserve(n);
    segs.my.reserve(n);
    segs.mz.reserve(n);
    segs.dx.reserve(n);
    segs.dy.reserve(n);
    segs.dz.reserve(n);
    for (int t = 0; t < path.turns; ++t) {
        const std::size_t base = static_cast<std::size_t>(t) * path.segments_per_turn;
        for (int s = 0; s < path.segments_per_turn; ++s) {
            const Vec3& a = path.points[base + s];
            const Vec3& b = path.points[base + (s + 1) % path.segments_per_turn];
            segs.mx.push_back(0.5 * (a.x() + b.x()));
            segs.my.push_back(0.5 * (a.y() + b.y()));
            segs.mz.push_back(0.5 * (a.z() + b.z()));
            segs.dx.push_back(b.x() - a.x());
            segs.dy.push_back(b.y() - a.y());
            segs.dz.push_back(b.z() - a.z());
        }
    }
    return segs;
}

double polyline_length(const FilamentPath& path) {
    double total = 0.0;
    for (int t = 0; t < path.turns; ++t) {
        const std::size_t base = static_cast<std::size_t>(t) * path.segments_per_turn;
        for (int s = 0; s < path.segments_per_turn; ++s) {
            const Vec3& a = path.points[base + s];
            const Vec3& b = path.points[base + (s + 1) % path.segments_per_turn];
            total += (b - a).norm();
        }
    }
    return total;
}

}  // namespace wpt
