#ifndef WPT_COIL_HPP
#define WPT_COIL_HPP

#include <string>
#include <vector>

#include "wpt/geometry.hpp"

namespace wpt {

// Geometric and electrical description of one winding. Self-inductance and
// ESR are measured configuration values, never derived from the geometry.
struct CoilSpec {
    double radius_m = 0.0;
    int turns = 0;
    double turn_pitch_m = 0.0;   // axial spacing between consecutive turns
    double self_inductance_h = 0.0;
    double esr_ohm = 0.0;
    std::string label;

    void validate() const;

    double area_m2() const { return kPi * radius_m * radius_m; }
    // turns x area magnetic moment per ampere
    double turns_area() const { return static_cast<double>(turns) * area_m2(); }
};

// Transmitter coil: 20 cm diameter, 6 turns of litz wire.
CoilSpec default_tx_coil();

// One axis of the 3D receiver: a square winding on a 1 cm cube face modeled
// as an equivalent circular loop of equal area. The turn count is a
// calibration value (not a published one); see the configuration docs.
CoilSpec default_rx_coil(const std::string& label = "rx");

// Filament discretization of a coil: per-turn closed polygons in the world
// frame, stacked along the coil axis and centered on the pose position.
// Stored flat; points [t*segments, (t+1)*segments) belong to turn t and each
// turn closes back onto its own first point.
struct FilamentPath {
    std::vector<Vec3> points;
    int turns = 0;
    int segments_per_turn = 0;

    int segment_count() const { return turns * segments_per_turn; }
};

// Midpoints and direction deltas of every segment, flattened for the Neumann
// summation kernel.
struct FilamentSegments {
    std::vector<double> mx, my, mz;  // segment midpoints
    std::vector<double> dx, dy, dz;  // segment vectors
    std::size_t size() const { return mx.size(); }
};

FilamentPath discretize_coil(const CoilSpec& spec, const Pose& pose, int segments_per_turn);

FilamentSegments to_segments(const FilamentPath& path);

double polyline_length(const FilamentPath& path);

}  // namespace wpt

#endif  // WPT_COIL_HPP
