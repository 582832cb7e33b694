#ifndef WPT_MAGNETICS_HPP
#define WPT_MAGNETICS_HPP

#include <array>
#include <optional>

#include "wpt/coil.hpp"
#include "wpt/geometry.hpp"

namespace wpt {

// Tx <-> each Rx axis mutual inductances and coupling coefficients.
struct CouplingSet {
    std::array<double, 3> m_h{0.0, 0.0, 0.0};  // henries, axes X/Y/Z
    std::array<double, 3> k{0.0, 0.0, 0.0};    // dimensionless
};

enum class CouplingMethod {
    kFilament,     // Neumann double sum over filament segments
    kDipole,       // far-field point-dipole approximation
    kUniformField  // field at the capsule center, uniform over the small coil
};

struct MutualOptions {
    int segments_per_turn = 256;
    int max_segments_per_turn = 2048;  // refinement cap for the converged form
    double rel_tol = 0.005;            // doubling must change M by less than this
    double min_separation_m = 1e-3;    // filament guard distance
};

// Single Neumann evaluation at a fixed discretization.
// Throws CoilsTooClose when any segment-midpoint pair comes closer than the
// guard distance.
double filament_mutual_inductance(const CoilSpec& coil_a, const Pose& pose_a,
                                  const CoilSpec& coil_b, const Pose& pose_b,
                                  int segments_per_turn,
                                  double min_separation_m = 1e-3);

// Convergence-checked Neumann evaluation: doubles the discretization until
// the result moves by less than rel_tol, up to the configured cap.
// Throws NonConvergent if the cap is reached while still moving.
double mutual_inductance(const CoilSpec& coil_a, const Pose& pose_a,
                         const CoilSpec& coil_b, const Pose& pose_b,
                         const MutualOptions& opts = {});

// Point-dipole approximation using each coil's turns x area moment.
// Requires center separation >= 3 x the larger radius (throws TooClose).
double dipole_mutual_inductance(const CoilSpec& coil_a, const Pose& pose_a,
                                const CoilSpec& coil_b, const Pose& pose_b);

// Magnetic field at a point per ampere of coil current (Biot-Savart over the
// discretized filament).
Vec3 field_per_ampere(const FilamentSegments& segs, const Vec3& at);

// Per-axis coupling between the Tx coil and the three orthogonal capsule
// windings. Rx-Rx cross coupling is not computed here (concentric orthogonal
// windings; an override matrix is honored by the circuit solver instead).
// field_attenuation scales every mutual inductance (tissue loss emulation).
CouplingSet coupling_set(const CoilSpec& tx, const Pose& tx_pose,
                         const Pose& capsule_pose,
                         const std::array<CoilSpec, 3>& rx,
                         CouplingMethod method,
                         int segments_per_turn = 64,
                         double field_attenuation = 1.0);

// Flux through each capsule winding for an externally imposed uniform field.
// flux_i = N_i * A_i * (B . u_i); the sum of squared normalized fluxes equals
// |B|^2 independent of capsule orientation.
std::array<double, 3> uniform_field_flux(const Vec3& b_tesla,
                                         const std::array<CoilSpec, 3>& rx,
                                         const Pose& capsule_pose);

}  // namespace wpt

#endif  // WPT_MAGNETICS_HPP
