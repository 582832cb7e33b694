#include "wpt/magnetics.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "wpt/errors.hpp"

namespace wpt {

namespace {

// Neumann double sum over segment midpoints:
//   M = mu0 / (4 pi) * sum_i sum_j (dl_i . dl_j) / |r_i - r_j|
// Also tracks the closest midpoint pair for the separation guard.
double neumann_sum(const FilamentSegments& a, const FilamentSegments& b, double& min_r2) {
    double total = 0.0;
    double mr2 = std::numeric_limits<double>::infinity();
    const std::size_t na = a.size();
    const std::size_t nb = b.size();
    for (std::size_t i = 0; i < na; ++i) {
        const double mxi = a.mx[i], myi = a.my[i], mzi = a.mz[i];
        const double dxi = a.dx[i], dyi = a.dy[i], dzi = a.dz[i];
        double acc = 0.0;
        for (std::size_t j = 0; j < nb; ++j) {
            const double rx = b.mx[j] - mxi;
            const double ry = b.my[j] - myi;
            const double rz = b.mz[j] - mzi;
            const double r2 = rx * rx + ry * ry + rz * rz;
            mr2 = mr2 < r2 ? mr2 : r2;
            const double dot = dxi * b.dx[j] + dyi * b.dy[j] + dzi * b.dz[j];
            acc += dot / std::sqrt(r2);
        }
        total += acc;
    }
    min_r2 = mr2;
    return kMu0 / (4.0 * kPi) * total;
}

}  // namespace

double filament_mutual_inductance(const CoilSpec& coil_a, const Pose& pose_a,
                                  const CoilSpec& coil_b, const Pose& pose_b,
                                  int segments_per_turn, double min_separation_m) {
    const FilamentSegments sa = to_segments(discretize_coil(coil_a, pose_a, segments_per_turn));
    const FilamentSegments sb = to_segments(discretize_coil(coil_b, pose_b, segments_per_turn));
    double min_r2 = 0.0;
    const double m = neumann_sum(sa, sb, min_r2);
    if (min_r2 < min_separation_m * min_separation_m) {
        throw CoilsTooClose("filament separation " + std::to_string(std::sqrt(min_r2)) +
                            " m below guard " + std::to_string(min_separation_m) + " m");
    }
    return m;
}

double mutual_inductance(const CoilSpec& coil_a, const Pose& pose_a,
                         const CoilSpec& coil_b, const Pose& pose_b,
                         const MutualOptions& opts) {
    int n = opts.segments_per_turn;
    double prev = filament_mutual_inductance(coil_a, pose_a, coil_b, pose_b, n,
                                             opts.min_separation_m);
    while (n < opts.max_segments_per_turn) {
        const int next = std::min(2 * n, opts.max_segments_per_turn);
        const double refined = filament_mutual_inductance(coil_a, pose_a, coil_b, pose_b, next,
                                                          opts.min_separation_m);
        const double scale = std::abs(refined) > 0.0 ? std::abs(refined) : 1.0;
        if (std::abs(refined - prev) / scale < opts.rel_tol) {
            return refined;
        }
        prev = refined;
        n = next;
    }
    throw NonConvergent("mutual inductance not converged to " +
                        std::to_string(opts.rel_tol * 100.0) + "% within " +
                        std::to_string(opts.max_segments_per_turn) + " segments/turn");
}

double dipole_mutual_inductance(const CoilSpec& coil_a, const Pose& pose_a,
                                const CoilSpec& coil_b, const Pose& pose_b) {
    coil_a.validate();
    coil_b.validate();
    pose_a.validate("coil_a pose");
    pose_b.validate("coil_b pose");

    const Vec3 r = pose_b.position - pose_a.position;
    const double d = r.norm();
    const double rmax = std::max(coil_a.radius_m, coil_b.radius_m);
    if (d < 3.0 * rmax) {
        throw TooClose("dipole approximation needs separation >= 3 x max radius (" +
                       std::to_string(d) + " m < " + std::to_string(3.0 * rmax) + " m)");
    }
    const Vec3 rn = r / d;
    const Vec3 na = pose_a.axis_z();
    const Vec3 nb = pose_b.axis_z();
    const double geom = 3.0 * na.dot(rn) * nb.dot(rn) - na.dot(nb);
    return kMu0 / (4.0 * kPi) * coil_a.turns_area() * coil_b.turns_area() * geom / (d * d * d);
}

Vec3 field_per_ampere(const FilamentSegments& segs, const Vec3& at) {
    double bx = 0.0, by = 0.0, bz = 0.0;
    const std::size_t n = segs.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double rx = at.x() - segs.mx[i];
        const double ry = at.y() - segs.my[i];
        const double rz = at.z() - segs.mz[i];
        const double r2 = rx * rx + ry * ry + rz * rz;
        const double inv_r3 = 1.0 / (r2 * std::sqrt(r2));
        // dl x r
        bx += (segs.dy[i] * rz - segs.dz[i] * ry) * inv_r3;
        by += (segs.dz[i] * rx - segs.dx[i] * rz) * inv_r3;
        bz += (segs.dx[i] * ry - segs.dy[i] * rx) * inv_r3;
    }
    return kMu0 / (4.0 * kPi) * Vec3(bx, by, bz);
}

CouplingSet coupling_set(const CoilSpec& tx, const Pose& tx_pose, const Pose& capsule_pose,
                         const std::array<CoilSpec, 3>& rx, CouplingMethod method,
                         int segments_per_turn, double field_attenuation) {
    capsule_pose.validate("capsule pose");
    const std::array<Quat, 3> axis_rot = {
        // Rotations taking the local +z loop normal onto the capsule X/Y/Z axes.
        Quat(Eigen::AngleAxisd(kPi / 2.0, Vec3::UnitY())),
        Quat(Eigen::AngleAxisd(-kPi / 2.0, Vec3::UnitX())),
        Quat::Identity(),
    };

    CouplingSet out;
    if (method == CouplingMethod::kUniformField) {
        const FilamentSegments tx_segs = to_segments(discretize_coil(tx, tx_pose, segments_per_turn));
        const Vec3 b = field_per_ampere(tx_segs, capsule_pose.position);
        const std::array<Vec3, 3> axes = {capsule_pose.axis_x(), capsule_pose.axis_y(),
                                          capsule_pose.axis_z()};
        for (int i = 0; i < 3; ++i) {
            out.m_h[i] = field_attenuation * rx[i].turns_area() * b.dot(axes[i]);
        }
    } else {
        for (int i = 0; i < 3; ++i) {
            Pose rx_pose;
            rx_pose.position = capsule_pose.position;
            rx_pose.orientation = capsule_pose.orientation * axis_rot[i];
            double m;
            if (method == CouplingMethod::kDipole) {
                m = dipole_mutual_inductance(tx, tx_pose, rx[i], rx_pose);
            } else {
                m = filament_mutual_inductance(tx, tx_pose, rx[i], rx_pose, segments_per_turn);
            }
            out.m_h[i] = field_attenuation * m;
        }
    }
    for (int i = 0; i < 3; ++i) {
        out.k[i] = out.m_h[i] / std::sqrt(tx.self_inductance_h * rx[i].self_inductance_h);
    }
    return out;
}

std::array<double, 3> uniform_field_flux(const Vec3& b_tesla, const std::array<CoilSpec, 3>& rx,
                                         const Pose& capsule_pose) {
    if (!b_tesla.allFinite()) {
        throw ConfigError("uniform_field_flux: non-finite field vector");
    }
    capsule_pose.validate("capsule pose");
    const std::array<Vec3, 3> axes = {capsule_pose.axis_x(), capsule_pose.axis_y(),
                                      capsule_pose.axis_z()};
    std::array<double, 3> flux{};
    for (int i = 0; i < 3; ++i) {
        flux[i] = rx[i].turns_area() * b_tesla.dot(axes[i]);
    }
    return flux;
}

}  // namespace wpt
