#ifndef WPT_GEOMETRY_HPP
#define WPT_GEOMETRY_HPP

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include "wpt/errors.hpp"

namespace wpt {

using Vec3 = Eigen::Vector3d;
using Quat = Eigen::Quaterniond;

inline constexpr double kMu0 = 4.0e-7 * 3.14159265358979323846;  // H/m
inline constexpr double kPi = 3.14159265358979323846;

// Rigid placement of a coil or the capsule in the world frame.
struct Pose {
    Vec3 position{Vec3::Zero()};
    Quat orientation{Quat::Identity()};

    // Quaternion must be unit within 1e-9; fields must be finite.
    void validate(const char* what = "pose") const;

    Vec3 to_world(const Vec3& local) const {
        return position + orientation * local;
    }
    Vec3 rotate(const Vec3& local) const { return orientation * local; }

    // Unit axes of the body frame expressed in world coordinates.
    Vec3 axis_x() const { return orientation * Vec3::UnitX(); }
    Vec3 axis_y() const { return orientation * Vec3::UnitY(); }
    Vec3 axis_z() const { return orientation * Vec3::UnitZ(); }
};

inline Pose pose_from_position(const Vec3& p) { return Pose{p, Quat::Identity()}; }

// Linear position / spherical orientation interpolation, s in [0,1].
inline Pose interpolate(const Pose& a, const Pose& b, double s) {
    Pose out;
    out.position = (1.0 - s) * a.position + s * b.position;
    out.orientation = a.orientation.slerp(s, b.orientation);
    return out;
}

}  // namespace wpt

#endif  // WPT_GEOMETRY_HPP
