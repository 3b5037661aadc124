#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

namespace barplan {

using Vec3 = Eigen::Vector3d;
using Quat = Eigen::Quaterniond;

/// Rigid transform (position + unit quaternion). Quaternions are kept
/// normalized; compose() and inverse() preserve that.
struct Pose {
    Vec3 position{Vec3::Zero()};
    Quat orientation{Quat::Identity()};

    static Pose identity() { return {}; }

    static Pose from_translation(const Vec3& t) { return {t, Quat::Identity()}; }

    static Pose from_axis_angle(const Vec3& axis, double angle) {
        return {Vec3::Zero(), Quat(Eigen::AngleAxisd(angle, axis.normalized()))};
    }

    Pose compose(const Pose& other) const {
        return {position + orientation * other.position,
                (orientation * other.orientation).normalized()};
    }

    Pose inverse() const {
        Quat qi = orientation.conjugate();
        return {qi * (-position), qi};
    }

    Vec3 apply(const Vec3& p) const { return position + orientation * p; }

    Vec3 rotate(const Vec3& v) const { return orientation * v; }
};

inline Pose operator*(const Pose& a, const Pose& b) { return a.compose(b); }

/// Angle of the relative rotation between two quaternions, in [0, pi].
inline double orientation_angle(const Quat& a, const Quat& b) {
    double d = std::abs(a.dot(b));
    d = std::min(1.0, d);
    return 2.0 * std::acos(d);
}

/// Rotation vector (axis * angle) taking orientation `from` to `to`,
/// expressed in the world frame.
inline Vec3 orientation_error(const Quat& from, const Quat& to) {
    Quat dq = to * from.conjugate();
    if (dq.w() < 0) dq.coeffs() = -dq.coeffs();
    Eigen::AngleAxisd aa(dq);
    return aa.axis() * aa.angle();
}

/// An arbitrary unit vector perpendicular to v (deterministic choice).
inline Vec3 any_perpendicular(const Vec3& v) {
    Vec3 u = v.normalized();
    Vec3 ref = std::abs(u.z()) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX();
    return u.cross(ref).normalized();
}

}  // namespace barplan
