#pragma once

// Scalar-generic frame algebra shared by the public kinematics (double) and the
// energy gradient (forward-mode autodiff scalars).

#include <array>
#include <cmath>

#include <Eigen/Core>

namespace kresling::detail {

template <class S>
using V3 = Eigen::Matrix<S, 3, 1>;
template <class S>
using M3 = Eigen::Matrix<S, 3, 3>;

template <class S>
struct Frame {
    V3<S> center;
    M3<S> axes;  // columns: vertex-0 reference, in-plane normal x reference, normal
};

template <class S>
M3<S> skew(const V3<S>& w) {
    M3<S> k;
    k << S(0), -w(2), w(1), w(2), S(0), -w(0), -w(1), w(0), S(0);
    return k;
}

// Rotation by the vector w (axis * angle). Series branch keeps the map and its
// derivatives finite at w = 0.
template <class S>
M3<S> rotation_from_vector(const V3<S>& w) {
    using std::cos;
    using std::sin;
    using std::sqrt;
    const S t2 = w.squaredNorm();
    S a;
    S b;
    if (t2 < 1e-4) {
        a = S(1) - t2 / 6.0 + t2 * t2 / 120.0 - t2 * t2 * t2 / 5040.0;
        b = S(0.5) - t2 / 24.0 + t2 * t2 / 720.0 - t2 * t2 * t2 / 40320.0;
    } else {
        const S t = sqrt(t2);
        a = sin(t) / t;
        b = (S(1) - cos(t)) / t2;
    }
    const M3<S> k = skew(w);
    return M3<S>::Identity() + a * k + b * (k * k);
}

template <class S>
M3<S> rotation_z(const S& angle) {
    using std::cos;
    using std::sin;
    const S c = cos(angle);
    const S s = sin(angle);
    M3<S> r;
    r << c, -s, S(0), s, c, S(0), S(0), S(0), S(1);
    return r;
}

template <class S>
V3<S> hexagon_point(const Frame<S>& frame, double radius, int k) {
    const double angle = k * (3.14159265358979323846 / 3.0);
    return frame.center + frame.axes.col(0) * (radius * std::cos(angle)) + frame.axes.col(1) * (radius * std::sin(angle));
}

template <class S>
struct UnitPose {
    std::array<V3<S>, 6> bottom;
    std::array<V3<S>, 6> top;
    Frame<S> top_frame;
};

// Twist about the bottom normal, tilt by (tilt_x, tilt_y) radians about the in-plane
// axis perpendicular to the tilt direction, then translate the centre by `height`
// along the half-tilted normal.
template <class S>
Frame<S> top_frame(const Frame<S>& bottom, const S& height, const S& twist, const S& tilt_x, const S& tilt_y) {
    const V3<S> omega(-tilt_y, tilt_x, S(0));
    const M3<S> tilt = rotation_from_vector<S>(omega);
    const M3<S> half_tilt = rotation_from_vector<S>(V3<S>(omega * S(0.5)));
    Frame<S> top;
    top.axes = bottom.axes * tilt * rotation_z<S>(twist);
    top.center = bottom.center + bottom.axes * (half_tilt.col(2) * height);
    return top;
}

template <class S>
UnitPose<S> place_unit(const Frame<S>& bottom, double a1, double a2, const S& height, const S& twist,
                       const S& tilt_x, const S& tilt_y) {
    UnitPose<S> pose;
    pose.top_frame = top_frame<S>(bottom, height, twist, tilt_x, tilt_y);
    for (int k = 0; k < 6; ++k) {
        pose.bottom[k] = hexagon_point<S>(bottom, a1, k);
        pose.top[k] = hexagon_point<S>(pose.top_frame, a2, k);
    }
    return pose;
}

inline int wrap_column(int k) { return ((k % 6) + 6) % 6; }

}  // namespace kresling::detail
