// so(3) / se(3) algebra primitives: hat map, brackets, coadjoint action,
// momentum map and the representation action on the advected vector.
// All operations are pure functions on value types.
#pragma once

#include <cmath>

#include "nhep/linalg.hpp"

namespace nhep {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
    double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    friend Vec3 operator*(double s, const Vec3& v) { return v * s; }

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const { return std::sqrt(dot(*this)); }
};

inline constexpr Vec3 kE1{1.0, 0.0, 0.0};
inline constexpr Vec3 kE2{0.0, 1.0, 0.0};
inline constexpr Vec3 kE3{0.0, 0.0, 1.0};

/// Element (Omega, Y) of se(3) ~ R^3 x R^3: body angular velocity [rad/s]
/// and body-frame linear velocity [m/s].
struct Se3Element {
    Vec3 omega;
    Vec3 vel;
};

/// Covector (Pi, P) of se(3)*: angular and linear momentum components.
struct Se3Covector {
    Vec3 pi;
    Vec3 p;
};

/// hat(v) w = v x w.
inline linalg::MatX hat(const Vec3& v) {
    linalg::MatX m(3, 3);
    m(0, 1) = -v.z;
    m(0, 2) = v.y;
    m(1, 0) = v.z;
    m(1, 2) = -v.x;
    m(2, 0) = -v.y;
    m(2, 1) = v.x;
    return m;
}

/// [(O1,Y1),(O2,Y2)] = (O1 x O2, O1 x Y2 - O2 x Y1).
inline Se3Element se3_bracket(const Se3Element& a, const Se3Element& b) {
    return {a.omega.cross(b.omega),
            a.omega.cross(b.vel) - b.omega.cross(a.vel)};
}

/// ad*_(O,Y) (Pi, P) = (Pi x O + P x Y, P x O).
inline Se3Covector se3_coad(const Se3Element& xi, const Se3Covector& mu) {
    return {mu.pi.cross(xi.omega) + mu.p.cross(xi.vel), mu.p.cross(xi.omega)};
}

/// Momentum map K(y, Gamma) = (y x Gamma, 0) of the se(3) action on R^3.
inline Se3Covector momentum_K(const Vec3& y, const Vec3& gamma) {
    return {y.cross(gamma), Vec3{}};
}

/// so(3) counterpart of the momentum map: K(y, Gamma) = y x Gamma.
inline Vec3 so3_momentum_K(const Vec3& y, const Vec3& gamma) {
    return y.cross(gamma);
}

/// Representation action xi Gamma = Omega x Gamma, so the advected vector
/// obeys dGamma/dt = -xi Gamma = Gamma x Omega.
inline Vec3 advect_action(const Se3Element& xi, const Vec3& gamma) {
    return xi.omega.cross(gamma);
}

inline double pair(const Se3Covector& mu, const Se3Element& xi) {
    return mu.pi.dot(xi.omega) + mu.p.dot(xi.vel);
}

// Packing helpers between the (omega, vel) pair view and flat R^6 vectors.
inline linalg::VecX to_vec6(const Se3Element& xi) {
    return {xi.omega.x, xi.omega.y, xi.omega.z, xi.vel.x, xi.vel.y, xi.vel.z};
}
inline Se3Element se3_from_vec6(const linalg::VecX& v) {
    return {{v[0], v[1], v[2]}, {v[3], v[4], v[5]}};
}
inline linalg::VecX to_vec6(const Se3Covector& mu) {
    return {mu.pi.x, mu.pi.y, mu.pi.z, mu.p.x, mu.p.y, mu.p.z};
}

}  // namespace nhep
