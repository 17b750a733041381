#pragma once

#include <cmath>

namespace patsim {

/// Two-axis angular offset in radians (azimuth, elevation).
///
/// Every pointing error, sensor reading and actuator command in the
/// simulator is expressed as an Angle2 relative to the true line of sight.
struct Angle2 {
    double az = 0.0;
    double el = 0.0;

    [[nodiscard]] double norm() const { return std::hypot(az, el); }
    [[nodiscard]] double norm_sq() const { return az * az + el * el; }
    [[nodiscard]] bool finite() const { return std::isfinite(az) && std::isfinite(el); }

    Angle2& operator+=(const Angle2& o) {
        az += o.az;
        el += o.el;
        return *this;
    }
    Angle2& operator-=(const Angle2& o) {
        az -= o.az;
        el -= o.el;
        return *this;
    }

    friend Angle2 operator+(Angle2 a, const Angle2& b) { return a += b; }
    friend Angle2 operator-(Angle2 a, const Angle2& b) { return a -= b; }
    friend Angle2 operator-(const Angle2& a) { return {-a.az, -a.el}; }
    friend Angle2 operator*(double s, const Angle2& a) { return {s * a.az, s * a.el}; }
    friend Angle2 operator*(const Angle2& a, double s) { return s * a; }
    friend bool operator==(const Angle2&, const Angle2&) = default;
};

/// Scales `v` radially so that |v| <= limit. Returns true if clamping happened.
inline bool clamp_radial(Angle2& v, double limit) {
    const double n = v.norm();
    if (n <= limit) {
        return false;
    }
    v = (limit / n) * v;
    return true;
}

}  // namespace patsim
