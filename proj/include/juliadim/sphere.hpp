#pragma once

#include <array>
#include <cmath>
#include <complex>

#include "juliadim/errors.hpp"

namespace juliadim {

using Complex = std::complex<double>;

/// A point on the Riemann sphere: a finite complex value or the point at
/// infinity. Distances are chordal, d(z,w) = 2|z-w|/sqrt((1+|z|^2)(1+|w|^2)),
/// so the sphere has diameter 2.
class SpherePoint {
public:
    SpherePoint() = default;

    SpherePoint(Complex v) {
        const double re = v.real(), im = v.imag();
        if (std::isnan(re) || std::isnan(im))
            throw Error("SpherePoint: NaN coordinate");
        if (std::isinf(re) || std::isinf(im))
            at_inf_ = true;
        else
            value_ = v;
    }

    SpherePoint(double re, double im) : SpherePoint(Complex(re, im)) {}

    static SpherePoint infinity() {
        SpherePoint p;
        p.at_inf_ = true;
        return p;
    }

    bool is_inf() const { return at_inf_; }

    /// Finite chart value; only meaningful when !is_inf().
    Complex value() const { return value_; }

private:
    Complex value_{0.0, 0.0};
    bool at_inf_ = false;
};

inline double chordal(const SpherePoint& a, const SpherePoint& b) {
    // hypot keeps the formula finite for chart values near the double
    // overflow threshold, which sit a hair away from infinity on the sphere
    if (a.is_inf() && b.is_inf()) return 0.0;
    if (a.is_inf()) return 2.0 / std::hypot(1.0, std::abs(b.value()));
    if (b.is_inf()) return 2.0 / std::hypot(1.0, std::abs(a.value()));
    const Complex z = a.value(), w = b.value();
    const double az = std::abs(z), aw = std::abs(w);
    if (az > 1e300 || aw > 1e300) {
        // |z - w| may overflow; both points are essentially at infinity
        const double da = 2.0 / std::hypot(1.0, az);
        const double db = 2.0 / std::hypot(1.0, aw);
        return da + db;
    }
    const double s1 = std::hypot(1.0, az);
    const double s2 = std::hypot(1.0, aw);
    return 2.0 * (std::abs(z - w) / s1) / s2;
}

/// Stereographic embedding onto the unit sphere in R^3. Chordal distance
/// equals Euclidean distance between embedded points.
inline std::array<double, 3> sphere_embed(const SpherePoint& p) {
    if (p.is_inf()) return {0.0, 0.0, 1.0};
    const Complex z = p.value();
    const double t = 1.0 / std::hypot(1.0, std::abs(z));
    return {2.0 * (z.real() * t) * t, 2.0 * (z.imag() * t) * t,
            1.0 - 2.0 * t * t};
}

inline bool sphere_equal(const SpherePoint& a, const SpherePoint& b, double tol) {
    return chordal(a, b) <= tol;
}

} // namespace juliadim
