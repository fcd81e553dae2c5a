#pragma once

#include <optional>
#include <vector>

#include "juliadim/polynomial.hpp"
#include "juliadim/roots.hpp"

namespace juliadim {

enum class MobiusType { loxodromic, parabolic, elliptic, identity };

struct MobiusClass {
    MobiusType type;
    Complex trace_squared; // normalized to ad - bc = 1
};

/// A non-constant rational map on the Riemann sphere, kept as a coprime
/// numerator/denominator pair. Evaluation and derivative norms are computed
/// in whichever affine chart (z or 1/z) keeps magnitudes at most 1, so the
/// point at infinity needs no special casing by callers.
class RationalMap {
public:
    RationalMap(ComplexPolynomial num, ComplexPolynomial den,
                bool check_coprime = true);

    static RationalMap polynomial(ComplexPolynomial p);
    static RationalMap identity();
    static RationalMap power(int n); // z^n, n >= 1
    static RationalMap conjugated_power(Complex p, int n, Complex q); // (z-p)^n + q
    static RationalMap mobius(Complex a, Complex b, Complex cc, Complex d);

    int degree() const { return degree_; }
    const ComplexPolynomial& numerator() const { return num_; }
    const ComplexPolynomial& denominator() const { return den_; }

    SpherePoint operator()(const SpherePoint& z) const;

    /// A priori bound on the chordal error of operator() at z, from the
    /// coefficient scale in the active chart. Large for expanded
    /// compositions evaluated near their zeros.
    double eval_chordal_error_bound(const SpherePoint& z) const;

    /// Norm of the derivative with respect to the chordal metric; zero
    /// exactly at critical points, extended to infinity via the 1/z chart.
    double spherical_derivative(const SpherePoint& z) const;

    /// Plane-chart complex derivative g'(z); finite z away from poles only.
    Complex derivative_value(Complex z) const;

    /// All 2 deg - 2 critical points, with multiplicity.
    std::vector<SpherePoint> critical_points(const RootOptions& = {}) const;

    /// True iff g(infinity) = infinity (deg num > deg den).
    bool fixes_infinity() const { return num_.degree() > den_.degree(); }

    MobiusClass classify_mobius(double tol = 1e-9) const;

    bool operator==(const RationalMap& o) const {
        return num_ == o.num_ && den_ == o.den_;
    }

private:
    ComplexPolynomial num_, den_;
    // coefficients of num/den padded to the map degree and reversed; these
    // are the numerator/denominator of z |-> g(1/z)
    ComplexPolynomial num_rev_, den_rev_;
    int degree_;

    void select_chart(const SpherePoint& z, Complex& a, bool& inverted) const;
};

/// outer o inner by polynomial substitution; degree multiplies. Throws
/// DegreeCapExceeded when the composed degree would exceed the cap.
RationalMap compose(const RationalMap& outer, const RationalMap& inner,
                    int degree_cap = 4096);

/// w |-> 1/g(1/w), the reciprocal-chart conjugate.
RationalMap conjugate_by_reciprocal(const RationalMap& g);

} // namespace juliadim
