#pragma once

#include <complex>
#include <span>
#include <vector>

#include "juliadim/sphere.hpp"

namespace juliadim {

/// Univariate polynomial with complex coefficients stored in ascending
/// degree order. Trailing coefficients that are exactly zero are trimmed,
/// so degree() equals the index of the last nonzero coefficient. The zero
/// polynomial is represented as the single coefficient 0.
class ComplexPolynomial {
public:
    ComplexPolynomial() : c_{Complex(0.0, 0.0)} {}
    explicit ComplexPolynomial(std::vector<Complex> coeffs);

    static ComplexPolynomial constant(Complex c) { return ComplexPolynomial({c}); }
    static ComplexPolynomial monomial(int degree, Complex lead = 1.0);
    static ComplexPolynomial from_roots(std::span<const Complex> roots,
                                        Complex lead = 1.0);

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.size() == 1 && c_[0] == Complex(0.0); }
    const std::vector<Complex>& coefficients() const { return c_; }
    Complex coefficient(int k) const {
        return (k >= 0 && k < static_cast<int>(c_.size())) ? c_[k] : Complex(0.0);
    }
    Complex leading() const { return c_.back(); }

    Complex operator()(Complex z) const;

    ComplexPolynomial derivative() const;

    /// Drops trailing coefficients with modulus below rel_tol times the
    /// largest coefficient modulus. Used where cancellation can silently
    /// lower the true degree.
    ComplexPolynomial trimmed(double rel_tol) const;

    /// Sum of |a_k| r^k, the natural backward-error scale at radius r.
    double coefficient_scale(double r) const;

    double max_coefficient() const;

    ComplexPolynomial operator+(const ComplexPolynomial& o) const;
    ComplexPolynomial operator-(const ComplexPolynomial& o) const;
    ComplexPolynomial operator*(const ComplexPolynomial& o) const;
    ComplexPolynomial operator*(Complex s) const;

    bool operator==(const ComplexPolynomial& o) const { return c_ == o.c_; }

private:
    std::vector<Complex> c_;
};

} // namespace juliadim
