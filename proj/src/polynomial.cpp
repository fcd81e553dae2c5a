#include "juliadim/polynomial.hpp"

#include <algorithm>
#include <cmath>

namespace juliadim {

namespace {

void trim_exact(std::vector<Complex>& c) {
    while (c.size() > 1 && c.back() == Complex(0.0)) c.pop_back();
    if (c.empty()) c.push_back(Complex(0.0));
}

} // namespace

ComplexPolynomial::ComplexPolynomial(std::vector<Complex> coeffs)
    : c_(std::move(coeffs)) {
    trim_exact(c_);
}

ComplexPolynomial ComplexPolynomial::monomial(int degree, Complex lead) {
    std::vector<Complex> c(static_cast<size_t>(degree) + 1, Complex(0.0));
    c.back() = lead;
    return ComplexPolynomial(std::move(c));
}

ComplexPolynomial ComplexPolynomial::from_roots(std::span<const Complex> roots,
                                                Complex lead) {
    // descending coefficients; multiply by (z - r) one root at a time
    std::vector<Complex> c{lead};
    for (Complex r : roots) {
        c.push_back(Complex(0.0));
        for (size_t k = c.size() - 1; k > 0; --k) c[k] -= r * c[k - 1];
    }
    std::reverse(c.begin(), c.end());
    return ComplexPolynomial(std::move(c));
}

Complex ComplexPolynomial::operator()(Complex z) const {
    Complex acc = c_.back();
    for (size_t k = c_.size() - 1; k-- > 0;) acc = acc * z + c_[k];
    return acc;
}

ComplexPolynomial ComplexPolynomial::derivative() const {
    if (c_.size() == 1) return ComplexPolynomial();
    std::vector<Complex> d(c_.size() - 1);
    for (size_t k = 1; k < c_.size(); ++k) d[k - 1] = c_[k] * double(k);
    return ComplexPolynomial(std::move(d));
}

ComplexPolynomial ComplexPolynomial::trimmed(double rel_tol) const {
    const double cutoff = rel_tol * max_coefficient();
    std::vector<Complex> c = c_;
    while (c.size() > 1 && std::abs(c.back()) <= cutoff) c.pop_back();
    return ComplexPolynomial(std::move(c));
}

double ComplexPolynomial::coefficient_scale(double r) const {
    double s = 0.0, p = 1.0;
    for (const Complex& a : c_) {
        s += std::abs(a) * p;
        p *= r;
    }
    return s;
}

double ComplexPolynomial::max_coefficient() const {
    double m = 0.0;
    for (const Complex& a : c_) m = std::max(m, std::abs(a));
    return m;
}

ComplexPolynomial ComplexPolynomial::operator+(const ComplexPolynomial& o) const {
    std::vector<Complex> c(std::max(c_.size(), o.c_.size()), Complex(0.0));
    for (size_t k = 0; k < c_.size(); ++k) c[k] += c_[k];
    for (size_t k = 0; k < o.c_.size(); ++k) c[k] += o.c_[k];
    return ComplexPolynomial(std::move(c));
}

ComplexPolynomial ComplexPolynomial::operator-(const ComplexPolynomial& o) const {
    std::vector<Complex> c(std::max(c_.size(), o.c_.size()), Complex(0.0));
    for (size_t k = 0; k < c_.size(); ++k) c[k] += c_[k];
    for (size_t k = 0; k < o.c_.size(); ++k) c[k] -= o.c_[k];
    return ComplexPolynomial(std::move(c));
}

ComplexPolynomial ComplexPolynomial::operator*(const ComplexPolynomial& o) const {
    if (is_zero() || o.is_zero()) return ComplexPolynomial();
    std::vector<Complex> c(c_.size() + o.c_.size() - 1, Complex(0.0));
    for (size_t i = 0; i < c_.size(); ++i)
        for (size_t j = 0; j < o.c_.size(); ++j) c[i + j] += c_[i] * o.c_[j];
    return ComplexPolynomial(std::move(c));
}

ComplexPolynomial ComplexPolynomial::operator*(Complex s) const {
    std::vector<Complex> c = c_;
    for (Complex& a : c) a *= s;
    return ComplexPolynomial(std::move(c));
}

} // namespace juliadim
