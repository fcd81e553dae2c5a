#include "juliadim/rational_map.hpp"

#include <algorithm>
#include <cmath>

#include "juliadim/errors.hpp"

namespace juliadim {

namespace {

ComplexPolynomial reversed_padded(const ComplexPolynomial& p, int degree) {
    std::vector<Complex> c(static_cast<size_t>(degree) + 1, Complex(0.0));
    for (int k = 0; k <= p.degree(); ++k) c[degree - k] = p.coefficient(k);
    return ComplexPolynomial(std::move(c));
}

} // namespace

RationalMap::RationalMap(ComplexPolynomial num, ComplexPolynomial den,
                         bool check_coprime)
    : num_(std::move(num)), den_(std::move(den)) {
    if (num_.is_zero() || den_.is_zero())
        throw InvalidMap("rational map with zero numerator or denominator");
    degree_ = std::max(num_.degree(), den_.degree());
    if (degree_ < 1) throw InvalidMap("constant rational map");

    if (check_coprime && num_.degree() >= 1 && den_.degree() >= 1) {
        const auto rn = polynomial_roots(num_);
        const auto rd = polynomial_roots(den_);
        for (const Complex& a : rn)
            for (const Complex& b : rd)
                if (chordal(SpherePoint(a), SpherePoint(b)) <= 1e-8)
                    throw InvalidMap("numerator and denominator share a root");
    }

    num_rev_ = reversed_padded(num_, degree_);
    den_rev_ = reversed_padded(den_, degree_);
}

RationalMap RationalMap::polynomial(ComplexPolynomial p) {
    return RationalMap(std::move(p), ComplexPolynomial::constant(1.0), false);
}

RationalMap RationalMap::identity() {
    return RationalMap(ComplexPolynomial({0.0, 1.0}),
                       ComplexPolynomial::constant(1.0), false);
}

RationalMap RationalMap::power(int n) {
    return polynomial(ComplexPolynomial::monomial(n));
}

RationalMap RationalMap::conjugated_power(Complex p, int n, Complex q) {
    // (z - p)^n + q via binomial expansion
    std::vector<Complex> c(static_cast<size_t>(n) + 1, Complex(0.0));
    Complex binom = 1.0;
    for (int k = 0; k <= n; ++k) {
        // binom = C(n,k) (-p)^(n-k)
        Complex term = binom;
        for (int j = 0; j < n - k; ++j) term *= -p;
        c[k] = term;
        binom *= double(n - k) / double(k + 1);
    }
    c[0] += q;
    return polynomial(ComplexPolynomial(std::move(c)));
}

RationalMap RationalMap::mobius(Complex a, Complex b, Complex cc, Complex d) {
    if (std::abs(a * d - b * cc) == 0.0)
        throw InvalidMap("degenerate mobius coefficients");
    return RationalMap(ComplexPolynomial({b, a}), ComplexPolynomial({d, cc}),
                       false);
}

void RationalMap::select_chart(const SpherePoint& z, Complex& a,
                               bool& inverted) const {
    if (z.is_inf()) {
        a = Complex(0.0);
        inverted = true;
    } else if (std::norm(z.value()) > 1.0) {
        a = 1.0 / z.value();
        inverted = true;
    } else {
        a = z.value();
        inverted = false;
    }
}

SpherePoint RationalMap::operator()(const SpherePoint& z) const {
    Complex a;
    bool inverted;
    select_chart(z, a, inverted);
    const ComplexPolynomial& N = inverted ? num_rev_ : num_;
    const ComplexPolynomial& D = inverted ? den_rev_ : den_;
    Complex f = N(a), g = D(a);
    const double s = std::max(std::abs(f), std::abs(g));
    if (s == 0.0)
        throw Error("rational map degenerate at evaluation point");
    f /= s;
    g /= s;
    if (std::abs(g) < 1e-300) return SpherePoint::infinity();
    return SpherePoint(f / g);
}

double RationalMap::eval_chordal_error_bound(const SpherePoint& z) const {
    Complex a;
    bool inverted;
    select_chart(z, a, inverted);
    const ComplexPolynomial& N = inverted ? num_rev_ : num_;
    const ComplexPolynomial& D = inverted ? den_rev_ : den_;
    const Complex f = N(a), g = D(a);
    const double eps = 4.0 * (degree_ + 1) * 2.2e-16;
    const double df = eps * N.coefficient_scale(std::abs(a));
    const double dg = eps * D.coefficient_scale(std::abs(a));
    const double fg = std::max(std::abs(f), std::abs(g));
    if (fg == 0.0) return 2.0;
    // work with the larger of f, g as the denominator (matching the chart
    // choice made by the derivative code; eval's u = f/g differs from h by
    // an isometry so the bound applies either way)
    const double lo = std::min(std::abs(f), std::abs(g));
    const double u = lo / fg;
    const double du = (df + dg) / fg * (1.0 + u);
    return std::min(2.0, 2.0 * du / (1.0 + u * u));
}

double RationalMap::spherical_derivative(const SpherePoint& z) const {
    Complex a;
    bool inverted;
    select_chart(z, a, inverted);
    const ComplexPolynomial* N = inverted ? &num_rev_ : &num_;
    const ComplexPolynomial* D = inverted ? &den_rev_ : &den_;
    Complex f = (*N)(a), g = (*D)(a);
    // post-compose with 1/w when the value leaves the unit disc; both chart
    // changes are chordal isometries so the norm is unchanged
    if (std::abs(f) > std::abs(g)) {
        std::swap(N, D);
        std::swap(f, g);
    }
    const Complex u = f / g;
    const Complex dn = N->derivative()(a);
    const Complex dd = D->derivative()(a);
    const Complex h = (dn * g - f * dd) / (g * g);
    return std::abs(h) * (1.0 + std::norm(a)) / (1.0 + std::norm(u));
}

Complex RationalMap::derivative_value(Complex z) const {
    const Complex n = num_(z), d = den_(z);
    const Complex dn = num_.derivative()(z), dd = den_.derivative()(z);
    return (dn * d - n * dd) / (d * d);
}

std::vector<SpherePoint> RationalMap::critical_points(
    const RootOptions& opts) const {
    const ComplexPolynomial w =
        (num_.derivative() * den_ - num_ * den_.derivative()).trimmed(1e-12);
    std::vector<SpherePoint> out;
    if (w.degree() >= 1) {
        for (const Complex& r : polynomial_roots(w, opts)) out.emplace_back(r);
    }
    const int at_inf = 2 * degree_ - 2 - w.degree();
    for (int k = 0; k < at_inf; ++k) out.push_back(SpherePoint::infinity());
    return out;
}

MobiusClass RationalMap::classify_mobius(double tol) const {
    if (degree_ != 1)
        throw DegreeMismatch("classify_mobius requires a degree-one map");
    const Complex a = num_.coefficient(1), b = num_.coefficient(0);
    const Complex cc = den_.coefficient(1), d = den_.coefficient(0);
    const Complex det = a * d - b * cc;
    const Complex tr2 = (a + d) * (a + d) / det;

    MobiusClass out;
    out.trace_squared = tr2;
    const bool is_id = std::abs(b) <= tol * std::abs(a) &&
                       std::abs(cc) <= tol * std::abs(d) &&
                       std::abs(a - d) <= tol * std::abs(a + d);
    if (is_id) {
        out.type = MobiusType::identity;
        return out;
    }
    const bool real_trace2 = std::abs(tr2.imag()) <= tol * (1.0 + std::abs(tr2));
    if (real_trace2 && std::abs(tr2.real() - 4.0) <= tol * 4.0) {
        out.type = MobiusType::parabolic;
    } else if (real_trace2 && tr2.real() >= -tol && tr2.real() < 4.0) {
        out.type = MobiusType::elliptic;
    } else {
        out.type = MobiusType::loxodromic;
    }
    return out;
}

RationalMap compose(const RationalMap& outer, const RationalMap& inner,
                    int degree_cap) {
    const long long target =
        static_cast<long long>(outer.degree()) * inner.degree();
    if (target > degree_cap)
        throw DegreeCapExceeded("composed degree " + std::to_string(target) +
                                " exceeds cap " + std::to_string(degree_cap));

    const int d1 = outer.degree();
    const ComplexPolynomial& p2 = inner.numerator();
    const ComplexPolynomial& q2 = inner.denominator();

    // Horner in p2 with a running power of q2:
    //   num = sum_i a_i p2^i q2^(d1-i),  den likewise with b_i
    ComplexPolynomial accn = ComplexPolynomial::constant(outer.numerator().coefficient(d1));
    ComplexPolynomial accd = ComplexPolynomial::constant(outer.denominator().coefficient(d1));
    ComplexPolynomial qpow = ComplexPolynomial::constant(1.0);
    for (int i = d1 - 1; i >= 0; --i) {
        qpow = qpow * q2;
        accn = accn * p2 + qpow * outer.numerator().coefficient(i);
        accd = accd * p2 + qpow * outer.denominator().coefficient(i);
    }
    return RationalMap(std::move(accn), std::move(accd), false);
}

RationalMap conjugate_by_reciprocal(const RationalMap& g) {
    // 1/g(1/w): swap the reversed-padded numerator and denominator
    const int d = g.degree();
    std::vector<Complex> n(static_cast<size_t>(d) + 1, Complex(0.0));
    std::vector<Complex> m(static_cast<size_t>(d) + 1, Complex(0.0));
    for (int k = 0; k <= g.numerator().degree(); ++k)
        n[d - k] = g.numerator().coefficient(k);
    for (int k = 0; k <= g.denominator().degree(); ++k)
        m[d - k] = g.denominator().coefficient(k);
    return RationalMap(ComplexPolynomial(std::move(m)),
                       ComplexPolynomial(std::move(n)), false);
}

} // namespace juliadim
