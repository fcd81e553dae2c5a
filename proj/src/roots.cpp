#include "juliadim/roots.hpp"

#include <algorithm>
#include <cmath>

#include "juliadim/errors.hpp"

namespace juliadim {

namespace {

constexpr double kPi = 3.14159265358979323846;

inline Complex ldexp_c(Complex v, int e) {
    return Complex(std::ldexp(v.real(), e), std::ldexp(v.imag(), e));
}

// p(z), p'(z) as (value * 2^e) in a shared exponent frame, so Horner cannot
// overflow for degrees in the thousands at |z| > 1.
struct ScaledEval {
    Complex p{0.0, 0.0};
    Complex dp{0.0, 0.0};
    int e = 0;

    double log2_abs_p() const {
        const double a = std::abs(p);
        return a == 0.0 ? -1.0e300 : std::log2(a) + e;
    }
};

ScaledEval eval_scaled(const std::vector<Complex>& c, Complex z) {
    ScaledEval r;
    r.p = c.back();
    for (size_t k = c.size() - 1; k-- > 0;) {
        r.dp = r.dp * z + r.p;
        r.p = r.p * z + ldexp_c(c[k], -r.e);
        const double m = std::max(std::abs(r.p.real()) + std::abs(r.p.imag()),
                                  std::abs(r.dp.real()) + std::abs(r.dp.imag()));
        if (m > 0x1p500) {
            r.p = ldexp_c(r.p, -500);
            r.dp = ldexp_c(r.dp, -500);
            r.e += 500;
        }
    }
    return r;
}

// log2 of sum_k |a_k| r^k without overflow.
double log2_coeff_scale(const std::vector<Complex>& c, double r) {
    double best = -1.0e300;
    const double lr = r > 0.0 ? std::log2(r) : -1.0e300;
    for (size_t k = 0; k < c.size(); ++k) {
        const double a = std::abs(c[k]);
        if (a == 0.0) continue;
        const double term = std::log2(a) + (k == 0 ? 0.0 : double(k) * lr);
        best = std::max(best, term);
    }
    return best + std::log2(double(c.size()));
}

struct SplitMix {
    std::uint64_t s;
    std::uint64_t next() {
        s += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = s;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    double uniform() { return double(next() >> 11) * 0x1.0p-53; }
};

std::vector<Complex> solve_quadratic(const std::vector<Complex>& c) {
    const Complex a = c[2], b = c[1], cc = c[0];
    if (cc == Complex(0.0)) return {Complex(0.0), -b / a};
    const Complex disc = b * b - 4.0 * a * cc;
    Complex sq = std::sqrt(disc);
    if (std::real(std::conj(b) * sq) < 0.0) sq = -sq;
    const Complex q = -0.5 * (b + sq);
    return {q / a, cc / q};
}

} // namespace

std::vector<Complex> polynomial_roots(const ComplexPolynomial& poly,
                                      const RootOptions& opts) {
    if (poly.degree() < 1)
        throw Error("polynomial_roots: degree must be >= 1");

    std::vector<Complex> c = poly.coefficients();

    // Exact zero roots factor out first; keeps multiplicities clean for
    // sparse inputs like z^k q(z).
    std::vector<Complex> roots;
    size_t zero_count = 0;
    while (zero_count + 1 < c.size() && c[zero_count] == Complex(0.0)) ++zero_count;
    if (zero_count > 0) {
        roots.assign(zero_count, Complex(0.0));
        c.erase(c.begin(), c.begin() + static_cast<long>(zero_count));
    }
    const int d = static_cast<int>(c.size()) - 1;
    if (d == 0) return roots;

    {
        double m = 0.0;
        for (const Complex& a : c) m = std::max(m, std::abs(a));
        for (Complex& a : c) a /= m;
    }

    if (d == 1) {
        roots.push_back(-c[0] / c[1]);
        return roots;
    }
    if (d == 2) {
        auto r = solve_quadratic(c);
        roots.insert(roots.end(), r.begin(), r.end());
        return roots;
    }

    // Start circle near the geometric mean of root moduli, clamped by the
    // Cauchy bound. Starting at the right magnitude keeps evaluations tame.
    const double lead = std::abs(c.back());
    double cauchy = 0.0;
    for (int k = 0; k < d; ++k) cauchy = std::max(cauchy, std::abs(c[k]) / lead);
    cauchy += 1.0;
    double r0 = std::pow(std::max(std::abs(c[0]) / lead, 1e-300), 1.0 / d);
    r0 = std::clamp(r0, 1e-3, cauchy);

    SplitMix rng{opts.seed};
    std::vector<Complex> z(d);

    for (int attempt = 0; attempt <= opts.restarts; ++attempt) {
        const double phase = 2.0 * kPi * rng.uniform();
        const double spread = 1.0 + 0.05 * attempt;
        for (int i = 0; i < d; ++i) {
            const double ang = 2.0 * kPi * (i + 0.5) / d + phase +
                               0.01 * (rng.uniform() - 0.5);
            const double rad = r0 * spread * (1.0 + 0.02 * (rng.uniform() - 0.5));
            z[i] = Complex(rad * std::cos(ang), rad * std::sin(ang));
        }

        for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
            bool all_small = true;
            for (int i = 0; i < d; ++i) {
                const ScaledEval ev = eval_scaled(c, z[i]);
                if (std::abs(ev.p) == 0.0) continue;
                if (std::abs(ev.dp) == 0.0) {
                    z[i] += Complex(1e-8 * (rng.uniform() - 0.5),
                                    1e-8 * (rng.uniform() - 0.5));
                    all_small = false;
                    continue;
                }
                const Complex newton = ev.p / ev.dp;
                Complex s(0.0);
                for (int j = 0; j < d; ++j) {
                    if (j == i) continue;
                    const Complex diff = z[i] - z[j];
                    if (std::norm(diff) == 0.0) continue;
                    s += 1.0 / diff;
                }
                const Complex denom = 1.0 - newton * s;
                const Complex w =
                    (std::abs(denom) < 1e-290) ? newton : newton / denom;
                z[i] -= w;
                if (std::abs(w) > 1e-14 * (1.0 + std::abs(z[i]))) all_small = false;
            }
            if (all_small) break;
        }

        bool ok = true;
        for (int i = 0; i < d && ok; ++i) {
            const ScaledEval ev = eval_scaled(c, z[i]);
            const double lscale = log2_coeff_scale(c, std::abs(z[i]));
            if (ev.log2_abs_p() > lscale + std::log2(opts.tol)) ok = false;
        }
        if (ok) {
            roots.insert(roots.end(), z.begin(), z.end());
            return roots;
        }
    }
    throw NonConvergence("polynomial_roots: Aberth iteration did not converge");
}

} // namespace juliadim
