#include "juliadim/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <unordered_set>

#include "juliadim/errors.hpp"
#include "juliadim/roots.hpp"
#include "juliadim/sphere_index.hpp"

namespace juliadim {

double geometric_potential(const RationalMap& g, const SpherePoint& z) {
    return -std::log(g.spherical_derivative(z));
}

double analytic_bound_section3(int n) {
    if (n < 5) throw DomainError("analytic_bound_section3 requires n >= 5");
    const double lambda_a = (3.0 + std::sqrt(5.0)) / 2.0;
    return 1.0 + std::log(lambda_a) / std::log(double(n));
}

PeriodicPressureData periodic_data(const GdmsSystem& sys, int period,
                                   const FindRepellingOptions& opts) {
    const RepellingSet set = find_repelling(sys, period, opts);
    PeriodicPressureData data;
    data.period = period;
    data.seeded = set.seeded;
    data.words = set.words_processed;
    data.words_incomplete = set.words_incomplete;
    data.log_multipliers.reserve(set.points.size());
    for (const RepellingPoint& p : set.points)
        data.log_multipliers.push_back(std::log(p.multiplier));
    return data;
}

double pressure_periodic(const PeriodicPressureData& data, double t) {
    if (data.log_multipliers.empty())
        throw EmptyOrbitSet("no repelling points of period " +
                            std::to_string(data.period));
    // log sum exp of -t log m, stabilized by the largest exponent
    double peak = -1e300;
    for (double lm : data.log_multipliers) peak = std::max(peak, -t * lm);
    double sum = 0.0;
    for (double lm : data.log_multipliers) sum += std::exp(-t * lm - peak);
    return (peak + std::log(sum)) / double(data.period);
}

double pressure_periodic(const GdmsSystem& sys, double t, int period,
                         const FindRepellingOptions& opts) {
    return pressure_periodic(periodic_data(sys, period, opts), t);
}

TransferOperator::TransferOperator(const GdmsSystem& sys,
                                   const JuliaCloud& cloud,
                                   int support_per_vertex) {
    const int nv = sys.vertex_count();

    // spatially stratified subsample per vertex: greedy farthest-point-style
    // thinning via an occupancy grid, so thin regions of the cloud keep
    // support coverage instead of being crowded out by dense ones
    std::vector<std::vector<SpherePoint>> support{static_cast<size_t>(nv)};
    std::vector<int> offset(size_t(nv), 0);
    int total = 0;
    for (int v = 0; v < nv; ++v) {
        const auto& bucket = cloud.vertices[size_t(v)];
        if (bucket.empty())
            throw BrokenLinks("empty cloud at vertex " + std::to_string(v + 1));
        auto& sup = support[size_t(v)];
        // halve the grid spacing until keeping one sample per occupied
        // cell reaches the target count
        double spacing = 0.5;
        while (true) {
            sup.clear();
            std::unordered_set<std::uint64_t> seen;
            for (const CloudSample& s : bucket) {
                const auto e = sphere_embed(s.z);
                const std::uint64_t kx =
                    std::uint64_t(std::int64_t(std::floor(e[0] / spacing)) +
                                  (1 << 20));
                const std::uint64_t ky =
                    std::uint64_t(std::int64_t(std::floor(e[1] / spacing)) +
                                  (1 << 20));
                const std::uint64_t kz =
                    std::uint64_t(std::int64_t(std::floor(e[2] / spacing)) +
                                  (1 << 20));
                if (seen.insert((kx << 42) ^ (ky << 21) ^ kz).second)
                    sup.push_back(s.z);
            }
            if (int(sup.size()) >= support_per_vertex ||
                sup.size() == bucket.size() || spacing < 1e-6)
                break;
            spacing *= 0.5;
        }
        offset[size_t(v)] = total;
        total += int(sup.size());
    }

    points_.reserve(size_t(total));
    for (int v = 0; v < nv; ++v)
        for (const SpherePoint& p : support[size_t(v)]) points_.push_back(p);

    std::vector<ChordalIndex> index;
    index.reserve(size_t(nv));
    for (int v = 0; v < nv; ++v)
        index.emplace_back(std::span<const SpherePoint>(support[size_t(v)]),
                           0.02);

    auto nearest_index = [&](int v, const SpherePoint& q) {
        const auto [dist, arg] = index[size_t(v)].nearest_with_index(q);
        interp_radius_ = std::max(interp_radius_, dist);
        return offset[size_t(v)] + arg;
    };

    fan_.assign(points_.size(), {});
    for (int v = 0; v < nv; ++v) {
        for (size_t k = 0; k < support[size_t(v)].size(); ++k) {
            const SpherePoint& z = support[size_t(v)][k];
            auto& links = fan_[size_t(offset[size_t(v)]) + k];
            for (int sym : sys.symbols_into(v)) {
                const RationalMap& g = sys.map_of(sym);
                const int src = sys.initial_vertex(sym);
                std::vector<SpherePoint> pre;
                try {
                    if (z.is_inf()) {
                        if (g.denominator().degree() >= 1)
                            for (const Complex& r :
                                 polynomial_roots(g.denominator()))
                                pre.emplace_back(r);
                        while (int(pre.size()) < g.degree())
                            pre.push_back(SpherePoint::infinity());
                    } else {
                        const ComplexPolynomial p =
                            (g.numerator() - g.denominator() * z.value())
                                .trimmed(1e-14);
                        if (p.degree() >= 1)
                            for (const Complex& r : polynomial_roots(p))
                                pre.emplace_back(r);
                        while (int(pre.size()) < g.degree())
                            pre.push_back(SpherePoint::infinity());
                    }
                } catch (const NonConvergence&) {
                    throw BrokenLinks("preimage fan incomplete at vertex " +
                                      std::to_string(v + 1));
                }
                for (const SpherePoint& w : pre) {
                    Link link;
                    link.target = nearest_index(src, w);
                    link.gnorm = g.spherical_derivative(w);
                    links.push_back(link);
                }
            }
            if (links.empty())
                throw BrokenLinks("support point with empty preimage fan");
        }
    }
}

OperatorEigenData TransferOperator::eigendata(double t, int max_iters,
                                              double tol) const {
    const size_t n = points_.size();
    // per-link weights exp(t phi(y)) = gnorm^(-t)
    std::vector<std::vector<double>> w(n);
    for (size_t i = 0; i < n; ++i) {
        w[i].reserve(fan_[i].size());
        for (const Link& l : fan_[i])
            w[i].push_back(std::pow(std::max(l.gnorm, 1e-300), -t));
    }

    std::vector<double> h(n, 1.0), tmp(n, 0.0);
    std::vector<double> left(n, 1.0 / double(n)), ltmp(n, 0.0);
    OperatorEigenData out;
    double lambda = 1.0;

    for (int it = 0; it < max_iters; ++it) {
        double sup_h = 0.0, sup_lh = 0.0;
        for (size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            const auto& links = fan_[i];
            for (size_t k = 0; k < links.size(); ++k)
                acc += w[i][k] * h[size_t(links[k].target)];
            tmp[i] = acc;
            sup_h = std::max(sup_h, std::abs(h[i]));
            sup_lh = std::max(sup_lh, std::abs(acc));
        }
        lambda = sup_lh / sup_h;

        double resid = 0.0;
        for (size_t i = 0; i < n; ++i)
            resid = std::max(resid, std::abs(tmp[i] / lambda - h[i]));
        resid /= sup_h;

        for (size_t i = 0; i < n; ++i) h[i] = tmp[i] / sup_lh;

        // left iteration shares the sweep count
        std::fill(ltmp.begin(), ltmp.end(), 0.0);
        for (size_t i = 0; i < n; ++i) {
            const auto& links = fan_[i];
            for (size_t k = 0; k < links.size(); ++k)
                ltmp[size_t(links[k].target)] += w[i][k] * left[i];
        }
        double lsum = 0.0;
        for (double x : ltmp) lsum += x;
        for (size_t i = 0; i < n; ++i) left[i] = ltmp[i] / lsum;

        out.iterations = it + 1;
        out.residual = resid;
        if (resid < tol) break;
    }
    if (out.residual > 1e-3)
        throw NonConvergence("transfer operator power iteration residual " +
                             std::to_string(out.residual));
    out.lambda = lambda;
    out.h = std::move(h);
    out.weights = std::move(left);
    out.interpolation_radius = interp_radius_;
    return out;
}

PressureEngine::PressureEngine(const GdmsSystem& sys, int n_max,
                               const FindRepellingOptions& opts) {
    if (n_max < 1) throw Error("pressure engine needs n_max >= 1");
    for (int n = 1; n <= n_max; ++n) data_.push_back(periodic_data(sys, n, opts));
}

double PressureEngine::periodic(double t) const {
    return pressure_periodic(data_.back(), t);
}

double PressureEngine::extrapolated(double t) const {
    const int nmax = n_max();
    const int lo = std::max(2, nmax - 2);
    if (lo >= nmax) return periodic(t);
    // slope of n P_n(t) against n kills the O(1/n) bias of the raw estimate
    std::vector<double> xs, ys;
    for (int n = lo; n <= nmax; ++n) {
        xs.push_back(double(n));
        ys.push_back(double(n) * pressure_periodic(data_[size_t(n - 1)], t));
    }
    const size_t m = xs.size();
    double mx = 0, my = 0;
    for (size_t k = 0; k < m; ++k) {
        mx += xs[k];
        my += ys[k];
    }
    mx /= double(m);
    my /= double(m);
    double sxy = 0, sxx = 0;
    for (size_t k = 0; k < m; ++k) {
        sxy += (xs[k] - mx) * (ys[k] - my);
        sxx += (xs[k] - mx) * (xs[k] - mx);
    }
    return sxy / sxx;
}

double PressureEngine::operator_pressure(double t) const {
    if (!op_) throw Error("no transfer operator attached");
    return op_->pressure(t);
}

double PressureEngine::pressure(double t, Estimator e) const {
    switch (e) {
        case Estimator::periodic: return periodic(t);
        case Estimator::periodic_extrapolated: return extrapolated(t);
        case Estimator::transfer_operator: return operator_pressure(t);
    }
    throw Error("unknown estimator");
}

DeltaResult find_delta(const PressureEngine& engine, double lo, double hi,
                       double tol, Estimator e) {
    DeltaResult r;
    r.estimator = e;
    auto eval = [&](double t) {
        ++r.evaluations;
        return engine.pressure(t, e);
    };

    if (lo == hi) {
        const double p = eval(lo);
        if (std::abs(p) < tol) {
            r.delta = lo;
            r.lo = r.hi = lo;
            r.p_lo = r.p_hi = p;
            return r;
        }
        throw BracketFailure("degenerate bracket with nonzero pressure");
    }
    if (lo > hi) std::swap(lo, hi);

    double plo = eval(lo), phi = eval(hi);
    // expand upward while the pressure is still positive at the top
    while (phi > 0.0 && hi < 8.0) {
        hi *= 2.0;
        phi = eval(hi);
    }
    if (!(plo > 0.0) || !(phi < 0.0))
        throw BracketFailure(
            "pressure does not change sign over the bracket; the system "
            "looks non-expanding or degenerate");

    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const double pm = eval(mid);
        if (pm > 0.0) {
            lo = mid;
            plo = pm;
        } else {
            hi = mid;
            phi = pm;
        }
    }
    r.delta = 0.5 * (lo + hi);
    r.lo = lo;
    r.hi = hi;
    r.p_lo = plo;
    r.p_hi = phi;
    return r;
}

PressureProfile build_profile(const PressureEngine& engine,
                              const std::vector<double>& grid,
                              const DeltaResult& delta) {
    PressureProfile prof;
    prof.grid = grid;
    prof.n_max = engine.n_max();
    prof.delta = delta;
    for (double t : grid) {
        prof.p_periodic.push_back(engine.periodic(t));
        prof.p_extrapolated.push_back(engine.extrapolated(t));
        if (engine.has_operator()) {
            prof.p_operator.push_back(engine.operator_pressure(t));
            prof.op_residual.push_back(0.0);
        }
    }
    return prof;
}

void write_profile_tsv(const PressureProfile& profile,
                       const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open profile file: " + path);
    out << "t\tP_periodic\tP_extrapolated\tP_operator\tn\tresidual\n";
    char buf[256];
    for (size_t k = 0; k < profile.grid.size(); ++k) {
        const bool has_op = k < profile.p_operator.size();
        char opv[32];
        if (has_op)
            std::snprintf(opv, sizeof opv, "%.12g", profile.p_operator[k]);
        else
            std::snprintf(opv, sizeof opv, "nan");
        std::snprintf(buf, sizeof buf, "%.12g\t%.12g\t%.12g\t%s\t%d\t%.3g\n",
                      profile.grid[k], profile.p_periodic[k],
                      profile.p_extrapolated[k], opv, profile.n_max,
                      has_op && k < profile.op_residual.size()
                          ? profile.op_residual[k]
                          : 0.0);
        out << buf;
    }
    std::snprintf(buf, sizeof buf, "# delta\t%.12g\tbracket\t[%.12g, %.12g]\n",
                  profile.delta.delta, profile.delta.lo, profile.delta.hi);
    out << buf;
    if (!out) throw IoError("failed writing profile: " + path);
}

} // namespace juliadim
