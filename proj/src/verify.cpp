#include "juliadim/verify.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "juliadim/errors.hpp"
#include "juliadim/roots.hpp"
#include "juliadim/sphere_index.hpp"

namespace juliadim {

namespace {

constexpr double kPi = 3.14159265358979323846;

/// Image of a disc under a Moebius map, when the pole stays outside.
std::optional<Disc> mobius_disc_image(Complex a, Complex b, Complex c,
                                      Complex d, const Disc& in) {
    const Complex w = c * in.center + d;
    const double denom = std::norm(w) - in.radius * in.radius * std::norm(c);
    if (denom <= 0.0) return std::nullopt; // pole inside or on the disc
    Disc out;
    out.center = ((a * in.center + b) * std::conj(w) -
                  in.radius * in.radius * a * std::conj(c)) /
                 denom;
    out.radius = std::abs(a * d - b * c) * in.radius / denom;
    return out;
}

std::vector<SpherePoint> map_preimages(const RationalMap& g,
                                       const SpherePoint& z) {
    std::vector<SpherePoint> out;
    const int dg = g.degree();
    if (z.is_inf()) {
        if (g.denominator().degree() >= 1)
            for (const Complex& r : polynomial_roots(g.denominator()))
                out.emplace_back(r);
        while (int(out.size()) < dg) out.push_back(SpherePoint::infinity());
        return out;
    }
    const ComplexPolynomial p =
        (g.numerator() - g.denominator() * z.value()).trimmed(1e-14);
    if (p.degree() >= 1)
        for (const Complex& r : polynomial_roots(p)) out.emplace_back(r);
    while (int(out.size()) < dg) out.push_back(SpherePoint::infinity());
    return out;
}

} // namespace

std::optional<PowerForm> detect_conjugated_power(const RationalMap& g,
                                                 double rel_tol) {
    if (g.denominator().degree() != 0) return std::nullopt;
    const int n = g.numerator().degree();
    if (n < 2) return std::nullopt;
    const Complex invc = 1.0 / g.denominator().coefficient(0);

    // num' must be a n (z - p)^(n-1): all derivative roots coincide
    std::vector<Complex> droots;
    try {
        droots = polynomial_roots(g.numerator().derivative());
    } catch (const NonConvergence&) {
        return std::nullopt;
    }
    Complex p(0.0);
    for (const Complex& r : droots) p += r;
    p /= double(droots.size());
    // multiple-root clusters spread like eps^(1/(n-1)); accept a loose ball
    const double spread_tol =
        std::max(1e-6, 100.0 * std::pow(1e-16, 1.0 / std::max(1, n - 1))) *
        (1.0 + std::abs(p));
    for (const Complex& r : droots)
        if (std::abs(r - p) > spread_tol) return std::nullopt;

    PowerForm form;
    form.exponent = n;
    form.scale = g.numerator().coefficient(n) * invc;
    form.center = p;
    const SpherePoint q = g(SpherePoint(p));
    if (q.is_inf()) return std::nullopt;
    form.offset = q.value();

    // confirm by re-expansion
    std::vector<Complex> c(size_t(n) + 1, Complex(0.0));
    Complex binom = 1.0;
    for (int k = 0; k <= n; ++k) {
        Complex term = binom;
        for (int j = 0; j < n - k; ++j) term *= -form.center;
        c[size_t(k)] = term * form.scale;
        binom *= double(n - k) / double(k + 1);
    }
    c[0] += form.offset;
    const double scale = g.numerator().max_coefficient() * std::abs(invc);
    for (int k = 0; k <= n; ++k) {
        const Complex got = g.numerator().coefficient(k) * invc;
        if (std::abs(got - c[size_t(k)]) > rel_tol * std::max(scale, 1.0))
            return std::nullopt;
    }
    return form;
}

BscCertificate check_bsc_certified(const GdmsSystem& sys,
                                   const JuliaCloud& cloud, const Disc& domain,
                                   int boundary_samples) {
    for (const auto& bucket : cloud.vertices)
        for (const CloudSample& s : bucket)
            if (!domain.contains(s.z))
                throw CloudEscapesU(
                    "a cloud sample escapes the reference disc U");

    BscCertificate cert;
    cert.domain = domain;
    const int nv = sys.vertex_count();
    cert.per_vertex.assign(size_t(nv), {});

    for (size_t e = 0; e < sys.graph().edges.size(); ++e) {
        const auto& edge = sys.graph().edges[e];
        for (size_t m = 0; m < sys.families()[e].size(); ++m) {
            const RationalMap& g = sys.families()[e][m];
            BscItem item;
            item.edge = int(e);
            item.map_index = int(m);

            if (g.degree() == 1) {
                // g^-1 is Moebius; the preimage of U is its exact image
                const Complex a = g.numerator().coefficient(1);
                const Complex b = g.numerator().coefficient(0);
                const Complex c = g.denominator().coefficient(1);
                const Complex d = g.denominator().coefficient(0);
                // inverse map (d z - b) / (-c z + a)
                const auto img = mobius_disc_image(d, -b, -c, a, domain);
                if (img) {
                    item.enclosure = *img;
                    item.certified = true;
                } else {
                    item.unbounded = true;
                }
            } else if (const auto form = detect_conjugated_power(g)) {
                // |a||z-p|^n = |g(z)-q| <= r_U + |c_U - q| inside U
                const double rhs =
                    (domain.radius + std::abs(domain.center - form->offset)) /
                    std::abs(form->scale);
                item.enclosure.center = form->center;
                item.enclosure.radius =
                    std::pow(rhs, 1.0 / double(form->exponent));
                item.certified = true;
            } else {
                // sampled preimage hull, NON-CERTIFIED
                std::vector<Complex> pre;
                bool unbounded = false;
                auto absorb = [&](const SpherePoint& z) {
                    for (const SpherePoint& w : map_preimages(g, z)) {
                        if (w.is_inf())
                            unbounded = true;
                        else
                            pre.push_back(w.value());
                    }
                };
                for (int k = 0; k < boundary_samples; ++k) {
                    const double th = 2.0 * kPi * k / boundary_samples;
                    absorb(SpherePoint(domain.center +
                                       domain.radius *
                                           Complex(std::cos(th), std::sin(th))));
                }
                absorb(SpherePoint(domain.center));
                if (unbounded || pre.empty()) {
                    item.unbounded = true;
                } else {
                    Complex ctr(0.0);
                    for (const Complex& w : pre) ctr += w;
                    ctr /= double(pre.size());
                    double r = 0.0;
                    for (const Complex& w : pre)
                        r = std::max(r, std::abs(w - ctr));
                    item.enclosure.center = ctr;
                    item.enclosure.radius = r * 1.05;
                }
                item.certified = false;
            }
            cert.all_certified = cert.all_certified && item.certified;
            cert.per_vertex[size_t(edge.from)].push_back(item);
        }
    }

    // pairing rule: same initial vertex, all pairs except identical
    // (edge, map); unbounded enclosures conservatively intersect everything
    cert.verdict = true;
    cert.disjoint.assign(size_t(nv), {});
    for (int v = 0; v < nv; ++v) {
        const auto& items = cert.per_vertex[size_t(v)];
        auto& rows = cert.disjoint[size_t(v)];
        rows.assign(items.size(), std::vector<bool>(items.size(), true));
        for (size_t i = 0; i < items.size(); ++i)
            for (size_t j = i + 1; j < items.size(); ++j) {
                const bool exempt = items[i].edge == items[j].edge &&
                                    items[i].map_index == items[j].map_index;
                bool dis;
                if (items[i].unbounded || items[j].unbounded)
                    dis = false;
                else
                    dis = discs_disjoint(items[i].enclosure,
                                         items[j].enclosure);
                rows[i][j] = rows[j][i] = dis;
                if (!exempt && !dis) cert.verdict = false;
            }
    }
    return cert;
}

std::string bsc_report_json(const BscCertificate& cert, const GdmsSystem& sys) {
    nlohmann::json doc;
    doc["domain"] = {{"center", {cert.domain.center.real(),
                                 cert.domain.center.imag()}},
                     {"radius", cert.domain.radius}};
    doc["verdict"] = cert.verdict
                         ? (cert.all_certified ? "CERTIFIED" : "SAMPLED-PASS")
                         : "FAIL";
    doc["vertices"] = nlohmann::json::array();
    for (size_t v = 0; v < cert.per_vertex.size(); ++v) {
        nlohmann::json jv;
        jv["vertex"] = v + 1;
        jv["items"] = nlohmann::json::array();
        for (const BscItem& item : cert.per_vertex[v]) {
            nlohmann::json ji;
            ji["edge"] = sys.graph().edges[size_t(item.edge)].id;
            ji["map"] = item.map_index;
            ji["mode"] = item.certified ? "CERTIFIED" : "HEURISTIC";
            if (item.unbounded) {
                ji["enclosure"] = "unbounded";
            } else {
                ji["enclosure"] = {
                    {"center", {item.enclosure.center.real(),
                                item.enclosure.center.imag()}},
                    {"radius", item.enclosure.radius}};
            }
            jv["items"].push_back(ji);
        }
        doc["vertices"].push_back(jv);
    }
    return doc.dump(2) + "\n";
}

std::vector<CheckOutcome> check_non_elementary(const GdmsSystem& sys,
                                               int max_period) {
    const int nv = sys.vertex_count();
    std::vector<std::vector<SpherePoint>> found{static_cast<size_t>(nv)};
    for (int p = 1; p <= max_period; ++p) {
        RepellingSet set;
        try {
            set = find_repelling(sys, p, {});
        } catch (const Error&) {
            continue;
        }
        for (const RepellingPoint& pt : set.points) {
            auto& bucket = found[size_t(sys.initial_vertex(pt.word.front()))];
            bool fresh = true;
            for (const SpherePoint& q : bucket)
                if (chordal(q, pt.z) <= 1e-6) {
                    fresh = false;
                    break;
                }
            if (fresh) bucket.push_back(pt.z);
        }
    }
    std::vector<CheckOutcome> out(size_t(nv), CheckOutcome::inconclusive);
    for (int v = 0; v < nv; ++v)
        if (found[size_t(v)].size() >= 3) out[size_t(v)] = CheckOutcome::pass;
    return out;
}

HyperbolicReport check_hyperbolic_heuristic(const GdmsSystem& sys,
                                            const JuliaCloud& cloud, int depth,
                                            double gap, size_t orbit_cap) {
    const int nv = sys.vertex_count();
    HyperbolicReport rep;
    rep.required_gap = gap;
    rep.per_vertex_gap.assign(size_t(nv),
                              std::numeric_limits<double>::infinity());

    // seed: critical values of each generator, bucketed at the edge's
    // terminal vertex
    std::vector<std::vector<SpherePoint>> frontier{static_cast<size_t>(nv)};
    for (int s = 0; s < sys.symbol_count(); ++s) {
        const RationalMap& g = sys.map_of(s);
        const int v = sys.terminal_vertex(s);
        for (const SpherePoint& c : g.critical_points())
            frontier[size_t(v)].push_back(g(c));
    }

    std::vector<ChordalIndex> index;
    for (int v = 0; v < nv; ++v) {
        const auto pts = cloud.points_at(v);
        index.emplace_back(std::span<const SpherePoint>(pts), 0.05);
    }

    double min_gap = std::numeric_limits<double>::infinity();
    size_t total = 0;
    for (int d = 0; d <= depth; ++d) {
        std::vector<std::vector<SpherePoint>> next{static_cast<size_t>(nv)};
        for (int v = 0; v < nv; ++v) {
            for (const SpherePoint& z : frontier[size_t(v)]) {
                ++total;
                if (total > orbit_cap) {
                    rep.truncated = true;
                    break;
                }
                const double dist = index[size_t(v)].nearest(z);
                min_gap = std::min(min_gap, dist);
                rep.per_vertex_gap[size_t(v)] =
                    std::min(rep.per_vertex_gap[size_t(v)], dist);
                if (d == depth) continue;
                for (int s : sys.symbols_from(v))
                    next[size_t(sys.terminal_vertex(s))].push_back(
                        sys.map_of(s)(z));
            }
            if (rep.truncated) break;
        }
        if (rep.truncated) break;
        frontier = std::move(next);
    }

    rep.orbit_points = total;
    rep.min_gap = min_gap;
    rep.pass = min_gap >= gap;
    return rep;
}

bool check_loxodromic_condition(const GdmsSystem& sys, int max_len,
                                std::uint64_t cap) {
    // degree-one word maps exist only over degree-one symbols
    std::vector<int> unit_symbols;
    for (int s = 0; s < sys.symbol_count(); ++s)
        if (sys.map_of(s).degree() == 1) unit_symbols.push_back(s);
    if (unit_symbols.empty()) return true; // vacuous

    std::uint64_t visited = 0;
    bool ok = true;
    SymbolicWord w;
    std::function<void(int)> rec = [&](int last) {
        if (!ok) return;
        if (++visited > cap)
            throw CountCapExceeded("loxodromic word scan exceeds cap", visited);
        if (int(w.size()) >= max_len) return;
        for (int s : unit_symbols) {
            if (last >= 0 && sys.terminal_vertex(last) != sys.initial_vertex(s))
                continue;
            w.push_back(s);
            if (sys.terminal_vertex(s) == sys.initial_vertex(w.front())) {
                const WordMap gw(sys, w);
                const MobiusClass mc = gw.explicit_map().classify_mobius();
                if (mc.type != MobiusType::loxodromic) ok = false;
            }
            if (ok) rec(s);
            w.pop_back();
            if (!ok) return;
        }
    };
    rec(-1);
    return ok;
}

ExpansionEstimate estimate_expansion(
    std::span<const PeriodicPressureData> per_period) {
    std::vector<double> xs, ys;
    for (const PeriodicPressureData& d : per_period) {
        if (d.log_multipliers.empty()) continue;
        double mn = 1e300;
        for (double lm : d.log_multipliers) mn = std::min(mn, lm);
        xs.push_back(double(d.period));
        ys.push_back(mn);
    }
    if (xs.size() < 3)
        throw InsufficientData("expansion fit needs at least 3 periods");

    ExpansionEstimate est;
    est.per_period_min = ys;
    const size_t n = xs.size();
    double mx = 0, my = 0;
    for (size_t k = 0; k < n; ++k) {
        mx += xs[k];
        my += ys[k];
    }
    mx /= double(n);
    my /= double(n);
    double sxy = 0, sxx = 0;
    for (size_t k = 0; k < n; ++k) {
        sxy += (xs[k] - mx) * (ys[k] - my);
        sxx += (xs[k] - mx) * (xs[k] - mx);
    }
    est.log_lambda = sxy / sxx;
    est.log_c = my - est.log_lambda * mx;
    for (size_t k = 0; k < n; ++k)
        est.fit_slack = std::max(
            est.fit_slack, est.log_c + est.log_lambda * xs[k] - ys[k]);
    est.expansion_consistent = est.log_lambda > 0.0;
    return est;
}

std::vector<SpherePoint> exceptional_candidates(const GdmsSystem& sys,
                                                int vertex) {
    // candidate pool: totally invariant points of single outgoing
    // generators plus Moebius fixed points
    std::vector<SpherePoint> pool;
    auto add = [&](const SpherePoint& p) {
        for (const SpherePoint& q : pool)
            if (chordal(p, q) <= 1e-9) return;
        pool.push_back(p);
    };
    for (int s : sys.symbols_from(vertex)) {
        const RationalMap& g = sys.map_of(s);
        if (g.degree() == 1) {
            const ComplexPolynomial fix =
                (g.numerator() -
                 g.denominator() * ComplexPolynomial({0.0, 1.0}))
                    .trimmed(1e-13);
            if (fix.degree() >= 1)
                for (const Complex& r : polynomial_roots(fix)) add({r});
            if (g.fixes_infinity()) add(SpherePoint::infinity());
        } else {
            if (g.denominator().degree() == 0) add(SpherePoint::infinity());
            if (const auto form = detect_conjugated_power(g))
                if (std::abs(form->center - form->offset) < 1e-9)
                    add(SpherePoint(form->center));
        }
    }

    // keep candidates whose two-step self-class preimage set stays tiny;
    // word preimages are computed one generator at a time, which stays
    // well conditioned where expanded compositions would not
    std::vector<SpherePoint> out;
    std::vector<SymbolicWord> words;
    for (int len = 1; len <= 2; ++len) {
        try {
            for (const SymbolicWord& w :
                 sys.shift().enumerate_words(len, false, 10000)) {
                if (sys.initial_vertex(w.front()) == vertex &&
                    sys.terminal_vertex(w.back()) == vertex)
                    words.push_back(w);
            }
        } catch (const CountCapExceeded&) {
            return out; // too many words to screen; report none
        }
    }
    for (const SpherePoint& z : pool) {
        std::vector<SpherePoint> preimage_union;
        auto absorb = [&](const SpherePoint& p) {
            for (const SpherePoint& q : preimage_union)
                if (chordal(p, q) <= 1e-8) return;
            preimage_union.push_back(p);
        };
        for (const SymbolicWord& w : words) {
            std::vector<SpherePoint> set{z};
            for (size_t k = w.size(); k-- > 0;) {
                std::vector<SpherePoint> next;
                for (const SpherePoint& p : set)
                    for (const SpherePoint& q :
                         map_preimages(sys.map_of(w[k]), p))
                        next.push_back(q);
                set = std::move(next);
            }
            for (const SpherePoint& p : set) absorb(p);
        }
        if (preimage_union.size() < 3) out.push_back(z);
    }
    return out;
}

} // namespace juliadim
