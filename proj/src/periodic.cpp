#include "juliadim/periodic.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "juliadim/errors.hpp"
#include "juliadim/roots.hpp"
#include "juliadim/sphere_index.hpp"

namespace juliadim {

namespace {

struct NewtonResult {
    SpherePoint z;
    bool ok = false;
};

// Newton on F(z) = g_w(z) - z with sequential evaluation; quiet version
// used for candidate polishing
NewtonResult newton_quiet(const GdmsSystem& sys, const SymbolicWord& word,
                          Complex z, double residual_tol, int budget) {
    for (int it = 0; it < budget; ++it) {
        SpherePoint p{z};
        Complex deriv = 1.0;
        bool bad = false;
        for (int s : word) {
            if (p.is_inf()) {
                bad = true;
                break;
            }
            const RationalMap& g = sys.map_of(s);
            deriv *= g.derivative_value(p.value());
            p = g(p);
        }
        if (bad || p.is_inf()) return {};
        const Complex f = p.value() - z;
        if (std::abs(f) < 1e-15 * (1.0 + std::abs(z))) break;
        const Complex fp = deriv - 1.0;
        if (std::abs(fp) < 1e-14) return {};
        const Complex step = f / fp;
        z -= step;
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return {};
        if (std::abs(step) < 1e-15 * (1.0 + std::abs(z))) break;
    }
    SpherePoint p{z};
    for (int s : word) p = sys.map_of(s)(p);
    if (p.is_inf()) return {};
    if (chordal(SpherePoint(z), p) < residual_tol) return {SpherePoint(z), true};
    return {};
}

struct WordOutcome {
    std::vector<RepellingPoint> points;
    bool used_seeds = false;
    bool failed = false;
    bool incomplete = false;
};

WordOutcome process_word(const GdmsSystem& sys, const SymbolicWord& w,
                         const FindRepellingOptions& opts) {
    WordOutcome out;
    const WordMap gw(sys, w, opts.degree_cap);
    const std::uint64_t deg = gw.degree();

    std::vector<Complex> candidates;
    bool explicit_failed = false;
    if (gw.is_explicit()) {
        const RationalMap& m = gw.explicit_map();
        // fixed points solve num(z) - z den(z) = 0
        const ComplexPolynomial fix =
            (m.numerator() - m.denominator() * ComplexPolynomial({0.0, 1.0}))
                .trimmed(1e-13);
        if (fix.degree() >= 1) {
            try {
                candidates = polynomial_roots(fix);
            } catch (const NonConvergence&) {
                explicit_failed = true;
            }
        }
    }

    const int target_total = int(std::min<std::uint64_t>(deg + 1, 1u << 20));
    std::vector<SpherePoint> found;
    std::vector<double> multipliers;

    // the point at infinity goes in first when the word map fixes it;
    // candidates landing chordally within dedup of infinity are escaping
    // orbits whose residual only looks small because the sphere pinches
    // there, so the dedup against it rejects them
    if (gw(SpherePoint::infinity()).is_inf()) {
        found.push_back(SpherePoint::infinity());
        multipliers.push_back(gw.spherical_derivative(SpherePoint::infinity()));
    }

    auto try_candidate = [&](Complex z0) {
        if (int(found.size()) >= target_total) return;
        const NewtonResult r =
            newton_quiet(sys, w, z0, opts.residual_tol, 60);
        if (!r.ok) return;
        for (const SpherePoint& q : found)
            if (chordal(q, r.z) <= opts.dedup_tol) return;
        found.push_back(r.z);
        multipliers.push_back(gw.spherical_derivative(r.z));
    };

    for (const Complex& c : candidates) try_candidate(c);

    // top up from the cloud when the explicit route is unavailable,
    // failed, or did not account for every fixed point
    const bool need_seeds = opts.seed_cloud != nullptr &&
                            (!gw.is_explicit() || explicit_failed ||
                             std::uint64_t(found.size()) < deg);
    if (need_seeds) {
        out.used_seeds = true;
        const auto& bucket =
            opts.seed_cloud->vertices[size_t(gw.from_vertex())];
        if (!bucket.empty()) {
            // stride-permuted sweep over the whole bucket: early coverage
            // like a subsample, full coverage if roots are still missing
            const size_t n = bucket.size();
            const size_t stride = std::max<size_t>(
                1, std::min(n, n / size_t(opts.newton_seeds) + 1));
            for (size_t phase = 0; phase < stride; ++phase) {
                for (size_t k = phase; k < n; k += stride) {
                    if (int(found.size()) >= target_total) break;
                    const SpherePoint& s = bucket[k].z;
                    if (!s.is_inf()) try_candidate(s.value());
                }
                if (int(found.size()) >= target_total) break;
            }
        }
    }
    if (!gw.is_explicit() && opts.seed_cloud == nullptr) {
        out.failed = true; // no route to any candidate
        return out;
    }
    if (explicit_failed && !out.used_seeds) out.failed = true;

    if (std::uint64_t(found.size()) < deg + 1) out.incomplete = true;

    for (size_t k = 0; k < found.size(); ++k) {
        if (!(multipliers[k] > 1.0 + opts.repel_margin)) continue;
        RepellingPoint pt;
        pt.word = w;
        pt.z = found[k];
        pt.multiplier = multipliers[k];
        pt.residual = chordal(gw(found[k]), found[k]);
        out.points.push_back(pt);
    }
    return out;
}

} // namespace

RepellingSet find_repelling(const GdmsSystem& sys, int period,
                            const FindRepellingOptions& opts) {
    if (period < 1) throw Error("period must be >= 1");
    const std::vector<SymbolicWord> words =
        sys.shift().enumerate_words(period, true, opts.word_cap);

    RepellingSet set;
    set.period = period;
    set.words_processed = int(words.size());

    std::vector<WordOutcome> outcomes(words.size());
    const int threads = std::max(1, opts.threads);
    if (threads == 1 || words.size() < 2) {
        for (size_t k = 0; k < words.size(); ++k)
            outcomes[k] = process_word(sys, words[k], opts);
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors{static_cast<size_t>(threads)};
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&, t] {
                try {
                    for (size_t k = next.fetch_add(1); k < words.size();
                         k = next.fetch_add(1))
                        outcomes[k] = process_word(sys, words[k], opts);
                } catch (...) {
                    errors[size_t(t)] = std::current_exception();
                }
            });
        for (auto& th : pool) th.join();
        for (const auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    for (WordOutcome& o : outcomes) {
        set.seeded = set.seeded || o.used_seeds;
        set.words_failed += o.failed ? 1 : 0;
        set.words_incomplete += o.incomplete ? 1 : 0;
        for (RepellingPoint& p : o.points) set.points.push_back(std::move(p));
    }
    return set;
}

SpherePoint refine_newton(const GdmsSystem& sys, const SymbolicWord& word,
                          SpherePoint z0, double tol, int max_iter) {
    if (!sys.shift().admissible(word, true))
        throw Error("refine_newton needs an admissible cyclic word");
    if (z0.is_inf())
        throw DerivativeSingular("refine_newton works in the finite chart");
    Complex z = z0.value();
    for (int it = 0; it < max_iter; ++it) {
        SpherePoint p{z};
        Complex deriv = 1.0;
        for (int s : word) {
            if (p.is_inf())
                throw DerivativeSingular("orbit left the finite chart");
            const RationalMap& g = sys.map_of(s);
            deriv *= g.derivative_value(p.value());
            p = g(p);
        }
        if (p.is_inf()) throw DerivativeSingular("orbit left the finite chart");
        const Complex f = p.value() - z;
        if (chordal(SpherePoint(z), p) < tol) return SpherePoint(z);
        const Complex fp = deriv - 1.0;
        if (std::abs(fp) < 1e-12 * (1.0 + std::abs(deriv)))
            throw DerivativeSingular("F' vanishes at the iterate");
        z -= f / fp;
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw NonConvergence("newton iterate diverged");
    }
    throw NonConvergence("newton budget exhausted");
}

double density_gap(const GdmsSystem& sys,
                   std::span<const RepellingPoint> points,
                   const JuliaCloud& cloud) {
    const int nv = sys.vertex_count();
    std::vector<std::vector<SpherePoint>> per_vertex{static_cast<size_t>(nv)};
    for (const RepellingPoint& p : points)
        per_vertex[size_t(sys.initial_vertex(p.word.front()))].push_back(p.z);

    double gap = 0.0;
    for (int v = 0; v < nv; ++v) {
        if (cloud.vertices[size_t(v)].empty()) continue;
        if (per_vertex[size_t(v)].empty()) return 2.0; // chordal diameter
        const ChordalIndex idx(per_vertex[size_t(v)], 0.05);
        for (const CloudSample& s : cloud.vertices[size_t(v)])
            gap = std::max(gap, idx.nearest(s.z));
    }
    return gap;
}

std::vector<std::vector<SpherePoint>> repelling_seeds(const GdmsSystem& sys,
                                                      int max_period) {
    std::vector<std::vector<SpherePoint>> seeds{static_cast<size_t>(sys.vertex_count())};
    for (int p = 1; p <= max_period; ++p) {
        bool all = true;
        for (const auto& v : seeds)
            if (v.empty()) all = false;
        if (all) break;
        FindRepellingOptions opts;
        const RepellingSet set = find_repelling(sys, p, opts);
        for (const RepellingPoint& pt : set.points) {
            auto& bucket = seeds[size_t(sys.initial_vertex(pt.word.front()))];
            if (bucket.size() < 16) bucket.push_back(pt.z);
        }
    }
    for (size_t v = 0; v < seeds.size(); ++v)
        if (seeds[v].empty())
            throw NoSeed("no repelling seed found at vertex " +
                         std::to_string(v + 1));
    return seeds;
}

} // namespace juliadim
