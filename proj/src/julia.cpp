#include "juliadim/julia.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <thread>
#include <unordered_set>

#include "juliadim/errors.hpp"
#include "juliadim/roots.hpp"
#include "juliadim/sphere_index.hpp"

namespace juliadim {

namespace {

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
    int below(int n) { return int(next() % std::uint64_t(n)); }
};

/// All preimages of z under g, with multiplicity (deg g of them).
std::vector<SpherePoint> preimages(const RationalMap& g, const SpherePoint& z) {
    std::vector<SpherePoint> out;
    const int d = g.degree();
    if (z.is_inf()) {
        // g(w) = inf: roots of the denominator, plus infinity when the map
        // fixes it
        if (g.denominator().degree() >= 1)
            for (const Complex& r : polynomial_roots(g.denominator()))
                out.emplace_back(r);
        for (int k = int(out.size()); k < d; ++k)
            out.push_back(SpherePoint::infinity());
        return out;
    }
    // num(w) - z den(w) = 0; a degree drop means some preimages are at inf
    const ComplexPolynomial p =
        (g.numerator() - g.denominator() * z.value()).trimmed(1e-14);
    if (p.degree() >= 1)
        for (const Complex& r : polynomial_roots(p)) out.emplace_back(r);
    for (int k = int(out.size()); k < d; ++k)
        out.push_back(SpherePoint::infinity());
    return out;
}

struct WalkerTask {
    std::vector<std::vector<CloudSample>> buckets; // per vertex
    std::vector<int> quota;                        // per vertex
};

} // namespace

JuliaCloud inverse_iteration(const GdmsSystem& sys,
                             const std::vector<std::vector<SpherePoint>>& seeds,
                             const InverseIterationOptions& opts) {
    const int nv = sys.vertex_count();
    if (int(seeds.size()) != nv) throw NoSeed("need a seed list per vertex");
    for (int v = 0; v < nv; ++v)
        if (seeds[size_t(v)].empty())
            throw NoSeed("vertex " + std::to_string(v + 1) + " has no seed");
    if (opts.samples_per_vertex < 1 || opts.burn_in < 1)
        throw Error("samples and burn-in must be >= 1");

    // incoming (edge, map) symbol choices per vertex; degree weighting
    // repeats a symbol deg-many times
    std::vector<std::vector<int>> incoming{static_cast<size_t>(nv)};
    for (int v = 0; v < nv; ++v) {
        for (int s : sys.symbols_into(v)) {
            const int w = opts.degree_weighted ? sys.map_of(s).degree() : 1;
            for (int k = 0; k < w; ++k) incoming[size_t(v)].push_back(s);
        }
        if (incoming[size_t(v)].empty())
            throw NoSeed("vertex " + std::to_string(v + 1) +
                         " has no incoming edge");
    }

    const int walkers = std::max(1, opts.walkers);
    std::vector<WalkerTask> tasks{static_cast<size_t>(walkers)};
    const int share = (opts.samples_per_vertex + walkers - 1) / walkers;
    for (int w = 0; w < walkers; ++w) {
        tasks[size_t(w)].buckets.assign(size_t(nv), {});
        tasks[size_t(w)].quota.assign(size_t(nv), share);
    }

    auto run_walker = [&](int w) {
        WalkerTask& task = tasks[size_t(w)];
        SplitMix rng{opts.rng_seed * 0x100000001b3ull + std::uint64_t(w) + 1};
        const int start_vertex = w % nv;
        const auto& vseeds = seeds[size_t(start_vertex)];
        const SpherePoint seed = vseeds[size_t(w / nv) % vseeds.size()];

        int vertex = start_vertex;
        SpherePoint z = seed;
        int age = 0;
        long long remaining = 0;
        for (int v = 0; v < nv; ++v) remaining += task.quota[size_t(v)];
        // generous step budget; the walk is recurrent on irreducible systems
        long long budget = 400ll * (remaining + opts.burn_in) + 100000;

        while (remaining > 0 && budget-- > 0) {
            const auto& choices = incoming[size_t(vertex)];
            const int sym = choices[size_t(rng.below(int(choices.size())))];
            const RationalMap& g = sys.map_of(sym);
            std::vector<SpherePoint> pre;
            try {
                pre = preimages(g, z);
            } catch (const NonConvergence&) {
                vertex = start_vertex; // walk restarts from the seed
                z = seed;
                age = 0;
                continue;
            }
            const SpherePoint parent = z;
            z = pre[size_t(rng.below(int(pre.size())))];
            vertex = sys.initial_vertex(sym);
            ++age;
            if (age > opts.burn_in && task.quota[size_t(vertex)] > 0) {
                // the first recorded state's parent was never recorded, so
                // it carries no provenance (symbol -1)
                const bool first = age == opts.burn_in + 1;
                task.buckets[size_t(vertex)].push_back(
                    CloudSample{z, first ? -1 : sym, parent});
                --task.quota[size_t(vertex)];
                --remaining;
            }
        }
        if (remaining > 0)
            throw NonConvergence("inverse iteration walker starved");
    };

    const int threads = std::max(1, opts.threads);
    if (threads == 1) {
        for (int w = 0; w < walkers; ++w) run_walker(w);
    } else {
        std::vector<std::thread> pool;
        std::atomic<int> next{0};
        std::vector<std::exception_ptr> errors{static_cast<size_t>(threads)};
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&, t] {
                try {
                    for (int w = next.fetch_add(1); w < walkers;
                         w = next.fetch_add(1))
                        run_walker(w);
                } catch (...) {
                    errors[size_t(t)] = std::current_exception();
                }
            });
        for (auto& th : pool) th.join();
        for (const auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    JuliaCloud cloud;
    cloud.vertices.assign(size_t(nv), {});
    cloud.seed_points = seeds;
    cloud.seed = opts.rng_seed;
    cloud.burn_in = opts.burn_in;
    cloud.samples_per_vertex = opts.samples_per_vertex;
    for (int v = 0; v < nv; ++v) {
        auto& dst = cloud.vertices[size_t(v)];
        dst.reserve(size_t(opts.samples_per_vertex));
        for (int w = 0; w < walkers; ++w) {
            for (const CloudSample& s : tasks[size_t(w)].buckets[size_t(v)]) {
                if (int(dst.size()) >= opts.samples_per_vertex) break;
                dst.push_back(s);
            }
        }
    }
    return cloud;
}

ConsistencyReport forward_consistency(const GdmsSystem& sys,
                                      const JuliaCloud& cloud, double eps,
                                      int threads) {
    const int nv = sys.vertex_count();
    std::vector<ChordalIndex> index;
    index.reserve(size_t(nv));
    for (int v = 0; v < nv; ++v) {
        const auto pts = cloud.points_at(v);
        index.emplace_back(std::span<const SpherePoint>(pts), eps);
    }

    std::atomic<size_t> passed{0}, checked{0};
    auto work = [&](int v, size_t lo, size_t hi) {
        size_t p = 0, c = 0;
        for (size_t k = lo; k < hi; ++k) {
            const CloudSample& s = cloud.vertices[size_t(v)][k];
            ++c;
            if (s.symbol < 0) {
                ++p; // no provenance recorded: vacuous pass
                continue;
            }
            const RationalMap& g = sys.map_of(s.symbol);
            const int target = sys.terminal_vertex(s.symbol);
            if (index[size_t(target)].within(g(s.z), eps)) ++p;
        }
        passed += p;
        checked += c;
    };

    for (int v = 0; v < nv; ++v) {
        const size_t n = cloud.vertices[size_t(v)].size();
        const int t = std::max(1, threads);
        if (t == 1 || n < 1000) {
            work(v, 0, n);
        } else {
            std::vector<std::thread> pool;
            for (int i = 0; i < t; ++i)
                pool.emplace_back(work, v, n * size_t(i) / size_t(t),
                                  n * size_t(i + 1) / size_t(t));
            for (auto& th : pool) th.join();
        }
    }

    ConsistencyReport rep;
    rep.checked = checked;
    rep.passed = passed;
    rep.eps = eps;
    rep.pass_fraction = checked == 0 ? 1.0 : double(passed) / double(checked);
    return rep;
}

namespace {

constexpr double kChartBound = 1e6;

struct Raster {
    int res;
    std::vector<std::uint32_t> hits;
    Viewport vp;

    Raster(int r, const Viewport& v) : res(r), hits(size_t(r) * r, 0), vp(v) {}

    void add(const SpherePoint& p) {
        if (p.is_inf()) return;
        const double x = p.value().real(), y = p.value().imag();
        if (x < vp.x0 || x >= vp.x1 || y < vp.y0 || y >= vp.y1) return;
        const int px = int((x - vp.x0) / (vp.x1 - vp.x0) * res);
        const int py = int((y - vp.y0) / (vp.y1 - vp.y0) * res);
        if (px >= 0 && px < res && py >= 0 && py < res)
            ++hits[size_t(res - 1 - py) * res + px];
    }
};

} // namespace

void render_ppm(const JuliaCloud& cloud, std::optional<int> vertex,
                const Viewport& vp, int resolution, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open image file: " + path);

    if (vertex) {
        Raster r(resolution, vp);
        for (const CloudSample& s : cloud.vertices[size_t(*vertex)]) r.add(s.z);
        std::uint32_t peak = 1;
        for (auto h : r.hits) peak = std::max(peak, h);
        out << "P5\n" << resolution << " " << resolution << "\n255\n";
        std::vector<unsigned char> row(static_cast<size_t>(resolution));
        for (int y = 0; y < resolution; ++y) {
            for (int x = 0; x < resolution; ++x) {
                const std::uint32_t h = r.hits[size_t(y) * resolution + x];
                row[size_t(x)] =
                    h == 0 ? 0
                           : (unsigned char)(64.0 + 191.0 * std::log1p(h) /
                                                        std::log1p(peak));
            }
            out.write(reinterpret_cast<const char*>(row.data()), resolution);
        }
    } else {
        static const unsigned char palette[][3] = {
            {255, 80, 80},  {80, 255, 80},  {80, 120, 255},
            {255, 210, 60}, {220, 80, 255}, {60, 230, 230}};
        std::vector<Raster> rasters;
        for (size_t v = 0; v < cloud.vertices.size(); ++v) {
            rasters.emplace_back(resolution, vp);
            for (const CloudSample& s : cloud.vertices[v]) rasters[v].add(s.z);
        }
        out << "P6\n" << resolution << " " << resolution << "\n255\n";
        std::vector<unsigned char> row(size_t(resolution) * 3);
        for (int y = 0; y < resolution; ++y) {
            for (int x = 0; x < resolution; ++x) {
                double rgb[3] = {0, 0, 0};
                for (size_t v = 0; v < rasters.size(); ++v) {
                    if (rasters[v].hits[size_t(y) * resolution + x] == 0)
                        continue;
                    const auto& c = palette[v % 6];
                    for (int k = 0; k < 3; ++k) rgb[k] += c[k];
                }
                for (int k = 0; k < 3; ++k)
                    row[size_t(x) * 3 + size_t(k)] =
                        (unsigned char)std::min(255.0, rgb[k]);
            }
            out.write(reinterpret_cast<const char*>(row.data()),
                      std::streamsize(row.size()));
        }
    }
    if (!out) throw IoError("failed writing image file: " + path);
}

BoxDimEstimate box_counting_dim(std::span<const SpherePoint> points,
                                std::span<const double> scales) {
    if (scales.size() < 4) throw Error("box counting needs at least 4 scales");
    std::vector<std::pair<double, double>> finite;
    size_t excluded = 0;
    for (const SpherePoint& p : points) {
        if (p.is_inf() || std::abs(p.value()) > kChartBound) {
            ++excluded;
            continue;
        }
        finite.emplace_back(p.value().real(), p.value().imag());
    }
    if (finite.size() < 10000)
        throw InsufficientSamples("box counting needs >= 10^4 finite samples");

    double x0 = finite[0].first, y0 = finite[0].second;
    for (const auto& [x, y] : finite) {
        x0 = std::min(x0, x);
        y0 = std::min(y0, y);
    }

    BoxDimEstimate est;
    est.used_samples = finite.size();
    est.excluded = excluded;
    std::vector<double> lx, ly;
    for (double s : scales) {
        std::unordered_set<std::uint64_t> boxes;
        for (const auto& [x, y] : finite) {
            const std::uint64_t ix = std::uint64_t((x - x0) / s);
            const std::uint64_t iy = std::uint64_t((y - y0) / s);
            boxes.insert(ix * 0x9e3779b97f4a7c15ull + iy);
        }
        est.scales.push_back(s);
        est.counts.push_back(boxes.size());
        lx.push_back(std::log(1.0 / s));
        ly.push_back(std::log(double(boxes.size())));
    }

    const size_t n = lx.size();
    double mx = 0, my = 0;
    for (size_t k = 0; k < n; ++k) {
        mx += lx[k];
        my += ly[k];
    }
    mx /= double(n);
    my /= double(n);
    double sxy = 0, sxx = 0;
    for (size_t k = 0; k < n; ++k) {
        sxy += (lx[k] - mx) * (ly[k] - my);
        sxx += (lx[k] - mx) * (lx[k] - mx);
    }
    est.slope = sxx == 0.0 ? 0.0 : sxy / sxx;
    double ss = 0;
    for (size_t k = 0; k < n; ++k) {
        const double r = ly[k] - (my + est.slope * (lx[k] - mx));
        ss += r * r;
    }
    est.residual = std::sqrt(ss / double(n));
    return est;
}

BoxDimEstimate box_counting_dim(const JuliaCloud& cloud,
                                std::optional<int> vertex,
                                std::span<const double> scales) {
    const std::vector<SpherePoint> pts =
        vertex ? cloud.points_at(*vertex) : cloud.all_points();
    return box_counting_dim(pts, scales);
}

std::vector<double> default_scales(std::span<const SpherePoint> points,
                                   int count) {
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (const SpherePoint& p : points) {
        if (p.is_inf() || std::abs(p.value()) > kChartBound) continue;
        x0 = std::min(x0, p.value().real());
        x1 = std::max(x1, p.value().real());
        y0 = std::min(y0, p.value().imag());
        y1 = std::max(y1, p.value().imag());
    }
    double side = std::max(x1 - x0, y1 - y0);
    if (!(side > 0.0)) side = 1.0;
    std::vector<double> scales;
    double s = side / 8.0;
    for (int k = 0; k < count; ++k) {
        scales.push_back(s);
        s /= 2.0;
    }
    return scales;
}

namespace {

void write_points(const JuliaCloud& cloud, std::ostream& out) {
    char buf[128];
    for (size_t v = 0; v < cloud.vertices.size(); ++v)
        for (const CloudSample& s : cloud.vertices[v]) {
            if (s.z.is_inf())
                std::snprintf(buf, sizeof buf, "%zu inf inf\n", v + 1);
            else
                std::snprintf(buf, sizeof buf, "%zu %.12g %.12g\n", v + 1,
                              s.z.value().real(), s.z.value().imag());
            out << buf;
        }
}

} // namespace

void write_point_list(const JuliaCloud& cloud, std::ostream& out) {
    write_points(cloud, out);
}

void write_point_list(const JuliaCloud& cloud, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open point list file: " + path);
    write_points(cloud, out);
    if (!out) throw IoError("failed writing point list: " + path);
}

} // namespace juliadim
