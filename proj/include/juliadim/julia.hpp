#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>

#include "juliadim/gdms.hpp"

namespace juliadim {

struct CloudSample {
    SpherePoint z;
    int symbol;        // (map, edge) symbol whose map sends z to parent;
                       // -1 when no provenance was recorded
    SpherePoint parent;
};

/// Finite point samples approximating the per-vertex Julia sets, produced
/// by the admissible backward walk. Samples at vertex i(e) are preimages
/// under some map of Gamma_e of samples at t(e).
struct JuliaCloud {
    std::vector<std::vector<CloudSample>> vertices;
    std::vector<std::vector<SpherePoint>> seed_points;
    std::uint64_t seed = 0;
    int burn_in = 0;
    int samples_per_vertex = 0;

    size_t total() const {
        size_t n = 0;
        for (const auto& v : vertices) n += v.size();
        return n;
    }
    std::vector<SpherePoint> points_at(int v) const {
        std::vector<SpherePoint> out;
        out.reserve(vertices[size_t(v)].size());
        for (const CloudSample& s : vertices[size_t(v)]) out.push_back(s.z);
        return out;
    }
    std::vector<SpherePoint> all_points() const {
        std::vector<SpherePoint> out;
        out.reserve(total());
        for (const auto& v : vertices)
            for (const CloudSample& s : v) out.push_back(s.z);
        return out;
    }
};

struct InverseIterationOptions {
    int samples_per_vertex = 100000;
    int burn_in = 50;
    std::uint64_t rng_seed = 42;
    bool degree_weighted = false; // pick (edge, map) with probability ~ deg
    int walkers = 8;              // fixed logical walker count; output does
                                  // not depend on the thread count
    int threads = 1;
};

/// Random backward walk seeded at repelling fixed points, one independent
/// deterministic walker stream per logical walker. Deterministic given
/// rng_seed. Throws NoSeed if some vertex has no seed.
JuliaCloud inverse_iteration(const GdmsSystem& sys,
                             const std::vector<std::vector<SpherePoint>>& seeds,
                             const InverseIterationOptions& opts = {});

struct ConsistencyReport {
    double pass_fraction = 0.0;
    size_t checked = 0;
    size_t passed = 0;
    double eps = 0.0;
};

/// For each sample and its recorded (edge, map) provenance, checks that the
/// forward image lands within eps (chordal) of the cloud at the terminal
/// vertex.
ConsistencyReport forward_consistency(const GdmsSystem& sys,
                                      const JuliaCloud& cloud, double eps,
                                      int threads = 1);

struct Viewport {
    double x0 = -2.0, x1 = 2.0, y0 = -2.0, y1 = 2.0;
};

/// Density raster of cloud samples over the viewport in the z chart.
/// Grayscale (P5) for a single vertex, per-vertex colors (P6) otherwise.
void render_ppm(const JuliaCloud& cloud, std::optional<int> vertex,
                const Viewport& vp, int resolution, const std::string& path);

struct BoxDimEstimate {
    std::vector<double> scales;
    std::vector<size_t> counts;
    double slope = 0.0;
    double residual = 0.0; // rms residual of the log-log fit
    size_t used_samples = 0;
    size_t excluded = 0; // samples beyond the chart bound
};

/// Box-counting slope over the z-chart bounding square. Needs >= 4 scales
/// and >= 10^4 samples. Samples with |z| above the chart bound (1e6) are
/// excluded and counted.
BoxDimEstimate box_counting_dim(std::span<const SpherePoint> points,
                                std::span<const double> scales);
BoxDimEstimate box_counting_dim(const JuliaCloud& cloud,
                                std::optional<int> vertex,
                                std::span<const double> scales);

/// Geometric ladder of box sides from side/8 down through `count` halvings
/// of the sample bounding square.
std::vector<double> default_scales(std::span<const SpherePoint> points,
                                   int count = 9);

/// One "vertex re im" row per sample, vertices 1-based, 12 significant
/// digits. Samples at infinity are written as "inf inf".
void write_point_list(const JuliaCloud& cloud, std::ostream& out);
void write_point_list(const JuliaCloud& cloud, const std::string& path);

} // namespace juliadim
