#pragma once

#include "juliadim/julia.hpp"

namespace juliadim {

/// A repelling periodic point of the skew product: a cyclic word, a fiber
/// point fixed by the word map, its spherical multiplier and the chordal
/// fixed-point residual.
struct RepellingPoint {
    SymbolicWord word;
    SpherePoint z;
    double multiplier = 0.0;
    double residual = 0.0;
};

struct FindRepellingOptions {
    int degree_cap = 4096;      // explicit fixed-point polynomial route
    int newton_seeds = 2048;    // cloud seeds per word (when a cloud is given)
    double repel_margin = 1e-6; // keep multiplier > 1 + margin
    double dedup_tol = 1e-8;    // chordal, per word
    double residual_tol = 1e-9; // chordal fixed-point residual
    std::uint64_t word_cap = 10'000'000;
    const JuliaCloud* seed_cloud = nullptr;
    int threads = 1;
};

struct RepellingSet {
    std::vector<RepellingPoint> points;
    int period = 0;
    bool seeded = false;     // some word drew Newton seeds from the cloud
    int words_processed = 0;
    int words_failed = 0;    // root solver failures (words skipped)
    int words_incomplete = 0; // fewer distinct fixed points than deg(g_w)
};

/// All repelling periodic points of period p: for each admissible cyclic
/// word of length p, every fixed point of the word map with spherical
/// multiplier > 1. Explicit polynomial roots serve as candidates where the
/// composed degree is within the cap; every candidate is polished by Newton
/// on the sequentially evaluated map and verified by residual. Cloud seeds
/// top up the search until the count of distinct finite fixed points
/// reaches deg(g_w).
RepellingSet find_repelling(const GdmsSystem& sys, int period,
                            const FindRepellingOptions& opts = {});

/// Newton refinement of a fixed-point candidate for the word map, evaluated
/// pointwise via the chain rule. Throws NonConvergence after the budget and
/// DerivativeSingular when F' vanishes at an iterate.
SpherePoint refine_newton(const GdmsSystem& sys, const SymbolicWord& word,
                          SpherePoint z0, double tol, int max_iter = 100);

/// sup over cloud samples of the chordal distance to the nearest periodic
/// point at the same vertex; a finite-scale density proxy.
double density_gap(const GdmsSystem& sys,
                   std::span<const RepellingPoint> points,
                   const JuliaCloud& cloud);

/// Per-vertex repelling fixed points for seeding the backward walk, from
/// periods 1..max_period. Throws NoSeed if some vertex stays empty.
std::vector<std::vector<SpherePoint>> repelling_seeds(const GdmsSystem& sys,
                                                      int max_period = 3);

} // namespace juliadim
