#pragma once

#include <cstdint>
#include <vector>

#include "juliadim/polynomial.hpp"

namespace juliadim {

struct RootOptions {
    double tol = 1e-12;      // residual tolerance relative to coefficient scale
    int max_sweeps = 200;    // Aberth sweeps per attempt
    int restarts = 3;        // perturbed restarts before giving up
    std::uint64_t seed = 0x9e3779b97f4a7c15ull; // deterministic restart jitter
};

/// All deg(p) roots, with multiplicity, of a polynomial of degree >= 1.
/// Simultaneous Aberth-Ehrlich iteration with seeded perturbation restarts;
/// every returned root has |p(root)| < tol * sum_k |a_k| |root|^k.
/// Throws NonConvergence when the budget is exhausted.
std::vector<Complex> polynomial_roots(const ComplexPolynomial& p,
                                      const RootOptions& opts = {});

} // namespace juliadim
