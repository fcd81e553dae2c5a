#pragma once

#include "juliadim/thermo.hpp"

namespace juliadim {

/// Euclidean disc in the z chart. The disjointness test is conservative:
/// it certifies only when the center gap strictly exceeds the radius sum.
struct Disc {
    Complex center{0.0, 0.0};
    double radius = 0.0;

    bool contains(Complex z) const { return std::abs(z - center) <= radius; }
    bool contains(const SpherePoint& p) const {
        return !p.is_inf() && contains(p.value());
    }
};

inline bool discs_disjoint(const Disc& a, const Disc& b) {
    return std::abs(a.center - b.center) > a.radius + b.radius;
}

/// Parameters of a detected affine-conjugated power map a(z-p)^n + q.
struct PowerForm {
    Complex scale, center, offset; // a, p, q
    int exponent = 0;
};

/// Detects the certified forms: a(z-p)^n + q, or any degree-one map.
std::optional<PowerForm> detect_conjugated_power(const RationalMap& g,
                                                 double rel_tol = 1e-9);

struct BscItem {
    int edge = 0;
    int map_index = 0;
    Disc enclosure;      // contains g^{-1}(U)
    bool certified = false;
    bool unbounded = false; // preimage reaches infinity; no finite enclosure
};

/// Backward-separating-condition certificate: per initial vertex, every
/// pair of (edge, map) items except identical pairs must have disjoint
/// preimage enclosures.
struct BscCertificate {
    Disc domain; // the reference disc U
    std::vector<std::vector<BscItem>> per_vertex;
    // pair verdicts per vertex: [vertex][i][j] for items i < j
    std::vector<std::vector<std::vector<bool>>> disjoint;
    bool all_certified = true;
    bool verdict = false;

    bool fully_certified() const { return verdict && all_certified; }
};

/// Requires every cloud sample inside U (CloudEscapesU otherwise, reported
/// as RootFailure-free Error subtype below). Certified enclosures for
/// affine-conjugated power maps and Moebius maps; everything else falls
/// back to sampled preimage hulls flagged NON-CERTIFIED.
struct CloudEscapesU : Error {
    using Error::Error;
};

BscCertificate check_bsc_certified(const GdmsSystem& sys,
                                   const JuliaCloud& cloud, const Disc& domain,
                                   int boundary_samples = 64);

/// JSON report mirroring the config schema with verdicts and enclosure
/// parameters per item.
std::string bsc_report_json(const BscCertificate& cert, const GdmsSystem& sys);

enum class CheckOutcome { pass, inconclusive };

/// Sufficient non-elementarity certificate per vertex: at least three
/// distinct repelling periodic points of self-class words. Inconclusive is
/// not a disproof.
std::vector<CheckOutcome> check_non_elementary(const GdmsSystem& sys,
                                               int max_period = 2);

struct HyperbolicReport {
    bool pass = false;
    double min_gap = 0.0;   // over all sampled post-critical points
    double required_gap = 0.0;
    size_t orbit_points = 0;
    bool truncated = false; // orbit cap hit, partial result
    std::vector<double> per_vertex_gap;
};

/// HEURISTIC: samples the post-critical sets by pushing critical values
/// forward along admissible words up to the given depth and measures the
/// chordal gap to the vertex clouds.
HyperbolicReport check_hyperbolic_heuristic(const GdmsSystem& sys,
                                            const JuliaCloud& cloud,
                                            int depth = 6, double gap = 0.1,
                                            size_t orbit_cap = 200000);

/// True iff every degree-one self-class word map of length <= max_len is
/// loxodromic; vacuously true when every generator has degree >= 2.
bool check_loxodromic_condition(const GdmsSystem& sys, int max_len = 4,
                                std::uint64_t cap = 1000000);

struct ExpansionEstimate {
    double log_c = 0.0;      // fitted log C
    double log_lambda = 0.0; // fitted log lambda
    std::vector<double> per_period_min; // min log multiplier per period
    double fit_slack = 0.0;  // max amount the fit line sits above a minimum
    bool expansion_consistent = false;  // lambda > 1
};

/// Least-squares fit of min log multiplier against the period. Needs data
/// for at least 3 periods.
ExpansionEstimate estimate_expansion(
    std::span<const PeriodicPressureData> per_period);

/// Generator-level screen for exceptional points at a vertex: totally
/// invariant points of single generators whose one-step preimage set under
/// all outgoing maps stays below 3 points.
std::vector<SpherePoint> exceptional_candidates(const GdmsSystem& sys,
                                                int vertex);

} // namespace juliadim
