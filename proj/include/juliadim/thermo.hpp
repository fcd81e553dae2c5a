#pragma once

#include "juliadim/periodic.hpp"

namespace juliadim {

/// Geometric potential -log ||g'(z)|| of the head map at a fiber point.
double geometric_potential(const RationalMap& g, const SpherePoint& z);

/// Closed-form dimension bound 1 + log((3+sqrt 5)/2)/log n for the bundled
/// three-vertex family; monotone decreasing in n. Requires n >= 5.
double analytic_bound_section3(int n);

/// Log-multipliers of all period-n repelling points; everything the
/// periodic-orbit pressure estimator needs at any t.
struct PeriodicPressureData {
    int period = 0;
    std::vector<double> log_multipliers;
    bool seeded = false;
    int words = 0;
    int words_incomplete = 0;
};

PeriodicPressureData periodic_data(const GdmsSystem& sys, int period,
                                   const FindRepellingOptions& opts = {});

/// P_n(t) = (1/n) log sum over period-n repelling points of m^(-t).
/// Throws EmptyOrbitSet when no points are available.
double pressure_periodic(const PeriodicPressureData& data, double t);
double pressure_periodic(const GdmsSystem& sys, double t, int period,
                         const FindRepellingOptions& opts = {});

struct OperatorEigenData {
    double lambda = 0.0;
    std::vector<double> h;       // eigenfunction values on the support
    std::vector<double> weights; // left eigenvector, sums to 1
    double residual = 0.0;       // sup norm of lambda^-1 L h - h over sup h
    int iterations = 0;
    double interpolation_radius = 0.0;
};

/// Discretized Perron-Frobenius operator on per-vertex point supports
/// subsampled from a Julia cloud. Each support point stores its full
/// admissible preimage fan (exact roots of g(w) = z); function values at
/// the roots are read off the nearest support sample.
class TransferOperator {
public:
    TransferOperator(const GdmsSystem& sys, const JuliaCloud& cloud,
                     int support_per_vertex = 1500);

    int support_size() const { return int(points_.size()); }
    const std::vector<SpherePoint>& support() const { return points_; }
    double interpolation_radius() const { return interp_radius_; }

    /// Power iteration at parameter t; the Rayleigh-type ratio of sup norms
    /// estimates the leading eigenvalue. Throws NonConvergence when the
    /// residual stays above 1e-3.
    OperatorEigenData eigendata(double t, int max_iters = 500,
                                double tol = 1e-6) const;

    double pressure(double t) const { return std::log(eigendata(t).lambda); }

private:
    struct Link {
        int target;       // support index carrying the function value
        double gnorm;     // ||g'(w)|| at the exact preimage root
    };
    std::vector<SpherePoint> points_;        // flat support
    std::vector<std::vector<Link>> fan_;     // per support point
    double interp_radius_ = 0.0;
};

enum class Estimator { periodic, periodic_extrapolated, transfer_operator };

/// Bundles periodic data for n = 1..n_max and an optional transfer
/// operator; evaluates any estimator at any t.
class PressureEngine {
public:
    PressureEngine(const GdmsSystem& sys, int n_max,
                   const FindRepellingOptions& opts = {});

    int n_max() const { return int(data_.size()); }
    const PeriodicPressureData& data(int n) const { return data_[size_t(n - 1)]; }
    void attach_operator(const TransferOperator* op) { op_ = op; }
    bool has_operator() const { return op_ != nullptr; }

    double periodic(double t) const; // at n_max
    /// Least-squares slope of n P_n(t) against n over n in
    /// {max(2, n_max-2), ..., n_max}; n = 1 is excluded because its
    /// non-repelling exclusions bias the slope.
    double extrapolated(double t) const;
    double operator_pressure(double t) const;
    double pressure(double t, Estimator e) const;

private:
    std::vector<PeriodicPressureData> data_;
    const TransferOperator* op_ = nullptr;
};

struct DeltaResult {
    double delta = 0.0;
    double lo = 0.0, hi = 0.0;       // final bracket
    double p_lo = 0.0, p_hi = 0.0;   // estimator values at the bracket ends
    Estimator estimator = Estimator::periodic_extrapolated;
    int evaluations = 0;
};

/// Bisection for the unique pressure zero. The bracket expands upward when
/// P(hi) > 0; throws BracketFailure when no sign change exists.
DeltaResult find_delta(const PressureEngine& engine, double lo = 0.0,
                       double hi = 2.0, double tol = 1e-3,
                       Estimator e = Estimator::periodic_extrapolated);

struct PressureProfile {
    std::vector<double> grid;
    std::vector<double> p_periodic;      // at n_max
    std::vector<double> p_extrapolated;
    std::vector<double> p_operator;      // empty if no operator attached
    std::vector<double> op_residual;
    int n_max = 0;
    DeltaResult delta;
};

PressureProfile build_profile(const PressureEngine& engine,
                              const std::vector<double>& grid,
                              const DeltaResult& delta);
void write_profile_tsv(const PressureProfile& profile, const std::string& path);

} // namespace juliadim
