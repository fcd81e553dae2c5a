#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "juliadim/thermo.hpp"

using namespace juliadim;

namespace {

GdmsSystem circle_system() {
    return single_loop_system({RationalMap::power(2)});
}

JuliaCloud circle_cloud(int n = 20000) {
    InverseIterationOptions opts;
    opts.samples_per_vertex = n;
    return inverse_iteration(circle_system(), {{SpherePoint(1.0, 0.0)}}, opts);
}

// closed form for the z^2 self-loop: all 2^n - 1 period-n points carry
// multiplier 2^n, so P_n(t) = (1/n) log((2^n - 1) 2^(-nt))
double circle_pressure(int n, double t) {
    return (std::log(std::pow(2.0, n) - 1.0) - double(n) * t * std::log(2.0)) /
           double(n);
}

} // namespace

TEST_CASE("geometric potential is minus log of the derivative norm") {
    const RationalMap g = RationalMap::power(2);
    CHECK(geometric_potential(g, SpherePoint(1.0, 0.0)) ==
          doctest::Approx(-std::log(2.0)));
}

TEST_CASE("periodic pressure matches the circle closed form to 1e-12") {
    const GdmsSystem sys = circle_system();
    for (int n = 1; n <= 10; ++n) {
        const PeriodicPressureData data = periodic_data(sys, n);
        REQUIRE(int(data.log_multipliers.size()) ==
                int(std::pow(2.0, n)) - 1);
        for (double t : {0.0, 0.5, 1.0, 1.7}) {
            CHECK(std::abs(pressure_periodic(data, t) - circle_pressure(n, t)) <
                  1e-12);
        }
    }
}

TEST_CASE("pressure at t = 0 counts periodic points") {
    // any system: P_n(0) = (1/n) log #(period-n repelling points), bounded
    // by log sum of generator degrees
    const GdmsSystem sys = example_section3(5);
    const auto seeds = repelling_seeds(sys);
    InverseIterationOptions copts;
    copts.samples_per_vertex = 20000;
    copts.threads = 2;
    const JuliaCloud cloud = inverse_iteration(sys, seeds, copts);
    FindRepellingOptions opts;
    opts.seed_cloud = &cloud;
    opts.threads = 2;
    const PeriodicPressureData data = periodic_data(sys, 2, opts);
    CHECK(data.words_incomplete == 0);
    const double p2 = pressure_periodic(data, 0.0);
    CHECK(p2 == doctest::Approx(std::log(172.0) / 2.0));
    CHECK(p2 <= std::log(15.0) + 0.1);
}

TEST_CASE("analytic bound for the bundled family") {
    const double b5 = analytic_bound_section3(5);
    CHECK(b5 > 1.59);
    CHECK(b5 < 1.60);
    const double b10 = analytic_bound_section3(10);
    CHECK(b10 == doctest::Approx(1.0 + std::log((3.0 + std::sqrt(5.0)) / 2.0) /
                                           std::log(10.0)));
    CHECK(b10 == doctest::Approx(1.418).epsilon(1e-3));
    // monotone decreasing in n
    double prev = b5;
    for (int n = 6; n <= 40; ++n) {
        const double b = analytic_bound_section3(n);
        CHECK(b < prev);
        prev = b;
    }
    CHECK_THROWS_AS(analytic_bound_section3(4), DomainError);
}

TEST_CASE("delta for the circle is 1 within 0.01") {
    const GdmsSystem sys = circle_system();
    PressureEngine engine(sys, 10);
    const DeltaResult r = find_delta(engine, 0.0, 2.0, 1e-3);
    CHECK(std::abs(r.delta - 1.0) < 0.01);
    CHECK(r.p_lo > 0.0);
    CHECK(r.p_hi < 0.0);
    // raw estimator lands close too
    const DeltaResult raw =
        find_delta(engine, 0.0, 2.0, 1e-3, Estimator::periodic);
    CHECK(std::abs(raw.delta - 1.0) < 0.01);
}

TEST_CASE("degenerate brackets") {
    const GdmsSystem sys = circle_system();
    PressureEngine engine(sys, 8);
    const DeltaResult r = find_delta(engine, 0.0, 2.0, 1e-3);
    // evaluating exactly at the zero accepts; elsewhere it throws
    const DeltaResult same = find_delta(engine, r.delta, r.delta, 1e-2);
    CHECK(same.delta == r.delta);
    CHECK_THROWS_AS(find_delta(engine, 0.3, 0.3, 1e-3), BracketFailure);
}

TEST_CASE("bracket failure for a degenerate (mobius) system") {
    const GdmsSystem sys =
        single_loop_system({RationalMap::mobius(2.0, 0.0, 0.0, 1.0)});
    PressureEngine engine(sys, 3);
    // P(t) = -t log 2: never positive on (0, 2], no sign change from P(0)=0
    CHECK_THROWS_AS(find_delta(engine, 0.0, 2.0, 1e-3), BracketFailure);
}

TEST_CASE("strict monotonicity of both estimators on the circle") {
    const GdmsSystem sys = circle_system();
    PressureEngine engine(sys, 8);
    const JuliaCloud cloud = circle_cloud();
    const TransferOperator op(sys, cloud, 800);
    engine.attach_operator(&op);

    double prev_p = 1e300, prev_e = 1e300, prev_o = 1e300;
    for (int k = 0; k <= 10; ++k) {
        const double t = 0.2 * k;
        const double p = engine.periodic(t);
        const double ex = engine.extrapolated(t);
        const double o = engine.operator_pressure(t);
        CHECK(p < prev_p);
        CHECK(ex < prev_e);
        CHECK(o < prev_o);
        prev_p = p;
        prev_e = ex;
        prev_o = o;
    }
}

TEST_CASE("transfer operator on the circle: exact eigenvalues") {
    const GdmsSystem sys = circle_system();
    const JuliaCloud cloud = circle_cloud();
    const TransferOperator op(sys, cloud, 1000);

    // every preimage of a circle point carries ||g'|| = 2 exactly, so the
    // discretized operator has row sums 2 * 2^-t
    const OperatorEigenData e0 = op.eigendata(0.0);
    CHECK(std::abs(e0.lambda - 2.0) < 1e-2);
    const OperatorEigenData e1 = op.eigendata(1.0);
    CHECK(std::abs(e1.lambda - 1.0) < 5e-3);
    CHECK(e1.residual < 1e-3);
    CHECK(e1.iterations <= 500);

    // eigenfunction strictly positive, weights a probability vector
    double hmin = 1e300, hmax = 0.0, wsum = 0.0;
    for (double h : e1.h) {
        hmin = std::min(hmin, h);
        hmax = std::max(hmax, h);
    }
    for (double w : e1.weights) {
        CHECK(w >= 0.0);
        wsum += w;
    }
    CHECK(hmin > 0.0);
    CHECK(hmin / hmax > 0.0);
    CHECK(wsum == doctest::Approx(1.0).epsilon(1e-10));

    // estimator agreement at t in {0, delta, 2 delta}
    PressureEngine engine(sys, 8);
    engine.attach_operator(&op);
    const double delta = find_delta(engine).delta;
    for (double t : {0.0, delta, 2.0 * delta}) {
        CHECK(std::abs(engine.periodic(t) - engine.operator_pressure(t)) <
              0.05);
    }
}

TEST_CASE("profile export writes one row per grid point") {
    const GdmsSystem sys = circle_system();
    PressureEngine engine(sys, 6);
    const DeltaResult delta = find_delta(engine);
    std::vector<double> grid;
    for (int k = 0; k <= 10; ++k) grid.push_back(0.2 * k);
    const PressureProfile prof = build_profile(engine, grid, delta);
    write_profile_tsv(prof, "test_profile.tsv");
    std::ifstream in("test_profile.tsv");
    REQUIRE(in.good());
    std::string line;
    size_t rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 13); // header + 11 grid rows + delta footer
    std::remove("test_profile.tsv");
}
