#include <cmath>

#include "doctest.h"
#include "dnls/diagnostics.hpp"
#include "test_util.hpp"

using namespace dnls;

namespace {

Field gaussian(const Grid1D& g, double A = 1.0, double k0 = 0.0) {
    GaussianIC ic;
    ic.amplitude = A;
    ic.velocity = k0;
    return make_initial(ic, g);
}

}  // namespace

TEST_CASE("L at t = 0 is multiplication by x") {
    const Grid1D g(512, 20.0);
    const Field u = gaussian(g, 1.0, 0.4);
    const Field Lu = L_apply(u, 0.0, SymbolF{0.7, 0.3, 0.1});
    for (std::size_t j = 0; j < g.size(); ++j) CHECK(std::abs(Lu.values[j] - g.x(j) * u.values[j]) <= 1e-14);
}

TEST_CASE("L of a modulated gaussian") {
    // u = e^{i k0 x - x^2/2}: D u = (k0 + i x) u, so L u = (x (1 + 2 i c2 t) + 2 c2 t k0) u.
    const Grid1D g(1024, 30.0);
    const SymbolF F{0.5, 0.0, 0.0};
    const double k0 = 1.3;
    const Field u = gaussian(g, 1.0, k0);
    for (double t : {0.7, 3.0}) {
        const Field Lu = L_apply(u, t, F, VfForm::Direct);
        double err = 0.0;
        for (std::size_t j = 0; j < g.size(); ++j) {
            const double x = g.x(j);
            const cplx expect = (x * cplx(1.0, 2.0 * F.c2 * t) + 2.0 * F.c2 * t * k0) * u.values[j];
            err = std::max(err, std::abs(Lu.values[j] - expect));
        }
        CHECK(err <= 1e-8);
    }
}

TEST_CASE("direct and chirp forms of L agree") {
    const Grid1D g(4096, 40.0);
    const SymbolF F{0.8, 0.4, -0.2};
    for (double t : {1.0, 2.5, 6.0}) {
        const Field u = gaussian(g, 1.5, -0.7);
        REQUIRE(vf_chirp_resolved(u, t, F, 0.5));
        const Field a = L_apply_direct(u, t, F), b = L_apply_chirp(u, t, F);
        CHECK(testutil::rel_l2(b.values, a.values) <= 1e-10);
        FormCheck fc;
        L_apply(u, t, F, VfForm::Auto, &fc);
        CHECK(fc.rel_diff <= 1e-10);
    }
    CHECK_THROWS_AS(L_apply(gaussian(g), -1.0, F), PreconditionError);
}

TEST_CASE("L(t) intertwines the free flow") {
    // e^{itF(D)} x u0 = L(t) e^{itF(D)} u0.
    const Grid1D g(2048, 60.0);
    const SymbolF F{0.5, 0.6, 0.2};
    const Field u0 = gaussian(g, 1.0, 0.3);
    Field xu0 = u0;
    for (std::size_t j = 0; j < g.size(); ++j) xu0.values[j] *= g.x(j);
    for (double t : {0.5, 2.0, 5.0}) {
        const Field lhs = linear_step(xu0, t, F);
        const Field rhs = L_apply(linear_step(u0, t, F), t, F, VfForm::Direct);
        CHECK(testutil::rel_l2(rhs.values, lhs.values) <= 1e-9);
    }
}

TEST_CASE("gn_ratios are homogeneous of degree zero") {
    const Grid1D g(2048, 40.0);
    const SymbolF F;
    const Field u = linear_step(gaussian(g, 1.0, 0.5), 2.0, F);
    const GnRatios r = gn_ratios(u, 2.0, F);
    CHECK(r.r1 > 0.0);
    CHECK(r.r4 > 0.0);
    for (cplx c : {cplx(3.7, 0.0), cplx(0.0, -0.01), std::polar(12.0, 1.1)}) {
        Field s = u;
        for (auto& z : s.values) z *= c;
        const GnRatios q = gn_ratios(s, 2.0, F);
        CHECK(q.r1 == doctest::Approx(r.r1).epsilon(1e-12));
        CHECK(q.r4 == doctest::Approx(r.r4).epsilon(1e-12));
    }
    CHECK_THROWS_AS(gn_ratios(u, 0.5, F), PreconditionError);
    CHECK_THROWS_AS(gn_ratios(Field(g, 2.0), 2.0, F), PreconditionError);
}

TEST_CASE("vector-field monotonicity on a dissipative run") {
    const Grid1D g(2048, 120.0);
    const ModelParams p{1.5, 0.0, 1.0};
    StepConfig c;
    c.dt = 1e-2;
    c.t_max = 20.0;
    const Trajectory tr = strang_evolve(gaussian(g, 2.0), c, p, SymbolF{});
    const VFReport rep = vf_report(tr);
    REQUIRE(rep.rows.size() == tr.checkpoints.size());
    const MonotonicityVerdict v = vf_monotonicity(rep, tr.x_norm0, p);
    CHECK(v.asserted);
    CHECK(v.passed);
    CHECK(v.max_violation <= 1e-3);
    for (std::size_t i = 1; i < v.series.size(); ++i) CHECK(v.series[i].second <= v.series[i - 1].second * (1.0 + 1e-3));
}

TEST_CASE("non-large dissipation is reported, not asserted") {
    VFReport rep;
    rep.rows.push_back({1.0, 1.0, 2.0, 1.0, 1.0, 0.0, 0.0});
    const MonotonicityVerdict v = vf_monotonicity(rep, 1.0, {1.5, 10.0, 0.1});
    CHECK_FALSE(v.asserted);
    CHECK(v.max_violation == doctest::Approx(1.0));
}

TEST_CASE("zero initial datum") {
    const Grid1D g(256, 20.0);
    StepConfig c;
    c.dt = 1e-2;
    c.t_max = 12.0;
    GaussianIC ic;
    ic.amplitude = 0.0;
    const Trajectory tr = strang_evolve(make_initial(ic, g), c, {1.5, 0.0, 1.0}, SymbolF{});
    const VFReport rep = vf_report(tr);
    for (const auto& r : rep.rows) {
        CHECK(r.Lnorm == 0.0);
        CHECK(r.r1 == 0.0);
    }
    const MonotonicityVerdict v = vf_monotonicity(rep, tr.x_norm0, {1.5, 0.0, 1.0});
    CHECK(v.passed);
    CHECK(v.max_violation == 0.0);
    const GrowthVerdict gv = vf_growth_L2sq(rep, {1.5, 0.0, 1.0});
    CHECK(gv.degenerate);
}

TEST_CASE("growth fit needs eight points in the last decade") {
    VFReport rep;
    for (int i = 0; i < 5; ++i) rep.rows.push_back({std::pow(2.0, i), 1.0, 1.0, 1.0, 1.0, 0.0, 0.0});
    CHECK_THROWS_AS(vf_growth_L2sq(rep, {1.5, 0.0, 1.0}), PreconditionError);
}
