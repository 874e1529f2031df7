#include <cmath>

#include "doctest.h"
#include "dnls/semiclassical.hpp"
#include "dnls/solver.hpp"
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

TEST_CASE("to_v_frame at t = 1 on the same grid is the identity") {
    const Grid1D g(512, 20.0);
    Field u = gaussian(g, 1.0, 0.3);
    u.t = 1.0;
    const ScaledField v = to_v_frame(u, g);
    CHECK(testutil::max_abs_diff(v.values, u.values) <= 1e-14);
}

TEST_CASE("to_v_frame preserves the L2 norm") {
    const Grid1D g(2048, 60.0);
    const SymbolF F{0.5, 0.2, 0.0};
    for (double t : {1.5, 4.0, 9.0}) {
        const Field u = linear_step(gaussian(g, 1.3, 0.4), t, F);
        const ScaledField v = to_v_frame(u, Grid1D(1024, 6.0));
        CHECK(std::abs(norms(v).l2 - norms(u).l2) <= 1e-8 * norms(u).l2);
        // sup-norm transport ||v||_inf = sqrt(t) ||u||_inf up to interpolation.
        CHECK(norms(v).linf == doctest::Approx(std::sqrt(t) * norms(u).linf).epsilon(1e-3));
    }
}

TEST_CASE("to_v_frame interpolates plane waves exactly") {
    const Grid1D g(256, 10.0);
    const Grid1D yg(128, 1.7);
    for (int m : {-9, 2, 31})
        for (double t : {1.0, 3.3, 5.8}) {
            const double k0 = m * g.dk();
            Field u(g, t);
            for (std::size_t j = 0; j < g.size(); ++j) u.values[j] = std::polar(1.0, k0 * g.x(j));
            const ScaledField v = to_v_frame(u, yg);
            double err = 0.0;
            for (std::size_t j = 0; j < yg.size(); ++j)
                err = std::max(err, std::abs(v.values[j] - std::sqrt(t) * std::polar(1.0, k0 * t * yg.x(j))));
            CHECK(err <= 1e-12 * std::sqrt(t));
        }
}

TEST_CASE("to_v_frame preconditions") {
    const Grid1D g(256, 10.0);
    Field u = gaussian(g);
    u.t = 0.5;
    CHECK_THROWS_AS(to_v_frame(u, Grid1D(64, 2.0)), PreconditionError);
    u.t = 6.0;
    CHECK_THROWS_AS(to_v_frame(u, Grid1D(64, 2.0)), PreconditionError);
    FrameInfo info;
    u.t = 2.0;
    to_v_frame(u, Grid1D(64, 2.0), &info);
    CHECK_FALSE(info.tail_warning);
}

TEST_CASE("make_ygrid resolves the chirp up to t_max") {
    const SymbolF F{0.5, 0.4, 0.0};
    for (double T : {10.0, 100.0, 2000.0}) {
        const Grid1D yg = make_ygrid(5.0, T, F);
        CHECK(T * (5.0 + 0.4) * yg.dx() / (2.0 * F.c2) <= kPi / 2.0 + 1e-12);
    }
}

TEST_CASE("split_v with the identity cutoff returns (v, 0)") {
    const Grid1D g(256, 6.0);
    ScaledField v(g, 3.0);
    v.values = testutil::random_vec(g.size(), 4);
    CutoffSpec id;
    id.identity = true;
    const ScaledCheckpoint ck = split_v(v, SymbolF{}, id);
    CHECK(ck.vlam.values == v.values);
    CHECK(ck.nlamc.linf == 0.0);
}

TEST_CASE("split_v matches the dense oracle at t = 4") {
    const SymbolF F;
    const CutoffSpec cs;
    const Grid1D g(128, 8.0);
    const double t = 4.0;
    DenseOptions dop;
    dop.xi_oversample = 16;
    FilterOptions fo;
    fo.padding = 4;
    fo.oversample = 2;
    const DenseOperator A = weyl_dense(lambda_cutoff_symbol(cs, F, 1.0 / t), 1.0 / t, g, dop);
    ScaledField v(g, t);
    for (std::size_t j = 0; j < g.size(); ++j)
        v.values[j] = std::exp(-0.5 * std::pow(g.x(j) - 0.3, 2)) * std::polar(1.0, 0.2 * g.x(j));
    const ScaledCheckpoint ck = split_v(v, F, cs, fo);
    CHECK(testutil::rel_l2(ck.vlam.values, A.apply(v.values)) <= 1e-6);
    for (std::size_t j = 0; j < g.size(); ++j)
        CHECK(std::abs(ck.vlam.values[j] + ck.vlamc.values[j] - v.values[j]) <= 1e-12);
}

TEST_CASE("re-filtering is bounded by the gamma^2 - gamma part") {
    // |gamma^2 - gamma| <= 1/4 and the chirp transform is unitary.
    const Grid1D g(1024, 6.0);
    const SymbolF F;
    const CutoffSpec cs;
    for (double t : {2.0, 8.0}) {
        ScaledField v(g, t);
        v.values = testutil::random_vec(g.size(), static_cast<std::uint64_t>(t));
        for (std::size_t j = 0; j < g.size(); ++j) v.values[j] *= std::exp(-g.x(j) * g.x(j));
        const ScaledCheckpoint once = split_v(v, F, cs);
        const ScaledCheckpoint twice = split_v(once.vlam, F, cs);
        CVec d(g.size());
        for (std::size_t j = 0; j < g.size(); ++j) d[j] = twice.vlam.values[j] - once.vlam.values[j];
        const double change = norms(d, g.dx()).l2;
        CHECK(change <= 0.25 * once.nv.l2 * (1.0 + 1e-10));
        CHECK(change > 0.0);
    }
}

TEST_CASE("a profile in the kernel of the scaled vector field stays in Lambda") {
    // v = c e^{-i t (y + c1)^2 / (4 c2)}: m v is constant, so v_{Lambda^c} is roundoff.
    const SymbolF F{0.5, 0.3, 0.0};
    const double t = 50.0;
    const Grid1D yg = make_ygrid(3.0, t, F);
    ScaledField v(yg, t);
    const cplx c(0.7, -0.2);
    for (std::size_t j = 0; j < yg.size(); ++j) {
        const double y = yg.x(j) + F.c1;
        v.values[j] = c * std::polar(1.0, -std::fmod(t * y * y / (4.0 * F.c2), 2.0 * kPi));
    }
    const ScaledCheckpoint ck = split_v(v, F, CutoffSpec{});
    CHECK(ck.nlamc.linf <= 1e-12);
}

TEST_CASE("ode_flow: identity at t0 and agreement with RK4") {
    const ModelParams p{1.7, -0.4, 0.9};
    const SymbolF F{0.5, 0.1, 0.0};
    const cplx v0(0.5, 0.9);
    const double y = -1.3;
    CHECK(ode_flow(v0, y, 3.0, 3.0, p, F) == v0);
    CHECK(ode_flow(cplx(0.0), y, 1.0, 50.0, p, F) == cplx(0.0));

    // D_t v = w v + lambda t^{-a/2} |v|^a v, i.e. dv/dt = i (w v + lambda t^{-a/2} |v|^a v).
    const cplx lam(p.lambda1, p.lambda2);
    auto rhs = [&](double t, cplx v) {
        return cplx(0.0, 1.0) * (F.w(y) * v + lam * std::pow(t, -0.5 * p.alpha) * std::pow(std::abs(v), p.alpha) * v);
    };
    const double t0 = 1.0, t1 = 20.0;
    const int n = 100000;
    const double h = (t1 - t0) / n;
    cplx v = v0;
    for (int i = 0; i < n; ++i) {
        const double t = t0 + i * h;
        const cplx k1 = rhs(t, v), k2 = rhs(t + 0.5 * h, v + 0.5 * h * k1);
        const cplx k3 = rhs(t + 0.5 * h, v + 0.5 * h * k2), k4 = rhs(t + h, v + h * k3);
        v += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    CHECK(std::abs(ode_flow(v0, y, t0, t1, p, F) - v) <= 1e-8 * std::abs(v));
    CHECK_THROWS_AS(ode_flow(v0, y, t0, t1, {2.0, 0.0, 1.0}, F), PreconditionError);
    CHECK_THROWS_AS(ode_flow(v0, y, t0, t1, {1.5, 1.0, 0.0}, F), PreconditionError);
}

TEST_CASE("remainder rates: zero field and too few checkpoints") {
    const Grid1D g(256, 4.0);
    std::vector<ScaledCheckpoint> cks;
    for (int m = 0; m < 12; ++m) cks.push_back(split_v(ScaledField(g, 10.0 * std::pow(1.25, m)), SymbolF{}, CutoffSpec{}));
    const RemainderSeries rs = remainder_rates(cks, {1.5, 0.0, 1.0}, SymbolF{});
    REQUIRE(rs.rows.size() == 12);
    for (const auto& r : rs.rows) {
        CHECK(r.vlamc_inf == 0.0);
        CHECK(r.vlamc_l2 == 0.0);
        CHECK(r.R_inf_proxy == 0.0);
    }
    cks.resize(7);
    CHECK_THROWS_AS(remainder_rates(cks, {1.5, 0.0, 1.0}, SymbolF{}), PreconditionError);
}

TEST_CASE("free flow: ||v_{Lambda^c}||_inf t^{1/4} stays bounded over a decade") {
    const Grid1D g(8192, 2000.0);
    const SymbolF F;
    const Field u0 = gaussian(g, 1.0, 0.5);
    const Grid1D yg = make_ygrid(6.0, 200.0, F);
    std::vector<double> scaled;
    for (double t = 20.0; t <= 200.0 * (1.0 + 1e-12); t *= std::sqrt(std::sqrt(10.0))) {
        const ScaledField v = to_v_frame(linear_step(u0, t, F), yg);
        scaled.push_back(split_v(v, F, CutoffSpec{}).nlamc.linf * std::pow(t, 0.25));
    }
    REQUIRE(scaled.size() == 5);
    for (double s : scaled) CHECK(s <= 2.0 * scaled.front() + 1e-12);
}
