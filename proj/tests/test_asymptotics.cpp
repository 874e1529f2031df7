#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "doctest.h"
#include "dnls/asymptotics.hpp"
#include "dnls/pipeline.hpp"
#include "test_util.hpp"

using namespace dnls;

namespace {

// t_m = 2^{m / 40}, so dyads t -> 2t land on the schedule.
std::vector<double> dyadic_schedule(double T) {
    std::vector<double> t;
    for (int m = 0; std::pow(2.0, m / 40.0) <= T * (1.0 + 1e-12); ++m) t.push_back(std::pow(2.0, m / 40.0));
    return t;
}

CVec bump(const Grid1D& g, double A, double w) {
    CVec v(g.size());
    for (std::size_t j = 0; j < g.size(); ++j)
        v[j] = A * std::exp(-g.x(j) * g.x(j) / (2.0 * w * w)) * std::polar(1.0, 0.3 * g.x(j));
    return v;
}

}  // namespace

TEST_CASE("phase integral of a vanishing field is zero") {
    const Grid1D yg(64, 3.0);
    const auto t = dyadic_schedule(50.0);
    const std::vector<CVec> v(t.size(), CVec(yg.size()));
    const PhaseAccumulator acc = phi_accumulate(yg, t, v, {1.5, 0.0, 1.0});
    for (const auto& row : acc.phi)
        for (double x : row) CHECK(x == 0.0);
}

TEST_CASE("phase integral of a frozen profile is c^a ln t") {
    // |v| = c s^{1/2 - 1/a} gives s^{-a/2} |v|^a = c^a / s.
    const Grid1D yg(16, 1.0);
    const double a = 1.5, c = 0.8;
    std::vector<double> t;
    for (double s = 1.0; s <= 100.0; s *= 1.02) t.push_back(s);
    std::vector<CVec> v;
    for (double s : t) v.emplace_back(yg.size(), cplx(0.0, c * std::pow(s, 0.5 - 1.0 / a)));
    const PhaseAccumulator acc = phi_accumulate(yg, t, v, {a, 0.0, 1.0});
    for (std::size_t m = 1; m < t.size(); m += 37) {
        const double expect = std::pow(c, a) * std::log(t[m]);
        CHECK(std::abs(acc.phi[m][3] - expect) <= 1e-4 * expect);
        CHECK(acc.err[m][3] <= 1e-4 * expect);
    }
}

TEST_CASE("phase integral refuses coarse schedules") {
    const Grid1D yg(16, 1.0);
    const std::vector<CVec> v(3, CVec(yg.size(), 1.0));
    CHECK_THROWS_AS(phi_accumulate(yg, {1.0, 1.05, 1.2}, v, {1.5, 0.0, 1.0}), PreconditionError);
    CHECK_THROWS_AS(phi_accumulate(yg, {1.2, 1.25, 1.3}, v, {1.5, 0.0, 1.0}), PreconditionError);
}

TEST_CASE("z_of: modulus identity and the trivial frame") {
    const SymbolF F{0.5, -0.5, 0.0};  // w vanishes at y = 0.5
    const Grid1D yg(64, 2.0);
    const ModelParams p{1.5, 0.7, 1.2};
    ScaledField v(yg, 7.0);
    v.values = testutil::random_vec(yg.size(), 12);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    RVec phi(yg.size());
    for (auto& x : phi) x = u(rng);
    const CVec z = z_of(v, phi, F, p);
    for (std::size_t j = 0; j < yg.size(); ++j)
        CHECK(std::abs(std::abs(z[j]) - std::abs(v.values[j]) * std::exp(p.lambda2 * phi[j])) <=
              1e-12 * std::abs(z[j]));
    const std::size_t j0 = 40;  // y = 0.5
    REQUIRE(yg.x(j0) == 0.5);
    RVec zero(yg.size(), 0.0);
    CHECK(z_of(v, zero, F, p)[j0] == v.values[j0]);
    RVec big(yg.size(), 701.0);
    CHECK_THROWS_AS(z_of(v, big, F, p), NumericalError);
}

TEST_CASE("z is conserved along the exact reduced flow") {
    const SymbolF F{0.5, 0.2, 0.0};
    const ModelParams p{1.6, 0.5, 1.0};
    const Grid1D yg(64, 3.0);
    ScaledField v0(yg, 1.0);
    v0.values = bump(yg, 1.2, 0.8);
    const auto t = dyadic_schedule(128.0);
    std::vector<CVec> vl;
    for (double s : t) vl.push_back(ode_reference(v0, s, p, F).values);
    const PhaseAccumulator acc = phi_accumulate(yg, t, vl, p);
    std::vector<CVec> z;
    for (std::size_t m = 0; m < t.size(); ++m) {
        ScaledField sf(yg, t[m]);
        sf.values = vl[m];
        z.push_back(z_of(sf, acc.phi[m], F, p));
    }
    // Drift of z is bounded by |lambda| |z| times the Richardson error of Phi.
    const double zmax = norms(z[0], yg.dx()).linf;
    const double lam = std::abs(cplx(p.lambda1, p.lambda2));
    double e = 0.0;
    for (const auto& row : acc.err) e = std::max(e, *std::max_element(row.begin(), row.end()));
    CHECK(e > 0.0);
    for (std::size_t m = 0; m < t.size(); ++m) CHECK(testutil::max_abs_diff(z[m], z[0]) <= 2.0 * lam * zmax * e);
    CHECK(identity4_defect(acc, z, p, support_mask(z.back(), 1e-3)) <= 1e-4);
}

TEST_CASE("extract_zplus: constant and zero series") {
    const Grid1D yg(32, 2.0);
    const auto t = dyadic_schedule(256.0);
    const CVec c = bump(yg, 0.9, 0.7);
    const AsymptoticProfile prof = extract_zplus(yg, t, std::vector<CVec>(t.size(), c));
    CHECK(prof.zplus == c);
    CHECK(prof.converged);
    REQUIRE(prof.final_dyads.size() == 3);
    CHECK(prof.final_dyads.back().t2 == doctest::Approx(256.0));
    for (const auto& d : prof.dyads) CHECK(d.diff == 0.0);

    const AsymptoticProfile zp = extract_zplus(yg, t, std::vector<CVec>(t.size(), CVec(yg.size())));
    CHECK(norms(zp.zplus, yg.dx()).linf == 0.0);

    // Differences that grow are reported, not thrown.
    std::vector<CVec> grow;
    for (double s : t) {
        CVec g = c;
        for (auto& x : g) x *= 1.0 + 1e-3 * s;
        grow.push_back(g);
    }
    const AsymptoticProfile bad = extract_zplus(yg, t, grow);
    CHECK_FALSE(bad.converged);
    CHECK(bad.verdict.rfind("not converged", 0) == 0);
    CHECK_THROWS_AS(extract_zplus(yg, {1.0, 2.0}, std::vector<CVec>(2, c)), PreconditionError);
}

TEST_CASE("extract_zplus recovers the decay exponent of synthetic data") {
    const Grid1D yg(32, 2.0);
    const auto t = dyadic_schedule(1024.0);
    const CVec c = bump(yg, 1.0, 0.7);
    std::vector<CVec> z;
    for (double s : t) {
        CVec g = c;
        for (auto& x : g) x *= 1.0 + 0.3 * std::pow(s, -0.7);
        z.push_back(g);
    }
    const AsymptoticProfile prof = extract_zplus(yg, t, z);
    CHECK(prof.converged);
    CHECK(prof.kappa_est == doctest::Approx(0.7).epsilon(1e-6));
}

TEST_CASE("psi_+ vanishes when z is constant") {
    const Grid1D yg(32, 2.0);
    const ModelParams p{1.7, 0.4, 1.3};
    const auto t = dyadic_schedule(512.0);
    const CVec zp = bump(yg, 0.9, 0.6);
    PhaseAccumulator acc;
    acc.ygrid = yg;
    acc.t = t;
    for (double s : t) {
        // e^{a l2 Phi} = K exactly.
        const RVec K = K_of(s, zp, p);
        RVec phi(yg.size());
        for (std::size_t j = 0; j < phi.size(); ++j) phi[j] = std::log(K[j]) / (p.alpha * p.lambda2);
        acc.phi.push_back(phi);
        acc.err.emplace_back(yg.size(), 0.0);
    }
    const std::vector<CVec> z(t.size(), zp);
    const AsymptoticProfile prof = extract_zplus(yg, t, z);
    const PsiPlus ps = psi_plus(acc, z, prof, p);
    for (std::size_t j = 0; j < yg.size(); ++j) {
        CHECK(std::abs(ps.primary[j]) <= 1e-12 * (1.0 + K_of(512.0, zp, p)[j]));
        CHECK(ps.secondary[j] == 0.0);
    }
    CHECK(ps.agree);
}

TEST_CASE("K, S and the modification factor") {
    const Grid1D yg(32, 2.0);
    const ModelParams p{1.5, -0.8, 0.6};
    const CVec zp = bump(yg, 1.1, 0.5);
    for (double k : K_of(1.0, zp, p)) CHECK(k == 1.0);

    const RVec psi(yg.size(), 0.3);
    const double t = 37.0;
    const RVec K = K_of(t, zp, p);
    const RVec S = S_of(t, zp, psi, p);
    const CVec mf = modification_factor(t, zp, psi, p);
    const cplx lam(p.lambda1, p.lambda2);
    for (std::size_t j = 0; j < yg.size(); ++j) {
        const double a = p.alpha;
        CHECK(K[j] == doctest::Approx(1.0 + 2.0 * a * p.lambda2 / (2.0 - a) * std::pow(std::abs(zp[j]), a) *
                                                (std::pow(t, 1.0 - a / 2.0) - 1.0)));
        CHECK(std::abs(mf[j]) == doctest::Approx(std::pow(K[j] + psi[j], -1.0 / a)).epsilon(1e-13));
        CHECK(std::abs(mf[j] - std::exp(cplx(0.0, 1.0) * lam * S[j])) <= 1e-12);
    }

    // z_+ = 0: K = 1 and S = ln(1 + psi) / (a l2).
    const CVec z0(yg.size());
    const RVec S0 = S_of(t, z0, psi, p);
    for (double s : S0) CHECK(s == doctest::Approx(std::log(1.3) / (p.alpha * p.lambda2)).epsilon(1e-14));

    RVec neg(yg.size(), 0.0);
    neg[5] = -2.0;
    try {
        S_of(1.0, zp, neg, p, &yg);
        FAIL("expected a precondition error");
    } catch (const PreconditionError& e) {
        CHECK(std::string(e.what()).find("y") != std::string::npos);
    }
}

TEST_CASE("u_+ of a gaussian profile") {
    const Grid1D yg(256, 12.0);
    CVec zp(yg.size());
    for (std::size_t j = 0; j < yg.size(); ++j) zp[j] = std::exp(-0.5 * yg.x(j) * yg.x(j));

    const Grid1D xg(256, 16.0);
    const Field up = u_plus(zp, yg, SymbolF{0.5, 0.0, 0.0}, xg);
    double err = 0.0;
    for (std::size_t j = 0; j < xg.size(); ++j)
        err = std::max(err, std::abs(up.values[j] - std::polar(std::exp(-0.5 * xg.x(j) * xg.x(j)), -0.25 * kPi)));
    CHECK(err <= 1e-10);
    CHECK(norms(up).l2 == doctest::Approx(norms(zp, yg.dx()).l2).epsilon(1e-10));

    // General c1, c2: (4 pi c2)^{-1/2} sqrt(2 pi) e^{-x^2 / (8 c2^2)} e^{-i pi/4} e^{-i c1 x / (2 c2)}.
    const SymbolF F{0.7, 0.4, 0.0};
    const Grid1D xg2(512, 20.0);
    const Field u2 = u_plus(zp, yg, F, xg2);
    err = 0.0;
    for (std::size_t j = 0; j < xg2.size(); ++j) {
        const double x = xg2.x(j);
        const cplx expect = std::sqrt(2.0 * kPi / (4.0 * kPi * F.c2)) * std::exp(-x * x / (8.0 * F.c2 * F.c2)) *
                            std::polar(1.0, -0.25 * kPi - F.c1 * x / (2.0 * F.c2));
        err = std::max(err, std::abs(u2.values[j] - expect));
    }
    CHECK(err <= 1e-10);

    CHECK_THROWS_AS(u_plus(zp, yg, SymbolF{0.5, 0.0, 0.0}, Grid1D(64, 16.0)), PreconditionError);
    CHECK_THROWS_AS(u_plus(zp, yg, SymbolF{0.5, 0.0, 0.0}, Grid1D(1024, 64.0)), PreconditionError);
}

TEST_CASE("zero profile: u_+ = 0 and the scattering residual is ||u||") {
    const Grid1D yg(256, 12.0);
    const Grid1D xg(256, 16.0);
    const CVec zp(yg.size());
    const Field up = u_plus(zp, yg, SymbolF{}, xg);
    CHECK(norms(up).linf == 0.0);

    AsymptoticProfile prof;
    prof.ygrid = yg;
    prof.zplus = zp;
    prof.psi_plus.assign(yg.size(), 0.0);
    Field u(xg, 3.0);
    u.values = testutil::random_vec(xg.size(), 2);
    CHECK(scattering_residual(u, prof, up, SymbolF{}, {1.5, 0.0, 1.0}) == doctest::Approx(norms(u).l2).epsilon(1e-14));
}

TEST_CASE("profile residuals of the model itself") {
    const SymbolF F{0.5, 0.1, 0.0};
    const ModelParams p{1.5, 0.3, 1.0};
    const Grid1D yg(512, 4.0);
    AsymptoticProfile prof;
    prof.ygrid = yg;
    prof.zplus = bump(yg, 0.8, 0.6);
    prof.psi_plus.assign(yg.size(), 0.05);
    const double t = 20.0;
    const Field u = profile_model(Grid1D(4096, 80.0), t, prof, F, p);
    const ProfileResidual r = profile_residuals(u, prof, F, p);
    CHECK(r.r_inf <= 1e-14);
    CHECK(r.r_l2 <= 1e-14);

    AsymptoticProfile zero = prof;
    zero.zplus.assign(yg.size(), 0.0);
    const ProfileResidual r0 = profile_residuals(Field(u.grid, t), zero, F, p);
    CHECK(r0.r_inf == 0.0);
    CHECK(r0.r_l2 == 0.0);

    Field wide(Grid1D(4096, 200.0), t);
    for (std::size_t j = 0; j < wide.grid.size(); ++j) wide.values[j] = std::exp(-std::pow(wide.grid.x(j) / 100.0, 2));
    CHECK_THROWS_AS(profile_residuals(wide, prof, F, p), PreconditionError);
}

TEST_CASE("universal limit target") {
    CHECK(universal_limit_target({1.9, 0.0, 1.0}) == doctest::Approx(std::pow(0.1 / 3.8, 1.0 / 1.9)).epsilon(1e-15));
    for (double a : {1.2, 1.81, 1.95}) {
        const double r = universal_limit_target({a, 0.3, 2.0}) / universal_limit_target({a, 0.3, 1.0});
        CHECK(r == doctest::Approx(std::pow(2.0, -1.0 / a)).epsilon(1e-14));
    }
    CHECK(universal_limit_target({2.0 - 1e-8, 0.0, 1.0}) < 1e-3);
    CHECK(alpha_zero() == doctest::Approx(1.8042476415070754));
    CHECK_THROWS_AS(universal_limit_target({2.0, 0.0, 1.0}), PreconditionError);

    const ModelParams p{1.9, 0.0, 1.0};
    const double L = universal_limit_target(p);
    std::vector<std::pair<double, double>> s;
    for (double t = 1.0; t <= 2000.0; t *= 1.5) s.emplace_back(t, L * std::pow(t, -1.0 / 1.9) * (1.0 + 1.0 / t));
    const LimitProbe probe = universal_limit_probe(s, p);
    CHECK(probe.monotone);
    CHECK(probe.within_tol);
    CHECK(probe.alpha_in_range);
}

TEST_CASE("ode_reference: identity and the amplitude limit") {
    const SymbolF F;
    const ModelParams p{1.2, 0.5, 1.0};
    const Grid1D yg(16, 1.0);
    ScaledField v0(yg, 2.0);
    v0.values = bump(yg, 1.0, 0.5);
    CHECK(ode_reference(v0, 2.0, p, F).values == v0.values);

    const double K0 = universal_limit_target(p);
    for (double A : {0.5, 3.0}) {
        ScaledField c(yg, 1.0);
        c.values.assign(yg.size(), cplx(A, 0.0));
        auto rel = [&](double t) {
            const double v = std::abs(ode_reference(c, t, p, F).values[0]);
            return std::abs(std::pow(t, 1.0 / p.alpha - 0.5) * v - K0) / K0;
        };
        CHECK(rel(1e6) <= 5e-3);
        CHECK(rel(1e4) / rel(1e6) == doctest::Approx(std::pow(100.0, 1.0 - p.alpha / 2.0)).epsilon(0.05));
    }
}
