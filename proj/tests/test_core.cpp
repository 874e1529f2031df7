#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "dnls/core.hpp"
#include "test_util.hpp"

using namespace dnls;

TEST_CASE("validate_params classification") {
    CHECK(validate_params({1.8, 0.0, 1.0}) == Dissipativity::StrictlyDissipative);
    CHECK(validate_params({1.5, 1.0, -0.1}) == Dissipativity::Invalid);
    CHECK(validate_params({1.5, 1.0, 0.0}) == Dissipativity::Invalid);
    // alpha = 2 is outside (0, 2) even though the threshold arithmetic alone says non-large.
    CHECK(dissipativity_threshold(2.0, 2.0 * std::sqrt(3.0)) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(validate_params({2.0, 2.0 * std::sqrt(3.0), 1.0}) == Dissipativity::Invalid);
    CHECK(validate_params({1.9, 2.0 * std::sqrt(3.0), 1.0}) == Dissipativity::DissipativeNonLarge);
    CHECK(validate_params({0.0, 0.0, 1.0}) == Dissipativity::Invalid);
}

TEST_CASE("validate_params is invariant under lambda1 -> -lambda1") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> a(-0.5, 2.5), l1(-5.0, 5.0), l2(-1.0, 3.0);
    for (int i = 0; i < 2000; ++i) {
        const ModelParams p{a(rng), l1(rng), l2(rng)};
        CHECK(validate_params(p) == validate_params({p.alpha, -p.lambda1, p.lambda2}));
    }
}

TEST_CASE("symbol evaluation") {
    const SymbolF f{0.5, 0.0, 0.0};
    CHECK(eval_w(f, 0.0) == 0.0);
    CHECK(1.0 * 2.0 + eval_F(f, 2.0) == doctest::Approx(4.0));
    CHECK(eval_w(f, 1.0) + 9.0 / 2.0 == doctest::Approx(4.0));
    CHECK(eval_Fprime({1.0, 3.0, -1.0}, 2.0) == 7.0);
    CHECK_THROWS_AS(SymbolF({0.0, 1.0, 0.0}).validate(), ConfigError);
}

TEST_CASE("phase identity x xi + F(xi) = w(x) + (x + F'(xi))^2 / (4 c2) on grids") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> c(-3.0, 3.0), c2d(0.05, 4.0);
    for (int trial = 0; trial < 20; ++trial) {
        const SymbolF f{c2d(rng), c(rng), c(rng)};
        const Grid1D g(64, 10.0);
        for (std::size_t j = 0; j < g.size(); ++j)
            for (std::size_t k = 0; k < g.size(); ++k) {
                const double x = g.x(j), xi = g.k(k);
                const double lhs = x * xi + f.F(xi);
                const double rhs = f.w(x) + std::pow(x + f.Fprime(xi), 2) / (4.0 * f.c2);
                CHECK(std::abs(lhs - rhs) <= 1e-10 * (1.0 + std::abs(x * xi) + std::abs(f.F(xi))));
            }
    }
}

TEST_CASE("grid spacing identities") {
    for (std::size_t n : {8u, 128u, 4096u})
        for (double L : {1.0, 8.0, 1234.5}) {
            const Grid1D g(n, L);
            CHECK(g.dx() == doctest::Approx(2.0 * L / n));
            CHECK(g.dk() == doctest::Approx(kPi / L));
            CHECK(n * g.dx() * g.dk() == doctest::Approx(2.0 * kPi));
            CHECK(g.k(g.nyquist_bin()) == doctest::Approx(-static_cast<double>(n / 2) * g.dk()));
        }
}

TEST_CASE("norms") {
    const Grid1D g(64, 1.0);
    Field f(g, 0.0);
    Norms n = norms(f);
    CHECK(n.l2 == 0.0);
    CHECK(n.linf == 0.0);
    CHECK(lp_norm(f.values, g.dx(), 3.0) == 0.0);

    for (auto& z : f.values) z = 1.0;
    n = norms(f);
    CHECK(n.l2 == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(n.linf == 1.0);
    CHECK(lp_norm(f.values, g.dx(), 3.0) == doctest::Approx(std::cbrt(2.0)).epsilon(1e-14));

    CHECK_THROWS_AS(norms(CVec{}, 1.0), PreconditionError);
}

TEST_CASE("norms match a naive summation oracle") {
    const Grid1D g(1024, 3.0);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const CVec v = testutil::random_vec(g.size(), seed);
        long double s2 = 0, s4 = 0, m = 0;
        for (std::size_t j = 0; j < v.size(); ++j) {
            const long double a = std::hypot(static_cast<long double>(v[j].real()), static_cast<long double>(v[j].imag()));
            s2 += a * a;
            s4 += std::pow(a, 3.8L);
            m = std::max(m, a);
        }
        const double l2 = static_cast<double>(std::sqrt(s2 * g.dx()));
        const double lp = static_cast<double>(std::pow(s4 * g.dx(), 1.0L / 3.8L));
        const Norms n = norms(v, g.dx());
        CHECK(std::abs(n.l2 - l2) <= 1e-12 * l2);
        CHECK(std::abs(n.linf - static_cast<double>(m)) <= 1e-12 * static_cast<double>(m));
        CHECK(std::abs(lp_norm(v, g.dx(), 3.8) - lp) <= 1e-12 * lp);
        // Hoelder on the box.
        CHECK(n.l2 <= std::sqrt(2.0 * g.half_width()) * n.linf * (1.0 + 1e-14));
    }
}

TEST_CASE("gaussian initial datum mass") {
    const Grid1D g(4096, 60.0);
    for (double A : {1.0, 2.0, 0.3})
        for (double s : {1.0, 0.5, 2.0}) {
            GaussianIC ic;
            ic.amplitude = A;
            ic.width = s;
            ic.chirp = 0.4;
            ic.velocity = 1.5;
            const Field u = make_initial(ic, g);
            const double mass = std::pow(norms(u).l2, 2);
            CHECK(std::abs(mass - A * A * s * std::sqrt(kPi)) <= 1e-10 * A * A * s * std::sqrt(kPi));
            CHECK(weighted_l2(u, 1) > 0.0);
            CHECK(std::isfinite(weighted_l2(u, 2)));
        }
    GaussianIC zero;
    zero.amplitude = 0.0;
    const Field z = make_initial(zero, g);
    CHECK(norms(z).linf == 0.0);
}

TEST_CASE("two-bump mass is the sum of the bump masses") {
    const Grid1D g(4096, 60.0);
    TwoBumpIC ic;
    ic.amplitude1 = 1.0;
    ic.amplitude2 = 2.0;
    ic.width = 1.0;
    ic.separation = 10.0;
    const double mass = std::pow(norms(make_initial(ic, g)).l2, 2);
    const double expect = (1.0 + 4.0) * std::sqrt(kPi);
    CHECK(std::abs(mass - expect) <= 1e-8 * expect);
}

TEST_CASE("initial data are deterministic and finite") {
    const Grid1D g(512, 20.0);
    SuperGaussianIC sg;
    sg.order = 3;
    const Field a = make_initial(sg, g), b = make_initial(sg, g);
    CHECK(a.values == b.values);
    CHECK(all_finite(a.values));
    CHECK_THROWS_AS(make_initial(GaussianIC{1.0, 0.0}, g), ConfigError);
}

TEST_CASE("field files round-trip and file initial data") {
    const auto dir = std::filesystem::temp_directory_path() / "dnls_core_test";
    std::filesystem::create_directories(dir);
    const Grid1D g(256, 12.0);
    Field f(g, 3.25);
    f.values = testutil::random_vec(g.size(), 5);

    const std::string tp = (dir / "f.txt").string(), bp = (dir / "f.bin").string();
    write_field_text(tp, f);
    write_field_binary(bp, f);
    for (const auto& p : {tp, bp}) {
        const Field r = read_field(p);
        CHECK(r.grid == g);
        CHECK(r.t == 3.25);
        CHECK(r.values == f.values);
    }

    const Field u0 = make_initial(FileIC{bp}, g);
    CHECK(u0.values == f.values);
    CHECK(u0.t == 0.0);
    CHECK_THROWS_AS(make_initial(FileIC{bp}, Grid1D(128, 12.0)), ConfigError);
    CHECK_THROWS_AS(make_initial(FileIC{(dir / "missing.bin").string()}, g), ConfigError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("spectral derivative of a plane wave") {
    const Grid1D g(128, kPi);
    Field f(g, 0.0);
    const int m = 5;
    for (std::size_t j = 0; j < g.size(); ++j) f.values[j] = std::polar(1.0, m * g.x(j));
    const CVec d = apply_D(g, f.values);
    for (std::size_t j = 0; j < g.size(); ++j) CHECK(std::abs(d[j] - double(m) * f.values[j]) < 1e-11);
}

TEST_CASE("energy bandwidth of a gaussian") {
    const Grid1D g(2048, 50.0);
    const Field u = make_initial(GaussianIC{}, g);
    // |u_hat|^2 ~ e^{-k^2}; 99.9% of the energy sits in |k| <= erfinv(0.999) = 2.3268.
    const double k = energy_bandwidth(u);
    CHECK(k == doctest::Approx(2.3268).epsilon(0.03));
}
