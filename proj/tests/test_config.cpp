#include <cmath>
#include <random>
#include <string>

#include "doctest.h"
#include "dnls/config.hpp"

using namespace dnls;

namespace {

ExperimentConfig scrambled(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ExperimentConfig c;
    c.name = "scrambled_" + std::to_string(seed);
    c.model = {0.1 + 1.8 * u(rng), 10.0 * u(rng) - 5.0, 0.1 + u(rng)};
    c.model.lambda1 = std::min(std::abs(c.model.lambda1), 1.0);
    c.symbol = {0.1 + u(rng), u(rng) - 0.5, std::sqrt(2.0) * u(rng)};
    c.n = 1u << (6 + seed % 8);
    c.half_width = 1.0 / 3.0 + 100.0 * u(rng);
    c.scaled.Y = 1.0 + u(rng);
    c.time.dt = 1e-3 * (1.0 + u(rng));
    c.time.t_max = 1.0 + 1000.0 * u(rng);
    c.time.schedule = {{0.0, 1e-3 * (1.0 + u(rng))}, {1.0 + u(rng), 0.1 * u(rng) + 1e-3}};
    c.time.extra_checkpoints = {u(rng), 3.0 + u(rng)};
    c.cutoff.r_inner = 0.5 + u(rng);
    c.cutoff.r_outer = c.cutoff.r_inner + 0.5 + u(rng);
    c.filter.padding = 4;
    c.filter.oversample = 2;
    c.filter.support_tol = 1e-12 * u(rng);
    c.initial.amplitude = 0.1 + u(rng);
    c.initial.chirp = u(rng) / 7.0;
    c.pipeline.fit_t_min = 1.0 + 20.0 * u(rng);
    c.tol.limit = u(rng) / 3.0;
    c.oracle.h = {u(rng), 1.0 / 16.0};
    return c;
}

}  // namespace

TEST_CASE("config round-trips bit-exactly") {
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        const ExperimentConfig c = scrambled(seed);
        const std::string text = serialize_config(c);
        const ExperimentConfig r = parse_config(text);
        CHECK(r == c);
        CHECK(serialize_config(r) == text);
        CHECK(r.time.t_max == c.time.t_max);
        CHECK(r.half_width == c.half_width);
    }
    CHECK(parse_config(serialize_config(ExperimentConfig{})) == ExperimentConfig{});
}

TEST_CASE("partial configs keep the defaults") {
    const ExperimentConfig c = parse_config("# comment\n[model]\nalpha = 1.8\n\n[grid]\nn = 256 # inline\n");
    CHECK(c.model.alpha == 1.8);
    CHECK(c.n == 256);
    CHECK(c.half_width == ExperimentConfig{}.half_width);
}

TEST_CASE("config parser rejects bad input") {
    CHECK_THROWS_AS(parse_config("[model]\nalpha = 1.5\nbeta = 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[nosuch]\nx = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[model]\nalpha = 1.5\nalpha = 1.6\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[model]\nalpha = fast\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("alpha = 1.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[grid]\nn = -4\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[output]\nwrite_fields = maybe\n"), ConfigError);
    try {
        parse_config("[model]\nalpha = 1.5\n\n[grid]\nwidth = 3\n");
        FAIL("expected a config error");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("5") != std::string::npos);
    }
    CHECK_THROWS_AS(load_config("/nonexistent/dnls.cfg"), ConfigError);
}

TEST_CASE("config validation") {
    ExperimentConfig c;
    c.validate();
    c.n = 1000;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = ExperimentConfig{};
    c.model = {1.5, 0.0, 0.0};
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.test_mode = true;
    c.validate();
    c = ExperimentConfig{};
    c.model.alpha = 2.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = ExperimentConfig{};
    c.filter.oversample = 3;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = ExperimentConfig{};
    c.initial.kind = "file";
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = ExperimentConfig{};
    c.initial.kind = "sawtooth";
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = ExperimentConfig{};
    c.oracle.h = {0.0};
    CHECK_THROWS_AS(c.validate(), ConfigError);
}
