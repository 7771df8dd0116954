#include "rosenblatt/market.hpp"

#include <doctest.h>

#include <cmath>
#include <fstream>

using namespace rosenblatt;

namespace {

MarketConfig config(int N, double H, double sigma = 1.0, double r = 0.5, double a = 0.0) {
    MarketConfig cfg;
    cfg.N = N;
    cfg.sigma = sigma;
    cfg.rate_r = RateFunction::constant(r);
    cfg.rate_a = RateFunction::constant(a);
    cfg.params = HurstParams::from_hurst(H);
    return cfg;
}

std::vector<double> prefix(const NoiseSequence& xi, int n) {
    return {xi.values.begin(), xi.values.begin() + (n - 1)};
}

}  // namespace

TEST_SUITE("market") {

TEST_CASE("period-2 even part vanishes: only one past sign is available") {
    const auto cfg = config(16, 0.7);
    for (double x1 : {1.0, -1.0}) {
        const std::vector<double> x{x1};
        CHECK(market::f_eval(2, x, cfg) == 0.0);
        CHECK(market::g_eval(2, x, cfg) != 0.0);
    }
}

TEST_CASE("f is even and g is odd in the past signs; g > 0 on the all-ones path") {
    const auto cfg = config(32, 0.75);
    const auto xi = make_noise(NoiseKind::Rademacher, 17, 32);
    for (int n : {3, 10, 32}) {
        auto x = prefix(xi, n);
        std::vector<double> neg(x);
        for (double& v : neg) v = -v;
        CHECK(market::f_eval(n, neg, cfg) == doctest::Approx(market::f_eval(n, x, cfg)).epsilon(1e-13));
        CHECK(market::g_eval(n, neg, cfg) == doctest::Approx(-market::g_eval(n, x, cfg)).epsilon(1e-13));
        const std::vector<double> ones(static_cast<std::size_t>(n - 1), 1.0);
        CHECK(market::g_eval(n, ones, cfg) > 0.0);
    }
}

TEST_CASE("factorized f and g equal the coefficient-table sums at n = 20, N = 64, H = 0.7") {
    const auto cfg = config(64, 0.7, 1.3);
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto x = prefix(make_noise(NoiseKind::Rademacher, seed, 64), 20);
        const double f = market::f_eval(20, x, cfg), fb = market::f_bruteforce(20, x, cfg);
        const double g = market::g_eval(20, x, cfg), gb = market::g_bruteforce(20, x, cfg);
        CHECK(std::abs(f - fb) <= 1e-8 * std::max(std::abs(fb), std::abs(gb)));
        CHECK(std::abs(g - gb) <= 1e-8 * std::abs(gb));
        const auto [u, d] = market::updown(20, x, cfg);
        CHECK(u + d == doctest::Approx(2 * f).epsilon(1e-14));
        CHECK(u - d == doctest::Approx(2 * g).epsilon(1e-14));
    }
}

TEST_CASE("simulated returns equal f + xi g on every period") {
    const auto cfg = config(48, 0.8, 0.7);
    const auto xi = make_noise(NoiseKind::Rademacher, 99, 48);
    const auto m = market::build_market(cfg, xi);
    CHECK(m.decomposition_residual < 1e-8);
    for (int n = 2; n <= 48; ++n) {
        const auto k = static_cast<std::size_t>(n);
        const double expect = xi.values[k - 1] > 0 ? m.u[k] : m.d[k];
        CHECK(m.X[k] == doctest::Approx(expect).epsilon(1e-8));
        CHECK(m.S[k] == doctest::Approx((1.0 + cfg.a_n(n) + m.X[k]) * m.S[k - 1]).epsilon(1e-14));
    }
    CHECK(m.X[1] == 0.0);
}

TEST_CASE("sigma = 0: deterministic prices, bond formula, no risky step to check") {
    auto cfg = config(32, 0.8, 0.0, 0.05, 0.02);
    cfg.S0 = 2.0;
    cfg.B0 = 3.0;
    const auto xi = make_noise(NoiseKind::Rademacher, 5, 32);
    auto m = market::build_market(cfg, xi);
    CHECK(m.S.back() == doctest::Approx(2.0 * std::pow(1.0 + 0.02 / 32, 32)).epsilon(1e-14));
    CHECK(m.B.back() == doctest::Approx(3.0 * std::pow(1.0 + 0.05 / 32, 32)).epsilon(1e-14));
    CHECK_FALSE(market::no_arbitrage_check(m, cfg).has_value());
    for (bool v : m.violated) CHECK_FALSE(v);
}

TEST_CASE("midpoint rates never violate the interval condition") {
    // r_n - a_n placed exactly at the midpoint f_n of (d_n, u_n) on one path.
    const int N = 32;
    auto cfg = config(N, 0.7);
    const auto xi = make_noise(NoiseKind::Rademacher, 4, N);
    const auto base = market::build_market(cfg, xi);
    std::vector<std::pair<double, double>> knots;
    for (int n = 0; n <= N; ++n) knots.emplace_back(static_cast<double>(n) / N, N * base.f[static_cast<std::size_t>(n)]);
    cfg.rate_r = RateFunction::tabulated(knots);
    auto m = market::build_market(cfg, xi);
    CHECK_FALSE(market::no_arbitrage_check(m, cfg).has_value());
}

TEST_CASE("a rate on the interval boundary counts as a violation") {
    const int N = 64, k = 12;
    auto cfg = config(N, 0.8);
    const auto xi = make_noise(NoiseKind::Rademacher, 8, N);
    const auto base = market::build_market(cfg, xi);
    cfg.rate_r = RateFunction::constant(N * base.d[k]);
    auto m = market::build_market(cfg, xi);
    REQUIRE(cfg.r_n(k) - cfg.a_n(k) == m.d[k]);
    market::no_arbitrage_check(m, cfg);
    CHECK(m.violated[k]);
}

TEST_CASE("all-ones witness violates the condition at N = 64") {
    const auto cfg = config(64, 0.8);
    auto m = market::build_market(cfg, all_ones_noise(64));
    const auto first = market::no_arbitrage_check(m, cfg);
    REQUIRE(first.has_value());
    const auto k = static_cast<std::size_t>(*first);
    CHECK(std::min(m.u[k], m.d[k]) > cfg.r_n(*first) - cfg.a_n(*first));
    CHECK(m.violated[k]);
}

TEST_CASE("input validation and model breakdown") {
    const auto cfg = config(16, 0.8);
    CHECK_THROWS_AS(market::build_market(cfg, make_noise(NoiseKind::StandardGaussian, 1, 16)), std::invalid_argument);
    CHECK_THROWS_AS(market::build_market(cfg, make_noise(NoiseKind::Rademacher, 1, 15)), std::invalid_argument);
    auto bad = cfg;
    bad.N = 1;
    CHECK_THROWS(bad.validate());
    bad = cfg;
    bad.sigma = -1;
    CHECK_THROWS(bad.validate());
    bad = cfg;
    bad.S0 = 0;
    CHECK_THROWS(bad.validate());

    // Huge volatility drives 1 + a_n + X_n below zero on some period.
    auto wild = config(32, 0.8, 1e4);
    bool broke = false;
    for (std::uint64_t seed = 0; seed < 10 && !broke; ++seed) {
        try {
            market::build_market(wild, make_noise(NoiseKind::Rademacher, seed, 32));
        } catch (const ModelBreakdown& e) {
            broke = true;
            CHECK(e.price <= 0.0);
            CHECK(e.step >= 2);
        }
    }
    CHECK(broke);
}

TEST_CASE("divergence of f - g along the all-ones path at N = 128") {
    const auto cfg = config(128, 0.8);
    const auto r = market::divergence_scan(cfg, 128);
    CHECK_FALSE(r.inconclusive);
    CHECK(r.increasing_upper_half);
    CHECK(r.theoretical_exponent == doctest::Approx(2 * cfg.params.Hp - 1));
    CHECK(std::abs(r.fitted_exponent - r.theoretical_exponent) < 0.3);
    REQUIRE(r.first_violation.has_value());
    CHECK(r.steps.size() == 127);
    const auto small = market::divergence_scan(cfg, 4);
    CHECK(small.inconclusive);
    CHECK(std::isnan(small.fitted_exponent));
    CHECK_THROWS_AS(market::divergence_scan(cfg, 3), std::invalid_argument);
    CHECK_THROWS_AS(market::divergence_scan(cfg, 129), std::invalid_argument);
}

TEST_CASE("at a fixed period, f and g scale like N^-H") {
    for (double H : {0.6, 0.8}) {
        const auto c32 = config(32, H), c64 = config(64, H);
        const std::vector<double> ones(6, 1.0);
        CHECK(market::f_eval(7, ones, c32) / market::f_eval(7, ones, c64) == doctest::Approx(std::pow(2.0, H)).epsilon(1e-8));
        CHECK(market::g_eval(7, ones, c32) / market::g_eval(7, ones, c64) == doctest::Approx(std::pow(2.0, H)).epsilon(1e-8));
    }
}

TEST_CASE("arbitrage demo: both branches gain; a compliant period does not") {
    const auto cfg = config(64, 0.8);
    const auto t = market::arbitrage_demo(cfg, all_ones_noise(64));
    CHECK(t.pnl_up > 0.0);
    CHECK(t.pnl_down > 0.0);
    const auto t3 = market::arbitrage_demo(cfg, all_ones_noise(64), 3.0);
    CHECK(t3.pnl_up == doctest::Approx(3 * t.pnl_up));
    CHECK(t3.pnl_down == doctest::Approx(3 * t.pnl_down));

    auto m = market::build_market(cfg, all_ones_noise(64));
    market::no_arbitrage_check(m, cfg);
    bool found = false;
    for (int n = 2; n <= 64; ++n) {
        if (m.violated[static_cast<std::size_t>(n)]) continue;
        found = true;
        for (bool is_long : {true, false}) {
            const auto c = market::branch_pnl(m, cfg, n, 1.0, is_long);
            CHECK(std::min(c.pnl_up, c.pnl_down) <= 0.0);
        }
    }
    CHECK(found);
    CHECK_THROWS_AS(market::arbitrage_demo(config(64, 0.8, 0.0), all_ones_noise(64)), Inconclusive);
    CHECK_THROWS_AS(market::arbitrage_demo(cfg, all_ones_noise(64), 0.0), std::invalid_argument);
}

TEST_CASE("continuous-model comparison") {
    auto cfg = config(32, 0.8, 0.0, 0.03, 0.05);
    const auto z = paths::rosenblatt_walk(make_noise(NoiseKind::Rademacher, 1, 32), cfg.params);
    const auto [s, b] = market::bs_limit(cfg, z, 1.0);
    CHECK(s == doctest::Approx(std::exp(0.05)).epsilon(1e-12));
    CHECK(b == doctest::Approx(std::exp(0.03)).epsilon(1e-12));
    const auto [s0, b0] = market::bs_limit(cfg, z, 0.0);
    CHECK(s0 == 1.0);
    CHECK(b0 == 1.0);
    // sigma = 0: the gap is the compounding error N log(1 + a/N) - a.
    CHECK(market::log_price_gap(cfg, z) == doctest::Approx(32 * std::log1p(0.05 / 32) - 0.05).epsilon(1e-9));
    CHECK(market::integrate_rate(RateFunction::affine(1.0, 2.0), 1.0) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("rate function parsing and description") {
    for (const char* text : {"const:0.5", "affine:0.1,-0.25", "table:0=0.1,0.5=0.3,1=0.2"}) {
        const auto r = RateFunction::parse(text);
        CHECK(RateFunction::parse(r.describe()).describe() == r.describe());
    }
    const auto tab = RateFunction::parse("table:0.25=1,0.75=3");
    CHECK(tab(0.0) == 1.0);
    CHECK(tab(0.5) == doctest::Approx(2.0));
    CHECK(tab(1.0) == 3.0);
    CHECK(RateFunction::parse("affine:1,2")(0.5) == doctest::Approx(2.0));
    for (const char* bad : {"", "const:", "const:abc", "affine:1", "table:", "table:0.5", "table:0.5=1,0.2=2", "cubic:1"})
        CHECK_THROWS_AS(RateFunction::parse(bad), std::invalid_argument);
}

TEST_CASE("market CSV and JSON export") {
    const auto cfg = config(16, 0.8);
    auto m = market::build_market(cfg, all_ones_noise(16));
    market::no_arbitrage_check(m, cfg);
    const auto file = std::filesystem::temp_directory_path() / "rosenblatt_market_test.csv";
    market::write_market_csv(file, m);
    std::ifstream in(file);
    std::string line;
    std::getline(in, line);
    CHECK(line == "n,t,X,B,S,u,d,r_minus_a,violated");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 17);
    std::filesystem::remove(file);
    const auto j = market::to_json(market::divergence_scan(cfg, 16), cfg);
    CHECK(j["params"]["N"] == 16);
    CHECK(j["params"]["rate_r"] == "const:0.5");
    CHECK(j["n_max"] == 16);
    const auto tj = market::to_json(market::arbitrage_demo(config(64, 0.8), all_ones_noise(64)));
    CHECK(tj["position"] == "long");
}

}  // TEST_SUITE
