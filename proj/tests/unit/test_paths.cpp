#include "rosenblatt/paths.hpp"
#include "rosenblatt/stats.hpp"

#include <doctest.h>

#include <cmath>
#include <fstream>

using namespace rosenblatt;

namespace {

double max_rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double scale = 0.0, diff = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        scale = std::max(scale, std::abs(b[k]));
        diff = std::max(diff, std::abs(a[k] - b[k]));
    }
    return scale == 0.0 ? diff : diff / scale;
}

}  // namespace

TEST_SUITE("paths") {

TEST_CASE("Donsker walk on a fixed sign sequence") {
    const NoiseSequence xi{NoiseKind::Rademacher, 0, {1, -1, 1, 1}};
    const auto w = paths::random_walk(xi);
    CHECK(w.n == 4);
    CHECK(w.tag == ProcessTag::Walk);
    const std::vector<double> want{0, 0.5, 0, 0.5, 1};
    for (std::size_t k = 0; k < want.size(); ++k) CHECK(w.values[k] == doctest::Approx(want[k]).epsilon(1e-15));
}

TEST_CASE("Donsker walk variance at t = 1 over 10^4 paths") {
    const auto ens = paths::simulate_ensemble(10000, 3, NoiseKind::Rademacher, 64, HurstParams::from_hurst(0.7), {},
                                              ProcessTag::Walk);
    const auto v = stats::variance(ens, 1.0);
    CHECK(std::abs(v.estimate - 1.0) < 3.0 * std::sqrt(2.0) / std::sqrt(10000.0));
    for (const auto& p : ens.paths) REQUIRE(p.values[0] == 0.0);
}

TEST_CASE("trivial grids: Z^1 is identically 0, B^n at m = 0 is 0") {
    const auto p = HurstParams::from_hurst(0.8);
    const auto z = paths::rosenblatt_walk(NoiseSequence{NoiseKind::Rademacher, 0, {1.0}}, p);
    CHECK(z.values == std::vector<double>{0.0, 0.0});
    const auto b = paths::fbm_walk(make_noise(NoiseKind::Rademacher, 5, 16), p);
    CHECK(b.values[0] == 0.0);
    CHECK_THROWS_AS(paths::random_walk(NoiseSequence{}), std::invalid_argument);
}

TEST_CASE("factorized Rosenblatt walk equals the table double sum at n = 16, H = 0.7") {
    const auto p = HurstParams::from_hurst(0.7);
    const auto basis = CellBasis::shared(16, p);
    const auto xi = make_noise(NoiseKind::Rademacher, 2718, 16);
    const auto fast = paths::rosenblatt_walk(xi, *basis);
    const auto slow = paths::rosenblatt_walk_bruteforce(xi, *basis);
    CHECK(max_rel_diff(fast.values, slow.values) < 1e-6);
    // The brute-force path also agrees with the assembled weight tables.
    for (int m : {5, 16}) {
        const auto c = basis->coefficient_table(m);
        double z = 0.0;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) z += c(i, j) * xi.values[static_cast<std::size_t>(i)] * xi.values[static_cast<std::size_t>(j)];
        CHECK(slow.values[static_cast<std::size_t>(m)] == doctest::Approx(z).epsilon(1e-12));
    }
}

TEST_CASE("factorized == brute force for n <= 32, 20 seeds, both noise kinds") {
    for (double H : {0.6, 0.9}) {
        const auto p = HurstParams::from_hurst(H);
        for (int n : {2, 7, 32}) {
            const auto basis = CellBasis::shared(n, p);
            for (auto kind : {NoiseKind::Rademacher, NoiseKind::StandardGaussian}) {
                double worst = 0.0;
                for (std::uint64_t seed = 0; seed < 20; ++seed) {
                    const auto xi = make_noise(kind, derive_seed(1000 + n, seed), static_cast<std::size_t>(n));
                    worst = std::max(worst, max_rel_diff(paths::rosenblatt_walk(xi, *basis).values,
                                                         paths::rosenblatt_walk_bruteforce(xi, *basis).values));
                }
                CHECK(worst < 1e-6);
            }
        }
    }
}

TEST_CASE("ensemble of one path equals the single-path generator; same seed, same ensemble") {
    const auto p = HurstParams::from_hurst(0.75);
    for (auto tag : {ProcessTag::Walk, ProcessTag::FBm, ProcessTag::Rosenblatt}) {
        const auto one = paths::simulate_ensemble(1, 77, NoiseKind::StandardGaussian, 24, p, {}, tag);
        const auto xi = make_noise(NoiseKind::StandardGaussian, derive_seed(77, 0), 24);
        const GridPath single = tag == ProcessTag::Walk  ? paths::random_walk(xi)
                                : tag == ProcessTag::FBm ? paths::fbm_walk(xi, p)
                                                         : paths::rosenblatt_walk(xi, p);
        CHECK(max_rel_diff(one.paths[0].values, single.values) < 1e-13);
        CHECK(one.paths[0].tag == tag);
    }
    const auto a = paths::simulate_ensemble(130, 5, NoiseKind::Rademacher, 16, p, {}, ProcessTag::Rosenblatt);
    const auto b = paths::simulate_ensemble(130, 5, NoiseKind::Rademacher, 16, p, {}, ProcessTag::Rosenblatt);
    const auto c = paths::simulate_ensemble(130, 6, NoiseKind::Rademacher, 16, p, {}, ProcessTag::Rosenblatt);
    for (std::size_t k = 0; k < a.size(); ++k) REQUIRE(a.paths[k].values == b.paths[k].values);
    CHECK(a.paths[0].values != c.paths[0].values);
    CHECK_THROWS_AS(paths::simulate_ensemble(0, 5, NoiseKind::Rademacher, 16, p, {}, ProcessTag::Walk), std::invalid_argument);
}

TEST_CASE("Rosenblatt walk has mean zero and the exact discrete variance, both noise kinds") {
    const auto p = HurstParams::from_hurst(0.8);
    for (auto kind : {NoiseKind::Rademacher, NoiseKind::StandardGaussian}) {
        const auto ens = paths::simulate_ensemble(10000, 11, kind, 32, p, {}, ProcessTag::Rosenblatt);
        for (double t : {0.5, 1.0}) {
            const auto m = stats::mean(ens, t);
            CHECK(std::abs(m.estimate) < 4 * m.std_error);
            const auto v = stats::variance(ens, t);
            CHECK(std::abs(v.estimate - *v.exact_discrete) < 4 * v.std_error);
        }
    }
}

TEST_CASE("increment second moments never exceed the tightness bound") {
    const auto p = HurstParams::from_hurst(0.7);
    const auto ens = paths::simulate_ensemble(5000, 12, NoiseKind::Rademacher, 64, p, {}, ProcessTag::Rosenblatt);
    for (auto [s, t] : {std::pair{0.0, 0.25}, {0.1, 0.9}, {0.5, 0.6}, {0.0, 1.0}}) {
        const auto r = stats::increment_variance(ens, s, t);
        CHECK(r.estimate <= *r.theoretical * (1.0 + 5.0 * r.std_error / r.estimate));
        CHECK(*r.exact_discrete <= *r.theoretical + 1e-8);
    }
}

TEST_CASE("exact discrete moments: covariance, increments and QV are consistent") {
    const auto p = HurstParams::from_hurst(0.8);
    const auto b = CellBasis::shared(20, p);
    for (auto [s, t] : {std::pair{4, 13}, {0, 9}, {20, 20}}) {
        const double inc = paths::exact_increment_variance(*b, s, t);
        const double via_cov =
            paths::exact_variance(*b, t) + paths::exact_variance(*b, s) - 2 * paths::exact_covariance(*b, s, t);
        CHECK(inc == doctest::Approx(via_cov).epsilon(1e-10));
    }
    double qv = 0.0;
    for (int m = 1; m <= 20; ++m) qv += paths::exact_increment_variance(*b, m - 1, m);
    CHECK(paths::exact_qv_mean(*b, 20) == doctest::Approx(qv).epsilon(1e-12));
    // fBm walk: weights give the covariance directly.
    CHECK(paths::exact_fbm_covariance(*b, 10, 20) == doctest::Approx(b->fbm_weights(10).dot(b->fbm_weights(20))).epsilon(1e-14));
}

TEST_CASE("fBm walk covariance at (0.5, 1), Hp = 0.8") {
    const auto p = HurstParams::from_hurst(0.6);
    const auto ens = paths::simulate_ensemble(20000, 21, NoiseKind::Rademacher, 128, p, {}, ProcessTag::FBm);
    CHECK(ens.hurst() == doctest::Approx(0.8));
    const auto r = stats::covariance(ens, 0.5, 1.0);
    CHECK(*r.theoretical == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(std::abs(r.estimate - *r.theoretical) < 3 * r.std_error);
    CHECK(std::abs(r.estimate - *r.exact_discrete) < 3 * r.std_error);
}

TEST_CASE("grid lookup is cadlag and tolerant to rounding") {
    CHECK(grid_index(0.3, 10) == 3);
    CHECK(grid_index(0.7, 10) == 7);
    CHECK(grid_index(0.0, 10) == 0);
    CHECK(grid_index(1.0, 10) == 10);
    CHECK(grid_index(0.349, 10) == 3);
    CHECK_THROWS_AS(grid_index(-0.1, 10), std::domain_error);
    CHECK_THROWS_AS(grid_index(1.5, 10), std::domain_error);
    const NoiseSequence xi{NoiseKind::Rademacher, 0, {1, -1, 1, 1}};
    const auto w = paths::random_walk(xi);
    CHECK(w.at(0.3) == w.values[1]);
    CHECK(w.at(0.5) == w.values[2]);
    CHECK(w.at(0.99) == w.values[3]);
}

TEST_CASE("horizon rescaling multiplies by T^hurst") {
    const auto p = HurstParams::from_hurst(0.8);
    const auto z = paths::rosenblatt_walk(make_noise(NoiseKind::Rademacher, 4, 16), p);
    const auto z2 = paths::rescale_horizon(z, 2.0, 0.8);
    for (std::size_t k = 0; k < z.values.size(); ++k) CHECK(z2.values[k] == doctest::Approx(std::pow(2.0, 0.8) * z.values[k]));
    CHECK_THROWS_AS(paths::rescale_horizon(z, 0.0, 0.8), std::domain_error);
}

TEST_CASE("ensemble CSV export") {
    const auto p = HurstParams::from_hurst(0.8);
    const auto ens = paths::simulate_ensemble(3, 1, NoiseKind::Rademacher, 4, p, {}, ProcessTag::Rosenblatt);
    const auto file = std::filesystem::temp_directory_path() / "rosenblatt_paths_test.csv";
    paths::write_ensemble_csv(file, ens);
    std::ifstream in(file);
    std::string line;
    std::getline(in, line);
    CHECK(line == "path_id,m,t,value");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 3 * 5);
    std::filesystem::remove(file);
    CHECK(parse_process_tag("fbm") == ProcessTag::FBm);
    CHECK_THROWS_AS(parse_process_tag("levy"), std::invalid_argument);
}

}  // TEST_SUITE
