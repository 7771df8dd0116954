#pragma once

#include "rosenblatt/paths.hpp"

#include <json.hpp>

#include <optional>
#include <stdexcept>

namespace rosenblatt {

/// Deterministic rate t -> r(t) on [0, 1]: constant, affine, or tabulated
/// with linear interpolation (flat beyond the first and last knot).
class RateFunction {
public:
    RateFunction() = default;
    static RateFunction constant(double value);
    static RateFunction affine(double intercept, double slope);
    static RateFunction tabulated(std::vector<std::pair<double, double>> knots);

    /// "const:X", "affine:X,Y" (X + Y t) or "table:t0=v0,t1=v1,...".
    static RateFunction parse(std::string_view text);
    /// Inverse of parse.
    std::string describe() const;

    double operator()(double t) const;

private:
    enum class Kind { Constant, Affine, Table };
    Kind kind_ = Kind::Constant;
    double a_ = 0.0, b_ = 0.0;
    std::vector<std::pair<double, double>> knots_;
};

struct MarketConfig {
    int N = 64;
    double sigma = 1.0;
    RateFunction rate_r;
    RateFunction rate_a;
    double S0 = 1.0;
    double B0 = 1.0;
    HurstParams params = HurstParams::from_hurst(0.8);
    QuadConfig quad;

    /// N >= 2, sigma >= 0, S0 > 0, B0 > 0, finite rates on the grid.
    void validate() const;
    /// Per-period bond rate r_n = r(n/N) / N.
    double r_n(int n) const { return rate_r(static_cast<double>(n) / N) / N; }
    /// Per-period drift a_n = a(n/N) / N.
    double a_n(int n) const { return rate_a(static_cast<double>(n) / N) / N; }
};

/// A stock price reached zero or below; the additive return 1 + a_n + X_n
/// can do that for large sigma, and the run is reported, not repaired.
class ModelBreakdown : public std::runtime_error {
public:
    ModelBreakdown(int step, double price);
    int step;
    double price;
};

/// Requested outcome does not exist at this scale (no violation found).
class Inconclusive : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Binary market trajectory. Vectors have length N + 1 and are indexed by the
/// period n; entry 0 holds the initial state (X, u, d, f, g are 0 there).
struct MarketPath {
    int N = 0;
    std::vector<double> X, B, S, u, d, f, g, r_minus_a;
    std::vector<bool> violated;
    NoiseSequence noise;
    /// max_n |X_n - (f_n + xi_n g_n)| / max(|X_n|, tiny).
    double decomposition_residual = 0.0;
};

struct ArbitrageReport {
    std::optional<int> first_violation;
    int n_max = 0;
    std::vector<int> steps;
    std::vector<double> fg_sequence;
    double fitted_exponent = 0.0;
    double theoretical_exponent = 0.0;
    bool inconclusive = false;
    bool increasing_upper_half = false;
};

struct TradeLog {
    int step = 0;
    bool long_stock = true;
    double shares = 1.0;
    double entry_price = 0.0;
    double r = 0.0;
    double a = 0.0;
    double up = 0.0;
    double down = 0.0;
    double pnl_up = 0.0;
    double pnl_down = 0.0;
};

namespace market {

/// Even part of the period-n increment of sigma Z^N given x = xi_1..xi_{n-1}:
/// sigma sum_{i != j < n} dc_ij(n) x_i x_j.
double f_eval(int n, std::span<const double> x, const MarketConfig& cfg);
/// Coefficient of xi_n: 2 sigma sum_{i < n} c_in(n) x_i.
double g_eval(int n, std::span<const double> x, const MarketConfig& cfg);

/// Same quantities as explicit sums over the increment coefficient table.
double f_bruteforce(int n, std::span<const double> x, const MarketConfig& cfg);
double g_bruteforce(int n, std::span<const double> x, const MarketConfig& cfg);

/// (u_n, d_n) = (f + g, f - g).
std::pair<double, double> updown(int n, std::span<const double> x, const MarketConfig& cfg);

/// Stock prices S_0..S_N along a simulated Z^N path, S_n = (1 + a_n + X_n) S_{n-1}
/// with X_n = sigma (Z_n - Z_{n-1}). Throws ModelBreakdown if some S_n <= 0.
std::vector<double> stock_prices(const MarketConfig& cfg, const GridPath& z);

/// Full trajectory; `noise` must be N Rademacher signs.
MarketPath build_market(const MarketConfig& cfg, const NoiseSequence& noise);

/// Smallest n with r_n - a_n outside the open interval between d_n and u_n.
/// Steps with u_n == d_n (the first period, or sigma == 0) carry no risk and
/// are skipped. Also fills path.violated.
std::optional<int> no_arbitrage_check(MarketPath& path, const MarketConfig& cfg);

/// (f - g)(n) on the all-ones sign path for n = 2..n_max, with a log-log fit
/// of the growth over n in [n_max/2, n_max] and the first violation of that
/// path under cfg's rates.
ArbitrageReport divergence_scan(const MarketConfig& cfg, int n_max);

/// Terminal wealth of holding `shares` stocks (long or short) over period n,
/// financed at the bond rate, on both branches xi_n = +1 / -1.
TradeLog branch_pnl(const MarketPath& path, const MarketConfig& cfg, int n, double shares, bool long_stock);

/// One-period arbitrage at the first violation of `noise`'s path: long when
/// d_n > r_n - a_n, short when u_n < r_n - a_n. Throws Inconclusive when no
/// strict violation exists within the horizon.
TradeLog arbitrage_demo(const MarketConfig& cfg, const NoiseSequence& noise, double shares = 1.0);

/// Composite Simpson integral of `rate` over [0, t].
double integrate_rate(const RateFunction& rate, double t, int intervals = 512);

/// Continuous model at t: S_t = S0 exp(int_0^t a + sigma Z(t)), B_t = B0 exp(int_0^t r).
std::pair<double, double> bs_limit(const MarketConfig& cfg, const GridPath& z, double t);

/// log S_N(1) of the binary market minus log S(1) of the continuous model
/// driven by the same Z^N path.
double log_price_gap(const MarketConfig& cfg, const GridPath& z);

void write_market_csv(const std::filesystem::path& path, const MarketPath& m);
nlohmann::json to_json(const ArbitrageReport& r, const MarketConfig& cfg);
nlohmann::json to_json(const TradeLog& t);
nlohmann::json params_json(const MarketConfig& cfg);

}  // namespace market
}  // namespace rosenblatt
