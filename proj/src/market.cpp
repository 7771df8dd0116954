#include "rosenblatt/market.hpp"

#include "rosenblatt/stats.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace rosenblatt {

namespace {

double parse_double(std::string_view s, std::string_view context) {
    double v = 0.0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end || !std::isfinite(v))
        throw std::invalid_argument("bad number '" + std::string(s) + "' in rate '" + std::string(context) + "'");
    return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

RateFunction RateFunction::constant(double value) {
    RateFunction r;
    r.kind_ = Kind::Constant;
    r.a_ = value;
    return r;
}

RateFunction RateFunction::affine(double intercept, double slope) {
    RateFunction r;
    r.kind_ = Kind::Affine;
    r.a_ = intercept;
    r.b_ = slope;
    return r;
}

RateFunction RateFunction::tabulated(std::vector<std::pair<double, double>> knots) {
    if (knots.empty()) throw std::invalid_argument("tabulated rate needs at least one knot");
    for (std::size_t k = 1; k < knots.size(); ++k)
        if (!(knots[k].first > knots[k - 1].first)) throw std::invalid_argument("rate table times must increase");
    RateFunction r;
    r.kind_ = Kind::Table;
    r.knots_ = std::move(knots);
    return r;
}

RateFunction RateFunction::parse(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos)
        throw std::invalid_argument("rate '" + std::string(text) + "' must be const:X, affine:X,Y or table:t=v,...");
    const auto kind = text.substr(0, colon), body = text.substr(colon + 1);
    if (kind == "const") return constant(parse_double(body, text));
    if (kind == "affine") {
        const auto parts = split(body, ',');
        if (parts.size() != 2) throw std::invalid_argument("affine rate needs two numbers: affine:X,Y");
        return affine(parse_double(parts[0], text), parse_double(parts[1], text));
    }
    if (kind == "table") {
        std::vector<std::pair<double, double>> knots;
        for (auto item : split(body, ',')) {
            const auto eq = item.find('=');
            if (eq == std::string_view::npos) throw std::invalid_argument("table rate entries must be t=v");
            knots.emplace_back(parse_double(item.substr(0, eq), text), parse_double(item.substr(eq + 1), text));
        }
        return tabulated(std::move(knots));
    }
    throw std::invalid_argument("unknown rate kind '" + std::string(kind) + "'");
}

std::string RateFunction::describe() const {
    switch (kind_) {
        case Kind::Constant: return "const:" + fmt17(a_);
        case Kind::Affine: return "affine:" + fmt17(a_) + "," + fmt17(b_);
        case Kind::Table: {
            std::string s = "table:";
            for (std::size_t k = 0; k < knots_.size(); ++k)
                s += (k ? "," : "") + fmt17(knots_[k].first) + "=" + fmt17(knots_[k].second);
            return s;
        }
    }
    return "";
}

double RateFunction::operator()(double t) const {
    switch (kind_) {
        case Kind::Constant: return a_;
        case Kind::Affine: return a_ + b_ * t;
        case Kind::Table: {
            if (t <= knots_.front().first) return knots_.front().second;
            if (t >= knots_.back().first) return knots_.back().second;
            const auto hi = std::upper_bound(knots_.begin(), knots_.end(), t,
                                             [](double v, const auto& k) { return v < k.first; });
            const auto lo = hi - 1;
            const double w = (t - lo->first) / (hi->first - lo->first);
            return (1.0 - w) * lo->second + w * hi->second;
        }
    }
    return 0.0;
}

void MarketConfig::validate() const {
    if (N < 2) throw std::invalid_argument("market needs N >= 2");
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("sigma must be finite and >= 0");
    if (!(S0 > 0.0)) throw std::invalid_argument("S0 must be > 0");
    if (!(B0 > 0.0)) throw std::invalid_argument("B0 must be > 0");
    for (int n = 0; n <= N; ++n)
        if (!std::isfinite(r_n(n)) || !std::isfinite(a_n(n))) throw std::invalid_argument("rates must be finite");
}

ModelBreakdown::ModelBreakdown(int step_, double price_)
    : std::runtime_error("stock price " + fmt17(price_) + " <= 0 at period " + std::to_string(step_) +
                         " (additive returns broke down; lower sigma)"),
      step(step_), price(price_) {}

namespace market {

namespace {

std::shared_ptr<const CellBasis> basis_for(const MarketConfig& cfg) {
    return CellBasis::shared(cfg.N, cfg.params, cfg.quad);
}

void check_step(int n, std::span<const double> x, const MarketConfig& cfg) {
    if (n < 2 || n > cfg.N) throw std::domain_error("period n must satisfy 2 <= n <= N");
    if (static_cast<int>(x.size()) != n - 1) throw std::invalid_argument("sign prefix must have n - 1 entries");
}

// Node values of sum_{i<n} x_i gamma_i and gamma_n in time cell n.
struct StepProjection {
    Eigen::VectorXd s;
    Eigen::VectorXd sq;
    Eigen::VectorXd last;
};

StepProjection project(const CellBasis& b, int n, std::span<const double> x) {
    const Eigen::MatrixXd& g = b.gamma(n);
    const Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
    StepProjection p;
    p.s = g.leftCols(n - 1) * xv;
    p.sq = g.leftCols(n - 1).array().square().matrix() * xv.array().square().matrix();
    p.last = g.col(n - 1);
    return p;
}

}  // namespace

double f_eval(int n, std::span<const double> x, const MarketConfig& cfg) {
    check_step(n, x, cfg);
    const auto b = basis_for(cfg);
    const auto p = project(*b, n, x);
    return cfg.sigma * b->params().dH * b->time_weights().dot((p.s.array().square() - p.sq.array()).matrix());
}

double g_eval(int n, std::span<const double> x, const MarketConfig& cfg) {
    check_step(n, x, cfg);
    const auto b = basis_for(cfg);
    const auto p = project(*b, n, x);
    return 2.0 * cfg.sigma * b->params().dH * b->time_weights().dot(p.s.cwiseProduct(p.last));
}

double f_bruteforce(int n, std::span<const double> x, const MarketConfig& cfg) {
    check_step(n, x, cfg);
    const Eigen::MatrixXd dc = basis_for(cfg)->increment_table(n);
    double f = 0.0;
    for (int i = 0; i < n - 1; ++i)
        for (int j = 0; j < n - 1; ++j)
            if (i != j) f += dc(i, j) * x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(j)];
    return cfg.sigma * f;
}

double g_bruteforce(int n, std::span<const double> x, const MarketConfig& cfg) {
    check_step(n, x, cfg);
    const Eigen::MatrixXd c = basis_for(cfg)->coefficient_table(n);
    double g = 0.0;
    for (int i = 0; i < n - 1; ++i) g += c(i, n - 1) * x[static_cast<std::size_t>(i)];
    return 2.0 * cfg.sigma * g;
}

std::pair<double, double> updown(int n, std::span<const double> x, const MarketConfig& cfg) {
    const double f = f_eval(n, x, cfg), g = g_eval(n, x, cfg);
    return {f + g, f - g};
}

std::vector<double> stock_prices(const MarketConfig& cfg, const GridPath& z) {
    if (z.n != cfg.N) throw std::invalid_argument("path grid size must equal N");
    std::vector<double> s(static_cast<std::size_t>(cfg.N) + 1);
    s[0] = cfg.S0;
    for (int n = 1; n <= cfg.N; ++n) {
        const double x = cfg.sigma * (z.values[static_cast<std::size_t>(n)] - z.values[static_cast<std::size_t>(n - 1)]);
        s[static_cast<std::size_t>(n)] = (1.0 + cfg.a_n(n) + x) * s[static_cast<std::size_t>(n - 1)];
        if (!(s[static_cast<std::size_t>(n)] > 0.0)) throw ModelBreakdown(n, s[static_cast<std::size_t>(n)]);
    }
    return s;
}

MarketPath build_market(const MarketConfig& cfg, const NoiseSequence& noise) {
    cfg.validate();
    if (static_cast<int>(noise.size()) != cfg.N) throw std::invalid_argument("noise length must equal N");
    for (double v : noise.values)
        if (v != 1.0 && v != -1.0) throw std::invalid_argument("market noise must be Rademacher (+1/-1)");
    const auto basis = basis_for(cfg);
    const GridPath z = paths::rosenblatt_walk(noise, *basis);

    MarketPath m;
    m.N = cfg.N;
    m.noise = noise;
    const auto len = static_cast<std::size_t>(cfg.N) + 1;
    m.X.assign(len, 0.0);
    m.B.assign(len, cfg.B0);
    m.u.assign(len, 0.0);
    m.d.assign(len, 0.0);
    m.f.assign(len, 0.0);
    m.g.assign(len, 0.0);
    m.r_minus_a.assign(len, 0.0);
    m.violated.assign(len, false);
    m.S = stock_prices(cfg, z);

    for (int n = 1; n <= cfg.N; ++n) {
        const auto k = static_cast<std::size_t>(n);
        m.X[k] = cfg.sigma * (z.values[k] - z.values[k - 1]);
        m.B[k] = (1.0 + cfg.r_n(n)) * m.B[k - 1];
        m.r_minus_a[k] = cfg.r_n(n) - cfg.a_n(n);
        if (n >= 2) {
            const std::span<const double> prefix(noise.values.data(), k - 1);
            m.f[k] = f_eval(n, prefix, cfg);
            m.g[k] = g_eval(n, prefix, cfg);
        }
        m.u[k] = m.f[k] + m.g[k];
        m.d[k] = m.f[k] - m.g[k];
        const double recon = m.f[k] + noise.values[k - 1] * m.g[k];
        const double scale = std::max({std::abs(m.X[k]), std::abs(m.f[k]) + std::abs(m.g[k]), 1e-300});
        m.decomposition_residual = std::max(m.decomposition_residual, std::abs(m.X[k] - recon) / scale);
    }
    return m;
}

std::optional<int> no_arbitrage_check(MarketPath& path, const MarketConfig& cfg) {
    std::optional<int> first;
    path.violated.assign(static_cast<std::size_t>(path.N) + 1, false);
    for (int n = 2; n <= path.N; ++n) {
        const auto k = static_cast<std::size_t>(n);
        if (path.u[k] == path.d[k]) continue;
        const double lo = std::min(path.u[k], path.d[k]), hi = std::max(path.u[k], path.d[k]);
        const double ra = cfg.r_n(n) - cfg.a_n(n);
        if (!(lo < ra && ra < hi)) {
            path.violated[k] = true;
            if (!first) first = n;
        }
    }
    return first;
}

ArbitrageReport divergence_scan(const MarketConfig& cfg, int n_max) {
    cfg.validate();
    if (n_max < 4 || n_max > cfg.N) throw std::invalid_argument("divergence_scan needs 4 <= n_max <= N");
    ArbitrageReport r;
    r.n_max = n_max;
    r.theoretical_exponent = 2.0 * cfg.params.Hp - 1.0;

    MarketPath path = build_market(cfg, all_ones_noise(static_cast<std::size_t>(cfg.N)));
    for (int n = 2; n <= n_max; ++n) {
        r.steps.push_back(n);
        r.fg_sequence.push_back(path.d[static_cast<std::size_t>(n)]);
    }
    path.N = n_max;
    r.first_violation = no_arbitrage_check(path, cfg);

    std::vector<double> lx, ly;
    bool increasing = true;
    double prev = -INFINITY;
    for (std::size_t k = 0; k < r.steps.size(); ++k) {
        if (2 * r.steps[k] < n_max) continue;
        const double v = r.fg_sequence[k];
        if (!(v > 0.0)) r.inconclusive = true;
        if (!(v > prev)) increasing = false;
        prev = v;
        lx.push_back(std::log(static_cast<double>(r.steps[k])));
        ly.push_back(std::log(v));
    }
    r.increasing_upper_half = increasing && !r.inconclusive;
    if (r.inconclusive) {
        r.fitted_exponent = std::nan("");
    } else {
        r.fitted_exponent = stats::least_squares(lx, ly).slope;
    }
    return r;
}

TradeLog branch_pnl(const MarketPath& path, const MarketConfig& cfg, int n, double shares, bool long_stock) {
    if (n < 1 || n > path.N) throw std::domain_error("branch_pnl: period out of range");
    const auto k = static_cast<std::size_t>(n);
    TradeLog t;
    t.step = n;
    t.long_stock = long_stock;
    t.shares = shares;
    t.entry_price = path.S[k - 1];
    t.r = cfg.r_n(n);
    t.a = cfg.a_n(n);
    t.up = path.u[k];
    t.down = path.d[k];
    // Long: borrow shares*S at the bond rate and buy; short: the reverse.
    const double sign = long_stock ? 1.0 : -1.0;
    auto pnl = [&](double x) { return sign * shares * t.entry_price * (t.a + x - t.r); };
    t.pnl_up = pnl(t.up);
    t.pnl_down = pnl(t.down);
    return t;
}

TradeLog arbitrage_demo(const MarketConfig& cfg, const NoiseSequence& noise, double shares) {
    if (!(shares > 0.0)) throw std::invalid_argument("shares must be > 0");
    MarketPath path = build_market(cfg, noise);
    const auto first = no_arbitrage_check(path, cfg);
    if (!first) throw Inconclusive("no violation of d_n < r_n - a_n < u_n within N = " + std::to_string(cfg.N));
    const auto k = static_cast<std::size_t>(*first);
    const double ra = cfg.r_n(*first) - cfg.a_n(*first);
    const double lo = std::min(path.u[k], path.d[k]), hi = std::max(path.u[k], path.d[k]);
    if (lo > ra) return branch_pnl(path, cfg, *first, shares, true);
    if (hi < ra) return branch_pnl(path, cfg, *first, shares, false);
    throw Inconclusive("first violation at n = " + std::to_string(*first) +
                       " lies on the interval boundary; no strictly positive trade");
}

double integrate_rate(const RateFunction& rate, double t, int intervals) {
    if (t <= 0.0) return 0.0;
    if (intervals < 2) intervals = 2;
    if (intervals % 2) ++intervals;
    const double h = t / intervals;
    double s = rate(0.0) + rate(t);
    for (int k = 1; k < intervals; ++k) s += (k % 2 ? 4.0 : 2.0) * rate(k * h);
    return s * h / 3.0;
}

std::pair<double, double> bs_limit(const MarketConfig& cfg, const GridPath& z, double t) {
    if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("bs_limit: t must lie in [0, 1]");
    const double s = cfg.S0 * std::exp(integrate_rate(cfg.rate_a, t) + cfg.sigma * z.at(t));
    const double b = cfg.B0 * std::exp(integrate_rate(cfg.rate_r, t));
    return {s, b};
}

double log_price_gap(const MarketConfig& cfg, const GridPath& z) {
    const auto s = stock_prices(cfg, z);
    return std::log(s.back()) - std::log(bs_limit(cfg, z, 1.0).first);
}

void write_market_csv(const std::filesystem::path& path, const MarketPath& m) {
    std::FILE* f = std::fopen(path.string().c_str(), "wb");
    if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
    std::fputs("n,t,X,B,S,u,d,r_minus_a,violated\n", f);
    for (int n = 0; n <= m.N; ++n) {
        const auto k = static_cast<std::size_t>(n);
        std::fprintf(f, "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", n, static_cast<double>(n) / m.N, m.X[k],
                     m.B[k], m.S[k], m.u[k], m.d[k], m.r_minus_a[k], k < m.violated.size() && m.violated[k] ? 1 : 0);
    }
    if (std::fclose(f) != 0) throw std::runtime_error("write failed: " + path.string());
}

nlohmann::json params_json(const MarketConfig& cfg) {
    return {{"N", cfg.N},
            {"H", cfg.params.H},
            {"Hp", cfg.params.Hp},
            {"sigma", cfg.sigma},
            {"rate_r", cfg.rate_r.describe()},
            {"rate_a", cfg.rate_a.describe()},
            {"S0", cfg.S0},
            {"B0", cfg.B0},
            {"rel_tol", cfg.quad.rel_tol}};
}

nlohmann::json to_json(const ArbitrageReport& r, const MarketConfig& cfg) {
    nlohmann::json j;
    j["first_violation"] = r.first_violation ? nlohmann::json(*r.first_violation) : nlohmann::json(nullptr);
    j["n_max"] = r.n_max;
    j["steps"] = r.steps;
    j["fg_sequence"] = r.fg_sequence;
    j["fitted_exponent"] = r.inconclusive ? nlohmann::json(nullptr) : nlohmann::json(r.fitted_exponent);
    j["theoretical_exponent"] = r.theoretical_exponent;
    j["inconclusive"] = r.inconclusive;
    j["increasing_upper_half"] = r.increasing_upper_half;
    j["params"] = params_json(cfg);
    return j;
}

nlohmann::json to_json(const TradeLog& t) {
    return {{"step", t.step},   {"position", t.long_stock ? "long" : "short"},
            {"shares", t.shares}, {"entry_price", t.entry_price},
            {"r_n", t.r},         {"a_n", t.a},
            {"u_n", t.up},        {"d_n", t.down},
            {"pnl_up", t.pnl_up}, {"pnl_down", t.pnl_down}};
}

}  // namespace market
}  // namespace rosenblatt
