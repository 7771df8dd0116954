// rosenblatt: command-line front end (simulate, validate, market, rerun).
//
// Exit codes: 0 pass, 1 a check failed, 2 usage error, 3 numerical failure
// (quadrature nonconvergence or model breakdown), 4 inconclusive at this scale.

#include "rosenblatt/market.hpp"
#include "rosenblatt/stats.hpp"
#include "svg.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>

#ifndef ROSENBLATT_VERSION
#define ROSENBLATT_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rosenblatt;

namespace {

enum Exit { kPass = 0, kCheckFailed = 1, kUsage = 2, kNumerics = 3, kInconclusive = 4 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
}

fs::path with_suffix(const fs::path& base, const std::string& suffix) { return fs::path(base.string() + suffix); }

// ---------------------------------------------------------------- options

struct EnsembleOptions {
    std::string process = "rosenblatt";
    double hurst = 0.8;
    int n = 128;
    std::size_t paths = 1000;
    std::uint64_t seed = 1;
    std::string noise = "rademacher";
    double tol = 1e-8;
    bool plot = false;

    void add_to(CLI::App* app) {
        app->add_option("--process", process, "walk | fbm | rosenblatt")->check(CLI::IsMember({"walk", "fbm", "rosenblatt"}));
        app->add_option("--hurst", hurst, "Rosenblatt index H in (1/2, 1); the fBm walk uses (H+1)/2");
        app->add_option("--n", n, "grid size (times m/n, m = 0..n)");
        app->add_option("--paths", paths, "ensemble size M");
        app->add_option("--seed", seed, "master seed");
        app->add_option("--noise", noise, "rademacher | gaussian")->check(CLI::IsMember({"rademacher", "gaussian"}));
        app->add_option("--tol", tol, "relative quadrature tolerance");
        app->add_flag("--plot", plot, "also write an SVG chart");
    }

    std::vector<std::string> args() const {
        std::vector<std::string> a{"--process", process, "--hurst", fmt17(hurst), "--n", std::to_string(n),
                                   "--paths", std::to_string(paths), "--seed", std::to_string(seed),
                                   "--noise", noise, "--tol", fmt17(tol)};
        if (plot) a.push_back("--plot");
        return a;
    }

    json to_json() const {
        return {{"process", process}, {"hurst", hurst}, {"n", n},     {"paths", paths},
                {"seed", seed},       {"noise", noise}, {"tol", tol}, {"plot", plot}};
    }

    HurstParams params() const {
        try {
            return HurstParams::from_hurst(hurst);
        } catch (const std::domain_error& e) {
            throw UsageError(e.what());
        }
    }

    QuadConfig quad() const {
        QuadConfig q;
        q.rel_tol = tol;
        try {
            q.validate();
        } catch (const std::exception& e) {
            throw UsageError(e.what());
        }
        return q;
    }

    void validate() const {
        params();
        quad();
        if (n < 1) throw UsageError("--n must be >= 1");
        if (paths < 1) throw UsageError("--paths must be >= 1");
    }

    PathEnsemble simulate(int grid) const {
        return paths::simulate_ensemble(paths, seed, parse_noise_kind(noise), grid, params(), quad(),
                                        parse_process_tag(process));
    }
};

struct SimulateOptions {
    EnsembleOptions ens;
    std::string out = "ensemble.csv";

    void add_to(CLI::App* app) {
        ens.add_to(app);
        app->add_option("--out", out, "output CSV path");
    }
    std::vector<std::string> args() const {
        auto a = ens.args();
        a.insert(a.end(), {"--out", out});
        return a;
    }
    json to_json() const {
        auto j = ens.to_json();
        j["out"] = out;
        return j;
    }
};

struct ValidateOptions {
    EnsembleOptions ens;
    std::string check = "all";
    double k = 4.0;
    int bins = 40;
    std::vector<int> qv_sizes{16, 32, 64, 128, 256};
    std::string out = "validate.json";

    void add_to(CLI::App* app) {
        ens.add_to(app);
        app->add_option("--check", check, "variance | covariance | skewness | qv | histogram | all")
            ->check(CLI::IsMember({"variance", "covariance", "skewness", "qv", "histogram", "all"}));
        app->add_option("--k", k, "pass band in standard errors");
        app->add_option("--bins", bins, "histogram bins");
        app->add_option("--qv-sizes", qv_sizes, "grid sizes of the quadratic-variation sweep")->delimiter(',');
        app->add_option("--out", out, "JSON report path");
    }
    std::vector<std::string> args() const {
        auto a = ens.args();
        std::string sizes;
        for (std::size_t i = 0; i < qv_sizes.size(); ++i) sizes += (i ? "," : "") + std::to_string(qv_sizes[i]);
        a.insert(a.end(), {"--check", check, "--k", fmt17(k), "--bins", std::to_string(bins), "--qv-sizes", sizes,
                           "--out", out});
        return a;
    }
    json to_json() const {
        auto j = ens.to_json();
        j["check"] = check;
        j["k"] = k;
        j["bins"] = bins;
        j["qv_sizes"] = qv_sizes;
        j["out"] = out;
        return j;
    }
};

struct MarketOptions {
    int N = 64;
    double hurst = 0.8;
    double sigma = 1.0;
    std::string rate_r = "const:0.5";
    std::string rate_a = "const:0";
    double S0 = 1.0;
    double B0 = 1.0;
    std::uint64_t seed = 1;
    std::string path = "ones";
    double tol = 1e-8;
    bool scan = false;
    bool demo = false;
    double shares = 1.0;
    bool plot = false;
    std::string out = "market";

    void add_to(CLI::App* app) {
        app->add_option("--N", N, "trading periods");
        app->add_option("--hurst", hurst, "Rosenblatt index H in (1/2, 1)");
        app->add_option("--sigma", sigma, "volatility (>= 0)");
        app->add_option("--rate-r", rate_r, "bond rate: const:X | affine:X,Y | table:t=v,...");
        app->add_option("--rate-a", rate_a, "stock drift: const:X | affine:X,Y | table:t=v,...");
        app->add_option("--S0", S0, "initial stock price");
        app->add_option("--B0", B0, "initial bond price");
        app->add_option("--seed", seed, "noise seed (used with --path seeded)");
        app->add_option("--path", path, "ones (the all-ones witness) | seeded (Rademacher from --seed)")
            ->check(CLI::IsMember({"ones", "seeded"}));
        app->add_option("--tol", tol, "relative quadrature tolerance");
        app->add_flag("--scan-divergence", scan, "scan (f-g)(n) on the all-ones path");
        app->add_flag("--demo-arbitrage", demo, "one-period arbitrage at the first violation");
        app->add_option("--shares", shares, "position size of the arbitrage demo");
        app->add_flag("--plot", plot, "also write an SVG chart of u_n, d_n and r_n - a_n");
        app->add_option("--out", out, "output prefix");
    }
    std::vector<std::string> args() const {
        std::vector<std::string> a{"--N",     std::to_string(N), "--hurst", fmt17(hurst), "--sigma", fmt17(sigma),
                                   "--rate-r", rate_r,           "--rate-a", rate_a,      "--S0",    fmt17(S0),
                                   "--B0",    fmt17(B0),         "--seed",  std::to_string(seed), "--path", path,
                                   "--tol",   fmt17(tol),        "--shares", fmt17(shares), "--out", out};
        if (scan) a.push_back("--scan-divergence");
        if (demo) a.push_back("--demo-arbitrage");
        if (plot) a.push_back("--plot");
        return a;
    }
    json to_json() const {
        return {{"N", N},           {"hurst", hurst},   {"sigma", sigma}, {"rate_r", rate_r},
                {"rate_a", rate_a}, {"S0", S0},         {"B0", B0},       {"seed", seed},
                {"path", path},     {"tol", tol},       {"scan_divergence", scan}, {"demo_arbitrage", demo},
                {"shares", shares}, {"plot", plot},     {"out", out}};
    }

    MarketConfig config() const {
        MarketConfig c;
        try {
            c.params = HurstParams::from_hurst(hurst);
            c.N = N;
            c.sigma = sigma;
            c.rate_r = RateFunction::parse(rate_r);
            c.rate_a = RateFunction::parse(rate_a);
            c.S0 = S0;
            c.B0 = B0;
            c.quad.rel_tol = tol;
            c.quad.validate();
            c.validate();
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        } catch (const std::domain_error& e) {
            throw UsageError(e.what());
        }
        if (!(shares > 0.0)) throw UsageError("--shares must be > 0");
        return c;
    }
};

// --------------------------------------------------------------- manifest

struct Manifest {
    std::string command;
    json params;
    std::vector<std::string> args;
    std::uint64_t seed = 0;
    std::vector<std::string> outputs;
};

std::string manifest_name(const fs::path& base) { return with_suffix(base, ".manifest.json").filename().string(); }

void write_manifest(const fs::path& base, const Manifest& m, double seconds) {
    json j;
    j["command"] = m.command;
    j["params"] = m.params;
    j["args"] = m.args;
    j["seed"] = m.seed;
    j["tool_version"] = ROSENBLATT_VERSION;
    j["outputs"] = m.outputs;
    j["wall_time_seconds"] = seconds;
    write_json(with_suffix(base, ".manifest.json"), j);
}

// --------------------------------------------------------------- commands

int cmd_simulate(const SimulateOptions& o, Manifest& man) {
    o.ens.validate();
    const PathEnsemble ens = o.ens.simulate(o.ens.n);
    const fs::path out(o.out);
    paths::write_ensemble_csv(out, ens);
    json meta = stats::params_json(ens);
    meta["manifest"] = manifest_name(out);
    meta["data"] = out.filename().string();
    write_json(with_suffix(out, ".meta.json"), meta);
    man.outputs = {out.filename().string(), with_suffix(out, ".meta.json").filename().string()};
    if (o.ens.plot) {
        std::vector<std::vector<double>> series;
        for (std::size_t k = 0; k < std::min<std::size_t>(10, ens.size()); ++k) series.push_back(ens.paths[k].values);
        svg::step_lines(with_suffix(out, ".svg"), series,
                        std::string(to_string(ens.tag)) + " paths, H = " + fmt17(ens.hurst()).substr(0, 6));
        man.outputs.push_back(with_suffix(out, ".svg").filename().string());
    }
    std::cout << "wrote " << ens.size() << " paths (n = " << ens.n << ") to " << out.string() << '\n';
    return kPass;
}

struct CheckResult {
    std::string name;
    bool pass = true;
    json detail;
};

json report_entry(const PathEnsemble& ens, const MomentReport& r, bool pass, const std::string& rule) {
    json j = stats::to_json(r, ens);
    j["pass"] = pass;
    j["rule"] = rule;
    return j;
}

CheckResult check_variance(const PathEnsemble& ens, double k) {
    CheckResult c{"variance", true, json::array()};
    const auto v = stats::variance(ens, 1.0);
    const bool ok = MomentReport::agrees(v.estimate, *v.exact_discrete, v.std_error, k);
    c.pass &= ok;
    c.detail.push_back(report_entry(ens, v, ok, "|estimate - exact_discrete| < k SE"));
    for (auto [s, t] : {std::pair{0.0, 0.5}, {0.25, 0.75}, {0.5, 1.0}}) {
        const auto r = stats::increment_variance(ens, s, t);
        const bool agree = MomentReport::agrees(r.estimate, *r.exact_discrete, r.std_error, k);
        const bool bound = r.degenerate || r.estimate <= *r.theoretical * (1.0 + k * r.std_error / r.estimate);
        c.pass &= agree && bound;
        c.detail.push_back(report_entry(ens, r, agree && bound,
                                        "|estimate - exact_discrete| < k SE and estimate <= theoretical (1 + k SE_rel)"));
    }
    return c;
}

CheckResult check_covariance(const PathEnsemble& ens, double k) {
    CheckResult c{"covariance", true, json::array()};
    for (auto [s, t] : {std::pair{0.25, 0.5}, {0.5, 1.0}, {0.25, 1.0}, {0.75, 1.0}, {0.5, 0.75}}) {
        const auto r = stats::covariance(ens, s, t);
        const bool ok = MomentReport::agrees(r.estimate, *r.exact_discrete, r.std_error, k);
        c.pass &= ok;
        c.detail.push_back(report_entry(ens, r, ok, "|estimate - exact_discrete| < k SE"));
    }
    return c;
}

CheckResult check_skewness(const PathEnsemble& ens, double k) {
    CheckResult c{"skewness", true, json::array()};
    const auto r = stats::skewness(ens, 1.0);
    bool ok;
    std::string rule;
    if (ens.tag == ProcessTag::Rosenblatt) {
        ok = std::abs(r.estimate) > 3.0 * r.std_error;
        rule = "|skewness| > 3 SE";
        if (r.exact_discrete) {
            ok = ok && MomentReport::agrees(r.estimate, *r.exact_discrete, r.std_error, k);
            rule += " and |estimate - exact_discrete| < k SE";
        }
    } else {
        ok = std::abs(r.estimate) < k * r.std_error;
        rule = "|skewness| < k SE";
    }
    c.pass = ok;
    c.detail.push_back(report_entry(ens, r, ok, rule));
    return c;
}

CheckResult check_qv(const ValidateOptions& o) {
    const double k = o.k;
    CheckResult c{"qv", true, json::object()};
    std::vector<PathEnsemble> ensembles;
    for (int size : o.qv_sizes) ensembles.push_back(o.ens.simulate(size));
    const auto decay = stats::qv_decay(ensembles);
    json reports = json::array();
    for (std::size_t i = 0; i < decay.reports.size(); ++i) {
        const auto& r = decay.reports[i];
        const bool ok = r.estimate <= *r.theoretical * (1.0 + k * r.std_error / r.estimate);
        c.pass &= ok;
        auto e = report_entry(ensembles[i], r, ok, "estimate <= N^(1-2H) (1 + k SE_rel)");
        e["N"] = decay.sizes[i];
        reports.push_back(e);
    }
    const bool slope_ok = std::abs(decay.slope - decay.target_slope) <= 0.15;
    c.pass &= slope_ok;
    c.detail["reports"] = reports;
    c.detail["sizes"] = decay.sizes;
    c.detail["fitted_slope"] = decay.slope;
    c.detail["target_slope"] = decay.target_slope;
    c.detail["slope_pass"] = slope_ok;
    return c;
}

CheckResult check_histogram(const PathEnsemble& ens, const ValidateOptions& o, Manifest& man) {
    CheckResult c{"histogram", true, json::object()};
    const auto x = ens.marginal(ens.n);
    const auto h = stats::histogram(x, o.bins);
    std::size_t sum = 0;
    for (auto v : h.counts) sum += v;
    const fs::path csv = with_suffix(fs::path(o.out), ".histogram.csv");
    stats::write_histogram_csv(csv, h);
    man.outputs.push_back(csv.filename().string());
    if (o.ens.plot) {
        const auto plot = with_suffix(fs::path(o.out), ".histogram.svg");
        svg::bars(plot, h.bin_edges, h.counts, std::string(to_string(ens.tag)) + " marginal at t = 1");
        man.outputs.push_back(plot.filename().string());
    }
    const double mean = stats::mean_estimate(x).value;
    const double med = stats::median(x);
    const double med_se = stats::bootstrap_se(
        x, [](std::span<const double> v) { return stats::median(std::vector<double>(v.begin(), v.end())); }, 200,
        derive_seed(ens.master_seed ^ 0x3ed1aULL, 0));
    c.pass = (sum == h.total && h.total == x.size());
    c.detail = {{"csv", csv.filename().string()}, {"total", h.total},        {"bins", o.bins},
                {"mean", mean},                    {"median", med},          {"median_se", med_se},
                {"mean_minus_median", mean - med}, {"counts_conserved", c.pass}};
    return c;
}

int cmd_validate(const ValidateOptions& o, Manifest& man) {
    o.ens.validate();
    if (o.bins < 2) throw UsageError("--bins must be >= 2");
    if (!(o.k > 0.0)) throw UsageError("--k must be > 0");
    const bool all = o.check == "all";
    const bool want_qv = all || o.check == "qv";
    if (want_qv && o.qv_sizes.size() < 3) throw UsageError("--qv-sizes needs at least 3 grid sizes");
    for (int size : o.qv_sizes)
        if (size < 1) throw UsageError("--qv-sizes entries must be >= 1");
    if ((all || o.check == "skewness") && o.ens.paths < 100) throw UsageError("skewness needs --paths >= 100");
    if (o.ens.paths < 3) throw UsageError("validation needs --paths >= 3");

    std::vector<CheckResult> results;
    man.outputs = {fs::path(o.out).filename().string()};
    if (all || o.check != "qv") {
        const PathEnsemble ens = o.ens.simulate(o.ens.n);
        if (all || o.check == "variance") results.push_back(check_variance(ens, o.k));
        if (all || o.check == "covariance") results.push_back(check_covariance(ens, o.k));
        if (all || o.check == "skewness") results.push_back(check_skewness(ens, o.k));
        if (all || o.check == "histogram") results.push_back(check_histogram(ens, o, man));
    }
    if (want_qv) results.push_back(check_qv(o));

    bool pass = true;
    json checks = json::array();
    for (const auto& r : results) {
        pass &= r.pass;
        checks.push_back({{"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
        std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << '\n';
    }
    json report = {{"params", o.to_json()}, {"checks", checks}, {"pass", pass}, {"manifest", manifest_name(o.out)}};
    write_json(o.out, report);
    return pass ? kPass : kCheckFailed;
}

int cmd_market(const MarketOptions& o, Manifest& man) {
    const MarketConfig cfg = o.config();
    const NoiseSequence noise = o.path == "ones" ? all_ones_noise(static_cast<std::size_t>(cfg.N))
                                                 : make_noise(NoiseKind::Rademacher, o.seed, static_cast<std::size_t>(cfg.N));
    MarketPath path = market::build_market(cfg, noise);
    const auto first = market::no_arbitrage_check(path, cfg);
    const fs::path csv = with_suffix(fs::path(o.out), ".csv");
    market::write_market_csv(csv, path);
    man.outputs = {csv.filename().string()};

    json summary = {{"params", market::params_json(cfg)},
                    {"path", o.path},
                    {"first_violation", first ? json(*first) : json(nullptr)},
                    {"decomposition_residual", path.decomposition_residual},
                    {"terminal_stock", path.S.back()},
                    {"terminal_bond", path.B.back()},
                    {"manifest", manifest_name(o.out)}};
    std::cout << "first violation: " << (first ? std::to_string(*first) : std::string("none")) << '\n';

    if (o.plot) {
        std::vector<double> ra(path.r_minus_a);
        svg::step_lines(with_suffix(fs::path(o.out), ".svg"), {path.u, path.d, ra}, "u_n, d_n and r_n - a_n");
        man.outputs.push_back(with_suffix(fs::path(o.out), ".svg").filename().string());
    }
    if (o.scan) {
        const auto report = market::divergence_scan(cfg, cfg.N);
        json j = market::to_json(report, cfg);
        j["manifest"] = manifest_name(o.out);
        const auto file = with_suffix(fs::path(o.out), ".arbitrage.json");
        write_json(file, j);
        man.outputs.push_back(file.filename().string());
        summary["scan"] = file.filename().string();
        std::cout << "fitted exponent: " << (report.inconclusive ? std::string("inconclusive") : fmt17(report.fitted_exponent))
                  << " (theory " << report.theoretical_exponent << ")\n";
    }
    int code = kPass;
    if (o.demo) {
        try {
            const TradeLog t = market::arbitrage_demo(cfg, noise, o.shares);
            summary["trade"] = market::to_json(t);
            std::cout << "arbitrage at n = " << t.step << (t.long_stock ? " (long)" : " (short)") << ": pnl up "
                      << fmt17(t.pnl_up) << ", pnl down " << fmt17(t.pnl_down) << '\n';
        } catch (const Inconclusive& e) {
            summary["trade"] = nullptr;
            summary["inconclusive"] = e.what();
            std::cerr << "inconclusive: " << e.what() << '\n';
            code = kInconclusive;
        }
    }
    const auto file = with_suffix(fs::path(o.out), ".json");
    write_json(file, summary);
    man.outputs.push_back(file.filename().string());
    return code;
}

int run(std::vector<std::string> argv);

int cmd_rerun(const std::string& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw UsageError("cannot open manifest " + manifest_path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw UsageError("malformed manifest " + manifest_path + ": " + e.what());
    }
    if (!j.contains("command") || !j.contains("args")) throw UsageError("manifest lacks command/args");
    std::vector<std::string> argv{"rosenblatt", j["command"].get<std::string>()};
    for (const auto& a : j["args"]) argv.push_back(a.get<std::string>());
    return run(argv);
}

int run(std::vector<std::string> argv) {
    CLI::App app{"Random-walk approximation of the Rosenblatt process, its statistics, and a binary market"};
    app.set_config("--config", "", "key=value preset file (INI sections per command)");
    app.require_subcommand(1);
    app.set_version_flag("--version", ROSENBLATT_VERSION);

    SimulateOptions sim;
    ValidateOptions val;
    MarketOptions mkt;
    std::string manifest;
    auto* s = app.add_subcommand("simulate", "write an ensemble of walk paths");
    sim.add_to(s);
    auto* v = app.add_subcommand("validate", "Monte Carlo checks of the walk laws");
    val.add_to(v);
    auto* m = app.add_subcommand("market", "binary market, divergence scan and arbitrage demo");
    mkt.add_to(m);
    auto* r = app.add_subcommand("rerun", "re-run a command from its manifest");
    r->add_option("manifest", manifest, "manifest JSON")->required();

    // CLI11 takes the arguments without the program name, last one first.
    argv.erase(argv.begin());
    std::reverse(argv.begin(), argv.end());
    try {
        app.parse(argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    const auto start = std::chrono::steady_clock::now();
    Manifest man;
    fs::path base;
    int code = kPass;
    try {
        if (*s) {
            man = {"simulate", sim.to_json(), sim.args(), sim.ens.seed, {}};
            base = sim.out;
            code = cmd_simulate(sim, man);
        } else if (*v) {
            man = {"validate", val.to_json(), val.args(), val.ens.seed, {}};
            base = val.out;
            code = cmd_validate(val, man);
        } else if (*m) {
            man = {"market", mkt.to_json(), mkt.args(), mkt.seed, {}};
            base = mkt.out;
            code = cmd_market(mkt, man);
        } else {
            return cmd_rerun(manifest);
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const QuadratureError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumerics;
    } catch (const ModelBreakdown& e) {
        std::cerr << "model breakdown: " << e.what() << '\n';
        return kNumerics;
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(base, man, seconds);
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(std::vector<std::string>(argv, argv + argc));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumerics;
    }
}
