#include "rosenblatt/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

namespace rosenblatt {

std::string_view to_string(Quantity q) {
    switch (q) {
        case Quantity::Mean: return "mean";
        case Quantity::Variance: return "variance";
        case Quantity::IncrementVariance: return "increment_variance";
        case Quantity::Covariance: return "covariance";
        case Quantity::Skewness: return "skewness";
        case Quantity::QuadraticVariation: return "quadratic_variation";
    }
    return "?";
}

bool MomentReport::agrees(double estimate, double target, double std_error, double k) {
    if (std_error == 0.0) return estimate == target;
    return std::abs(estimate - target) < k * std_error;
}

namespace stats {

namespace {

void require_samples(std::size_t m) {
    if (m < 2) throw std::invalid_argument("need at least 2 samples");
}

double fbm_like_covariance(double s, double t, double h) {
    return 0.5 * (std::pow(t, 2 * h) + std::pow(s, 2 * h) - std::pow(std::abs(t - s), 2 * h));
}

std::shared_ptr<const CellBasis> basis_of(const PathEnsemble& ens) {
    if (ens.tag == ProcessTag::Walk) return nullptr;
    return CellBasis::shared(ens.n, ens.params, ens.quad);
}

// E[X(ms/n) X(mt/n)] for the discrete walk of the ensemble.
double exact_grid_covariance(const PathEnsemble& ens, int ms, int mt) {
    switch (ens.tag) {
        case ProcessTag::Walk: return static_cast<double>(std::min(ms, mt)) / ens.n;
        case ProcessTag::FBm: return paths::exact_fbm_covariance(*basis_of(ens), ms, mt);
        case ProcessTag::Rosenblatt: return paths::exact_covariance(*basis_of(ens), ms, mt);
    }
    return 0.0;
}

double exact_grid_increment_variance(const PathEnsemble& ens, int ms, int mt) {
    if (ens.tag == ProcessTag::Rosenblatt) return paths::exact_increment_variance(*basis_of(ens), ms, mt);
    return exact_grid_covariance(ens, mt, mt) + exact_grid_covariance(ens, ms, ms) -
           2.0 * exact_grid_covariance(ens, ms, mt);
}

}  // namespace

Estimate mean_estimate(std::span<const double> x) {
    require_samples(x.size());
    const double m = static_cast<double>(x.size());
    const double mu = std::accumulate(x.begin(), x.end(), 0.0) / m;
    double ss = 0.0;
    for (double v : x) ss += (v - mu) * (v - mu);
    return {mu, std::sqrt(ss / (m - 1.0) / m)};
}

Estimate variance_estimate(std::span<const double> x) {
    if (x.size() < 3) throw std::invalid_argument("variance jackknife needs at least 3 samples");
    const double m = static_cast<double>(x.size());
    const double mu = std::accumulate(x.begin(), x.end(), 0.0) / m;
    // Centered sums keep the leave-one-out updates well conditioned.
    double s1 = 0.0, s2 = 0.0;
    for (double v : x) {
        s1 += v - mu;
        s2 += (v - mu) * (v - mu);
    }
    const double full = (s2 - s1 * s1 / m) / (m - 1.0);
    std::vector<double> loo(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double y = x[k] - mu;
        const double a = s1 - y, b = s2 - y * y;
        loo[k] = (b - a * a / (m - 1.0)) / (m - 2.0);
    }
    const double bar = std::accumulate(loo.begin(), loo.end(), 0.0) / m;
    double ss = 0.0;
    for (double v : loo) ss += (v - bar) * (v - bar);
    return {full, std::sqrt((m - 1.0) / m * ss)};
}

double sample_skewness(std::span<const double> x) {
    require_samples(x.size());
    const double m = static_cast<double>(x.size());
    const double mu = std::accumulate(x.begin(), x.end(), 0.0) / m;
    double m2 = 0.0, m3 = 0.0;
    for (double v : x) {
        const double d = v - mu;
        m2 += d * d;
        m3 += d * d * d;
    }
    m2 /= m;
    m3 /= m;
    if (m2 == 0.0) return 0.0;
    return m3 / std::pow(m2, 1.5);
}

double median(std::vector<double> x) {
    if (x.empty()) throw std::invalid_argument("median of an empty sample");
    const auto mid = x.begin() + static_cast<std::ptrdiff_t>(x.size() / 2);
    std::nth_element(x.begin(), mid, x.end());
    if (x.size() % 2 == 1) return *mid;
    const double hi = *mid;
    const double lo = *std::max_element(x.begin(), mid);
    return 0.5 * (lo + hi);
}

double bootstrap_se(std::span<const double> x, const std::function<double(std::span<const double>)>& statistic,
                    std::size_t reps, std::uint64_t seed) {
    require_samples(x.size());
    if (reps < 2) throw std::invalid_argument("bootstrap needs at least 2 replicates");
    const CounterRng rng(seed);
    std::vector<double> values(reps), resample(x.size());
    std::uint64_t counter = 0;
    for (std::size_t r = 0; r < reps; ++r) {
        for (auto& v : resample) {
            const auto k = static_cast<std::size_t>(rng.uniform(counter++) * static_cast<double>(x.size()));
            v = x[std::min(k, x.size() - 1)];
        }
        values[r] = statistic(resample);
    }
    return mean_estimate(values).std_error * std::sqrt(static_cast<double>(reps));
}

MomentReport mean(const PathEnsemble& ens, double t) {
    const int m = grid_index(t, ens.n);
    const auto x = ens.marginal(m);
    const auto e = mean_estimate(x);
    MomentReport r;
    r.quantity = Quantity::Mean;
    r.estimate = e.value;
    r.std_error = e.std_error;
    r.theoretical = 0.0;
    r.exact_discrete = 0.0;
    r.sample_size = x.size();
    r.t = t;
    return r;
}

MomentReport variance(const PathEnsemble& ens, double t) {
    const int m = grid_index(t, ens.n);
    const auto x = ens.marginal(m);
    const auto e = variance_estimate(x);
    MomentReport r;
    r.quantity = Quantity::Variance;
    r.estimate = e.value;
    r.std_error = e.std_error;
    r.theoretical = std::pow(static_cast<double>(m) / ens.n, 2.0 * ens.hurst());
    r.exact_discrete = exact_grid_covariance(ens, m, m);
    r.sample_size = x.size();
    r.t = t;
    r.degenerate = (m == 0);
    return r;
}

MomentReport increment_variance(const PathEnsemble& ens, double s, double t) {
    if (s > t) std::swap(s, t);
    const int ms = grid_index(s, ens.n), mt = grid_index(t, ens.n);
    MomentReport r;
    r.quantity = Quantity::IncrementVariance;
    r.sample_size = ens.size();
    r.s = s;
    r.t = t;
    require_samples(ens.size());
    if (ms == mt) {
        r.degenerate = true;
        r.theoretical = 0.0;
        r.exact_discrete = 0.0;
        return r;
    }
    std::vector<double> sq(ens.size());
    for (std::size_t k = 0; k < ens.size(); ++k) {
        const double d = ens.paths[k].values[static_cast<std::size_t>(mt)] - ens.paths[k].values[static_cast<std::size_t>(ms)];
        sq[k] = d * d;
    }
    const auto e = mean_estimate(sq);
    r.estimate = e.value;
    r.std_error = e.std_error;
    r.theoretical = std::pow(static_cast<double>(mt - ms) / ens.n, 2.0 * ens.hurst());
    r.exact_discrete = exact_grid_increment_variance(ens, ms, mt);
    return r;
}

MomentReport covariance(const PathEnsemble& ens, double s, double t) {
    const int ms = grid_index(s, ens.n), mt = grid_index(t, ens.n);
    require_samples(ens.size());
    std::vector<double> prod(ens.size());
    for (std::size_t k = 0; k < ens.size(); ++k)
        prod[k] = ens.paths[k].values[static_cast<std::size_t>(ms)] * ens.paths[k].values[static_cast<std::size_t>(mt)];
    const auto e = mean_estimate(prod);
    MomentReport r;
    r.quantity = Quantity::Covariance;
    r.estimate = e.value;
    r.std_error = e.std_error;
    r.theoretical = fbm_like_covariance(static_cast<double>(ms) / ens.n, static_cast<double>(mt) / ens.n, ens.hurst());
    r.exact_discrete = exact_grid_covariance(ens, ms, mt);
    r.sample_size = ens.size();
    r.s = s;
    r.t = t;
    r.degenerate = (ms == 0 || mt == 0);
    return r;
}

MomentReport skewness(const PathEnsemble& ens, double t, std::size_t bootstrap_reps) {
    if (ens.size() < 100) throw std::invalid_argument("skewness needs an ensemble of at least 100 paths");
    const int m = grid_index(t, ens.n);
    const auto x = ens.marginal(m);
    MomentReport r;
    r.quantity = Quantity::Skewness;
    r.estimate = sample_skewness(x);
    r.std_error = bootstrap_se(x, [](std::span<const double> v) { return sample_skewness(v); }, bootstrap_reps,
                               derive_seed(ens.master_seed ^ 0x5ce3ULL, static_cast<std::uint64_t>(m)));
    r.sample_size = x.size();
    r.t = t;
    r.degenerate = (m == 0);
    if (ens.tag == ProcessTag::Rosenblatt) {
        if (m >= 2) {
            const Eigen::MatrixXd c = basis_of(ens)->coefficient_table(m);
            const double var = 2.0 * c.squaredNorm();
            r.exact_discrete = 8.0 * (c * c).cwiseProduct(c).sum() / std::pow(var, 1.5);
        }
    } else {
        r.theoretical = 0.0;
        if (ens.tag == ProcessTag::FBm || ens.kind == NoiseKind::StandardGaussian) r.exact_discrete = 0.0;
    }
    return r;
}

double quadratic_variation(const GridPath& path, double t) {
    const int m = grid_index(t, path.n);
    double qv = 0.0;
    for (int k = 1; k <= m; ++k) {
        const double d = path.values[static_cast<std::size_t>(k)] - path.values[static_cast<std::size_t>(k - 1)];
        qv += d * d;
    }
    return qv;
}

MomentReport qv_mean(const PathEnsemble& ens) {
    std::vector<double> qv(ens.size());
    for (std::size_t k = 0; k < ens.size(); ++k) qv[k] = quadratic_variation(ens.paths[k]);
    const auto e = mean_estimate(qv);
    MomentReport r;
    r.quantity = Quantity::QuadraticVariation;
    r.estimate = e.value;
    r.std_error = e.std_error;
    r.theoretical = std::pow(static_cast<double>(ens.n), 1.0 - 2.0 * ens.hurst());
    if (ens.tag == ProcessTag::Rosenblatt) r.exact_discrete = paths::exact_qv_mean(*basis_of(ens), ens.n);
    else {
        double s = 0.0;
        for (int m = 1; m <= ens.n; ++m) s += exact_grid_increment_variance(ens, m - 1, m);
        r.exact_discrete = s;
    }
    r.sample_size = ens.size();
    r.t = 1.0;
    return r;
}

LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("least_squares: need >= 2 matched points");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sxx += (x[k] - mx) * (x[k] - mx);
        sxy += (x[k] - mx) * (y[k] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("least_squares: abscissae are all equal");
    const double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

QvDecay qv_decay(std::span<const PathEnsemble> ensembles) {
    QvDecay out;
    std::vector<double> lx, ly;
    for (const auto& ens : ensembles) {
        out.sizes.push_back(ens.n);
        out.reports.push_back(qv_mean(ens));
        if (!(out.reports.back().estimate > 0.0)) throw std::runtime_error("qv_decay: nonpositive mean quadratic variation");
        lx.push_back(std::log(static_cast<double>(ens.n)));
        ly.push_back(std::log(out.reports.back().estimate));
    }
    auto distinct = out.sizes;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 3) throw std::invalid_argument("qv_decay: need at least 3 distinct grid sizes for the fit");
    const auto fit = least_squares(lx, ly);
    out.slope = fit.slope;
    out.intercept = fit.intercept;
    out.target_slope = 1.0 - 2.0 * ensembles.front().hurst();
    return out;
}

Histogram histogram(std::span<const double> x, int bins) {
    if (bins < 2) throw std::invalid_argument("histogram needs bins >= 2");
    if (x.empty()) throw std::invalid_argument("histogram of an empty sample");
    const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
    double lo = *lo_it, hi = *hi_it;
    if (lo == hi) {
        // Degenerate sample: put it in the middle of a unit-width range.
        lo -= 0.5;
        hi += 0.5;
    }
    Histogram h;
    h.bin_edges.resize(static_cast<std::size_t>(bins) + 1);
    for (int b = 0; b <= bins; ++b) h.bin_edges[static_cast<std::size_t>(b)] = lo + (hi - lo) * b / bins;
    h.bin_edges.back() = hi;
    h.counts.assign(static_cast<std::size_t>(bins), 0);
    for (double v : x) {
        auto b = static_cast<int>(std::floor((v - lo) / (hi - lo) * bins));
        b = std::clamp(b, 0, bins - 1);
        ++h.counts[static_cast<std::size_t>(b)];
    }
    h.total = x.size();
    return h;
}

Histogram histogram(const PathEnsemble& ens, double t, int bins) {
    return histogram(ens.marginal(grid_index(t, ens.n)), bins);
}

nlohmann::json to_json(const MomentReport& r) {
    nlohmann::json j;
    j["quantity"] = std::string(to_string(r.quantity));
    j["estimate"] = r.estimate;
    j["std_error"] = r.std_error;
    j["theoretical"] = r.theoretical ? nlohmann::json(*r.theoretical) : nlohmann::json(nullptr);
    j["exact_discrete"] = r.exact_discrete ? nlohmann::json(*r.exact_discrete) : nlohmann::json(nullptr);
    j["sample_size"] = r.sample_size;
    j["s"] = r.s;
    j["t"] = r.t;
    j["degenerate"] = r.degenerate;
    return j;
}

nlohmann::json to_json(const MomentReport& r, const PathEnsemble& ens) {
    auto j = to_json(r);
    j["params"] = params_json(ens);
    return j;
}

nlohmann::json params_json(const PathEnsemble& ens) {
    return {{"H", ens.params.H},           {"Hp", ens.params.Hp},
            {"n", ens.n},                  {"M", ens.size()},
            {"kind", to_string(ens.kind)}, {"seed", ens.master_seed},
            {"rel_tol", ens.quad.rel_tol}, {"process", to_string(ens.tag)}};
}

void write_histogram_csv(const std::filesystem::path& path, const Histogram& h) {
    std::FILE* f = std::fopen(path.string().c_str(), "wb");
    if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
    std::fputs("bin_left,bin_right,count\n", f);
    for (std::size_t b = 0; b < h.counts.size(); ++b)
        std::fprintf(f, "%.17g,%.17g,%zu\n", h.bin_edges[b], h.bin_edges[b + 1], h.counts[b]);
    if (std::fclose(f) != 0) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace stats
}  // namespace rosenblatt
