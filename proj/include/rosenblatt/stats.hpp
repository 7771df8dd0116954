#pragma once

#include "rosenblatt/paths.hpp"

#include <json.hpp>

#include <functional>
#include <optional>

namespace rosenblatt {

enum class Quantity { Mean, Variance, IncrementVariance, Covariance, Skewness, QuadraticVariation };

std::string_view to_string(Quantity q);

/// Monte Carlo estimate of one moment of an ensemble.
///
/// `theoretical` is the continuum target (for QuadraticVariation: the upper
/// bound N^(1-2H)); `exact_discrete` is the exact value of the same moment for
/// the discrete walk at this n, when one is available.
struct MomentReport {
    Quantity quantity = Quantity::Mean;
    double estimate = 0.0;
    double std_error = 0.0;
    std::optional<double> theoretical;
    std::optional<double> exact_discrete;
    std::size_t sample_size = 0;
    double s = 0.0;
    double t = 0.0;
    bool degenerate = false;

    /// |estimate - target| < k * std_error; a degenerate report passes when
    /// estimate == target.
    static bool agrees(double estimate, double target, double std_error, double k);
};

struct Histogram {
    std::vector<double> bin_edges;
    std::vector<std::size_t> counts;
    std::size_t total = 0;
};

namespace stats {

struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
};

/// Sample mean with its standard error s / sqrt(M) (the jackknife SE of the mean).
Estimate mean_estimate(std::span<const double> x);

/// Unbiased sample variance with leave-one-out jackknife standard error.
Estimate variance_estimate(std::span<const double> x);

/// Standardized third moment m3 / m2^(3/2) (population moments).
double sample_skewness(std::span<const double> x);

double median(std::vector<double> x);

/// Bootstrap standard error of `statistic`; resampling indices come from a
/// counter-based stream seeded with `seed`, so the result is reproducible.
double bootstrap_se(std::span<const double> x, const std::function<double(std::span<const double>)>& statistic,
                    std::size_t reps, std::uint64_t seed);

MomentReport mean(const PathEnsemble& ens, double t);

/// Sample variance of the marginal at t.
MomentReport variance(const PathEnsemble& ens, double t);

/// E|X(t) - X(s)|^2, symmetric in (s, t). The theoretical value is
/// |floor(nt)/n - floor(ns)/n|^(2 hurst); equal grid indices give a
/// degenerate report with estimate 0.
MomentReport increment_variance(const PathEnsemble& ens, double s, double t);

/// E[X(s) X(t)] against (t^2h + s^2h - |t-s|^2h) / 2 at the grid-snapped times.
MomentReport covariance(const PathEnsemble& ens, double s, double t);

/// Skewness of the marginal at t with bootstrap standard error. Requires
/// M >= 100. Theoretical value 0 for the walk and the fBm walk; for the
/// Rosenblatt walk the exact discrete skewness 8 tr(C^3) / (2 |C|^2)^(3/2)
/// is reported instead.
MomentReport skewness(const PathEnsemble& ens, double t, std::size_t bootstrap_reps = 200);

/// [X]_t = sum over m <= floor(Nt) of (X(m/N) - X((m-1)/N))^2.
double quadratic_variation(const GridPath& path, double t = 1.0);

/// Ensemble mean of [X]_1 with the bound N^(1-2H) as the theoretical value.
MomentReport qv_mean(const PathEnsemble& ens);

struct QvDecay {
    std::vector<int> sizes;
    std::vector<MomentReport> reports;
    double slope = 0.0;
    double intercept = 0.0;
    double target_slope = 0.0;
};

/// Least-squares slope of log E[X]_1 against log N. Needs at least three
/// distinct grid sizes.
QvDecay qv_decay(std::span<const PathEnsemble> ensembles);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
};
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

/// Equal-width bins over [min, max] of the sample; all-equal samples land in
/// a single occupied bin. Requires bins >= 2.
Histogram histogram(std::span<const double> x, int bins);
Histogram histogram(const PathEnsemble& ens, double t, int bins);

nlohmann::json to_json(const MomentReport& r);
/// Same, with the ensemble's parameters under "params".
nlohmann::json to_json(const MomentReport& r, const PathEnsemble& ens);
nlohmann::json params_json(const PathEnsemble& ens);
void write_histogram_csv(const std::filesystem::path& path, const Histogram& h);

}  // namespace stats
}  // namespace rosenblatt
