#pragma once

#include "rosenblatt/basis.hpp"
#include "rosenblatt/noise.hpp"

#include <filesystem>
#include <string_view>

namespace rosenblatt {

enum class ProcessTag { Walk, FBm, Rosenblatt };

std::string_view to_string(ProcessTag tag);
ProcessTag parse_process_tag(std::string_view name);

/// Walk sampled on the grid t_m = m/n, m = 0..n; values[0] == 0.
/// Off-grid queries use the cadlag step interpolation value(floor(n t)).
struct GridPath {
    int n = 0;
    ProcessTag tag = ProcessTag::Walk;
    std::vector<double> values;

    double time(int m) const { return static_cast<double>(m) / n; }
    double at(double t) const;
};

/// Grid index floor(n t) of a time in [0, 1], tolerant to rounding of t.
int grid_index(double t, int n);

/// M paths sharing (n, H, noise kind, process); path k uses the noise
/// stream derive_seed(master_seed, k).
struct PathEnsemble {
    std::vector<GridPath> paths;
    HurstParams params;
    QuadConfig quad;
    NoiseKind kind = NoiseKind::Rademacher;
    std::uint64_t master_seed = 0;
    int n = 0;
    ProcessTag tag = ProcessTag::Rosenblatt;

    std::size_t size() const { return paths.size(); }

    /// Values of every path at grid index m.
    std::vector<double> marginal(int m) const;

    /// Self-similarity index of the simulated process: 1/2 for the walk,
    /// Hp for the fBm walk, H for the Rosenblatt walk.
    double hurst() const;
};

namespace paths {

/// W^n_{m/n} = n^(-1/2) sum_{i <= m} xi_i.
GridPath random_walk(const NoiseSequence& noise);

/// Sottinen walk B^n_{m/n} = sum_{i <= m} [n int_{cell_i} K(m/n, s) ds] xi_i / sqrt(n),
/// with the fBm Hurst index taken as p.Hp.
GridPath fbm_walk(const NoiseSequence& noise, const CellBasis& basis);
GridPath fbm_walk(const NoiseSequence& noise, const HurstParams& p, const QuadConfig& q = {});

/// Rosenblatt walk Z^n_{m/n} = sum_{i != j <= m} c_ij(m) xi_i xi_j.
///
/// Accumulated one time cell at a time from the factorization
///   Z^n(m/n) - Z^n((m-1)/n)
///     = dH * sum_q (w_q/n) [ (sum_i xi_i gamma_i(a_q))^2 - sum_i xi_i^2 gamma_i(a_q)^2 ],
/// so a path costs O(n^2 Q) instead of O(n^3) per-step double sums.
GridPath rosenblatt_walk(const NoiseSequence& noise, const CellBasis& basis);
GridPath rosenblatt_walk(const NoiseSequence& noise, const HurstParams& p, const QuadConfig& q = {});

/// Reference generator: explicit double sum over the coefficient table at
/// every time index. O(n^3); meant for checking the factorized generator.
GridPath rosenblatt_walk_bruteforce(const NoiseSequence& noise, const CellBasis& basis);

/// `count` independent paths of `tag` on an n-grid. Path k is identical
/// (up to summation order) to the single-path generator fed with
/// make_noise(kind, derive_seed(master_seed, k), n).
PathEnsemble simulate_ensemble(std::size_t count, std::uint64_t master_seed, NoiseKind kind, int n,
                               const HurstParams& p, const QuadConfig& q, ProcessTag tag);

/// Scales grid values by T^hurst: the path on [0, T] in law, by self-similarity.
GridPath rescale_horizon(const GridPath& path, double T, double hurst);

// Exact second moments of the discrete walks (noise-kind independent).

/// Var Z^n_{m/n} = 2 sum_{i != j} c_ij(m)^2.
double exact_variance(const CellBasis& basis, int m);
/// E[Z^n_{ms/n} Z^n_{mt/n}] = 2 sum_{i != j} c_ij(ms) c_ij(mt).
double exact_covariance(const CellBasis& basis, int ms, int mt);
/// E|Z^n_{mt/n} - Z^n_{ms/n}|^2.
double exact_increment_variance(const CellBasis& basis, int ms, int mt);
/// E[Z^n]_{m/n}: sum over k <= m of the increment variances.
double exact_qv_mean(const CellBasis& basis, int m);
/// E[B^n_{ms/n} B^n_{mt/n}] for the fBm walk.
double exact_fbm_covariance(const CellBasis& basis, int ms, int mt);

/// CSV with header `path_id,m,t,value`, values printed with 17 digits.
void write_ensemble_csv(const std::filesystem::path& path, const PathEnsemble& ens);

}  // namespace paths
}  // namespace rosenblatt
