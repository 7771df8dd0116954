#pragma once

#include "rosenblatt/basis.hpp"

#include <filesystem>
#include <string>

namespace rosenblatt {

/// Coefficients c_ij(m) of the Rosenblatt walk at time m/n.
///
/// Symmetric, zero on the diagonal, zero outside i, j <= m, nonnegative.
struct WeightTable {
    int n = 0;
    int m = 0;
    Eigen::MatrixXd coeffs;

    /// 1-based access.
    double operator()(int i, int j) const { return coeffs(i - 1, j - 1); }

    /// 2 * sum_{i != j} c_ij^2, the exact variance of the walk at m/n.
    double frobenius_variance() const { return 2.0 * coeffs.squaredNorm(); }
};

namespace kernel {

/// Full table assembled from the shared cell basis: O(n Q) one-dimensional
/// kernel integrals (cached in the basis) plus O(n^2 Q) multiplications.
WeightTable weight_table(int m, int n, const HurstParams& p, const QuadConfig& q = {});
WeightTable weight_table(int m, const CellBasis& basis);

/// Cache key written in the first two lines of a table file.
struct WeightTableKey {
    double H = 0.0;
    int n = 0;
    int m = 0;
    double rel_tol = 0.0;
    bool operator==(const WeightTableKey&) const = default;
};

/// CSV cache format:
///   line 1: `H,n,m,rel_tol`
///   line 2: the key values
///   then one line per row i = 2..n with the strict lower triangle
///   c(i,1), ..., c(i,i-1), printed with 17 significant digits.
void write_weight_table_csv(const std::filesystem::path& path, const WeightTable& table, const WeightTableKey& key);

/// Reads a table written by write_weight_table_csv; throws std::runtime_error
/// on a malformed file.
WeightTable read_weight_table_csv(const std::filesystem::path& path, WeightTableKey* key_out = nullptr);

/// Returns the cached table from `dir` when its key matches, otherwise
/// builds it and writes the cache file.
WeightTable load_or_build_weight_table(const std::filesystem::path& dir, int m, int n, const HurstParams& p,
                                       const QuadConfig& q = {});

}  // namespace kernel
}  // namespace rosenblatt
