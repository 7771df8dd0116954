#pragma once

#include "rosenblatt/kernel.hpp"

#include <Eigen/Dense>

#include <memory>
#include <span>
#include <vector>

namespace rosenblatt {

/// Frozen table of scaled cell integrals gamma_i(a) = sqrt(n) * g_i(a)
/// evaluated at a shared set of quadrature nodes inside every grid time cell.
///
/// Time cell m = [(m-1)/n, m/n] carries the nodes a_{m,q} = (m-1 + tau_q)/n,
/// where (tau_q, w_q) is a power-substituted rule on [0, 1] built for the
/// exponent Hp - 1/2. Every downstream quantity is a contraction of these
/// values:
///   - Rosenblatt coefficient increments  dc_ij(m) = dH * sum_q (w_q/n) gamma_i gamma_j
///   - fBm walk increments               dB(m) = sum_q (w_q/n) sum_i xi_i gamma_i
/// so the table is built once per (n, H, QuadConfig) and then only read.
class CellBasis {
public:
    CellBasis(int n, const HurstParams& p, const QuadConfig& q);

    /// Process-wide memoized basis; safe to call from several threads.
    static std::shared_ptr<const CellBasis> shared(int n, const HurstParams& p, const QuadConfig& q = {});

    int n() const { return n_; }
    const HurstParams& params() const { return params_; }
    const QuadConfig& config() const { return config_; }
    const NodeRule& rule() const { return rule_; }
    std::size_t nodes_per_cell() const { return rule_.size(); }

    /// Absolute time of node q in time cell m (1-based m).
    double node_time(int m, std::size_t q) const { return (m - 1 + rule_.nodes[q]) / n_; }

    /// Node weights for integration over one time cell (already divided by n).
    const Eigen::VectorXd& time_weights() const { return weights_; }

    /// Q x m matrix; column i-1 holds gamma_i at the nodes of time cell m.
    const Eigen::MatrixXd& gamma(int m) const { return gamma_[static_cast<std::size_t>(m - 1)]; }

    /// sum_i gamma_i(a_q)^2 over i <= m, per node.
    const Eigen::VectorXd& gamma_sq_sum(int m) const { return gamma_sq_[static_cast<std::size_t>(m - 1)]; }

    /// m x m matrix of dc_ij(m) = c_ij(m) - c_ij(m-1), zero diagonal.
    Eigen::MatrixXd increment_table(int m) const;

    /// n x n matrix of c_ij(m), zero diagonal and zero outside i, j <= m.
    Eigen::MatrixXd coefficient_table(int m) const;

    /// Weights of the fBm walk at time m/n: entry i-1 is
    /// n * int_{cell_i} K(m/n, s) ds / sqrt(n) = int_0^{m/n} gamma_i(a) da.
    Eigen::VectorXd fbm_weights(int m) const;

private:
    int n_;
    HurstParams params_;
    QuadConfig config_;
    NodeRule rule_;
    Eigen::VectorXd weights_;
    std::vector<Eigen::MatrixXd> gamma_;
    std::vector<Eigen::VectorXd> gamma_sq_;
};

}  // namespace rosenblatt
