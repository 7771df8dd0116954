#include "rosenblatt/basis.hpp"

#include "rosenblatt/parallel.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

namespace rosenblatt {

CellBasis::CellBasis(int n, const HurstParams& p, const QuadConfig& q)
    : n_(n), params_(p), config_(q) {
    if (n < 1) throw std::domain_error("CellBasis: n must be >= 1");
    q.validate();
    const double b = p.beta();
    rule_ = build_power_rule(b, q);
    const std::size_t Q = rule_.size();
    weights_ = Eigen::Map<const Eigen::VectorXd>(rule_.weights.data(), static_cast<Eigen::Index>(Q)) / n;

    gamma_.resize(static_cast<std::size_t>(n));
    gamma_sq_.resize(static_cast<std::size_t>(n));
    const double scale = std::sqrt(static_cast<double>(n)) * p.cHp;
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t idx) {
        const int m = static_cast<int>(idx) + 1;
        Eigen::MatrixXd g(static_cast<Eigen::Index>(Q), m);
        for (std::size_t k = 0; k < Q; ++k) {
            const double a = node_time(m, k);
            const double front = scale * std::pow(a, b);
            const double na = n * a;
            for (int i = 1; i <= m; ++i) {
                const double y0 = (i - 1) / na;
                const double y1 = i >= na ? 1.0 : i / na;
                g(static_cast<Eigen::Index>(k), i - 1) = front * kernel::normalized_cell_integral(y0, y1, b, q);
            }
        }
        gamma_sq_[idx] = g.rowwise().squaredNorm();
        gamma_[idx] = std::move(g);
    });
}

std::shared_ptr<const CellBasis> CellBasis::shared(int n, const HurstParams& p, const QuadConfig& q) {
    using Key = std::tuple<int, double, double, double, int, int>;
    static std::mutex mu;
    static std::map<Key, std::shared_ptr<const CellBasis>> cache;
    const Key key{n, p.H, q.rel_tol, q.abs_tol, q.max_subdiv, q.nodes_per_panel};
    std::lock_guard lock(mu);
    auto& slot = cache[key];
    if (!slot) slot = std::make_shared<const CellBasis>(n, p, q);
    return slot;
}

Eigen::MatrixXd CellBasis::increment_table(int m) const {
    if (m < 1 || m > n_) throw std::domain_error("increment_table: need 1 <= m <= n");
    const auto& g = gamma(m);
    Eigen::MatrixXd t = params_.dH * (g.transpose() * weights_.asDiagonal() * g);
    t.diagonal().setZero();
    t.triangularView<Eigen::StrictlyUpper>() = t.transpose();
    return t;
}

Eigen::MatrixXd CellBasis::coefficient_table(int m) const {
    if (m < 1 || m > n_) throw std::domain_error("coefficient_table: need 1 <= m <= n");
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n_, n_);
    for (int k = 1; k <= m; ++k) {
        const auto& g = gamma(k);
        c.topLeftCorner(k, k).noalias() += g.transpose() * weights_.asDiagonal() * g;
    }
    c *= params_.dH;
    c.diagonal().setZero();
    // Mirror so that c(i, j) and c(j, i) are bitwise equal.
    c.triangularView<Eigen::StrictlyUpper>() = c.transpose();
    return c;
}

Eigen::VectorXd CellBasis::fbm_weights(int m) const {
    if (m < 0 || m > n_) throw std::domain_error("fbm_weights: need 0 <= m <= n");
    Eigen::VectorXd k = Eigen::VectorXd::Zero(n_);
    for (int c = 1; c <= m; ++c) k.head(c).noalias() += gamma(c).transpose() * weights_;
    return k;
}

}  // namespace rosenblatt
