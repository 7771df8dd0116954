#include "rosenblatt/quadrature.hpp"

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace rosenblatt {

void QuadConfig::validate() const {
    if (!(rel_tol > 0.0)) throw std::invalid_argument("QuadConfig: rel_tol must be > 0");
    if (!(abs_tol >= 0.0)) throw std::invalid_argument("QuadConfig: abs_tol must be >= 0");
    if (max_subdiv < 1) throw std::invalid_argument("QuadConfig: max_subdiv must be >= 1");
    if (nodes_per_panel < 2) throw std::invalid_argument("QuadConfig: nodes_per_panel must be >= 2");
}

GaussLegendre::GaussLegendre(int order) : nodes(order), weights(order) {
    if (order < 1) throw std::invalid_argument("GaussLegendre: order must be >= 1");
    const int n = order;
    // Newton iteration on P_n from the Chebyshev-like initial guess.
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) nodes[n / 2] = 0.0;
}

const GaussLegendre& GaussLegendre::of_order(int order) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<GaussLegendre>> rules;
    std::lock_guard lock(mu);
    auto& slot = rules[order];
    if (!slot) slot = std::make_unique<GaussLegendre>(order);
    return *slot;
}

NodeRule build_power_rule(double exponent, const QuadConfig& cfg) {
    cfg.validate();
    if (!(exponent > 0.0 && exponent <= 1.0))
        throw std::domain_error("build_power_rule: exponent must lie in (0, 1]");
    const double e = exponent;
    const double inv_e = 1.0 / e;
    const std::array<std::function<double(double)>, 5> probes = {
        [](double) { return 1.0; },
        [e](double t) { return std::pow(t, e); },
        [e](double t) { return std::pow(t, 2.0 * e); },
        [e](double t) { return std::pow(1.0 + t, e); },
        [e](double t) { return std::pow(t * (1.0 + t), e); },
    };
    constexpr std::size_t P = probes.size();
    const auto& gl = GaussLegendre::of_order(cfg.nodes_per_panel);

    auto in_w = [&](std::size_t k) {
        return [&, k](double w) { return probes[k](std::pow(w, inv_e)) * inv_e * std::pow(w, inv_e - 1.0); };
    };

    struct Panel {
        double lo, hi;
        std::array<double, P> whole, err;
    };
    auto make = [&](double lo, double hi) {
        Panel p{lo, hi, {}, {}};
        const double mid = 0.5 * (lo + hi);
        for (std::size_t k = 0; k < P; ++k) {
            auto f = in_w(k);
            p.whole[k] = gl.apply(f, lo, hi);
            p.err[k] = std::abs(p.whole[k] - gl.apply(f, lo, mid) - gl.apply(f, mid, hi));
        }
        return p;
    };

    std::vector<Panel> panels{make(0.0, 1.0)};
    for (;;) {
        std::array<double, P> total{}, err{};
        for (const auto& p : panels)
            for (std::size_t k = 0; k < P; ++k) {
                total[k] += p.whole[k];
                err[k] += p.err[k];
            }
        bool ok = true;
        for (std::size_t k = 0; k < P; ++k) ok = ok && err[k] <= cfg.rel_tol * std::abs(total[k]);
        if (ok) break;
        if (static_cast<int>(panels.size()) >= cfg.max_subdiv)
            throw QuadratureError("build_power_rule: node rule did not reach tolerance");
        std::size_t worst = 0;
        double worst_score = -1.0;
        for (std::size_t i = 0; i < panels.size(); ++i) {
            double score = 0.0;
            for (std::size_t k = 0; k < P; ++k) score += panels[i].err[k] / std::abs(total[k]);
            if (score > worst_score) {
                worst_score = score;
                worst = i;
            }
        }
        const Panel p = panels[worst];
        const double mid = 0.5 * (p.lo + p.hi);
        panels[worst] = make(p.lo, mid);
        panels.push_back(make(mid, p.hi));
    }

    std::sort(panels.begin(), panels.end(), [](const Panel& a, const Panel& b) { return a.lo < b.lo; });
    NodeRule rule;
    for (const auto& p : panels) {
        const double mid = 0.5 * (p.lo + p.hi), half = 0.5 * (p.hi - p.lo);
        for (std::size_t k = 0; k < gl.nodes.size(); ++k) {
            const double w = mid + half * gl.nodes[k];
            rule.nodes.push_back(std::pow(w, inv_e));
            rule.weights.push_back(half * gl.weights[k] * inv_e * std::pow(w, inv_e - 1.0));
        }
    }
    return rule;
}

}  // namespace rosenblatt
