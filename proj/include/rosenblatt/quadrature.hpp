#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rosenblatt {

/// Tolerances for the adaptive Gauss-Legendre integrator.
///
/// `max_subdiv` caps the number of panels a single integral may be split
/// into (QUADPACK `limit` semantics); exceeding it raises QuadratureError.
struct QuadConfig {
    double rel_tol = 1e-8;
    double abs_tol = 1e-12;
    int max_subdiv = 40;
    int nodes_per_panel = 16;

    void validate() const;
    bool operator==(const QuadConfig&) const = default;
};

class QuadratureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;

    explicit GaussLegendre(int order);

    /// Shared, lazily built rule of the given order.
    static const GaussLegendre& of_order(int order);

    template <class F>
    double apply(F&& f, double lo, double hi) const {
        const double mid = 0.5 * (lo + hi);
        const double half = 0.5 * (hi - lo);
        double sum = 0.0;
        for (std::size_t k = 0; k < nodes.size(); ++k)
            sum += weights[k] * f(mid + half * nodes[k]);
        return half * sum;
    }
};

namespace detail {

struct Panel {
    double lo, hi;
    double left, right;  // GL values on the two halves
    double err;          // |GL(panel) - left - right|
};

template <class F>
Panel make_panel(F& f, const GaussLegendre& gl, double lo, double hi, double whole) {
    const double mid = 0.5 * (lo + hi);
    const double l = gl.apply(f, lo, mid);
    const double r = gl.apply(f, mid, hi);
    return {lo, hi, l, r, std::abs(whole - l - r)};
}

}  // namespace detail

/// Globally adaptive Gauss-Legendre quadrature of f over [lo, hi].
///
/// Each panel carries the difference between the one-panel rule and the
/// rule applied to its two halves; the panel with the largest difference is
/// bisected until the summed difference is below
/// max(abs_tol, rel_tol * |integral|). The refined (two-half) sums are
/// returned.
template <class F>
double integrate(F&& f, double lo, double hi, const QuadConfig& cfg) {
    if (!(hi > lo)) return 0.0;
    const auto& gl = GaussLegendre::of_order(cfg.nodes_per_panel);
    std::vector<detail::Panel> panels;
    panels.reserve(static_cast<std::size_t>(cfg.max_subdiv));
    panels.push_back(detail::make_panel(f, gl, lo, hi, gl.apply(f, lo, hi)));

    for (;;) {
        double total = 0.0, err = 0.0;
        std::size_t worst = 0;
        for (std::size_t k = 0; k < panels.size(); ++k) {
            total += panels[k].left + panels[k].right;
            err += panels[k].err;
            if (panels[k].err > panels[worst].err) worst = k;
        }
        if (!std::isfinite(total))
            throw QuadratureError("integrand produced a non-finite value");
        if (err <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total))) return total;
        if (static_cast<int>(panels.size()) >= cfg.max_subdiv)
            throw QuadratureError("adaptive quadrature did not reach tolerance within " +
                                  std::to_string(cfg.max_subdiv) + " panels");
        const detail::Panel p = panels[worst];
        const double mid = 0.5 * (p.lo + p.hi);
        panels[worst] = detail::make_panel(f, gl, p.lo, mid, p.left);
        panels.push_back(detail::make_panel(f, gl, mid, p.hi, p.right));
    }
}

/// Integrates |x - anchor|^(p-1) * phi(x) over [lo, hi] with the
/// substitution w = |x - anchor|^p, which absorbs the algebraic factor:
/// the result is (1/p) * integral of phi(anchor +- w^(1/p)) dw.
/// The anchor must lie outside the open interval (lo, hi).
template <class F>
double integrate_power(F&& phi, double anchor, double lo, double hi, double p,
                       const QuadConfig& cfg) {
    if (!(hi > lo)) return 0.0;
    const double inv_p = 1.0 / p;
    if (anchor <= lo) {
        auto g = [&](double w) { return phi(anchor + std::pow(w, inv_p)); };
        return inv_p * integrate(g, std::pow(lo - anchor, p), std::pow(hi - anchor, p), cfg);
    }
    if (anchor >= hi) {
        auto g = [&](double w) { return phi(anchor - std::pow(w, inv_p)); };
        return inv_p * integrate(g, std::pow(anchor - hi, p), std::pow(anchor - lo, p), cfg);
    }
    throw std::domain_error("integrate_power: anchor inside the integration interval");
}

/// A fixed composite rule on [0, 1]: sum(weights[k] * f(nodes[k])).
struct NodeRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const { return nodes.size(); }

    template <class F>
    double apply(F&& f) const {
        double s = 0.0;
        for (std::size_t k = 0; k < nodes.size(); ++k) s += weights[k] * f(nodes[k]);
        return s;
    }
};

/// Builds a node rule on [0, 1] for integrands of the form
/// A(tau) + B(tau) tau^e + C(tau) tau^(2e) with A, B, C smooth on [-1, 1].
///
/// Uses tau = w^(1/e) and bisects panels in w until every probe function in
/// the family {1, tau^e, tau^(2e), (1+tau)^e, (tau (1+tau))^e} meets
/// cfg.rel_tol. The probes cover the endpoint singularity at tau = 0 and the
/// one-cell-away singularity at tau = -1 that grid cell integrals carry.
NodeRule build_power_rule(double exponent, const QuadConfig& cfg);

}  // namespace rosenblatt
