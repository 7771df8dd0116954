#pragma once

// Reference evaluations built on Boost.Math only: double-exponential
// quadrature with endpoint-distance arguments, incomplete beta functions and
// high-order finite differences. Nothing here calls into the library's own
// quadrature, so agreement is an independent check.

#include <boost/math/differentiation/finite_difference.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>

namespace oracle {

/// int_a^b f(x, dist_to_a, dist_to_b) dx with tanh-sinh; the distances are
/// exact even where x - a or b - x would lose digits.
template <class F>
double integrate(F f, double a, double b, double tol = 1e-13) {
    thread_local boost::math::quadrature::tanh_sinh<double> ts(15);
    const double len = b - a;
    auto g = [&](double x, double xc) {
        const double dl = xc <= 0 ? -xc : len - xc;
        const double dr = xc <= 0 ? len + xc : xc;
        return f(x, dl, dr);
    };
    return ts.integrate(g, a, b, tol);
}

inline double beta_gamma(double a, double b) {
    using boost::math::tgamma;
    return tgamma(a) * tgamma(b) / tgamma(a + b);
}

inline double c_const(double Hp) { return std::sqrt(Hp * (2 * Hp - 1) / beta_gamma(2 - 2 * Hp, Hp - 0.5)); }

/// Written in the (H / (2(2H-1)))^(-1/2) form.
inline double d_const(double H) { return (1.0 / (H + 1.0)) * std::pow(H / (2.0 * (2.0 * H - 1.0)), -0.5); }

/// K(t, s) = c s^(1/2-Hp) int_s^t (u-s)^(Hp-3/2) u^(Hp-1/2) du.
inline double fbm_kernel(double t, double s, double Hp) {
    if (t == s) return 0.0;
    const double c = c_const(Hp);
    const double I = integrate([&](double u, double dl, double) { return std::pow(dl, Hp - 1.5) * std::pow(u, Hp - 0.5); },
                               s, t);
    return c * std::pow(s, 0.5 - Hp) * I;
}

/// Integrand of K evaluated at the upper limit (fundamental theorem of calculus).
inline double dK(double t, double s, double Hp) {
    return c_const(Hp) * std::pow(s, 0.5 - Hp) * std::pow(t - s, Hp - 1.5) * std::pow(t, Hp - 0.5);
}

/// F(t, u, v) = d(H) int_{max(u,v)}^t dK(a, u) dK(a, v) da.
inline double rosenblatt_kernel(double t, double u, double v, double H) {
    const double Hp = (H + 1) / 2;
    const double y = std::max(u, v), x = std::min(u, v);
    if (y >= t) return 0.0;
    const double c = c_const(Hp);
    const double gap = y - x;
    const double I = integrate(
        [&](double a, double dl, double) {
            return std::pow(dl, Hp - 1.5) * std::pow(dl + gap, Hp - 1.5) * std::pow(a, 2 * Hp - 1);
        },
        y, t);
    return d_const(H) * c * c * std::pow(u * v, 0.5 - Hp) * I;
}

/// int_{y0}^{y1} y^(-b) (1-y)^(b-1) dy via regularized incomplete beta functions.
inline double normalized_cell_integral(double y0, double y1, double b) {
    using boost::math::ibeta;
    using boost::math::ibetac;
    const double B = boost::math::beta(1 - b, b);
    if (y0 > 0.5) return B * (ibetac(1 - b, b, y0) - ibetac(1 - b, b, y1));
    return B * (ibeta(1 - b, b, y1) - ibeta(1 - b, b, y0));
}

/// g_i(a) = int_{cell_i, u < a} dK(a, u) du = c a^b J(x_{i-1}, min(x_i, 1)), x_k = k / (n a).
inline double cell_dk_integral(double a, int i, int n, double Hp) {
    const double b = Hp - 0.5;
    const double lo = (i - 1.0) / n;
    if (a <= lo) return 0.0;
    const double y0 = lo / a;
    const double y1 = std::min(1.0, static_cast<double>(i) / (n * a));
    return c_const(Hp) * std::pow(a, b) * normalized_cell_integral(y0, y1, b);
}

/// d(H) n int over time cells k in [k_lo, k_hi] of g_i(a) g_j(a) da, each time
/// cell integrated separately by tanh-sinh.
inline double cell_weight_cells(int k_lo, int k_hi, int i, int j, int n, double H) {
    const double Hp = (H + 1) / 2;
    double s = 0.0;
    for (int k = std::max({k_lo, i, j}); k <= k_hi; ++k) {
        const double a0 = (k - 1.0) / n;
        s += integrate(
            [&](double, double dl, double) {
                const double a = a0 + dl;
                return cell_dk_integral(a, i, n, Hp) * cell_dk_integral(a, j, n, Hp);
            },
            a0, static_cast<double>(k) / n, 1e-12);
    }
    return d_const(H) * n * s;
}

inline double cell_weight(int m, int i, int j, int n, double H) { return cell_weight_cells(1, m, i, j, n, H); }

/// Eighth-order central difference.
template <class F>
double derivative(F f, double x) {
    return boost::math::differentiation::finite_difference_derivative<F, double, 8>(f, x);
}

}  // namespace oracle
