#include "rosenblatt/kernel.hpp"

#include <cmath>
#include <sstream>

namespace rosenblatt {

namespace {

double beta_function(double a, double b) {
    return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

[[noreturn]] void domain(const std::string& what) { throw std::domain_error(what); }

}  // namespace

HurstParams HurstParams::from_hurst(double H) {
    if (!(H > 0.5 && H < 1.0)) {
        std::ostringstream os;
        os << "Hurst index H = " << H << " outside the valid interval (1/2, 1)";
        domain(os.str());
    }
    HurstParams p;
    p.H = H;
    p.Hp = 0.5 * (H + 1.0);
    p.cHp = kernel::c_const(p.Hp);
    p.dH = kernel::d_const(H);
    return p;
}

namespace kernel {

double c_const(double Hp) {
    if (!(Hp > 0.5 && Hp < 1.0)) domain("c_const: Hp must lie in (1/2, 1)");
    return std::sqrt(Hp * (2.0 * Hp - 1.0) / beta_function(2.0 - 2.0 * Hp, Hp - 0.5));
}

double d_const(double H) {
    if (!(H > 0.5 && H < 1.0)) domain("d_const: H must lie in (1/2, 1)");
    return (1.0 / (H + 1.0)) * std::sqrt(2.0 * (2.0 * H - 1.0) / H);
}

double fbm_kernel(double t, double s, const HurstParams& p, const QuadConfig& q) {
    if (!(s > 0.0)) domain("fbm_kernel: requires s > 0");
    if (s > t) domain("fbm_kernel: requires s <= t");
    if (s == t) return 0.0;
    const double b = p.beta();
    auto u_pow = [b](double u) { return std::pow(u, b); };
    return p.cHp * std::pow(s, -b) * integrate_power(u_pow, s, s, t, b, q);
}

double dK(double t, double s, const HurstParams& p) {
    if (!(s > 0.0)) domain("dK: requires s > 0");
    if (!(t > s)) domain("dK: requires t > s");
    const double b = p.beta();
    return p.cHp * std::pow(s / t, -b) * std::pow(t - s, b - 1.0);
}

double rosenblatt_kernel(double t, double u, double v, const HurstParams& p, const QuadConfig& q) {
    if (!(u > 0.0) || !(v > 0.0)) domain("rosenblatt_kernel: requires u > 0 and v > 0");
    if (u >= t || v >= t) return 0.0;
    if (u == v) domain("rosenblatt_kernel: kernel diverges on the diagonal u == v");
    const double b = p.beta();
    const double y = std::max(u, v), x = std::min(u, v);
    auto phi = [b, x](double a) { return std::pow(a, 2.0 * b) * std::pow(a - x, b - 1.0); };
    const double c2 = p.cHp * p.cHp;
    return p.dH * c2 * std::pow(u * v, -b) * integrate_power(phi, y, y, t, b, q);
}

double normalized_cell_integral(double y0, double y1, double beta, const QuadConfig& q) {
    if (!(y0 >= 0.0 && y1 <= 1.0 && y0 <= y1)) domain("normalized_cell_integral: need 0 <= y0 <= y1 <= 1");
    double sum = 0.0;
    // Left half: y^(-beta) absorbed by w = y^(1-beta).
    if (y0 < 0.5) {
        auto phi = [beta](double y) { return std::pow(1.0 - y, beta - 1.0); };
        sum += integrate_power(phi, 0.0, y0, std::min(y1, 0.5), 1.0 - beta, q);
    }
    // Right half: (1-y)^(beta-1) absorbed by w = (1-y)^beta.
    if (y1 > 0.5) {
        auto phi = [beta](double y) { return std::pow(y, -beta); };
        sum += integrate_power(phi, 1.0, std::max(y0, 0.5), y1, beta, q);
    }
    return sum;
}

double cell_dk_integral(double a, int i, int n, const HurstParams& p, const QuadConfig& q) {
    if (n < 1 || i < 1 || i > n) domain("cell_dk_integral: need 1 <= i <= n");
    if (!(a >= 0.0)) domain("cell_dk_integral: requires a >= 0");
    const double lo = static_cast<double>(i - 1) / n;
    if (a <= lo) return 0.0;
    const double hi = static_cast<double>(i) / n;
    const double y1 = hi >= a ? 1.0 : hi / a;
    const double b = p.beta();
    return p.cHp * std::pow(a, b) * normalized_cell_integral(lo / a, y1, b, q);
}

double cell_weight(int m, int i, int j, int n, const HurstParams& p, const QuadConfig& q) {
    if (n < 1 || i < 1 || j < 1 || i > n || j > n) domain("cell_weight: need 1 <= i, j <= n");
    if (m < 1 || m > n) domain("cell_weight: need 1 <= m <= n");
    if (i == j) domain("cell_weight: diagonal cells are excluded (i == j)");
    if (i > m || j > m) return 0.0;

    const double b = p.beta();
    const double inv_b = 1.0 / b;
    const double h = 1.0 / n;
    double sum = 0.0;
    for (int k = std::max(i, j); k <= m; ++k) {
        const double lo = (k - 1) * h;
        // a = lo + w^(1/b): the tau^b behaviour at the cell's left edge becomes linear in w.
        auto f = [&](double w) {
            if (w <= 0.0) return 0.0;
            const double a = lo + std::pow(w, inv_b);
            return inv_b * std::pow(w, inv_b - 1.0) * cell_dk_integral(a, i, n, p, q) *
                   cell_dk_integral(a, j, n, p, q);
        };
        sum += integrate(f, 0.0, std::pow(h, b), q);
    }
    return p.dH * n * sum;
}

}  // namespace kernel
}  // namespace rosenblatt
