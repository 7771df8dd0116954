#pragma once

#include "rosenblatt/quadrature.hpp"

namespace rosenblatt {

/// Parameter bundle shared by every kernel evaluation.
///
/// `H` is the self-similarity index of the Rosenblatt process, `Hp` the
/// Hurst index (H + 1) / 2 of the fractional Brownian kernel it is built
/// from, `cHp` and `dH` the two normalizing constants.
struct HurstParams {
    double H = 0.0;
    double Hp = 0.0;
    double cHp = 0.0;
    double dH = 0.0;

    /// Throws std::domain_error unless 1/2 < H < 1.
    static HurstParams from_hurst(double H);

    /// Exponent Hp - 1/2 of the kernel singularity; equals H / 2.
    double beta() const { return Hp - 0.5; }
};

namespace kernel {

/// Normalizing constant of the fBm kernel:
/// sqrt(Hp (2Hp - 1) / B(2 - 2Hp, Hp - 1/2)). Defined for 1/2 < Hp < 1.
double c_const(double Hp);

/// Normalizing constant of the Rosenblatt kernel:
/// (1 / (H + 1)) * sqrt(2 (2H - 1) / H). Defined for 1/2 < H < 1.
double d_const(double H);

/// fBm Volterra kernel K(t, s) = cHp s^(1/2-Hp) int_s^t (u-s)^(Hp-3/2) u^(Hp-1/2) du.
/// Returns 0 when s == t; throws std::domain_error for s <= 0 or s > t.
double fbm_kernel(double t, double s, const HurstParams& p, const QuadConfig& q = {});

/// Closed-form partial derivative of K in its first argument; requires 0 < s < t.
double dK(double t, double s, const HurstParams& p);

/// Rosenblatt kernel F(t, u, v) = dH int_{u v v}^t dK(a, u) dK(a, v) da on
/// u, v < t, and 0 when u >= t or v >= t. The kernel diverges on the
/// diagonal, so u == v is a domain error, as is u <= 0 or v <= 0.
double rosenblatt_kernel(double t, double u, double v, const HurstParams& p, const QuadConfig& q = {});

/// int_{y0}^{y1} y^(-beta) (1 - y)^(beta - 1) dy for 0 <= y0 <= y1 <= 1,
/// the normalized form of a cell integral of dK.
double normalized_cell_integral(double y0, double y1, double beta, const QuadConfig& q);

/// g_i(a) = int over cell_i = [(i-1)/n, i/n) of dK(a, u) du, truncated at u < a.
/// Zero when a <= (i-1)/n.
double cell_dk_integral(double a, int i, int n, const HurstParams& p, const QuadConfig& q = {});

/// Coefficient c_ij(m) = n * int_{cell_i} int_{cell_j} F(m/n, u, v) dv du of
/// the Rosenblatt walk. Evaluated as dH * n * int_0^{m/n} g_i(a) g_j(a) da,
/// with one adaptive power-substituted integral per grid time cell.
/// Requires 1 <= i, j <= n, i != j, 1 <= m <= n. Zero when i > m or j > m.
double cell_weight(int m, int i, int j, int n, const HurstParams& p, const QuadConfig& q = {});

}  // namespace kernel
}  // namespace rosenblatt
