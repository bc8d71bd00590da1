#pragma once

#include <string>
#include <vector>

#include "geflab/linalg.hpp"

namespace geflab::kacrice {

enum class SigmaKind { c, cp, cm };
enum class PairIntensityKind { cc, cpcp, cmcm, zcp, zcm };

const char* sigma_kind_name(SigmaKind k);
const char* pair_intensity_kind_name(PairIntensityKind k);

struct Budget {
    long draws = 1000000;
    int threads = 0; // 0 = resolve from env/hardware
    uint64_t seed = 1;
};

// Conditioning floor: below this the 2x2 given block of the symmetric pair
// is treated as numerically singular and limits are taken from the printed
// closed forms instead.
constexpr double kMinConditioningRadius = 1e-4;

// Closed-form two-point density denominators of the Kac-Rice integrands:
// cc family: e^{|z|^2+|w|^2} (1 - e^{-|z-w|^2} (1 - |z-w|^2)^2)  (z != w)
// zc family: e^{|z|^2+|w|^2} (1 - e^{-|z-w|^2} |z-w|^2)
double pair_denominator(cplx z, cplx w, bool zc_family);

// Printed closed forms from the covariance computations: the joint 5x5 of
// (F(ir), F(-ir), F10(0), F02(0), F03(0)), the conditional 3x3 M^r, and its
// r -> 0 limit M^0.  These are hand-coded oracles, independent of the
// kernel-calculus code path.
HermitianCov printed_joint_cov(double r);
HermitianCov printed_Mr(double r);
HermitianCov printed_M0();

// sigma^c / sigma^{c,+} / sigma^{c,-}: conditioned expectations of
// |jac F(ir) jac F(-ir)| with index indicators, given F(ir) = F(-ir) = 0.
McResult sigma(SigmaKind kind, double r, const Budget& budget);

// Conditioned numerator of the two-point intensity at arbitrary points:
// cc family: E[|jac F(z) jac F(w)| ind | F(z) = F(w) = 0]
// zc family: E[|dG(z)|^2 |jac F(w)| ind | G(z) = F(w) = 0]
McResult pair_numerator(PairIntensityKind kind, cplx z, cplx w, const Budget& budget);

// q(z, w) = numerator / (pi^2 denominator).
McResult pair_intensity(PairIntensityKind kind, cplx z, cplx w, const Budget& budget);

// E[N(N-1)] (or E[Na Nb]) over B_rho^2 by reduction to one dimension in
// s = |z - w| with the exact lens-overlap weight, Gauss-Legendre quadrature
// in s, and MC evaluation of the integrand at each node.  The companion
// value at half the node count serves as a quadrature consistency check.
struct IntegrateResult {
    double value = 0.0;
    double se = 0.0;
    double coarse_value = 0.0; // value recomputed with half the nodes
    int nodes = 0;
};
IntegrateResult integrate_pair(PairIntensityKind kind, double rho, const Budget& per_node,
                               int nodes = 64);

// Area of B_rho(0) intersected with B_rho(s e1).
double lens_overlap_area(double rho, double s);

// M^r by Gaussian regression on the kernel-calculus joint matrix.
HermitianCov conditional_derivative_cov(double r);

// Proxy-expansion diagnostics at radius r (all conditioned on
// F(ir) = F(-ir) = 0):
//   mean_A2            E[A^2]  -> 8 as r -> 0
//   p99_residual_pm    99th percentile of |jac F(+-ir) - (+-rA + r^2 B)| / r^3
//   product_diff       E[(jac F(ir) jac F(-ir) - r^2(-A^2 + r^2 B^2)) / r^4]
struct ProxyReport {
    double r = 0.0;
    McResult a2;
    double p99_residual_plus = 0.0;
    double p99_residual_minus = 0.0;
    McResult product_diff;
};
ProxyReport proxy_expansion_check(double r, const Budget& budget);

// E[phi_r] / E[phi'_r] over standard complex triples: the degree-4
// homogeneous integrands whose expectation scales like r^3.
McResult phi_expectation(bool minus_variant, double r, const Budget& budget);

// Closed-form oracles and their MC counterparts.
double closed_form_ball_ratio(double r);      // P(|Z1| <= r |Z2|) = r^2/(1+r^2)
double closed_form_zcm_integral(double az);   // |z|^12 (54+|z|^6) / (72 (36+|z|^6)^2)
McResult mc_ball_indicator(double r, const Budget& budget);
McResult mc_zcm_indicator_integral(double az, const Budget& budget);

// Small-ball probability probes, threshold r (both sides of the indicator):
//   1: P(|Im(Z2 conj Z1)| < r)
//   2: P(|Im(Z2 conj Z1) + r Im(i|Z2|^2 + Z3 conj(Z1)/3)| < r)
//   3: P(|Im(Z2 conj Z1) - r Im(i|Z2|^2 - Z3 conj(Z1)/3)| < r)
McResult smallball_probe(int which, double r, const Budget& budget);

void save_radial_csv(const std::vector<std::pair<double, McResult>>& rows,
                     const std::string& kind, long n_draws, const std::string& path);

} // namespace geflab::kacrice
