#include "geflab/kacrice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "geflab/kernels.hpp"
#include "geflab/parallel.hpp"

namespace geflab::kacrice {

using kernels::DerivFunctional;

namespace {

const cplx I(0.0, 1.0);
constexpr double kPi = 3.141592653589793238462643383279;
constexpr long kChunk = 1 << 16;

// Chunked, stream-per-chunk MC over conditional draws; the reduction runs in
// chunk order, so results are independent of the thread count.
template <class Fn>
McResult mc_run(const CholFactor& factor, long n, uint64_t seed, int threads, Fn&& fn) {
    if (n < 2) throw Error("mc_run: need n >= 2");
    const long chunks = (n + kChunk - 1) / kChunk;
    std::vector<double> sums(static_cast<size_t>(chunks), 0.0);
    std::vector<double> sqs(static_cast<size_t>(chunks), 0.0);
    std::vector<char> bad(static_cast<size_t>(chunks), 0);
    parallel_for(chunks, threads, [&](long c) {
        RngStream rng(seed, static_cast<uint64_t>(c));
        std::vector<cplx> v, xi;
        const long lo = c * kChunk;
        const long hi = std::min(n, lo + kChunk);
        double s = 0.0, q = 0.0;
        for (long i = lo; i < hi; ++i) {
            sample_complex_normal(factor, rng, v, xi);
            const double val = fn(v);
            if (!std::isfinite(val)) {
                bad[static_cast<size_t>(c)] = 1;
                return;
            }
            s += val;
            q += val * val;
        }
        sums[static_cast<size_t>(c)] = s;
        sqs[static_cast<size_t>(c)] = q;
    });
    for (char b : bad)
        if (b) throw NonFiniteSample("mc_run: functional returned non-finite value");
    double sum = 0.0, sq = 0.0;
    for (long c = 0; c < chunks; ++c) {
        sum += sums[static_cast<size_t>(c)];
        sq += sqs[static_cast<size_t>(c)];
    }
    McResult r;
    r.value = sum / static_cast<double>(n);
    const double var = std::max(0.0, sq / static_cast<double>(n) - r.value * r.value);
    r.se = std::sqrt(var / static_cast<double>(n - 1));
    return r;
}

// Identity factor for plain standard-complex draws.
CholFactor identity_factor(int n) {
    HermitianCov id(n);
    for (int i = 0; i < n; ++i) id.set(i, i, 1.0);
    return cholesky(id);
}

double jac_from(const cplx& f10, const cplx& f01) {
    // jac f = -Im[f^{(1,0)} conj(f^{(0,1)})]
    return -std::imag(f10 * std::conj(f01));
}

CholFactor conditioned_pair_factor(PairIntensityKind kind, cplx z, cplx w) {
    std::vector<DerivFunctional> descs;
    if (kind == PairIntensityKind::zcp || kind == PairIntensityKind::zcm) {
        descs = {DerivFunctional::G(z),      DerivFunctional::F(w),
                 DerivFunctional::G(w),      DerivFunctional::dG(1, z),
                 DerivFunctional::dG(1, w),  DerivFunctional::dG(2, w)};
    } else {
        descs = {DerivFunctional::F(z),
                 DerivFunctional::F(w),
                 DerivFunctional::F_real_deriv(1, 0, z),
                 DerivFunctional::F_real_deriv(0, 1, z),
                 DerivFunctional::F_real_deriv(1, 0, w),
                 DerivFunctional::F_real_deriv(0, 1, w)};
    }
    const auto joint = kernels::eval_cov(descs);
    const auto cond = gaussian_regression(joint, {2, 3, 4, 5}, {0, 1});
    return cholesky(cond, 1e-8);
}

} // namespace

const char* sigma_kind_name(SigmaKind k) {
    switch (k) {
        case SigmaKind::c: return "sigma_c";
        case SigmaKind::cp: return "sigma_c+";
        case SigmaKind::cm: return "sigma_c-";
    }
    return "?";
}

const char* pair_intensity_kind_name(PairIntensityKind k) {
    switch (k) {
        case PairIntensityKind::cc: return "cc";
        case PairIntensityKind::cpcp: return "c+c+";
        case PairIntensityKind::cmcm: return "c-c-";
        case PairIntensityKind::zcp: return "zc+";
        case PairIntensityKind::zcm: return "zc-";
    }
    return "?";
}

double pair_denominator(cplx z, cplx w, bool zc_family) {
    const double s2 = std::norm(z - w);
    if (!zc_family && s2 == 0.0)
        throw DegenerateDiagonal("pair_denominator: cc family is singular at z = w");
    const double bracket = zc_family ? 1.0 - std::exp(-s2) * s2
                                     : 1.0 - std::exp(-s2) * (1.0 - s2) * (1.0 - s2);
    return std::exp(std::norm(z) + std::norm(w)) * bracket;
}

HermitianCov printed_joint_cov(double r) {
    const double r2 = r * r;
    HermitianCov m(5);
    m.set(0, 0, std::exp(r2));
    m.set(1, 1, std::exp(r2));
    m.set(0, 1, (1.0 - 4.0 * r2) * std::exp(-r2));
    m.set(0, 2, I * r * (1.0 - r2));
    m.set(0, 3, -2.0 + 5.0 * r2 - r2 * r2);
    m.set(0, 4, -6.0 * r + 7.0 * r * r2 - r * r2 * r2);
    m.set(1, 2, -I * r * (1.0 - r2));
    m.set(1, 3, -2.0 + 5.0 * r2 - r2 * r2);
    m.set(1, 4, 6.0 * r - 7.0 * r * r2 + r * r2 * r2);
    m.set(2, 2, 3.0);
    m.set(2, 3, 0.0);
    m.set(2, 4, 6.0 * I);
    m.set(3, 3, 10.0);
    m.set(3, 4, 0.0);
    m.set(4, 4, 42.0);
    return m;
}

HermitianCov printed_Mr(double r) {
    const double r2 = r * r;
    const double e1 = std::exp(r2), e2 = std::exp(2.0 * r2);
    const double dplus = -1.0 + e2 + 4.0 * r2;
    const double dminus = 1.0 + e2 - 4.0 * r2;
    HermitianCov m(3);
    m.set(0, 0, 3.0 - 2.0 * e1 * r2 * (1.0 - r2) * (1.0 - r2) / dplus);
    m.set(0, 1, 0.0);
    m.set(0, 2, 6.0 * I + 2.0 * I * e1 * r2 * (-6.0 + r2) * (r2 - 1.0) * (r2 - 1.0) / dplus);
    m.set(1, 1, 10.0 - 2.0 * e1 * (2.0 - 5.0 * r2 + r2 * r2) * (2.0 - 5.0 * r2 + r2 * r2) / dminus);
    m.set(1, 2, 0.0);
    m.set(2, 2, 42.0 - 2.0 * e1 * r2 * (6.0 - 7.0 * r2 + r2 * r2) * (6.0 - 7.0 * r2 + r2 * r2) / dplus);
    return m;
}

HermitianCov printed_M0() {
    HermitianCov m(3);
    m.set(0, 0, 8.0 / 3.0);
    m.set(0, 2, 4.0 * I);
    m.set(1, 1, 6.0);
    m.set(2, 2, 30.0);
    return m;
}

McResult sigma(SigmaKind kind, double r, const Budget& budget) {
    if (!(r > 0.0) || r >= 1.0) throw Error("sigma: r must lie in (0, 1)");
    if (r < kMinConditioningRadius)
        throw SingularConditioning("sigma: r below the conditioning floor");
    const auto factor =
        conditioned_pair_factor(PairIntensityKind::cc, I * r, -I * r);
    return mc_run(factor, budget.draws, budget.seed, budget.threads,
                  [kind](const std::vector<cplx>& v) {
                      const double jp = jac_from(v[0], v[1]);
                      const double jm = jac_from(v[2], v[3]);
                      double ind = 1.0;
                      if (kind == SigmaKind::cp) ind = (jp > 0.0 && jm > 0.0) ? 1.0 : 0.0;
                      if (kind == SigmaKind::cm) ind = (jp < 0.0 && jm < 0.0) ? 1.0 : 0.0;
                      return std::abs(jp * jm) * ind;
                  });
}

McResult pair_numerator(PairIntensityKind kind, cplx z, cplx w, const Budget& budget) {
    const bool zc = kind == PairIntensityKind::zcp || kind == PairIntensityKind::zcm;
    if (!zc && std::abs(z - w) < 2.0 * kMinConditioningRadius)
        throw SingularConditioning("pair_numerator: points too close for the cc family");
    const auto factor = conditioned_pair_factor(kind, z, w);
    if (zc) {
        const cplx wbar = std::conj(w);
        const bool positive = kind == PairIntensityKind::zcp;
        return mc_run(factor, budget.draws, budget.seed, budget.threads,
                      [wbar, positive](const std::vector<cplx>& v) {
                          // v = (G(w), dG(z), dG(w), d2G(w)) given G(z)=F(w)=0
                          const double jac_g = std::norm(v[1]);
                          const double jac_f = std::norm(wbar * v[2] - v[3]) - std::norm(v[0]);
                          const bool keep = positive ? jac_f > 0.0 : jac_f < 0.0;
                          return keep ? jac_g * std::abs(jac_f) : 0.0;
                      });
    }
    return mc_run(factor, budget.draws, budget.seed, budget.threads,
                  [kind](const std::vector<cplx>& v) {
                      const double jz = jac_from(v[0], v[1]);
                      const double jw = jac_from(v[2], v[3]);
                      double ind = 1.0;
                      if (kind == PairIntensityKind::cpcp) ind = (jz > 0.0 && jw > 0.0) ? 1.0 : 0.0;
                      if (kind == PairIntensityKind::cmcm) ind = (jz < 0.0 && jw < 0.0) ? 1.0 : 0.0;
                      return std::abs(jz * jw) * ind;
                  });
}

McResult pair_intensity(PairIntensityKind kind, cplx z, cplx w, const Budget& budget) {
    const bool zc = kind == PairIntensityKind::zcp || kind == PairIntensityKind::zcm;
    const double den = pair_denominator(z, w, zc) * kPi * kPi;
    McResult num = pair_numerator(kind, z, w, budget);
    return {num.value / den, num.se / den};
}

double lens_overlap_area(double rho, double s) {
    if (s >= 2.0 * rho) return 0.0;
    const double h = s / (2.0 * rho);
    return 2.0 * rho * rho * std::acos(h) - 0.5 * s * std::sqrt(4.0 * rho * rho - s * s);
}

namespace {

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on the
// Legendre recurrence.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.resize(static_cast<size_t>(n));
    w.resize(static_cast<size_t>(n));
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (t * p1 - p0) / (t * t - 1.0);
            const double dt = p1 / pp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        x[static_cast<size_t>(i)] = -t;
        x[static_cast<size_t>(n - 1 - i)] = t;
        const double wi = 2.0 / ((1.0 - t * t) * pp * pp);
        w[static_cast<size_t>(i)] = wi;
        w[static_cast<size_t>(n - 1 - i)] = wi;
    }
}

double quadrature_pass(PairIntensityKind kind, double rho, const Budget& per_node, int nodes,
                       double* se_out) {
    const bool zc = kind == PairIntensityKind::zcp || kind == PairIntensityKind::zcm;
    const double s_lo = zc ? 0.0 : 2.0 * kMinConditioningRadius;
    const double s_hi = 2.0 * rho;
    std::vector<double> gx, gw;
    gauss_legendre(nodes, gx, gw);
    double total = 0.0, var = 0.0;
    for (int i = 0; i < nodes; ++i) {
        const double s = 0.5 * (s_hi + s_lo) + 0.5 * (s_hi - s_lo) * gx[static_cast<size_t>(i)];
        const double jac = 0.5 * (s_hi - s_lo);
        Budget b = per_node;
        b.seed = per_node.seed + static_cast<uint64_t>(i) * 1000003ull +
                 (nodes == 0 ? 0 : static_cast<uint64_t>(nodes));
        const cplx z = zc ? cplx(s, 0.0) : I * (s / 2.0);
        const cplx w = zc ? cplx(0.0, 0.0) : -I * (s / 2.0);
        const McResult q = pair_intensity(kind, z, w, b);
        const double geom = lens_overlap_area(rho, s) * 2.0 * kPi * s * jac *
                            gw[static_cast<size_t>(i)];
        total += q.value * geom;
        var += (q.se * geom) * (q.se * geom);
    }
    if (se_out) *se_out = std::sqrt(var);
    return total;
}

} // namespace

IntegrateResult integrate_pair(PairIntensityKind kind, double rho, const Budget& per_node,
                               int nodes) {
    if (!(rho > 0.0) || rho >= 1.0) throw Error("integrate_pair: rho must lie in (0, 1)");
    IntegrateResult out;
    out.nodes = nodes;
    out.value = quadrature_pass(kind, rho, per_node, nodes, &out.se);
    out.coarse_value = quadrature_pass(kind, rho, per_node, std::max(4, nodes / 2), nullptr);
    return out;
}

HermitianCov conditional_derivative_cov(double r) {
    if (!(r > 0.0) || r >= 1.0)
        throw Error("conditional_derivative_cov: r must lie in (0, 1)");
    if (r < kMinConditioningRadius)
        throw SingularConditioning("conditional_derivative_cov: r below the conditioning floor");
    std::vector<DerivFunctional> descs = {
        DerivFunctional::F(I * r),     DerivFunctional::F(-I * r),
        DerivFunctional::F_real_deriv(1, 0, 0.0), DerivFunctional::F_real_deriv(0, 2, 0.0),
        DerivFunctional::F_real_deriv(0, 3, 0.0)};
    const auto joint = kernels::eval_cov(descs);
    return gaussian_regression(joint, {2, 3, 4}, {0, 1});
}

ProxyReport proxy_expansion_check(double r, const Budget& budget) {
    if (!(r > 0.0) || r >= 1.0) throw Error("proxy_expansion_check: r must lie in (0, 1)");
    if (r < kMinConditioningRadius)
        throw SingularConditioning("proxy_expansion_check: r below the conditioning floor");
    std::vector<DerivFunctional> descs = {
        DerivFunctional::F(I * r),
        DerivFunctional::F(-I * r),
        DerivFunctional::F_real_deriv(1, 0, I * r),
        DerivFunctional::F_real_deriv(0, 1, I * r),
        DerivFunctional::F_real_deriv(1, 0, -I * r),
        DerivFunctional::F_real_deriv(0, 1, -I * r),
        DerivFunctional::F_real_deriv(1, 0, 0.0),
        DerivFunctional::F_real_deriv(0, 2, 0.0),
        DerivFunctional::F_real_deriv(0, 3, 0.0)};
    const auto joint = kernels::eval_cov(descs);
    const auto cond = gaussian_regression(joint, {2, 3, 4, 5, 6, 7, 8}, {0, 1});
    const auto factor = cholesky(cond, 1e-8);

    const long n = budget.draws;
    const long chunks = (n + kChunk - 1) / kChunk;
    std::vector<double> res_p(static_cast<size_t>(n)), res_m(static_cast<size_t>(n));
    std::vector<double> sum_a2(static_cast<size_t>(chunks), 0.0),
        sq_a2(static_cast<size_t>(chunks), 0.0), sum_pd(static_cast<size_t>(chunks), 0.0),
        sq_pd(static_cast<size_t>(chunks), 0.0);
    parallel_for(chunks, budget.threads, [&](long c) {
        RngStream rng(budget.seed, static_cast<uint64_t>(c));
        std::vector<cplx> v, xi;
        const long lo = c * kChunk;
        const long hi = std::min(n, lo + kChunk);
        for (long i = lo; i < hi; ++i) {
            sample_complex_normal(factor, rng, v, xi);
            const double jac_p = jac_from(v[0], v[1]);
            const double jac_m = jac_from(v[2], v[3]);
            const cplx f10 = v[4], f02 = v[5], f03 = v[6];
            const double a = std::imag(f02 * std::conj(f10));
            const double b = std::imag(I * std::norm(f02) + (1.0 / 3.0) * f03 * std::conj(f10));
            res_p[static_cast<size_t>(i)] = std::abs(jac_p - r * a - r * r * b) / (r * r * r);
            res_m[static_cast<size_t>(i)] = std::abs(jac_m + r * a - r * r * b) / (r * r * r);
            sum_a2[static_cast<size_t>(c)] += a * a;
            sq_a2[static_cast<size_t>(c)] += a * a * a * a;
            const double pd =
                (jac_p * jac_m - r * r * (-a * a + r * r * b * b)) / (r * r * r * r);
            sum_pd[static_cast<size_t>(c)] += pd;
            sq_pd[static_cast<size_t>(c)] += pd * pd;
        }
    });
    double sa = 0.0, qa = 0.0, sp = 0.0, qp = 0.0;
    for (long c = 0; c < chunks; ++c) {
        sa += sum_a2[static_cast<size_t>(c)];
        qa += sq_a2[static_cast<size_t>(c)];
        sp += sum_pd[static_cast<size_t>(c)];
        qp += sq_pd[static_cast<size_t>(c)];
    }
    ProxyReport rep;
    rep.r = r;
    rep.a2.value = sa / static_cast<double>(n);
    rep.a2.se = std::sqrt(std::max(0.0, qa / n - rep.a2.value * rep.a2.value) / (n - 1));
    rep.product_diff.value = sp / static_cast<double>(n);
    rep.product_diff.se =
        std::sqrt(std::max(0.0, qp / n - rep.product_diff.value * rep.product_diff.value) / (n - 1));
    const size_t k99 = static_cast<size_t>(0.99 * static_cast<double>(n));
    std::nth_element(res_p.begin(), res_p.begin() + static_cast<long>(k99), res_p.end());
    rep.p99_residual_plus = res_p[k99];
    std::nth_element(res_m.begin(), res_m.begin() + static_cast<long>(k99), res_m.end());
    rep.p99_residual_minus = res_m[k99];
    return rep;
}

McResult phi_expectation(bool minus_variant, double r, const Budget& budget) {
    if (r == 0.0) return {0.0, 0.0};
    const auto id3 = identity_factor(3);
    return mc_run(id3, budget.draws, budget.seed, budget.threads,
                  [minus_variant, r](const std::vector<cplx>& v) {
                      const double a = std::imag(v[1] * std::conj(v[0]));
                      const double b =
                          std::imag(I * std::norm(v[1]) + (1.0 / 3.0) * v[2] * std::conj(v[0]));
                      const bool ind = minus_variant ? std::abs(a) < -r * b : std::abs(a) < r * b;
                      if (!ind) return 0.0;
                      return -a * a + r * r * b * b;
                  });
}

double closed_form_ball_ratio(double r) { return r * r / (1.0 + r * r); }

double closed_form_zcm_integral(double az) {
    const double u = std::pow(az, 6.0);
    return u * u * (54.0 + u) / (72.0 * (36.0 + u) * (36.0 + u));
}

McResult mc_ball_indicator(double r, const Budget& budget) {
    const auto id2 = identity_factor(2);
    return mc_run(id2, budget.draws, budget.seed, budget.threads,
                  [r](const std::vector<cplx>& v) {
                      return std::abs(v[0]) <= r * std::abs(v[1]) ? 1.0 : 0.0;
                  });
}

McResult mc_zcm_indicator_integral(double az, const Budget& budget) {
    const auto id2 = identity_factor(2);
    const double a3 = az * az * az;
    const double u = a3 * a3;
    return mc_run(id2, budget.draws, budget.seed, budget.threads,
                  [a3, u](const std::vector<cplx>& v) {
                      const double n1 = std::norm(v[0]), n2 = std::norm(v[1]);
                      if (!(std::sqrt(n1) < (a3 / 6.0) * std::sqrt(n2))) return 0.0;
                      // 1/4 of the expectation matches the polar-coordinate
                      // normalization of the closed form.
                      return 0.25 * n2 * ((u / 36.0) * n2 - n1);
                  });
}

McResult smallball_probe(int which, double r, const Budget& budget) {
    if (which < 1 || which > 3) throw Error("smallball_probe: case must be 1, 2 or 3");
    if (r == 0.0) return {0.0, 0.0};
    const auto id3 = identity_factor(3);
    return mc_run(id3, budget.draws, budget.seed, budget.threads,
                  [which, r](const std::vector<cplx>& v) {
                      const double a = std::imag(v[1] * std::conj(v[0]));
                      double x = a;
                      if (which == 2)
                          x = a + r * std::imag(I * std::norm(v[1]) +
                                                (1.0 / 3.0) * v[2] * std::conj(v[0]));
                      if (which == 3)
                          x = a - r * std::imag(I * std::norm(v[1]) -
                                                (1.0 / 3.0) * v[2] * std::conj(v[0]));
                      return std::abs(x) < r ? 1.0 : 0.0;
                  });
}

void save_radial_csv(const std::vector<std::pair<double, McResult>>& rows,
                     const std::string& kind, long n_draws, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("save_radial_csv: cannot open " + path);
    out << "# geflab-csv v1 radial-profile\n";
    out << "kind,r,value,stderr,n_draws\n";
    char buf[192];
    for (const auto& [r, mc] : rows) {
        std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g,%ld\n", kind.c_str(), r, mc.value,
                      mc.se, n_draws);
        out << buf;
    }
}

} // namespace geflab::kacrice
