#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <vector>

#include "geflab/gef.hpp"
#include "geflab/kernels.hpp"

using namespace geflab;

namespace {

const cplx I(0.0, 1.0);

// Extended-precision reference for the weighted jet, summed in long double
// directly from the definition; independent of the production recurrence.
struct LongJet {
    std::complex<long double> g, dg, d2g, d3g;
};

LongJet reference_jet(const GefSample& s, cplx z) {
    using C = std::complex<long double>;
    const C zl(z.real(), z.imag());
    const long double az2 = std::norm(zl);
    LongJet out{};
    const int n = static_cast<int>(s.coeffs.size()) - 1;
    for (int k = 0; k <= n; ++k) {
        const long double lg =
            -0.5L * az2 - 0.5L * std::lgamma(static_cast<long double>(k) + 1.0L);
        C zpow(1.0L, 0.0L);
        for (int t = 0; t < k; ++t) zpow *= zl;
        const C term = zpow * std::exp(lg);
        const C xi(s.coeffs[static_cast<size_t>(k)].real(),
                   s.coeffs[static_cast<size_t>(k)].imag());
        out.g += xi * term;
        if (k >= 1) out.dg += xi * term * (static_cast<long double>(k) / zl);
        if (k >= 2) out.d2g += xi * term * (static_cast<long double>(k) * (k - 1) / (zl * zl));
        if (k >= 3)
            out.d3g +=
                xi * term * (static_cast<long double>(k) * (k - 1) * (k - 2) / (zl * zl * zl));
    }
    return out;
}

double rel_err(cplx a, std::complex<long double> b) {
    const long double scale = std::max<long double>(std::abs(b), 1e-3L);
    return static_cast<double>(std::abs(std::complex<long double>(a.real(), a.imag()) - b) /
                               scale);
}

} // namespace

TEST_CASE("truncation policy") {
    CHECK(truncation_for_radius(4.0) == 106);
    CHECK(truncation_for_radius(6.0) >= 146);
    RngStream rng(1, 1);
    auto s = sample_gef(4.0, rng);
    CHECK(s.truncation() >= 106);
    CHECK_THROWS_AS(sample_gef(12.5, rng), RadiusTooLarge);
    CHECK_THROWS_AS(sample_gef(0.0, rng), RadiusTooLarge);
}

TEST_CASE("equal seeds give identical coefficient sequences") {
    auto a = sample_gef(3.0, 99, 4);
    auto b = sample_gef(3.0, 99, 4);
    REQUIRE(a.coeffs.size() == b.coeffs.size());
    for (size_t i = 0; i < a.coeffs.size(); ++i) CHECK(a.coeffs[i] == b.coeffs[i]);
}

TEST_CASE("coefficients have unit variance") {
    const int n_samples = 100000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n_samples; ++i) {
        RngStream rng(12345, static_cast<uint64_t>(i));
        auto smp = sample_gef(0.5, rng);
        const double v = std::norm(smp.coeffs[2]);
        s += v;
        s2 += v * v;
    }
    const double mean = s / n_samples;
    const double se = std::sqrt((s2 / n_samples - mean * mean) / (n_samples - 1));
    CHECK(std::abs(mean - 1.0) < 5.0 * se);
}

TEST_CASE("monomial samples evaluate exactly") {
    GefSample constant;
    constant.r_max = 2.0;
    constant.coeffs = {1.0, 0.0, 0.0};
    auto j0 = eval_jet(constant, 0.0);
    CHECK(j0.wG == cplx(1.0, 0.0));
    CHECK(j0.wdG == cplx(0.0, 0.0));
    CHECK(j0.wF == cplx(0.0, 0.0));

    GefSample linear;
    linear.r_max = 2.0;
    linear.coeffs = {0.0, 1.0, 0.0, 0.0};
    auto j1 = eval_jet(linear, 0.0);
    CHECK(std::abs(j1.wF - cplx(-1.0, 0.0)) < 1e-15); // F(z) = |z|^2 - 1

    // F vanishes exactly on |z| = 1.
    auto j2 = eval_jet(linear, 1.0);
    CHECK(std::abs(j2.wF) < 1e-12 * std::exp(-0.5));
    auto j3 = eval_jet(linear, I);
    CHECK(std::abs(j3.wF) < 1e-12 * std::exp(-0.5));
}

TEST_CASE("jet consistency identities hold exactly") {
    auto s = sample_gef(4.0, 7, 0);
    RngStream pts(8, 0);
    SampleEvaluator ev(s);
    for (int i = 0; i < 50; ++i) {
        const cplx z = cplx(pts.uniform() * 8.0 - 4.0, pts.uniform() * 8.0 - 4.0) * 0.7;
        const auto j = ev.jet(z);
        CHECK(j.wdbarF == j.wG);
        CHECK(j.wF == std::conj(z) * j.wG - j.wdG);
    }
}

TEST_CASE("weighted jet matches extended-precision reference to 1e-10") {
    auto s = sample_gef(4.0, 2024, 3);
    SampleEvaluator ev(s);
    RngStream pts(2024, 4);
    for (int i = 0; i < 200; ++i) {
        const double ang = pts.uniform() * 6.28318530717958647;
        const double rad = 0.01 + pts.uniform() * 3.98;
        const cplx z = std::polar(rad, ang);
        const auto j = ev.jet(z);
        const auto ref = reference_jet(s, z);
        CHECK(rel_err(j.wG, ref.g) < 1e-10);
        CHECK(rel_err(j.wdG, ref.dg) < 1e-10);
        CHECK(rel_err(j.wd2G, ref.d2g) < 1e-10);
        CHECK(rel_err(j.wd3G, ref.d3g) < 1e-10);
    }
    CHECK_THROWS_AS(ev.jet(cplx(4.5, 0.0)), OutsideStableDisk);
}

TEST_CASE("Cauchy-Riemann and finite-difference derivative validation") {
    auto s = sample_gef(4.0, 31, 0);
    SampleEvaluator ev(s);
    auto raw_g = [&](cplx z) { return ev.jet(z).wG * std::exp(0.5 * std::norm(z)); };

    RngStream pts(32, 0);
    for (int i = 0; i < 20; ++i) {
        const cplx z = std::polar(pts.uniform() * 2.0, pts.uniform() * 6.283185307);
        const double w = std::exp(-0.5 * std::norm(z));

        // dbar G via central differences should vanish (analyticity).
        const double h = 1e-5;
        const cplx dx = (raw_g(z + h) - raw_g(z - h)) / (2.0 * h);
        const cplx dy = (raw_g(z + I * h) - raw_g(z - I * h)) / (2.0 * h);
        const cplx dbar = 0.5 * (dx + I * dy);
        CHECK(std::abs(dbar) * w < 1e-6);

        // For analytic G the real-direction differences give d^k G.
        const double h2 = 1e-3;
        const cplx g0 = raw_g(z);
        const cplx gp = raw_g(z + h2), gm = raw_g(z - h2);
        const cplx gpp = raw_g(z + 2.0 * h2), gmm = raw_g(z - 2.0 * h2);
        const cplx d1 = (gp - gm) / (2.0 * h2);
        const cplx d2 = (gp - 2.0 * g0 + gm) / (h2 * h2);
        const cplx d3 = (gpp - 2.0 * gp + 2.0 * gm - gmm) / (2.0 * h2 * h2 * h2);
        const auto j = ev.jet(z);
        const double scale1 = std::max(std::abs(j.wdG), 1e-2);
        const double scale2 = std::max(std::abs(j.wd2G), 1e-2);
        const double scale3 = std::max(std::abs(j.wd3G), 1e-1);
        CHECK(std::abs(d1 * w - j.wdG) / scale1 < 1e-4);
        CHECK(std::abs(d2 * w - j.wd2G) / scale2 < 1e-4);
        CHECK(std::abs(d3 * w - j.wd3G) / scale3 < 1e-4);
    }
}

TEST_CASE("empirical covariances match the kernel calculus") {
    using kernels::DerivFunctional;
    const int n_samples = 20000;
    const cplx z(0.6, -0.3), w(-0.4, 0.5);
    cplx s_gg(0.0), s_gf(0.0), s_ff(0.0);
    double q_gg = 0.0, q_gf = 0.0, q_ff = 0.0;
    for (int i = 0; i < n_samples; ++i) {
        auto smp = sample_gef(2.0, 777, static_cast<uint64_t>(i));
        SampleEvaluator ev(smp);
        const auto jz = ev.jet(z), jw = ev.jet(w);
        const double uz = std::exp(0.5 * std::norm(z)), uw = std::exp(0.5 * std::norm(w));
        const cplx gz = jz.wG * uz, fw = jw.wF * uw, fz = jz.wF * uz, gw = jw.wG * uw;
        s_gg += gz * std::conj(gw);
        q_gg += std::norm(gz * std::conj(gw));
        s_gf += gz * std::conj(fw);
        q_gf += std::norm(gz * std::conj(fw));
        s_ff += fz * std::conj(fw);
        q_ff += std::norm(fz * std::conj(fw));
    }
    auto check = [n_samples](cplx sum, double sumsq, cplx expected) {
        const cplx mean = sum / static_cast<double>(n_samples);
        const double se =
            std::sqrt(std::max(0.0, sumsq / n_samples - std::norm(mean)) / (n_samples - 1));
        CHECK(std::abs(mean - expected) < 5.0 * se);
    };
    check(s_gg, q_gg, kernels::pair_expectation(DerivFunctional::G(z), DerivFunctional::G(w)));
    check(s_gf, q_gf, kernels::pair_expectation(DerivFunctional::G(z), DerivFunctional::F(w)));
    check(s_ff, q_ff, kernels::pair_expectation(DerivFunctional::F(z), DerivFunctional::F(w)));
}

TEST_CASE("Bargmann-Fock shift identities") {
    auto s = sample_gef(4.0, 55, 0);
    SampleEvaluator base(s);

    // zeta = 0 is the identity on all jets.
    ShiftedEvaluator id = bargmann_fock_shift(base, 0.0);
    for (const cplx z : {cplx(0.2, 0.1), cplx(-1.0, 2.0)}) {
        const auto a = base.jet(z), b = id.jet(z);
        CHECK(std::abs(a.wG - b.wG) < 1e-15);
        CHECK(std::abs(a.wdG - b.wdG) < 1e-14);
        CHECK(std::abs(a.wd3G - b.wd3G) < 1e-13);
    }

    // Modulus identity of the twisted translation, for the covariant jet.
    RngStream pts(56, 0);
    for (int i = 0; i < 30; ++i) {
        const cplx zeta = std::polar(pts.uniform() * 1.5, pts.uniform() * 6.283185307);
        const cplx z = std::polar(pts.uniform() * 2.0, pts.uniform() * 6.283185307);
        ShiftedEvaluator sh = bargmann_fock_shift(base, zeta);
        const auto a = sh.jet(z);
        const auto b = base.jet(z - zeta);
        CHECK(std::abs(std::abs(a.wG) - std::abs(b.wG)) < 1e-12);
        CHECK(std::abs(std::abs(a.wF) - std::abs(b.wF)) < 1e-12);
        CHECK(std::abs(std::abs(a.wdF) - std::abs(std::conj(zeta) * b.wF + b.wdF)) < 1e-12);
    }
}

TEST_CASE("shifted field keeps the GEF covariance") {
    const cplx z(0.4, 0.2), w(-0.3, 0.5), zeta(0.6, -0.4);
    const int n = 100000;
    cplx sum(0.0);
    double sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        auto smp = sample_gef(3.0, 91, static_cast<uint64_t>(i));
        SampleEvaluator base(smp);
        ShiftedEvaluator sh = bargmann_fock_shift(base, zeta);
        const cplx gz = sh.jet(z).wG * std::exp(0.5 * std::norm(z));
        const cplx gw = sh.jet(w).wG * std::exp(0.5 * std::norm(w));
        const cplx v = gz * std::conj(gw);
        sum += v;
        sumsq += std::norm(v);
    }
    const cplx mean = sum / static_cast<double>(n);
    const double se = std::sqrt(std::max(0.0, sumsq / n - std::norm(mean)) / (n - 1));
    CHECK(std::abs(mean - std::exp(z * std::conj(w))) < 5.0 * se);
}

TEST_CASE("truncation tail bound") {
    CHECK(truncation_tail_bound(0, 0.0) == 0.0);
    double prev = truncation_tail_bound(10, 2.0);
    for (int n = 11; n < 20; ++n) {
        const double b = truncation_tail_bound(n, 2.0);
        CHECK(b <= prev);
        prev = b;
    }
    const int n4 = truncation_for_radius(4.0);
    CHECK(truncation_tail_bound(n4, 4.0) < 1e-12 * std::exp(16.0));
}

TEST_CASE("sample serialization round-trips bit-exactly") {
    auto s = sample_gef(3.0, 123456789, 42);
    const std::string path = "/tmp/geflab_test_sample.csv";
    save_sample_csv(s, path);
    auto t = load_sample_csv(path);
    CHECK(t.master_seed == s.master_seed);
    CHECK(t.task_id == s.task_id);
    CHECK(t.r_max == s.r_max);
    REQUIRE(t.coeffs.size() == s.coeffs.size());
    for (size_t i = 0; i < s.coeffs.size(); ++i) {
        CHECK(t.coeffs[i].real() == s.coeffs[i].real());
        CHECK(t.coeffs[i].imag() == s.coeffs[i].imag());
    }
    std::remove(path.c_str());
}
