#include <doctest.h>

#include <cmath>
#include <complex>

#include "geflab/kernels.hpp"

using namespace geflab;
using namespace geflab::kernels;

namespace {
const cplx I(0.0, 1.0);
}

TEST_CASE("base kernel evaluations") {
    auto k = PolyExpKernel::one();
    CHECK(std::abs(k.eval(0.0, 0.0) - 1.0) == 0.0);
    CHECK(std::abs(k.eval(1.0, 1.0) - std::exp(1.0)) < 1e-15);
    // z = i, w = -i: e^{z conj(w)} = e^{i * i} = e^{-1}
    CHECK(std::abs(k.eval(I, -I) - std::exp(-1.0)) < 1e-16);
}

TEST_CASE("covariant derivative on both sides gives (1 - |z-w|^2) e^{z wbar}") {
    auto k = apply_operator(apply_operator(PolyExpKernel::one(), Side::First, KernelOp::CovD),
                            Side::Second, KernelOp::CovD);
    for (const auto& [z, w] : {std::pair<cplx, cplx>{0.3 + 0.2 * I, -0.4 + 0.9 * I},
                               {1.0 + 0.0 * I, 2.0 - 1.0 * I},
                               {0.0 + 0.0 * I, 0.7 + 0.1 * I}}) {
        const cplx expected = (1.0 - std::norm(z - w)) * std::exp(z * std::conj(w));
        CHECK(std::abs(k.eval(z, w) - expected) < 1e-12 * std::max(1.0, std::abs(expected)));
    }
    const double r = 0.5;
    CHECK(std::abs(k.eval(I * r, -I * r)) < 1e-15); // (1-4r^2) e^{-r^2} = 0 at r = 1/2
}

TEST_CASE("derivative pattern against dG(0)") {
    // E[G(z) conj(d^k G(0))] = z^k and E[dG(z) conj(dG(0))] = 1 for all z.
    for (int k = 0; k <= 4; ++k) {
        const cplx z = 0.7 - 0.3 * I;
        const cplx v = pair_expectation(DerivFunctional::G(z), DerivFunctional::dG(k, 0.0));
        CHECK(std::abs(v - std::pow(z, k)) < 1e-14);
    }
    for (const cplx z : {cplx(0.1), cplx(1.0), cplx(-2.0, 0.5)}) {
        const cplx v = pair_expectation(DerivFunctional::dG(1, z), DerivFunctional::dG(1, 0.0));
        CHECK(std::abs(v - 1.0) < 1e-13);
    }
}

TEST_CASE("real derivative expansion basics") {
    auto dx = real_derivative_expansion(1, 0);
    REQUIRE(dx.size() == 2);
    bool has_d = false, has_dbar = false;
    for (const auto& t : dx) {
        if (t.n_d == 1 && t.n_dbar == 0 && t.coef == cplx(1.0, 0.0)) has_d = true;
        if (t.n_d == 0 && t.n_dbar == 1 && t.coef == cplx(1.0, 0.0)) has_dbar = true;
    }
    CHECK(has_d);
    CHECK(has_dbar);

    auto dy = real_derivative_expansion(0, 1);
    REQUIRE(dy.size() == 2);
    // i(d - dbar)
    bool has_id = false, has_midbar = false;
    for (const auto& t : dy) {
        if (t.n_d == 1 && t.coef == I) has_id = true;
        if (t.n_dbar == 1 && t.coef == -I) has_midbar = true;
    }
    CHECK(has_id);
    CHECK(has_midbar);

    CHECK_THROWS_AS(real_derivative_expansion(3, 2), OrderTooHigh);
}

TEST_CASE("F^{(0,2)}(0) equals 2 dG(0) + d^3 G(0) as a functional") {
    // Same covariance against a spanning set of probes.
    auto lhs = DerivFunctional::F_real_deriv(0, 2, 0.0);
    DerivFunctional rhs;
    rhs.point = 0.0;
    rhs.terms = {{cplx(2.0, 0.0), Word{Op::D}}, {cplx(1.0, 0.0), Word{Op::D, Op::D, Op::D}}};
    for (int k = 0; k <= 4; ++k) {
        for (const cplx u : {cplx(0.0), cplx(0.4, -0.2), cplx(-1.0, 0.3)}) {
            const cplx a = pair_expectation(lhs, DerivFunctional::dG(k, u));
            const cplx b = pair_expectation(rhs, DerivFunctional::dG(k, u));
            CHECK(std::abs(a - b) < 1e-12);
        }
    }
}

TEST_CASE("appendix covariance matrix reproduced at r in {0.1, 0.5, 1.0}") {
    for (const double r : {0.1, 0.5, 1.0}) {
        const double r2 = r * r;
        std::vector<DerivFunctional> descs = {
            DerivFunctional::F(I * r),     DerivFunctional::F(-I * r),
            DerivFunctional::F_real_deriv(1, 0, 0.0), DerivFunctional::F_real_deriv(0, 2, 0.0),
            DerivFunctional::F_real_deriv(0, 3, 0.0)};
        auto cov = eval_cov(descs);

        // M1r block
        CHECK(std::abs(cov(0, 0) - std::exp(r2)) < 1e-12);
        CHECK(std::abs(cov(1, 1) - std::exp(r2)) < 1e-12);
        CHECK(std::abs(cov(0, 1) - (1.0 - 4.0 * r2) * std::exp(-r2)) < 1e-12);
        // M2r block
        CHECK(std::abs(cov(0, 2) - I * r * (1.0 - r2)) < 1e-12);
        CHECK(std::abs(cov(0, 3) - (-2.0 + 5.0 * r2 - r2 * r2)) < 1e-12);
        CHECK(std::abs(cov(0, 4) - (-6.0 * r + 7.0 * r * r2 - r * r2 * r2)) < 1e-12);
        CHECK(std::abs(cov(1, 2) - (-I * r * (1.0 - r2))) < 1e-12);
        CHECK(std::abs(cov(1, 3) - (-2.0 + 5.0 * r2 - r2 * r2)) < 1e-12);
        CHECK(std::abs(cov(1, 4) - (6.0 * r - 7.0 * r * r2 + r * r2 * r2)) < 1e-12);
        // M3r block
        CHECK(std::abs(cov(2, 2) - 3.0) < 1e-12);
        CHECK(std::abs(cov(2, 3)) < 1e-12);
        CHECK(std::abs(cov(2, 4) - 6.0 * I) < 1e-12);
        CHECK(std::abs(cov(3, 3) - 10.0) < 1e-12);
        CHECK(std::abs(cov(3, 4)) < 1e-12);
        CHECK(std::abs(cov(4, 4) - 42.0) < 1e-12);
    }
}

TEST_CASE("E[F(ir) conj(F10(0))] vanishes at r = 1") {
    const cplx v = pair_expectation(DerivFunctional::F(I), DerivFunctional::F_real_deriv(1, 0, 0.0));
    CHECK(std::abs(v) < 1e-13);
}

TEST_CASE("mixed partials commute exactly on kernel coefficients") {
    auto base = apply_operator(PolyExpKernel::one(), Side::First, KernelOp::CovD);
    auto ab = apply_operator(apply_operator(base, Side::First, KernelOp::D), Side::First,
                             KernelOp::Dbar);
    auto ba = apply_operator(apply_operator(base, Side::First, KernelOp::Dbar), Side::First,
                             KernelOp::D);
    CHECK(ab.coef_distance(ba) == 0.0);

    auto ab2 = apply_operator(apply_operator(base, Side::Second, KernelOp::D), Side::Second,
                              KernelOp::Dbar);
    auto ba2 = apply_operator(apply_operator(base, Side::Second, KernelOp::Dbar), Side::Second,
                              KernelOp::D);
    CHECK(ab2.coef_distance(ba2) == 0.0);
}

TEST_CASE("eval_cov is exactly Hermitian") {
    std::vector<DerivFunctional> descs = {DerivFunctional::F(0.3 + 0.4 * I),
                                          DerivFunctional::G(-0.2 + 0.1 * I),
                                          DerivFunctional::F_real_deriv(2, 1, 0.5)};
    auto cov = eval_cov(descs);
    for (int i = 0; i < cov.dim(); ++i) {
        CHECK(cov(i, i).imag() == 0.0);
        for (int j = 0; j < cov.dim(); ++j) {
            CHECK(cov(i, j) == std::conj(cov(j, i)));
        }
    }
}

TEST_CASE("dump prints one monomial per line in the documented grammar") {
    auto k = apply_operator(PolyExpKernel::one(), Side::First, KernelOp::CovD);
    const std::string s = k.dump();
    CHECK(s.find("* z^") != std::string::npos);
    CHECK(s.find("zb^") != std::string::npos);
    CHECK(s.find("wb^") != std::string::npos);
    // zbar - wbar: exactly two monomials
    CHECK(std::count(s.begin(), s.end(), '\n') == 2);
}
