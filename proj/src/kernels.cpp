#include "geflab/kernels.hpp"

#include <cmath>
#include <cstdio>

#include "geflab/errors.hpp"

namespace geflab::kernels {

namespace {
constexpr double kDropTol = 0.0; // keep exact zeros out of the map only
}

PolyExpKernel PolyExpKernel::one() {
    PolyExpKernel k;
    k.add(0, 0, 0, 0, cplx(1.0, 0.0));
    return k;
}

void PolyExpKernel::add(int a, int b, int c, int d, cplx coef) {
    const uint32_t k = key(a, b, c, d);
    auto it = coeffs_.find(k);
    if (it == coeffs_.end()) {
        if (coef != cplx(0.0, 0.0)) coeffs_.emplace(k, coef);
        return;
    }
    it->second += coef;
    if (std::abs(it->second) <= kDropTol) coeffs_.erase(it);
}

cplx PolyExpKernel::coef(int a, int b, int c, int d) const {
    auto it = coeffs_.find(key(a, b, c, d));
    return it == coeffs_.end() ? cplx(0.0, 0.0) : it->second;
}

PolyExpKernel& PolyExpKernel::operator+=(const PolyExpKernel& other) {
    for (const auto& [k, v] : other.coeffs_) {
        auto it = coeffs_.find(k);
        if (it == coeffs_.end())
            coeffs_.emplace(k, v);
        else
            it->second += v;
    }
    return *this;
}

PolyExpKernel PolyExpKernel::scaled(cplx s) const {
    PolyExpKernel out;
    for (const auto& [k, v] : coeffs_) out.coeffs_.emplace(k, v * s);
    return out;
}

double PolyExpKernel::coef_distance(const PolyExpKernel& other) const {
    double d = 0.0;
    auto probe = [&d](const std::map<uint32_t, cplx>& lhs, const std::map<uint32_t, cplx>& rhs) {
        for (const auto& [k, v] : lhs) {
            auto it = rhs.find(k);
            const cplx w = it == rhs.end() ? cplx(0.0, 0.0) : it->second;
            d = std::max(d, std::abs(v - w));
        }
    };
    probe(coeffs_, other.coeffs_);
    probe(other.coeffs_, coeffs_);
    return d;
}

cplx PolyExpKernel::eval(cplx z, cplx w) const {
    const cplx zb = std::conj(z);
    const cplx wb = std::conj(w);
    cplx sum(0.0, 0.0);
    for (const auto& [k, v] : coeffs_) {
        const int a = static_cast<int>((k >> 24) & 0xff);
        const int b = static_cast<int>((k >> 16) & 0xff);
        const int c = static_cast<int>((k >> 8) & 0xff);
        const int d = static_cast<int>(k & 0xff);
        cplx m = v;
        for (int i = 0; i < a; ++i) m *= z;
        for (int i = 0; i < b; ++i) m *= zb;
        for (int i = 0; i < c; ++i) m *= wb;
        for (int i = 0; i < d; ++i) m *= w;
        sum += m;
    }
    return sum * std::exp(z * wb);
}

std::string PolyExpKernel::dump() const {
    std::string out;
    char buf[160];
    for (const auto& [k, v] : coeffs_) {
        const int a = static_cast<int>((k >> 24) & 0xff);
        const int b = static_cast<int>((k >> 16) & 0xff);
        const int c = static_cast<int>((k >> 8) & 0xff);
        const int d = static_cast<int>(k & 0xff);
        std::snprintf(buf, sizeof buf, "(%.17g,%.17g) * z^%d zb^%d wb^%d w^%d\n", v.real(),
                      v.imag(), a, b, c, d);
        out += buf;
    }
    return out;
}

PolyExpKernel PolyExpKernel::first_d() const {
    PolyExpKernel out;
    for (const auto& [k, v] : coeffs_) {
        const int a = static_cast<int>((k >> 24) & 0xff);
        const int b = static_cast<int>((k >> 16) & 0xff);
        const int c = static_cast<int>((k >> 8) & 0xff);
        const int d = static_cast<int>(k & 0xff);
        if (a > 0) out.add(a - 1, b, c, d, v * static_cast<double>(a)); // dP/dz
        out.add(a, b, c + 1, d, v);                                     // + wbar P
    }
    return out;
}

PolyExpKernel PolyExpKernel::first_dbar() const {
    PolyExpKernel out;
    for (const auto& [k, v] : coeffs_) {
        const int a = static_cast<int>((k >> 24) & 0xff);
        const int b = static_cast<int>((k >> 16) & 0xff);
        const int c = static_cast<int>((k >> 8) & 0xff);
        const int d = static_cast<int>(k & 0xff);
        if (b > 0) out.add(a, b - 1, c, d, v * static_cast<double>(b));
    }
    return out;
}

PolyExpKernel PolyExpKernel::first_mulconj() const {
    PolyExpKernel out;
    for (const auto& [k, v] : coeffs_) {
        const int a = static_cast<int>((k >> 24) & 0xff);
        const int b = static_cast<int>((k >> 16) & 0xff);
        const int c = static_cast<int>((k >> 8) & 0xff);
        const int d = static_cast<int>(k & 0xff);
        out.add(a, b + 1, c, d, v);
    }
    return out;
}

PolyExpKernel PolyExpKernel::second_d() const {
    // E[f conj(dg)] = dbar_w E[f conj(g)]; on P e^{z wbar} this is
    // (dP/dwbar + z P) e^{z wbar}.
    PolyExpKernel out;
    for (const auto& [k, v] : coeffs_) {
        const int a = static_cast<int>((k >> 24) & 0xff);
        const int b = static_cast<int>((k >> 16) & 0xff);
        const int c = static_cast<int>((k >> 8) & 0xff);
        const int d = static_cast<int>(k & 0xff);
        if (c > 0) out.add(a, b, c - 1, d, v * static_cast<double>(c));
        out.add(a + 1, b, c, d, v);
    }
    return out;
}

PolyExpKernel PolyExpKernel::second_dbar() const {
    PolyExpKernel out;
    for (const auto& [k, v] : coeffs_) {
        const int a = static_cast<int>((k >> 24) & 0xff);
        const int b = static_cast<int>((k >> 16) & 0xff);
        const int c = static_cast<int>((k >> 8) & 0xff);
        const int d = static_cast<int>(k & 0xff);
        if (d > 0) out.add(a, b, c, d - 1, v * static_cast<double>(d));
    }
    return out;
}

PolyExpKernel PolyExpKernel::second_mulconj() const {
    PolyExpKernel out;
    for (const auto& [k, v] : coeffs_) {
        const int a = static_cast<int>((k >> 24) & 0xff);
        const int b = static_cast<int>((k >> 16) & 0xff);
        const int c = static_cast<int>((k >> 8) & 0xff);
        const int d = static_cast<int>(k & 0xff);
        out.add(a, b, c, d + 1, v);
    }
    return out;
}

namespace {

PolyExpKernel apply_primitive(const PolyExpKernel& k, Side side, Op op) {
    if (side == Side::First) {
        switch (op) {
            case Op::D: return k.first_d();
            case Op::Dbar: return k.first_dbar();
            case Op::MulConjZ: return k.first_mulconj();
        }
    } else {
        switch (op) {
            case Op::D: return k.second_d();
            case Op::Dbar: return k.second_dbar();
            case Op::MulConjZ: return k.second_mulconj();
        }
    }
    throw Error("apply_primitive: unreachable");
}

} // namespace

PolyExpKernel apply_operator(const PolyExpKernel& k, Side side, KernelOp op) {
    switch (op) {
        case KernelOp::D: return apply_primitive(k, side, Op::D);
        case KernelOp::Dbar: return apply_primitive(k, side, Op::Dbar);
        case KernelOp::CovD: {
            PolyExpKernel out = apply_primitive(k, side, Op::MulConjZ);
            out += apply_primitive(k, side, Op::D).scaled(cplx(-1.0, 0.0));
            return out;
        }
        case KernelOp::Dx: {
            PolyExpKernel out = apply_primitive(k, side, Op::D);
            out += apply_primitive(k, side, Op::Dbar);
            return out;
        }
        case KernelOp::Dy: {
            // i(d - dbar); the coefficient i is conjugated on the second side.
            const cplx c = side == Side::First ? cplx(0.0, 1.0) : cplx(0.0, -1.0);
            PolyExpKernel out = apply_primitive(k, side, Op::D).scaled(c);
            out += apply_primitive(k, side, Op::Dbar).scaled(-c);
            return out;
        }
    }
    throw Error("apply_operator: unreachable");
}

DerivFunctional DerivFunctional::G(cplx z) { return {z, {{cplx(1.0, 0.0), {}}}}; }

DerivFunctional DerivFunctional::dG(int k, cplx z) {
    Word w(static_cast<size_t>(k), Op::D);
    return {z, {{cplx(1.0, 0.0), std::move(w)}}};
}

DerivFunctional DerivFunctional::F(cplx z) {
    return {z, {{cplx(1.0, 0.0), {Op::MulConjZ}}, {cplx(-1.0, 0.0), {Op::D}}}};
}

DerivFunctional DerivFunctional::dF(cplx z) {
    return {z, {{cplx(1.0, 0.0), {Op::MulConjZ, Op::D}}, {cplx(-1.0, 0.0), {Op::D, Op::D}}}};
}

DerivFunctional DerivFunctional::dbarF(cplx z) {
    return {z, {{cplx(1.0, 0.0), {Op::MulConjZ, Op::Dbar}}, {cplx(-1.0, 0.0), {Op::D, Op::Dbar}}}};
}

std::vector<WirtingerTerm> real_derivative_expansion(int m, int n) {
    if (m < 0 || n < 0 || m + n > 4)
        throw OrderTooHigh("real_derivative_expansion: order beyond the m+n <= 4 cap");
    // (d/dx)^m = (d + dbar)^m, (d/dy)^n = (i(d - dbar))^n; the operators
    // commute, so plain binomial expansion applies.
    static const double binom[5][5] = {{1, 0, 0, 0, 0},
                                       {1, 1, 0, 0, 0},
                                       {1, 2, 1, 0, 0},
                                       {1, 3, 3, 1, 0},
                                       {1, 4, 6, 4, 1}};
    cplx in(1.0, 0.0);
    for (int t = 0; t < n; ++t) in *= cplx(0.0, 1.0);
    std::vector<WirtingerTerm> out;
    for (int j = 0; j <= m; ++j) {
        for (int k = 0; k <= n; ++k) {
            const double sign = ((n - k) % 2 == 0) ? 1.0 : -1.0;
            WirtingerTerm t;
            t.coef = in * (binom[m][j] * binom[n][k] * sign);
            t.n_d = j + k;
            t.n_dbar = (m - j) + (n - k);
            out.push_back(t);
        }
    }
    return out;
}

DerivFunctional DerivFunctional::F_real_deriv(int m, int n, cplx z) {
    const auto expansion = real_derivative_expansion(m, n);
    DerivFunctional f;
    f.point = z;
    for (const auto& t : expansion) {
        // Two base words for F = zbar G - dG, each followed by the
        // Wirtinger tail of the real derivative.
        Word tail;
        tail.insert(tail.end(), static_cast<size_t>(t.n_d), Op::D);
        tail.insert(tail.end(), static_cast<size_t>(t.n_dbar), Op::Dbar);

        Word w1 = {Op::MulConjZ};
        w1.insert(w1.end(), tail.begin(), tail.end());
        f.terms.emplace_back(t.coef, std::move(w1));

        Word w2 = {Op::D};
        w2.insert(w2.end(), tail.begin(), tail.end());
        f.terms.emplace_back(-t.coef, std::move(w2));
    }
    return f;
}

cplx pair_expectation(const DerivFunctional& a, const DerivFunctional& b) {
    cplx total(0.0, 0.0);
    for (const auto& [ca, wa] : a.terms) {
        // Apply the first-side word once per term, then fan out over the
        // second-side terms.
        PolyExpKernel k1 = PolyExpKernel::one();
        for (Op op : wa) k1 = apply_primitive(k1, Side::First, op);
        for (const auto& [cb, wb] : b.terms) {
            PolyExpKernel k2 = k1;
            for (Op op : wb) k2 = apply_primitive(k2, Side::Second, op);
            total += ca * std::conj(cb) * k2.eval(a.point, b.point);
        }
    }
    return total;
}

HermitianCov eval_cov(const std::vector<DerivFunctional>& descs) {
    const int n = static_cast<int>(descs.size());
    HermitianCov m(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) m.set(i, j, pair_expectation(descs[i], descs[j]));
    return m;
}

} // namespace geflab::kernels
