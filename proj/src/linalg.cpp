#include "geflab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace geflab {

HermitianCov HermitianCov::from_rows(std::initializer_list<std::initializer_list<cplx>> rows) {
    const int n = static_cast<int>(rows.size());
    HermitianCov m(n);
    int i = 0;
    for (const auto& row : rows) {
        int j = 0;
        for (const cplx& v : row) {
            if (j >= i) m.set(i, j, v);
            ++j;
        }
        ++i;
    }
    return m;
}

double HermitianCov::max_entry_distance(const HermitianCov& other) const {
    double d = 0.0;
    for (size_t k = 0; k < a_.size(); ++k) d = std::max(d, std::abs(a_[k] - other.a_[k]));
    return d;
}

namespace {

// In-place lower Cholesky of cov + jitter*I.  Returns false on a
// non-positive pivot.
bool try_cholesky(const HermitianCov& cov, double jitter, std::vector<cplx>& lower) {
    const int n = cov.dim();
    lower.assign(static_cast<size_t>(n) * n, cplx(0.0, 0.0));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            cplx sum = cov(i, j);
            if (i == j) sum += jitter;
            for (int k = 0; k < j; ++k)
                sum -= lower[static_cast<size_t>(i) * n + k] *
                       std::conj(lower[static_cast<size_t>(j) * n + k]);
            if (i == j) {
                const double d = sum.real();
                if (!(d > 0.0) || !std::isfinite(d)) return false;
                lower[static_cast<size_t>(i) * n + i] = std::sqrt(d);
            } else {
                lower[static_cast<size_t>(i) * n + j] =
                    sum / lower[static_cast<size_t>(j) * n + j];
            }
        }
    }
    return true;
}

} // namespace

CholFactor cholesky(const HermitianCov& cov, double max_jitter) {
    CholFactor f;
    f.n = cov.dim();
    if (try_cholesky(cov, 0.0, f.lower)) {
        f.jitter_used = 0.0;
        return f;
    }
    for (double jitter = 1e-14; jitter <= max_jitter * (1.0 + 1e-12); jitter *= 100.0) {
        if (try_cholesky(cov, jitter, f.lower)) {
            f.jitter_used = jitter;
            return f;
        }
    }
    throw NotPositiveSemidefinite("cholesky: no jitter in the ladder succeeded");
}

HermitianCov reconstruct(const CholFactor& f) {
    const int n = f.n;
    HermitianCov m(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            cplx sum(0.0, 0.0);
            for (int k = 0; k <= j; ++k) sum += f.at(i, k) * std::conj(f.at(j, k));
            m.set(j, i, std::conj(sum));
        }
    }
    return m;
}

HermitianCov gaussian_regression(const HermitianCov& joint, const std::vector<int>& target_idx,
                                 const std::vector<int>& given_idx, double cond_cap) {
    const int nt = static_cast<int>(target_idx.size());
    const int ng = static_cast<int>(given_idx.size());

    HermitianCov s11(ng);
    for (int i = 0; i < ng; ++i)
        for (int j = i; j < ng; ++j) s11.set(i, j, joint(given_idx[i], given_idx[j]));

    std::vector<cplx> l;
    if (!try_cholesky(s11, 0.0, l))
        throw SingularConditioning("gaussian_regression: given block is not positive definite");

    // Condition estimate for the policy cap: max diagonal of S11 over the
    // smallest squared Cholesky pivot bounds cond_2 within a factor n.
    double max_diag = 0.0, min_piv2 = std::numeric_limits<double>::infinity();
    for (int i = 0; i < ng; ++i) {
        max_diag = std::max(max_diag, s11(i, i).real());
        const double p = l[static_cast<size_t>(i) * ng + i].real();
        min_piv2 = std::min(min_piv2, p * p);
    }
    if (max_diag > cond_cap * min_piv2)
        throw SingularConditioning("gaussian_regression: given block condition estimate above cap");

    // X = L^{-1} S12, where S12(i,j) = cov(given_i, target_j); then the
    // conditional covariance is S22 - X^dagger X.
    std::vector<cplx> x(static_cast<size_t>(ng) * nt);
    for (int j = 0; j < nt; ++j) {
        for (int i = 0; i < ng; ++i) {
            cplx sum = joint(given_idx[i], target_idx[j]);
            for (int k = 0; k < i; ++k)
                sum -= l[static_cast<size_t>(i) * ng + k] * x[static_cast<size_t>(k) * nt + j];
            x[static_cast<size_t>(i) * nt + j] = sum / l[static_cast<size_t>(i) * ng + i];
        }
    }

    HermitianCov out(nt);
    for (int i = 0; i < nt; ++i) {
        for (int j = i; j < nt; ++j) {
            cplx sum = joint(target_idx[i], target_idx[j]);
            for (int k = 0; k < ng; ++k)
                sum -= std::conj(x[static_cast<size_t>(k) * nt + i]) *
                       x[static_cast<size_t>(k) * nt + j];
            out.set(i, j, sum);
        }
    }
    return out;
}

std::vector<cplx> sample_complex_normal(const CholFactor& f, RngStream& rng) {
    std::vector<cplx> out, xi;
    sample_complex_normal(f, rng, out, xi);
    return out;
}

void sample_complex_normal(const CholFactor& f, RngStream& rng, std::vector<cplx>& out,
                           std::vector<cplx>& xi) {
    const int n = f.n;
    xi.resize(n);
    out.resize(n);
    for (int i = 0; i < n; ++i) xi[i] = rng.cnormal();
    for (int i = 0; i < n; ++i) {
        cplx sum(0.0, 0.0);
        for (int k = 0; k <= i; ++k) sum += f.at(i, k) * xi[k];
        out[i] = sum;
    }
}

McResult mc_expectation(const std::function<double(const std::vector<cplx>&)>& f,
                        const CholFactor& factor, long n, RngStream& rng) {
    if (n < 2) throw Error("mc_expectation: need n >= 2");
    std::vector<cplx> z, xi;
    double sum = 0.0, sum2 = 0.0;
    for (long i = 0; i < n; ++i) {
        sample_complex_normal(factor, rng, z, xi);
        const double v = f(z);
        if (!std::isfinite(v)) throw NonFiniteSample("mc_expectation: functional returned non-finite value");
        sum += v;
        sum2 += v * v;
    }
    McResult r;
    r.value = sum / static_cast<double>(n);
    const double var = std::max(0.0, sum2 / static_cast<double>(n) - r.value * r.value);
    r.se = std::sqrt(var / static_cast<double>(n - 1));
    return r;
}

} // namespace geflab
