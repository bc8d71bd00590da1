#pragma once

#include <complex>
#include <functional>
#include <initializer_list>
#include <vector>

#include "geflab/errors.hpp"
#include "geflab/rng.hpp"

namespace geflab {

using cplx = std::complex<double>;

// Hermitian covariance matrix of a circularly symmetric complex Gaussian
// vector.  Writes go through set(), which mirrors the conjugate entry so the
// Hermitian invariant holds exactly; diagonal entries are forced real.
class HermitianCov {
  public:
    HermitianCov() = default;
    explicit HermitianCov(int n) : n_(n), a_(static_cast<size_t>(n) * n, cplx(0.0, 0.0)) {}

    static HermitianCov from_rows(std::initializer_list<std::initializer_list<cplx>> rows);

    int dim() const { return n_; }

    cplx operator()(int i, int j) const { return a_[static_cast<size_t>(i) * n_ + j]; }

    void set(int i, int j, cplx v) {
        if (i == j) v = cplx(v.real(), 0.0);
        a_[static_cast<size_t>(i) * n_ + j] = v;
        a_[static_cast<size_t>(j) * n_ + i] = std::conj(v);
    }

    // Largest |a_ij - b_ij| over all entries.
    double max_entry_distance(const HermitianCov& other) const;

  private:
    int n_ = 0;
    std::vector<cplx> a_;
};

struct CholFactor {
    int n = 0;
    std::vector<cplx> lower; // row-major, strictly upper part zero
    double jitter_used = 0.0;

    cplx at(int i, int j) const { return lower[static_cast<size_t>(i) * n + j]; }
};

// Cholesky factorization with a jitter ladder {0, 1e-14, 1e-12, ...,
// max_jitter}: returns the factor for the smallest jitter that succeeds.
// Throws NotPositiveSemidefinite if every rung fails.
CholFactor cholesky(const HermitianCov& cov, double max_jitter = 1e-8);

// L * L^dagger, for reconstruction-error checks.
HermitianCov reconstruct(const CholFactor& f);

// Covariance of cov[target_idx] conditioned on cov[given_idx] being zero:
// S22 - S21 S11^{-1} S12.  Throws SingularConditioning when the given block
// fails to factor or its condition estimate exceeds cond_cap.
HermitianCov gaussian_regression(const HermitianCov& joint,
                                 const std::vector<int>& target_idx,
                                 const std::vector<int>& given_idx,
                                 double cond_cap = 1e12);

// Z = L xi with i.i.d. standard complex normal xi, so E[Z Z*] = cov and
// E[Z Z^t] = 0.
std::vector<cplx> sample_complex_normal(const CholFactor& f, RngStream& rng);

// Allocation-free variant for hot loops; out/xi are resized as needed.
void sample_complex_normal(const CholFactor& f, RngStream& rng, std::vector<cplx>& out,
                           std::vector<cplx>& xi);

struct McResult {
    double value = 0.0;
    double se = 0.0; // standard error of the mean
};

// Mean and standard error of f over n i.i.d. draws from the factor.
// Deterministic given (rng state, n).  Throws NonFiniteSample if f produces a
// non-finite value.
McResult mc_expectation(const std::function<double(const std::vector<cplx>&)>& f,
                        const CholFactor& factor, long n, RngStream& rng);

} // namespace geflab
