#pragma once

#include <string>
#include <vector>

#include "geflab/landmarks.hpp"

namespace geflab {

enum class PairKind { zz, cc, cpcp, cmcm, cpcm, zc, zcp, zcm };

const char* pair_kind_name(PairKind k);
PairKind pair_kind_from_name(const std::string& name);

// A batch of landmark sets over i.i.d. samples, the common input of every
// counting estimator.  Sample i uses the stream (master_seed, i), so the
// batch is reproducible and independent of the thread count.
struct LandmarkBatch {
    double r_work = 6.0;
    uint64_t master_seed = 0;
    std::vector<LandmarkSet> sets;
};

LandmarkBatch build_landmark_batch(int samples, double r_work, uint64_t master_seed,
                                   int threads = 0, const SearchOptions& opt = {});

// Disjoint test disks: centers on a square grid of pitch 2 rho + 0.1 inside
// B_{r_work - rho - margin}.  With pitch > 2 rho each landmark lies in at
// most one disk.
std::vector<cplx> tile_disk_centers(double rho, double r_work, double margin = 0.1);

struct FirstMoments {
    McResult nz, nc, ncp, ncm;
    long n_disks = 0;
    long n_samples = 0;
};

// Means over all tiling disks of radius rho; errors from per-sample batches.
FirstMoments estimate_first_moments(const LandmarkBatch& batch, double rho);

struct ProfileRow {
    double x = 0.0;
    double value = 0.0;
    double se = 0.0;
    long n_eff = 0; // samples contributing
    long n_disks = 0;
};

struct RadialProfile {
    std::vector<ProfileRow> rows; // sorted by x
};

// Per-disk pair statistic: N(N-1) for same-kind pairs, Na*Nb for cross
// pairs.  Degenerate-index landmarks are excluded (they are flagged
// separately and almost surely absent).
double pair_statistic(PairKind kind, const CountStats& st);

// E[N(N-1)] (or E[Na Nb]) across the radii list; per-sample batch means give
// the standard errors.  Throws BudgetTooSmall when no pair event is observed
// at any radius.
RadialProfile estimate_pair_moment(const LandmarkBatch& batch, PairKind kind,
                                   const std::vector<double>& radii);

// Same estimator on a caller-supplied set of centers (used by the nested-disk
// monotonicity and translation-invariance property tests).
McResult pair_moment_on_centers(const LandmarkBatch& batch, PairKind kind,
                                const std::vector<cplx>& centers, double rho);

struct ExponentFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;
    double lo = 0.0, hi = 0.0;
    int n_used = 0;
};

// Weighted least squares on (log x, log value) over rows with lo <= x <= hi
// and value > 3 se; InsufficientSignal with fewer than 4 usable rows.
ExponentFit fit_exponent(const RadialProfile& profile, double lo, double hi);

// Repulsion factor: E[N(N-1)] / (E N)^2 for kind cc, and
// E[N+ N-] / (E N+ E N-) for kind cpcm; jackknife-over-samples errors.
McResult repulsion_factor(const LandmarkBatch& batch, PairKind kind, double rho);

void save_profile_csv(const RadialProfile& profile, PairKind kind, long n_samples,
                      const std::string& path);

} // namespace geflab
