#pragma once

#include <memory>
#include <string>
#include <vector>

#include "geflab/errors.hpp"
#include "geflab/linalg.hpp"
#include "geflab/rng.hpp"

namespace geflab {

// One truncated realization of the Gaussian entire function: coefficients
// xi_0..xi_N of sum_n xi_n z^n / sqrt(n!), with seed provenance.
struct GefSample {
    std::vector<cplx> coeffs;
    double r_max = 0.0;
    uint64_t master_seed = 0;
    uint64_t task_id = 0;

    int truncation() const { return static_cast<int>(coeffs.size()) - 1; }
};

// Gaussian-weighted jet at a point: e^{-|z|^2/2} times each of
// (G, dG, d2G, d3G, F, dF, dbarF).  The raw values overflow past |z| ~ 19,
// and every statistic in this project is weighted, so only weighted values
// are exposed.
struct WeightedJet {
    cplx point;
    cplx wG, wdG, wd2G, wd3G;
    cplx wF, wdF, wdbarF;
};

// Truncation policy N = ceil(R^2 + 10R + 50): the L^2 tail is below
// 1e-12 * e^{R^2} for every R <= 12.
int truncation_for_radius(double r_max);

// Upper bound sum_{n>N} R^{2n}/n! on E|G - G_N|^2 over |z| <= R.
double truncation_tail_bound(int n, double r);

// Draws a sample with i.i.d. standard complex normal coefficients; the
// stream should be dedicated to this sample.  Throws RadiusTooLarge outside
// (0, 12].
GefSample sample_gef(double r_max, RngStream& rng);
GefSample sample_gef(double r_max, uint64_t master_seed, uint64_t task_id);

// Anything that can produce weighted jets on a disk.  Landmark searches and
// the shift machinery work against this interface.
class JetEvaluator {
  public:
    virtual ~JetEvaluator() = default;
    virtual WeightedJet jet(cplx z) const = 0; // throws OutsideStableDisk
    virtual double stable_radius() const = 0;
};

class SampleEvaluator final : public JetEvaluator {
  public:
    explicit SampleEvaluator(const GefSample& s);
    WeightedJet jet(cplx z) const override;
    double stable_radius() const override { return sample_->r_max; }

  private:
    const GefSample* sample_;
    std::vector<double> sqrt_;     // sqrt(k) for k <= N+3
    std::vector<double> inv_sqrt_; // 1/sqrt(k), 0 at k = 0
};

WeightedJet eval_jet(const GefSample& s, cplx z);

// Bargmann-Fock shift f -> e^{-|zeta|^2/2 + z conj(zeta)} f(z - zeta).
// The weighted jet of the shifted function at z is the base weighted jet at
// z - zeta combined with a pure phase, so stability follows from the base
// evaluator on the shrunk disk.
class ShiftedEvaluator final : public JetEvaluator {
  public:
    ShiftedEvaluator(const JetEvaluator& base, cplx zeta) : base_(&base), zeta_(zeta) {}
    WeightedJet jet(cplx z) const override;
    double stable_radius() const override { return base_->stable_radius() - std::abs(zeta_); }

  private:
    const JetEvaluator* base_;
    cplx zeta_;
};

ShiftedEvaluator bargmann_fock_shift(const JetEvaluator& base, cplx zeta);

// CSV serialization; numbers printed with %.17g so a round trip is
// bit-exact.  Format documented in the README.
void save_sample_csv(const GefSample& s, const std::string& path);
GefSample load_sample_csv(const std::string& path);

} // namespace geflab
