#pragma once

#include <string>
#include <vector>

#include "geflab/errors.hpp"
#include "geflab/linalg.hpp"
#include "geflab/rng.hpp"

namespace geflab::tf {

// Discretized complex white noise on a uniform time grid; each sample has
// variance 1/dt so that windowed integrals reproduce the white-noise
// calculus.
struct NoiseSignal {
    double dt = 0.02;
    double t0 = 0.0;
    std::vector<cplx> samples;
    uint64_t master_seed = 0, task_id = 0;

    double t_end() const { return t0 + dt * static_cast<double>(samples.size() - 1); }
};

// i.i.d. complex Gaussians scaled by 1/sqrt(dt) on [t_lo, t_hi]; dt capped at
// 0.05.  The caller provides the edge guard (6 window widths on each side of
// the grid span).
NoiseSignal sample_white_noise(double t_lo, double t_hi, double dt, RngStream& rng);

struct GridSpec {
    double x0 = 0.0, x1 = 0.0;   // time axis
    double xi0 = 0.0, xi1 = 0.0; // frequency axis
    double delta = 0.1;          // common spacing, capped at 0.15
};

struct SpectrogramGrid {
    GridSpec spec;
    int nx = 0, nxi = 0;
    std::vector<double> values; // |Vf| at [ix * nxi + ixi]

    double x_at(int ix) const { return spec.x0 + spec.delta * ix; }
    double xi_at(int ixi) const { return spec.xi0 + spec.delta * ixi; }
    double value_at(int ix, int ixi) const {
        return values[static_cast<size_t>(ix) * nxi + ixi];
    }
};

// Gaussian-window STFT V f(x, xi) = (2/pi)^{1/4} sum_t f(t) e^{-(t-x)^2}
// e^{-2 i t xi} dt, window truncated at |t - x| <= 6.
cplx stft_point(const NoiseSignal& f, double x, double xi);
SpectrogramGrid stft_gauss(const NoiseSignal& f, const GridSpec& spec, int threads = 0);

enum class GridLandmarkKind { Min, Max, Saddle };

struct GridLandmark {
    double x = 0.0, xi = 0.0;
    double value = 0.0;
    GridLandmarkKind kind = GridLandmarkKind::Min;
};

// Local minima and maxima by strict 8-neighborhood comparison, saddles by
// the discrete-Hessian sign of a least-squares quadratic on the 3x3 stencil;
// positions are refined by the local paraboloid fit (on |V|^2 for minima).
std::vector<GridLandmark> extract_grid_landmarks(const SpectrogramGrid& sg);

// Area owned by the interior vertices, the unbiased denominator for
// landmark intensities.
double countable_area(const SpectrogramGrid& sg);

struct LandmarkIntensities {
    double area = 0.0;
    long zeros = 0, saddles = 0, maxima = 0;
};

LandmarkIntensities tally(const std::vector<GridLandmark>& marks, double area);

struct IntensityRow {
    std::string name;
    double noise_intensity = 0.0;
    double gef_intensity = 0.0;
    double sigma = 0.0; // combined counting error
    double discrepancy_sigmas = 0.0;
};

struct IntensityComparison {
    std::vector<IntensityRow> rows;
    bool any_flagged = false; // discrepancy above 3 sigma
};

// Compares landmark intensities of the two pipelines.  The identification
// matches the noise plane (x, xi) with z = x + i xi up to the reflection
// xi -> -xi, which preserves counts and Morse types, so intensities compare
// directly.
IntensityComparison compare_to_gef(const LandmarkIntensities& noise,
                                   const LandmarkIntensities& gef);

void save_spectrogram_csv(const SpectrogramGrid& sg, const std::string& path);

} // namespace geflab::tf
