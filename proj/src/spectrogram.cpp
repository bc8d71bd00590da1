#include "geflab/spectrogram.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "geflab/parallel.hpp"

namespace geflab::tf {

namespace {
constexpr double kWindowHalfWidth = 6.0; // tail below e^{-36}
constexpr double kPrefactor = 0.8932438417380023; // (2/pi)^{1/4}
} // namespace

NoiseSignal sample_white_noise(double t_lo, double t_hi, double dt, RngStream& rng) {
    if (!(dt > 0.0) || dt > 0.05) throw Error("sample_white_noise: dt must lie in (0, 0.05]");
    if (!(t_hi > t_lo)) throw Error("sample_white_noise: empty span");
    NoiseSignal f;
    f.dt = dt;
    f.t0 = t_lo;
    const long n = std::lround((t_hi - t_lo) / dt) + 1;
    f.samples.resize(static_cast<size_t>(n));
    const double scale = 1.0 / std::sqrt(dt);
    for (auto& s : f.samples) s = rng.cnormal() * scale;
    return f;
}

cplx stft_point(const NoiseSignal& f, double x, double xi) {
    const long n = static_cast<long>(f.samples.size());
    const long k_lo = std::max<long>(0, std::lround((x - kWindowHalfWidth - f.t0) / f.dt) - 1);
    const long k_hi = std::min<long>(n - 1, std::lround((x + kWindowHalfWidth - f.t0) / f.dt) + 1);
    cplx acc(0.0, 0.0);
    for (long k = k_lo; k <= k_hi; ++k) {
        const double t = f.t0 + f.dt * static_cast<double>(k);
        const double u = t - x;
        if (std::abs(u) > kWindowHalfWidth) continue;
        acc += f.samples[static_cast<size_t>(k)] * std::exp(-u * u) *
               std::exp(cplx(0.0, -2.0 * t * xi));
    }
    return acc * (kPrefactor * f.dt);
}

SpectrogramGrid stft_gauss(const NoiseSignal& f, const GridSpec& spec, int threads) {
    if (!(spec.delta > 0.0) || spec.delta > 0.15)
        throw Error("stft_gauss: grid spacing must lie in (0, 0.15]");
    SpectrogramGrid sg;
    sg.spec = spec;
    sg.nx = static_cast<int>(std::lround((spec.x1 - spec.x0) / spec.delta)) + 1;
    sg.nxi = static_cast<int>(std::lround((spec.xi1 - spec.xi0) / spec.delta)) + 1;
    if (sg.nx < 1 || sg.nxi < 1) throw Error("stft_gauss: empty grid");
    if (spec.x0 - kWindowHalfWidth < f.t0 - 1e-9 ||
        spec.x1 + kWindowHalfWidth > f.t_end() + 1e-9)
        throw GridOutsideSignal("stft_gauss: grid plus edge guard leaves the signal span");

    const long n = static_cast<long>(f.samples.size());

    // Modulated signal g[ixi][k] = f_k e^{-2 i t_k xi}, shared by all
    // columns; the column loop then reduces to windowed dot products.
    std::vector<cplx> modded(static_cast<size_t>(sg.nxi) * n);
    parallel_for(sg.nxi, threads, [&](long ixi) {
        const double xi = sg.xi_at(static_cast<int>(ixi));
        cplx* row = &modded[static_cast<size_t>(ixi) * n];
        for (long k = 0; k < n; ++k) {
            const double t = f.t0 + f.dt * static_cast<double>(k);
            row[k] = f.samples[static_cast<size_t>(k)] * std::exp(cplx(0.0, -2.0 * t * xi));
        }
    });

    sg.values.resize(static_cast<size_t>(sg.nx) * sg.nxi);
    parallel_for(sg.nx, threads, [&](long ix) {
        const double x = sg.x_at(static_cast<int>(ix));
        const long k_lo =
            std::max<long>(0, static_cast<long>(std::ceil((x - kWindowHalfWidth - f.t0) / f.dt)));
        const long k_hi = std::min<long>(
            n - 1, static_cast<long>(std::floor((x + kWindowHalfWidth - f.t0) / f.dt)));
        std::vector<double> wnd(static_cast<size_t>(k_hi - k_lo + 1));
        for (long k = k_lo; k <= k_hi; ++k) {
            const double u = f.t0 + f.dt * static_cast<double>(k) - x;
            wnd[static_cast<size_t>(k - k_lo)] = std::exp(-u * u);
        }
        for (int ixi = 0; ixi < sg.nxi; ++ixi) {
            const cplx* row = &modded[static_cast<size_t>(ixi) * n];
            cplx acc(0.0, 0.0);
            for (long k = k_lo; k <= k_hi; ++k)
                acc += wnd[static_cast<size_t>(k - k_lo)] * row[k];
            sg.values[static_cast<size_t>(ix) * sg.nxi + ixi] =
                std::abs(acc) * (kPrefactor * f.dt);
        }
    });
    return sg;
}

namespace {

// Least-squares quadratic p0 + p1 u + p2 v + p3 u^2 + p4 u v + p5 v^2 on the
// unit-spaced 3x3 stencil centered at (ix, ixi).
struct QuadFit {
    double p1, p2, p3, p4, p5;
};

QuadFit fit_quadratic(const SpectrogramGrid& sg, int ix, int ixi, bool squared) {
    double s = 0.0, su = 0.0, sv = 0.0, suu = 0.0, svv = 0.0, suv = 0.0;
    for (int du = -1; du <= 1; ++du) {
        for (int dv = -1; dv <= 1; ++dv) {
            double val = sg.value_at(ix + du, ixi + dv);
            if (squared) val *= val;
            s += val;
            su += du * val;
            sv += dv * val;
            suu += du * du * val;
            svv += dv * dv * val;
            suv += du * dv * val;
        }
    }
    QuadFit q;
    q.p1 = su / 6.0;
    q.p2 = sv / 6.0;
    q.p4 = suv / 4.0;
    q.p3 = (-2.0 * s + 3.0 * suu) / 6.0;
    q.p5 = (-2.0 * s + 3.0 * svv) / 6.0;
    return q;
}

// Stationary point of the fitted quadratic relative to the stencil center,
// in grid units; returns false when the Hessian is singular.
bool stationary_offset(const QuadFit& q, double& du, double& dv) {
    const double h11 = 2.0 * q.p3, h12 = q.p4, h22 = 2.0 * q.p5;
    const double det = h11 * h22 - h12 * h12;
    if (std::abs(det) < 1e-300) return false;
    du = -(h22 * q.p1 - h12 * q.p2) / det;
    dv = -(h11 * q.p2 - h12 * q.p1) / det;
    return true;
}

} // namespace

std::vector<GridLandmark> extract_grid_landmarks(const SpectrogramGrid& sg) {
    std::vector<GridLandmark> out;
    struct SaddleCand {
        GridLandmark lm;
        double off; // stationary offset from the owning vertex, grid units
    };
    std::vector<SaddleCand> saddles;
    for (int ix = 1; ix + 1 < sg.nx; ++ix) {
        for (int ixi = 1; ixi + 1 < sg.nxi; ++ixi) {
            const double c = sg.value_at(ix, ixi);
            bool is_min = true, is_max = true;
            for (int du = -1; du <= 1 && (is_min || is_max); ++du) {
                for (int dv = -1; dv <= 1; ++dv) {
                    if (du == 0 && dv == 0) continue;
                    const double v = sg.value_at(ix + du, ixi + dv);
                    if (v <= c) is_min = false;
                    if (v >= c) is_max = false;
                }
            }
            GridLandmark lm;
            if (is_min) {
                // zeros are conical in |V| but smooth in |V|^2
                const QuadFit q = fit_quadratic(sg, ix, ixi, true);
                double du = 0.0, dv = 0.0;
                if (stationary_offset(q, du, dv)) {
                    du = std::clamp(du, -1.0, 1.0);
                    dv = std::clamp(dv, -1.0, 1.0);
                } else {
                    du = dv = 0.0;
                }
                lm.kind = GridLandmarkKind::Min;
                lm.x = sg.x_at(ix) + du * sg.spec.delta;
                lm.xi = sg.xi_at(ixi) + dv * sg.spec.delta;
                lm.value = c;
                out.push_back(lm);
                continue;
            }
            if (is_max) {
                const QuadFit q = fit_quadratic(sg, ix, ixi, false);
                double du = 0.0, dv = 0.0;
                if (stationary_offset(q, du, dv)) {
                    du = std::clamp(du, -1.0, 1.0);
                    dv = std::clamp(dv, -1.0, 1.0);
                } else {
                    du = dv = 0.0;
                }
                lm.kind = GridLandmarkKind::Max;
                lm.x = sg.x_at(ix) + du * sg.spec.delta;
                lm.xi = sg.xi_at(ixi) + dv * sg.spec.delta;
                lm.value = c;
                out.push_back(lm);
                continue;
            }
            // Saddle: indefinite fitted Hessian with the stationary point in
            // this vertex's half-open ownership cell.
            const QuadFit q = fit_quadratic(sg, ix, ixi, false);
            const double det = 4.0 * q.p3 * q.p5 - q.p4 * q.p4;
            if (det >= 0.0) continue;
            double du = 0.0, dv = 0.0;
            if (!stationary_offset(q, du, dv)) continue;
            if (du < -0.5 || du >= 0.5 || dv < -0.5 || dv >= 0.5) continue;
            lm.kind = GridLandmarkKind::Saddle;
            lm.x = sg.x_at(ix) + du * sg.spec.delta;
            lm.xi = sg.xi_at(ixi) + dv * sg.spec.delta;
            lm.value = c;
            out.push_back(lm);
        }
    }
    return out;
}

double countable_area(const SpectrogramGrid& sg) {
    return static_cast<double>(sg.nx - 2) * static_cast<double>(sg.nxi - 2) * sg.spec.delta *
           sg.spec.delta;
}

LandmarkIntensities tally(const std::vector<GridLandmark>& marks, double area) {
    LandmarkIntensities t;
    t.area = area;
    for (const auto& m : marks) {
        if (m.kind == GridLandmarkKind::Min) ++t.zeros;
        if (m.kind == GridLandmarkKind::Saddle) ++t.saddles;
        if (m.kind == GridLandmarkKind::Max) ++t.maxima;
    }
    return t;
}

IntensityComparison compare_to_gef(const LandmarkIntensities& noise,
                                   const LandmarkIntensities& gef) {
    IntensityComparison cmp;
    if (noise.area <= 0.0 || gef.area <= 0.0) return cmp;
    const std::pair<const char*, std::pair<long, long>> kinds[] = {
        {"zeros", {noise.zeros, gef.zeros}},
        {"saddles", {noise.saddles, gef.saddles}},
        {"maxima", {noise.maxima, gef.maxima}},
    };
    for (const auto& [name, counts] : kinds) {
        IntensityRow row;
        row.name = name;
        row.noise_intensity = static_cast<double>(counts.first) / noise.area;
        row.gef_intensity = static_cast<double>(counts.second) / gef.area;
        row.sigma = std::sqrt(static_cast<double>(counts.first) / (noise.area * noise.area) +
                              static_cast<double>(counts.second) / (gef.area * gef.area));
        row.discrepancy_sigmas =
            row.sigma > 0.0 ? std::abs(row.noise_intensity - row.gef_intensity) / row.sigma
                            : 0.0;
        if (row.discrepancy_sigmas > 3.0) cmp.any_flagged = true;
        cmp.rows.push_back(row);
    }
    return cmp;
}

void save_spectrogram_csv(const SpectrogramGrid& sg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("save_spectrogram_csv: cannot open " + path);
    out << "# geflab-csv v1 spectrogram\n";
    char buf[64];
    // header row: frequency grid
    out << "x\\xi";
    for (int ixi = 0; ixi < sg.nxi; ++ixi) {
        std::snprintf(buf, sizeof buf, ",%.17g", sg.xi_at(ixi));
        out << buf;
    }
    out << "\n";
    for (int ix = 0; ix < sg.nx; ++ix) {
        std::snprintf(buf, sizeof buf, "%.17g", sg.x_at(ix));
        out << buf;
        for (int ixi = 0; ixi < sg.nxi; ++ixi) {
            std::snprintf(buf, sizeof buf, ",%.17g", sg.value_at(ix, ixi));
            out << buf;
        }
        out << "\n";
    }
}

} // namespace geflab::tf
