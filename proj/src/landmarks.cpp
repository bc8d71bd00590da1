#include "geflab/landmarks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace geflab {

const char* landmark_kind_name(LandmarkKind k) {
    switch (k) {
        case LandmarkKind::Zero: return "zero";
        case LandmarkKind::Saddle: return "saddle";
        case LandmarkKind::LocalMax: return "localmax";
        case LandmarkKind::Degenerate: return "degenerate";
    }
    return "?";
}

double weighted_jacobian(const WeightedJet& jet) {
    return std::norm(jet.wdF) - std::norm(jet.wG);
}

LandmarkKind classify(const WeightedJet& jet, double tol_jac) {
    const double j = weighted_jacobian(jet);
    if (j > tol_jac) return LandmarkKind::Saddle;
    if (j < -tol_jac) return LandmarkKind::LocalMax;
    return LandmarkKind::Degenerate;
}

namespace {

std::vector<cplx> grid_seeds(const Disk& disk, double h, double stable_radius) {
    const double reach = disk.radius + 2.0 * h;
    std::vector<cplx> seeds;
    const int m = static_cast<int>(std::ceil(reach / h));
    for (int i = -m; i <= m; ++i) {
        for (int j = -m; j <= m; ++j) {
            const cplx p = disk.center + cplx(i * h, j * h);
            if (std::abs(p - disk.center) <= reach && std::abs(p) <= stable_radius)
                seeds.push_back(p);
        }
    }
    return seeds;
}

struct Candidate {
    cplx pos;
    double residual;
    double jac_w;
};

// Keep the lower-residual representative among candidates closer than rad.
std::vector<Candidate> dedup(std::vector<Candidate> cands, double rad, long& merges) {
    std::sort(cands.begin(), cands.end(),
              [](const Candidate& a, const Candidate& b) { return a.residual < b.residual; });
    std::vector<Candidate> kept;
    for (const auto& c : cands) {
        bool fresh = true;
        for (const auto& k : kept) {
            if (std::abs(c.pos - k.pos) < rad) {
                fresh = false;
                ++merges;
                break;
            }
        }
        if (fresh) kept.push_back(c);
    }
    return kept;
}

void check_budget(long& used, long budget) {
    if (++used > budget)
        throw SearchBudgetExceeded("landmark search exceeded its evaluation budget");
}

} // namespace

std::vector<Landmark> find_zeros(const JetEvaluator& ev, Disk disk, const SearchOptions& opt,
                                 LandmarkDiagnostics* diag) {
    const double stable = ev.stable_radius();
    if (std::abs(disk.center) + disk.radius > stable * (1.0 + 1e-12))
        throw OutsideStableDisk("find_zeros: disk not contained in the stable disk");

    const auto seeds = grid_seeds(disk, opt.h_seed_zero, stable);
    const double escape = disk.radius + 3.0 * opt.h_seed_zero + 0.5;
    long used = 0;
    std::vector<Candidate> cands;
    LandmarkDiagnostics local;

    for (const cplx seed : seeds) {
        cplx z = seed;
        bool accepted = false;
        for (int it = 0; it < opt.max_newton_iters; ++it) {
            if (std::abs(z) > stable || std::abs(z - disk.center) > escape) break;
            check_budget(used, opt.iteration_budget);
            const WeightedJet j = ev.jet(z);
            const double res = std::abs(j.wG);
            if (res < opt.tol_accept) {
                cands.push_back({z, res, 0.0});
                accepted = true;
                break;
            }
            const double dmod = std::abs(j.wdG);
            if (dmod < 1e-300) break;
            cplx step = j.wG / j.wdG;
            const double smod = std::abs(step);
            if (smod > 0.5) step *= 0.5 / smod; // zeros are ~1 apart
            z -= step;
        }
        if (!accepted) ++local.newton_failures;
    }

    auto kept = dedup(std::move(cands), opt.dedup_radius, local.dedup_merges);
    std::vector<Landmark> out;
    for (const auto& c : kept) {
        if (std::abs(c.pos - disk.center) <= disk.radius + opt.dedup_radius)
            out.push_back({c.pos, LandmarkKind::Zero, 0.0, c.residual});
    }
    if (diag) {
        diag->newton_failures += local.newton_failures;
        diag->dedup_merges += local.dedup_merges;
    }
    return out;
}

std::vector<Landmark> find_critical_points(const JetEvaluator& ev, Disk disk,
                                           const SearchOptions& opt, LandmarkDiagnostics* diag) {
    const double stable = ev.stable_radius();
    if (std::abs(disk.center) + disk.radius > stable * (1.0 + 1e-12))
        throw OutsideStableDisk("find_critical_points: disk not contained in the stable disk");

    const auto seeds = grid_seeds(disk, opt.h_seed_crit, stable);
    const double escape = disk.radius + 3.0 * opt.h_seed_crit + 0.5;
    long used = 0;
    std::vector<Candidate> cands;
    LandmarkDiagnostics local;

    for (const cplx seed : seeds) {
        cplx z = seed;
        bool accepted = false;
        for (int it = 0; it < opt.max_newton_iters; ++it) {
            if (std::abs(z) > stable || std::abs(z - disk.center) > escape) break;
            check_budget(used, opt.iteration_budget);
            const WeightedJet j = ev.jet(z);
            const double res = std::abs(j.wF);
            if (res < opt.tol_accept) {
                cands.push_back({z, res, weighted_jacobian(j)});
                accepted = true;
                break;
            }
            // Planar Newton for F(z + d) ~ F + a d + b conj(d), with
            // a = dF and b = dbarF = G; the Gaussian weights cancel.
            const cplx a = j.wdF, b = j.wG, f = j.wF;
            const double det = std::norm(a) - std::norm(b);
            const double scale = std::norm(a) + std::norm(b);
            if (scale < 1e-300) break;
            cplx step;
            if (std::abs(det) > 1e-9 * scale) {
                // Solving a d + b conj(d) = -f gives the increment
                // d = (conj(f) b - f conj(a)) / det; step is its negation
                // because the update below subtracts.
                step = (f * std::conj(a) - std::conj(f) * b) / det;
            } else {
                // Near-singular Jacobian (e.g. a degenerate zero curve):
                // Tikhonov-regularized Gauss-Newton on the real 2x2 system.
                const double j11 = (a + b).real(), j21 = (a + b).imag();
                const double j12 = -(a - b).imag(), j22 = (a - b).real();
                const double lam = 1e-10 * scale;
                const double m11 = j11 * j11 + j21 * j21 + lam;
                const double m12 = j11 * j12 + j21 * j22;
                const double m22 = j12 * j12 + j22 * j22 + lam;
                const double g1 = j11 * f.real() + j21 * f.imag();
                const double g2 = j12 * f.real() + j22 * f.imag();
                const double mdet = m11 * m22 - m12 * m12;
                if (mdet < 1e-300) break;
                step = cplx((m22 * g1 - m12 * g2) / mdet, (m11 * g2 - m12 * g1) / mdet);
            }
            const double smod = std::abs(step);
            if (smod > 0.4) step *= 0.4 / smod;
            z -= step;
        }
        if (!accepted) ++local.newton_failures;
    }

    auto kept = dedup(std::move(cands), opt.dedup_radius, local.dedup_merges);
    std::vector<Landmark> out;
    for (const auto& c : kept) {
        if (std::abs(c.pos - disk.center) > disk.radius + opt.dedup_radius) continue;
        Landmark lm;
        lm.position = c.pos;
        lm.jac_w = c.jac_w;
        lm.residual = c.residual;
        if (c.jac_w > opt.tol_jac)
            lm.kind = LandmarkKind::Saddle;
        else if (c.jac_w < -opt.tol_jac)
            lm.kind = LandmarkKind::LocalMax;
        else
            lm.kind = LandmarkKind::Degenerate;
        out.push_back(lm);
    }
    if (diag) {
        diag->newton_failures += local.newton_failures;
        diag->dedup_merges += local.dedup_merges;
    }
    return out;
}

LandmarkSet find_landmarks(const JetEvaluator& ev, Disk disk, const SearchOptions& opt) {
    LandmarkSet ls;
    ls.disk = disk;
    ls.zeros = find_zeros(ev, disk, opt, &ls.diagnostics);
    ls.criticals = find_critical_points(ev, disk, opt, &ls.diagnostics);
    for (const auto& z : ls.zeros)
        for (const auto& c : ls.criticals)
            if (std::abs(z.position - c.position) < opt.dedup_radius)
                ++ls.diagnostics.coincident_pairs;
    return ls;
}

CountStats count_stats(const LandmarkSet& ls, cplx center, double rho) {
    if (std::abs(center - ls.disk.center) + rho > ls.disk.radius + 1e-12)
        throw DiskOutOfBounds("count_stats: counting disk leaves the landmark-set disk");
    CountStats st;
    for (const auto& z : ls.zeros)
        if (std::abs(z.position - center) < rho) ++st.nz;
    for (const auto& c : ls.criticals) {
        if (std::abs(c.position - center) >= rho) continue;
        ++st.nc;
        if (c.kind == LandmarkKind::Saddle)
            ++st.ncp;
        else if (c.kind == LandmarkKind::LocalMax)
            ++st.ncm;
        else
            ++st.ndeg;
    }
    return st;
}

long winding_number(const JetEvaluator& ev, double radius, bool field_F) {
    constexpr double kTwoPi = 6.283185307179586476925286766559;
    for (int m = 1024; m <= (1 << 20); m *= 2) {
        double total = 0.0, max_step = 0.0;
        bool degenerate = false;
        cplx prev;
        for (int k = 0; k <= m; ++k) {
            const double ang = kTwoPi * static_cast<double>(k % m) / m;
            const WeightedJet j = ev.jet(std::polar(radius, ang));
            const cplx v = field_F ? j.wF : j.wG;
            if (std::abs(v) < 1e-13) {
                degenerate = true;
                break;
            }
            if (k == 0) {
                prev = v;
                continue;
            }
            const double step = std::arg(v / prev);
            max_step = std::max(max_step, std::abs(step));
            total += step;
            prev = v;
        }
        if (degenerate) throw Error("winding_number: field nearly vanishes on the contour");
        if (max_step < 0.8) {
            const double w = total / kTwoPi;
            const long rounded = std::lround(w);
            if (std::abs(w - static_cast<double>(rounded)) < 0.01) return rounded;
        }
    }
    throw Error("winding_number: phase tracking did not stabilize");
}

WindingResult winding_number_safe(const JetEvaluator& ev, double radius, bool field_F) {
    const double nudges[] = {0.0,    0.0037, -0.0037, 0.0074, -0.0074,
                             0.0111, -0.0111, 0.0148, -0.0148};
    for (const double d : nudges) {
        const double r = radius + d;
        if (r <= 0.0 || r > ev.stable_radius()) continue;
        try {
            return {winding_number(ev, r, field_F), r};
        } catch (const Error&) {
            // contour too close to a landmark; try the next nudge
        }
    }
    throw Error("winding_number_safe: no nudged contour stabilized");
}

void save_landmarks_csv(const LandmarkSet& ls, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("save_landmarks_csv: cannot open " + path);
    char buf[192];
    out << "# geflab-csv v1 landmarks\n";
    std::snprintf(buf, sizeof buf,
                  "# disk_center_re=%.17g disk_center_im=%.17g disk_radius=%.17g\n",
                  ls.disk.center.real(), ls.disk.center.imag(), ls.disk.radius);
    out << buf;
    out << "re,im,kind,jac_w,residual\n";
    auto row = [&](const Landmark& lm) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%s,%.17g,%.17g\n", lm.position.real(),
                      lm.position.imag(), landmark_kind_name(lm.kind), lm.jac_w, lm.residual);
        out << buf;
    };
    for (const auto& z : ls.zeros) row(z);
    for (const auto& c : ls.criticals) row(c);
}

} // namespace geflab
