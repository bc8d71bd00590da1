#include "geflab/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "geflab/parallel.hpp"

namespace geflab {

const char* pair_kind_name(PairKind k) {
    switch (k) {
        case PairKind::zz: return "zz";
        case PairKind::cc: return "cc";
        case PairKind::cpcp: return "c+c+";
        case PairKind::cmcm: return "c-c-";
        case PairKind::cpcm: return "c+c-";
        case PairKind::zc: return "zc";
        case PairKind::zcp: return "zc+";
        case PairKind::zcm: return "zc-";
    }
    return "?";
}

PairKind pair_kind_from_name(const std::string& name) {
    for (const PairKind k : {PairKind::zz, PairKind::cc, PairKind::cpcp, PairKind::cmcm,
                             PairKind::cpcm, PairKind::zc, PairKind::zcp, PairKind::zcm})
        if (name == pair_kind_name(k)) return k;
    throw Error("unknown pair kind: " + name);
}

LandmarkBatch build_landmark_batch(int samples, double r_work, uint64_t master_seed, int threads,
                                   const SearchOptions& opt) {
    LandmarkBatch batch;
    batch.r_work = r_work;
    batch.master_seed = master_seed;
    batch.sets.resize(static_cast<size_t>(samples));
    parallel_for(samples, threads, [&](long i) {
        auto s = sample_gef(r_work, master_seed, static_cast<uint64_t>(i));
        SampleEvaluator ev(s);
        batch.sets[static_cast<size_t>(i)] = find_landmarks(ev, {0.0, r_work}, opt);
    });
    return batch;
}

std::vector<cplx> tile_disk_centers(double rho, double r_work, double margin) {
    const double pitch = 2.0 * rho + 0.1;
    const double reach = r_work - rho - margin;
    std::vector<cplx> centers;
    const int m = static_cast<int>(std::floor(reach / pitch));
    for (int i = -m; i <= m; ++i)
        for (int j = -m; j <= m; ++j) {
            const cplx c(i * pitch, j * pitch);
            if (std::abs(c) <= reach) centers.push_back(c);
        }
    return centers;
}

namespace {

// Per-disk counts for all tiling disks of one sample, exploiting the
// pitch > 2 rho disjointness: a landmark can only fall in the disk whose
// grid cell it rounds to.
std::vector<CountStats> counts_on_grid(const LandmarkSet& ls, double rho, double r_work,
                                       double margin) {
    const double pitch = 2.0 * rho + 0.1;
    const double reach = r_work - rho - margin;
    const int m = static_cast<int>(std::floor(reach / pitch));
    const int side = 2 * m + 1;
    std::vector<CountStats> cells(static_cast<size_t>(side) * side);

    auto cell_of = [&](cplx p) -> CountStats* {
        const long i = std::lround(p.real() / pitch);
        const long j = std::lround(p.imag() / pitch);
        if (std::abs(i) > m || std::abs(j) > m) return nullptr;
        const cplx c(static_cast<double>(i) * pitch, static_cast<double>(j) * pitch);
        if (std::abs(c) > reach) return nullptr;
        if (std::abs(p - c) >= rho) return nullptr;
        return &cells[static_cast<size_t>(i + m) * side + static_cast<size_t>(j + m)];
    };

    for (const auto& z : ls.zeros)
        if (CountStats* st = cell_of(z.position)) ++st->nz;
    for (const auto& c : ls.criticals) {
        CountStats* st = cell_of(c.position);
        if (!st) continue;
        ++st->nc;
        if (c.kind == LandmarkKind::Saddle)
            ++st->ncp;
        else if (c.kind == LandmarkKind::LocalMax)
            ++st->ncm;
        else
            ++st->ndeg;
    }

    // Collapse to the list of valid centers in a fixed order.
    std::vector<CountStats> out;
    for (int i = -m; i <= m; ++i)
        for (int j = -m; j <= m; ++j) {
            const cplx c(i * pitch, j * pitch);
            if (std::abs(c) <= reach)
                out.push_back(cells[static_cast<size_t>(i + m) * side + static_cast<size_t>(j + m)]);
        }
    return out;
}

struct BatchMean {
    double mean = 0.0;
    double se = 0.0;
};

BatchMean batch_mean(const std::vector<double>& per_sample) {
    BatchMean r;
    const size_t n = per_sample.size();
    if (n == 0) return r;
    double s = 0.0;
    for (double v : per_sample) s += v;
    r.mean = s / static_cast<double>(n);
    if (n > 1) {
        double q = 0.0;
        for (double v : per_sample) q += (v - r.mean) * (v - r.mean);
        r.se = std::sqrt(q / static_cast<double>(n - 1) / static_cast<double>(n));
    }
    return r;
}

} // namespace

double pair_statistic(PairKind kind, const CountStats& st) {
    const double nz = static_cast<double>(st.nz);
    const double ncp = static_cast<double>(st.ncp);
    const double ncm = static_cast<double>(st.ncm);
    const double nc = ncp + ncm; // degenerates excluded
    switch (kind) {
        case PairKind::zz: return nz * (nz - 1.0);
        case PairKind::cc: return nc * (nc - 1.0);
        case PairKind::cpcp: return ncp * (ncp - 1.0);
        case PairKind::cmcm: return ncm * (ncm - 1.0);
        case PairKind::cpcm: return ncp * ncm;
        case PairKind::zc: return nz * nc;
        case PairKind::zcp: return nz * ncp;
        case PairKind::zcm: return nz * ncm;
    }
    return 0.0;
}

FirstMoments estimate_first_moments(const LandmarkBatch& batch, double rho) {
    const size_t s = batch.sets.size();
    std::vector<double> mz(s), mc(s), mcp(s), mcm(s);
    long disks_total = 0;
    for (size_t i = 0; i < s; ++i) {
        const auto counts = counts_on_grid(batch.sets[i], rho, batch.r_work, 0.1);
        double az = 0.0, ac = 0.0, acp = 0.0, acm = 0.0;
        for (const auto& st : counts) {
            az += static_cast<double>(st.nz);
            ac += static_cast<double>(st.nc);
            acp += static_cast<double>(st.ncp);
            acm += static_cast<double>(st.ncm);
        }
        const double nd = static_cast<double>(counts.size());
        if (i == 0) disks_total = static_cast<long>(counts.size()) * static_cast<long>(s);
        mz[i] = az / nd;
        mc[i] = ac / nd;
        mcp[i] = acp / nd;
        mcm[i] = acm / nd;
    }
    FirstMoments fm;
    const auto bz = batch_mean(mz), bc = batch_mean(mc), bp = batch_mean(mcp), bm = batch_mean(mcm);
    fm.nz = {bz.mean, bz.se};
    fm.nc = {bc.mean, bc.se};
    fm.ncp = {bp.mean, bp.se};
    fm.ncm = {bm.mean, bm.se};
    fm.n_disks = disks_total;
    fm.n_samples = static_cast<long>(s);
    return fm;
}

RadialProfile estimate_pair_moment(const LandmarkBatch& batch, PairKind kind,
                                   const std::vector<double>& radii) {
    RadialProfile profile;
    bool any_event = false;
    std::vector<double> sorted = radii;
    std::sort(sorted.begin(), sorted.end());
    for (const double rho : sorted) {
        const size_t s = batch.sets.size();
        std::vector<double> per_sample(s);
        long disks = 0;
        for (size_t i = 0; i < s; ++i) {
            const auto counts = counts_on_grid(batch.sets[i], rho, batch.r_work, 0.1);
            double acc = 0.0;
            for (const auto& st : counts) acc += pair_statistic(kind, st);
            if (acc > 0.0) any_event = true;
            per_sample[i] = acc / static_cast<double>(counts.size());
            if (i == 0) disks = static_cast<long>(counts.size()) * static_cast<long>(s);
        }
        const auto bm = batch_mean(per_sample);
        profile.rows.push_back({rho, bm.mean, bm.se, static_cast<long>(s), disks});
    }
    if (!any_event)
        throw BudgetTooSmall("estimate_pair_moment: no pair events at any radius");
    return profile;
}

McResult pair_moment_on_centers(const LandmarkBatch& batch, PairKind kind,
                                const std::vector<cplx>& centers, double rho) {
    const size_t s = batch.sets.size();
    std::vector<double> per_sample(s);
    for (size_t i = 0; i < s; ++i) {
        double acc = 0.0;
        for (const cplx c : centers) {
            const auto st = count_stats(batch.sets[i], c, rho);
            acc += pair_statistic(kind, st);
        }
        per_sample[i] = acc / static_cast<double>(centers.size());
    }
    const auto bm = batch_mean(per_sample);
    return {bm.mean, bm.se};
}

ExponentFit fit_exponent(const RadialProfile& profile, double lo, double hi) {
    std::vector<double> lx, ly, w;
    for (const auto& row : profile.rows) {
        if (row.x < lo * (1.0 - 1e-12) || row.x > hi * (1.0 + 1e-12)) continue;
        if (!(row.value > 3.0 * row.se) || row.value <= 0.0) continue;
        lx.push_back(std::log(row.x));
        ly.push_back(std::log(row.value));
        const double rel = row.se > 0.0 ? row.se / row.value : 1e-12;
        w.push_back(1.0 / (rel * rel));
    }
    if (lx.size() < 4)
        throw InsufficientSignal("fit_exponent: fewer than 4 usable rows in range");

    double sw = 0.0, swx = 0.0, swy = 0.0;
    for (size_t i = 0; i < lx.size(); ++i) {
        sw += w[i];
        swx += w[i] * lx[i];
        swy += w[i] * ly[i];
    }
    const double xbar = swx / sw, ybar = swy / sw;
    double sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < lx.size(); ++i) {
        sxx += w[i] * (lx[i] - xbar) * (lx[i] - xbar);
        sxy += w[i] * (lx[i] - xbar) * (ly[i] - ybar);
    }
    ExponentFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = ybar - fit.slope * xbar;
    fit.slope_se = std::sqrt(1.0 / sxx);
    fit.lo = lo;
    fit.hi = hi;
    fit.n_used = static_cast<int>(lx.size());
    return fit;
}

McResult repulsion_factor(const LandmarkBatch& batch, PairKind kind, double rho) {
    if (kind != PairKind::cc && kind != PairKind::cpcm)
        throw Error("repulsion_factor: kind must be cc or c+c-");
    const size_t s = batch.sets.size();
    // Per-sample sums of the numerator statistic and the first-moment counts.
    std::vector<double> num(s), a1(s), a2(s);
    double disks = 0.0;
    for (size_t i = 0; i < s; ++i) {
        const auto counts = counts_on_grid(batch.sets[i], rho, batch.r_work, 0.1);
        disks = static_cast<double>(counts.size());
        double n = 0.0, x = 0.0, y = 0.0;
        for (const auto& st : counts) {
            n += pair_statistic(kind, st);
            if (kind == PairKind::cc) {
                x += static_cast<double>(st.ncp + st.ncm);
                y = x;
            } else {
                x += static_cast<double>(st.ncp);
                y += static_cast<double>(st.ncm);
            }
        }
        num[i] = n / disks;
        a1[i] = x / disks;
        a2[i] = y / disks;
    }
    auto ratio_of = [&](double n, double x, double y) {
        return kind == PairKind::cc ? n / (x * x) : n / (x * y);
    };
    double tn = 0.0, tx = 0.0, ty = 0.0;
    for (size_t i = 0; i < s; ++i) {
        tn += num[i];
        tx += a1[i];
        ty += a2[i];
    }
    const double full = ratio_of(tn / s, tx / s, ty / s);
    // Drop-one jackknife over samples.
    double jsum = 0.0, jsq = 0.0;
    for (size_t i = 0; i < s; ++i) {
        const double r = ratio_of((tn - num[i]) / (s - 1.0), (tx - a1[i]) / (s - 1.0),
                                  (ty - a2[i]) / (s - 1.0));
        jsum += r;
        jsq += r * r;
    }
    const double jmean = jsum / static_cast<double>(s);
    const double jvar = std::max(0.0, (jsq / static_cast<double>(s) - jmean * jmean));
    McResult out;
    out.value = full;
    out.se = std::sqrt(jvar * (static_cast<double>(s) - 1.0));
    return out;
}

void save_profile_csv(const RadialProfile& profile, PairKind kind, long n_samples,
                      const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("save_profile_csv: cannot open " + path);
    out << "# geflab-csv v1 pair-profile\n";
    out << "pair,rho,estimate,stderr,n_samples,n_disks\n";
    char buf[192];
    for (const auto& row : profile.rows) {
        std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g,%ld,%ld\n", pair_kind_name(kind),
                      row.x, row.value, row.se, n_samples, row.n_disks);
        out << buf;
    }
}

} // namespace geflab
