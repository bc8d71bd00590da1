#include "geflab/gef.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace geflab {

int truncation_for_radius(double r_max) {
    return static_cast<int>(std::ceil(r_max * r_max + 10.0 * r_max + 50.0));
}

double truncation_tail_bound(int n, double r) {
    if (r == 0.0) return 0.0;
    const double r2 = r * r;
    // First tail term in log space, then plain summation of the decreasing
    // (once n > r^2) remainder.
    double term = std::exp(static_cast<double>(n + 1) * std::log(r2) - std::lgamma(n + 2.0));
    double sum = 0.0;
    for (int k = n + 1; k < n + 1000000; ++k) {
        sum += term;
        term *= r2 / static_cast<double>(k + 1);
        if (static_cast<double>(k) > r2 && term < sum * 1e-18) break;
    }
    return sum;
}

GefSample sample_gef(double r_max, RngStream& rng) {
    if (!(r_max > 0.0) || r_max > 12.0)
        throw RadiusTooLarge("sample_gef: r_max must lie in (0, 12]");
    GefSample s;
    s.r_max = r_max;
    const int n = truncation_for_radius(r_max);
    s.coeffs.resize(static_cast<size_t>(n) + 1);
    for (auto& c : s.coeffs) c = rng.cnormal();
    return s;
}

GefSample sample_gef(double r_max, uint64_t master_seed, uint64_t task_id) {
    RngStream rng(master_seed, task_id);
    GefSample s = sample_gef(r_max, rng);
    s.master_seed = master_seed;
    s.task_id = task_id;
    return s;
}

SampleEvaluator::SampleEvaluator(const GefSample& s) : sample_(&s) {
    sqrt_.resize(s.coeffs.size() + 3);
    inv_sqrt_.resize(sqrt_.size());
    for (size_t k = 0; k < sqrt_.size(); ++k) {
        sqrt_[k] = std::sqrt(static_cast<double>(k));
        inv_sqrt_[k] = k > 0 ? 1.0 / sqrt_[k] : 0.0;
    }
}

WeightedJet SampleEvaluator::jet(cplx z) const {
    const double az = std::abs(z);
    if (az > sample_->r_max * (1.0 + 1e-12))
        throw OutsideStableDisk("eval_jet: |z| exceeds the sample's stable radius");

    const auto& xi = sample_->coeffs;
    const int n = static_cast<int>(xi.size()) - 1;

    // t_k = e^{-|z|^2/2} z^k / sqrt(k!); every partial product stays within
    // [e^{-|z|^2/2}, 1], so no overflow management is needed.  The weighted
    // series for d^j G uses coefficient sqrt((k+j)...(k+1)) * t_k for xi_{k+j}.
    cplx t = std::exp(cplx(-0.5 * az * az, 0.0));
    cplx g(0.0, 0.0), dg(0.0, 0.0), d2g(0.0, 0.0), d3g(0.0, 0.0);
    for (int k = 0; k <= n; ++k) {
        g += xi[static_cast<size_t>(k)] * t;
        if (k + 1 <= n) dg += xi[static_cast<size_t>(k) + 1] * (sqrt_[static_cast<size_t>(k) + 1] * t);
        if (k + 2 <= n)
            d2g += xi[static_cast<size_t>(k) + 2] *
                   (sqrt_[static_cast<size_t>(k) + 2] * sqrt_[static_cast<size_t>(k) + 1] * t);
        if (k + 3 <= n)
            d3g += xi[static_cast<size_t>(k) + 3] *
                   (sqrt_[static_cast<size_t>(k) + 3] * sqrt_[static_cast<size_t>(k) + 2] *
                    sqrt_[static_cast<size_t>(k) + 1] * t);
        t *= z * inv_sqrt_[static_cast<size_t>(k) + 1];
    }

    WeightedJet j;
    j.point = z;
    j.wG = g;
    j.wdG = dg;
    j.wd2G = d2g;
    j.wd3G = d3g;
    const cplx zb = std::conj(z);
    j.wF = zb * g - dg;
    j.wdF = zb * dg - d2g;
    j.wdbarF = g;
    return j;
}

WeightedJet eval_jet(const GefSample& s, cplx z) { return SampleEvaluator(s).jet(z); }

WeightedJet ShiftedEvaluator::jet(cplx z) const {
    if (std::abs(z) > stable_radius() * (1.0 + 1e-12) + 1e-300)
        throw OutsideStableDisk("shifted jet: |z| + |zeta| exceeds the base stable radius");
    const cplx u = z - zeta_;
    const WeightedJet b = base_->jet(u);

    // e^{-|z|^2/2} f_zeta(z) = e^{i Im(z conj(zeta))} e^{-|u|^2/2} f(u):
    // the Gaussian weights and the shift factor combine into a pure phase.
    const cplx zcb = z * std::conj(zeta_);
    const cplx phase = std::exp(cplx(0.0, zcb.imag()));
    const cplx zb = std::conj(zeta_);

    WeightedJet j;
    j.point = z;
    j.wG = phase * b.wG;
    j.wdG = phase * (zb * b.wG + b.wdG);
    j.wd2G = phase * (zb * zb * b.wG + 2.0 * zb * b.wdG + b.wd2G);
    j.wd3G = phase * (zb * zb * zb * b.wG + 3.0 * zb * zb * b.wdG + 3.0 * zb * b.wd2G + b.wd3G);
    const cplx zconj = std::conj(z);
    j.wF = zconj * j.wG - j.wdG;
    j.wdF = zconj * j.wdG - j.wd2G;
    j.wdbarF = j.wG;
    return j;
}

ShiftedEvaluator bargmann_fock_shift(const JetEvaluator& base, cplx zeta) {
    return ShiftedEvaluator(base, zeta);
}

void save_sample_csv(const GefSample& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("save_sample_csv: cannot open " + path);
    char buf[128];
    out << "# geflab-csv v1 gef-sample\n";
    std::snprintf(buf, sizeof buf, "# master_seed=%llu task_id=%llu r_max=%.17g\n",
                  static_cast<unsigned long long>(s.master_seed),
                  static_cast<unsigned long long>(s.task_id), s.r_max);
    out << buf;
    out << "re,im\n";
    for (const cplx& c : s.coeffs) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", c.real(), c.imag());
        out << buf;
    }
}

GefSample load_sample_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("load_sample_csv: cannot open " + path);
    GefSample s;
    std::string line;
    if (!std::getline(in, line) || line.rfind("# geflab-csv v1 gef-sample", 0) != 0)
        throw Error("load_sample_csv: bad schema header in " + path);
    if (!std::getline(in, line) || line.rfind("# ", 0) != 0)
        throw Error("load_sample_csv: missing provenance line in " + path);
    unsigned long long seed = 0, task = 0;
    double rmax = 0.0;
    if (std::sscanf(line.c_str(), "# master_seed=%llu task_id=%llu r_max=%lg", &seed, &task,
                    &rmax) != 3)
        throw Error("load_sample_csv: bad provenance line in " + path);
    s.master_seed = seed;
    s.task_id = task;
    s.r_max = rmax;
    if (!std::getline(in, line) || line != "re,im")
        throw Error("load_sample_csv: missing column header in " + path);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        double re = 0.0, im = 0.0;
        if (std::sscanf(line.c_str(), "%lg,%lg", &re, &im) != 2)
            throw Error("load_sample_csv: bad coefficient row in " + path);
        s.coeffs.emplace_back(re, im);
    }
    return s;
}

} // namespace geflab
