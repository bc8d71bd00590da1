#pragma once

#include <string>
#include <vector>

#include "geflab/gef.hpp"

namespace geflab {

enum class LandmarkKind { Zero, Saddle, LocalMax, Degenerate };

const char* landmark_kind_name(LandmarkKind k);

// A located zero of G or critical point of G (zero of F).  jac_w is the
// Jacobian of F scaled by e^{-|z|^2}; the weight makes it a stationary O(1)
// quantity across the disk.  residual is the weighted |G| or |F| at the
// accepted point.
struct Landmark {
    cplx position;
    LandmarkKind kind = LandmarkKind::Zero;
    double jac_w = 0.0;
    double residual = 0.0;
};

struct Disk {
    cplx center;
    double radius = 0.0;
};

struct SearchOptions {
    double h_seed_zero = 0.25; // grid pitch for zero seeding (mean spacing ~ 1)
    double h_seed_crit = 0.2;  // critical points are denser, spacing ~ sqrt(pi*3/5)
    double tol_accept = 1e-9;  // weighted residual acceptance
    double dedup_radius = 1e-6;
    double tol_jac = 1e-12; // |jac_w| at or below this is Degenerate
    int max_newton_iters = 40;
    long iteration_budget = 400000000; // total jet evaluations per search call
};

struct LandmarkDiagnostics {
    long newton_failures = 0;
    long dedup_merges = 0;
    // zero/critical pairs closer than dedup_radius; flagged, never coerced
    long coincident_pairs = 0;
};

struct LandmarkSet {
    Disk disk;
    std::vector<Landmark> zeros;
    std::vector<Landmark> criticals;
    LandmarkDiagnostics diagnostics;
};

std::vector<Landmark> find_zeros(const JetEvaluator& ev, Disk disk, const SearchOptions& opt = {},
                                 LandmarkDiagnostics* diag = nullptr);
std::vector<Landmark> find_critical_points(const JetEvaluator& ev, Disk disk,
                                           const SearchOptions& opt = {},
                                           LandmarkDiagnostics* diag = nullptr);
LandmarkSet find_landmarks(const JetEvaluator& ev, Disk disk, const SearchOptions& opt = {});

double weighted_jacobian(const WeightedJet& jet); // |wdF|^2 - |wG|^2
LandmarkKind classify(const WeightedJet& jet, double tol_jac = 1e-12);

struct CountStats {
    long nz = 0;  // zeros
    long nc = 0;  // all critical landmarks (ncp + ncm + ndeg)
    long ncp = 0; // saddles (index +1)
    long ncm = 0; // local maxima (index -1)
    long ndeg = 0;
};

// Strict-interior counts in B_rho(center); the disk must sit inside the
// landmark-set disk (DiskOutOfBounds otherwise).
CountStats count_stats(const LandmarkSet& ls, cplx center, double rho);

// Winding number of the weighted field (G or F) along |z| = R by adaptive
// phase tracking.  Throws Error when the field nearly vanishes on the
// contour; use the _safe variant to nudge the radius away from landmarks.
long winding_number(const JetEvaluator& ev, double radius, bool field_F);

struct WindingResult {
    long winding = 0;
    double radius_used = 0.0;
};
WindingResult winding_number_safe(const JetEvaluator& ev, double radius, bool field_F);

void save_landmarks_csv(const LandmarkSet& ls, const std::string& path);

} // namespace geflab
