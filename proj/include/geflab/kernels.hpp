#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "geflab/linalg.hpp"

namespace geflab::kernels {

// Exact covariance kernel E[f(z) conj(g(w))] for derivative functionals of
// the Gaussian entire function, represented as
//
//     sum_{a,b,c,d} coef(a,b,c,d) * z^a zbar^b wbar^c w^d  *  e^{z wbar}.
//
// The base kernel E[G(z) conj(G(w))] = e^{z wbar} is the constant-1
// polynomial; applying derivatives keeps the family closed.
class PolyExpKernel {
  public:
    static PolyExpKernel one(); // kernel of (G, G)

    void add(int a, int b, int c, int d, cplx coef);
    cplx coef(int a, int b, int c, int d) const;

    PolyExpKernel& operator+=(const PolyExpKernel& other);
    PolyExpKernel scaled(cplx s) const;

    // Largest coefficient distance; 0 means exact equality of the sparse maps.
    double coef_distance(const PolyExpKernel& other) const;

    cplx eval(cplx z, cplx w) const;

    // Debug dump, one monomial per line: "(re,im) * z^a zb^b wb^c w^d".
    // Lines are ordered by (a,b,c,d).
    std::string dump() const;

    // Kernel rules for the primitive operators.  First side acts on f in
    // E[f(z) conj(g(w))], second side on g; the second-side rules already
    // account for the conjugation.
    PolyExpKernel first_d() const;        // f -> df
    PolyExpKernel first_dbar() const;     // f -> dbar f
    PolyExpKernel first_mulconj() const;  // f -> zbar f
    PolyExpKernel second_d() const;       // g -> dg
    PolyExpKernel second_dbar() const;    // g -> dbar g
    PolyExpKernel second_mulconj() const; // g -> wbar g

  private:
    static uint32_t key(int a, int b, int c, int d) {
        return (static_cast<uint32_t>(a) << 24) | (static_cast<uint32_t>(b) << 16) |
               (static_cast<uint32_t>(c) << 8) | static_cast<uint32_t>(d);
    }
    std::map<uint32_t, cplx> coeffs_;
};

// Primitive operators on the function side.
enum class Op : uint8_t { D, Dbar, MulConjZ };

using Word = std::vector<Op>; // applied to G left to right

enum class Side { First, Second };
enum class KernelOp { D, Dbar, CovD, Dx, Dy }; // CovD is the covariant dbar*

// Apply one (possibly composite) operator to a pair kernel, on the chosen
// side.  Dx = D + Dbar and Dy = i(D - Dbar) expand eagerly; on the second
// side composite coefficients enter conjugated.
PolyExpKernel apply_operator(const PolyExpKernel& k, Side side, KernelOp op);

// A derivative functional of G at a point: a complex-linear combination of
// operator words applied to G.
struct DerivFunctional {
    cplx point;
    std::vector<std::pair<cplx, Word>> terms;

    static DerivFunctional G(cplx z);
    static DerivFunctional dG(int k, cplx z); // d^k G
    static DerivFunctional F(cplx z);         // dbar* G = zbar G - dG
    static DerivFunctional dF(cplx z);        // d F
    static DerivFunctional dbarF(cplx z);     // dbar F (equals G)
    // Real-axis derivative F^{(m,n)}; throws OrderTooHigh for m+n > 4.
    static DerivFunctional F_real_deriv(int m, int n, cplx z);
};

// Wirtinger expansion of the real-derivative operator (d/dx)^m (d/dy)^n as a
// combination of d^j dbar^k; m+n capped at 4 (OrderTooHigh beyond).
struct WirtingerTerm {
    cplx coef;
    int n_d;
    int n_dbar;
};
std::vector<WirtingerTerm> real_derivative_expansion(int m, int n);

// E[a(z_a) conj(b(z_b))] evaluated through the kernel calculus.
cplx pair_expectation(const DerivFunctional& a, const DerivFunctional& b);

// Covariance matrix of a list of functionals; Hermitian by construction
// (upper triangle computed, lower mirrored, diagonal forced real).
HermitianCov eval_cov(const std::vector<DerivFunctional>& descs);

} // namespace geflab::kernels
