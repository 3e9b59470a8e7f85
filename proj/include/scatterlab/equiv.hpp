// Equivalence machinery: exhaustive GL(2,q^n) / GammaL(2,q^n) witnesses for
// code equivalence, the closed-form criterion for the psi family (t > 4),
// PGL / PGammaL equivalence of linear sets on the line, orbit classification
// with the floor-formula lower bounds, the explicit adjoint-code witness,
// automorphism groups, and the norm criterion for binomial codes.

#pragma once

#include <map>
#include <string>

#include "scatterlab/family.hpp"
#include "scatterlab/mrd.hpp"

namespace scatterlab {

// Certificate that U_f is carried onto U_g by the semilinear map
// x -> x^(p^rho_exp) followed by the invertible matrix (a b; c d):
// with f' the coefficient-wise p^rho_exp image of f,
//     g(a x + b f'(x)) = c x + d f'(x)   for all x.
// For linear-set witnesses the same data acts projectively:
// (1 : m) -> ((a + b m') : (c + d m')) with m' = m^(p^rho_exp).
struct EquivWitness {
    Fqn a, b, c, d;
    int rho_exp = 0;
};

enum class ScanStrategy {
    Auto,       // decoupled when the supports allow it, else the hash join
    Join,       // O(q^n) hash join equivalent to the full (a,b) scan
    Decoupled,  // independent a- and b-scans (disjoint-support family shape)
};

struct EquivOptions {
    int jobs = 0;
    int max_bits = kDefaultEnumBits;
    ScanStrategy strategy = ScanStrategy::Auto;
};

// first (a, b) in enumeration order with g(ax + bf(x)) in span{x, f} and an
// invertible matrix; exhaustive over all q^2n pairs (organized as O(q^n))
std::optional<EquivWitness> gl2_equiv_bruteforce(const LinPoly& f, const LinPoly& g,
                                                 const EquivOptions& opts = {});

// loops rho over all rn field automorphisms applied to f's coefficients
std::optional<EquivWitness> gammal2_equiv(const LinPoly& f, const LinPoly& g,
                                          const EquivOptions& opts = {});

// exhaustive evaluation re-check of a witness
bool verify_code_witness(const LinPoly& f, const LinPoly& g, const EquivWitness& w,
                         const ScanOptions& opts = {});

// closed-form equivalence of C_h and C_k (t > 4 only):
//   t != 2 (mod 4):  h = +-k^rho;   t = 2 (mod 4):  h = l k^rho, l^(q^2+1) = 1
bool code_equiv_criterion(const FieldCtx& ctx, const Fqn& h, const Fqn& k);

enum class ClassifyMode { Auto, Criterion, Oracle };

struct OrbitReport {
    std::string relation;  // "code_equiv" | "linset_equiv"
    std::string mode;      // "criterion" | "oracle" | "criterion_assisted"
    std::vector<std::vector<Fqn>> classes;          // lex-sorted members and classes
    std::vector<std::pair<Fqn, std::uint64_t>> multiplicity;  // h -> xi_h or eps_h
    std::optional<std::uint64_t> bound;             // floor-formula lower bound (t > 4)
    bool bound_satisfied = true;
    // linset classification only: sizes of the code classes merged into each
    // linear-set class, and whether the merged multiplicities agree
    std::vector<std::vector<std::uint64_t>> class_code_sizes;
    bool epsilon_uniform = true;

    std::uint64_t class_count() const { return classes.size(); }
};

OrbitReport classify_codes(const FieldCtx& ctx, ClassifyMode mode = ClassifyMode::Auto,
                           const EquivOptions& opts = {});

struct LinsetOptions {
    int jobs = 0;
    int max_bits = kDefaultEnumBits;
    std::uint64_t max_table = 2048;  // full add/mul tables for the 3-point search
};

// 3-point search: the three lex-least points of Lf are pinned to the frame
// (inf, 0, 1); ordered point pairs of Lg pick the images of the first two and
// the remaining dilation parameter enumerates the third
std::optional<EquivWitness> linset_pgl_equiv(const LinearSet& lf, const LinearSet& lg,
                                             const LinsetOptions& opts = {});

std::optional<EquivWitness> linset_pgammal_equiv(const LinearSet& lf, const LinearSet& lg,
                                                 const LinsetOptions& opts = {});

bool verify_linset_witness(const LinearSet& lf, const LinearSet& lg, const EquivWitness& w);

// necessary coefficient identities for L_f = L_g
bool lemma_coeff_identities(const LinPoly& f, const LinPoly& g);

OrbitReport classify_linsets(const FieldCtx& ctx, ClassifyMode mode = ClassifyMode::Auto,
                             const LinsetOptions& opts = {});

// relation between the ratio-value sets of f and g that a projectivity can
// realize on this family: "scaling" (d * sigma(Rg) = Rf) or "reciprocal"
// (d / sigma(Rg) = Rf), searched over all field automorphisms sigma
std::optional<std::string> ratio_set_relation(const LinPoly& f, const LinPoly& g,
                                              const ScanOptions& opts = {});

struct AdjointEquivalence {
    LinPoly g;        // h * adjoint(psi_h)(x / h)
    EquivWitness witness;  // a = d = 0 form: c x = psi_h(b g(x)) for all x
};

// explicit witness that the adjoint code is equivalent to C_h, verified by
// full evaluation
AdjointEquivalence adjoint_equiv_witness(const FieldCtx& ctx, const Fqn& h,
                                         const ScanOptions& opts = {});

struct AutReport {
    std::vector<int> exponents;        // H as automorphism exponents e (x -> x^(p^e))
    std::uint64_t order = 0;           // (q^n-1)(q^2-1)|H| when asserted, else 0
    bool order_asserted = false;       // only claimed for t > 4
    std::uint64_t right_idealizer_size = 0;  // measured; 0 when skipped
};

AutReport aut_group(const FieldCtx& ctx, const Fqn& h, bool with_idealizer = true,
                    const ScanOptions& opts = {});

// norm criterion for eta x^(q^s) + x^(q^(n-s)) vs theta x^(q^t) + x^(q^(n-t))
bool lp_equiv_criterion(const FieldCtx& ctx, int s, int t_exp, const Fqn& eta, const Fqn& theta);

}  // namespace scatterlab
