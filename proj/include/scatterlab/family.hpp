// Constructors for the scattered q-polynomial family
//     psi_h(x) = x^q + x^(q^(t-1)) - h^(1-q^(t+1)) x^(q^(t+1)) + h^(1-q^(2t-1)) x^(q^(2t-1))
// over F_(q^2t) (h^(q^t+1) = -1, h outside F_(q^t), q odd, t >= 3), its
// structural split psi = L + M, the auxiliary maps R and T, and the classical
// scattered families used for comparison.

#pragma once

#include <optional>
#include <string>

#include "scatterlab/linpoly.hpp"

namespace scatterlab {

struct FamilySpec {
    enum class Kind { PseudoRegulus, LunardonPolverino, LongobardiZanella, Psi };
    Kind kind;
    int s = 1;       // monomial exponent (PseudoRegulus / LunardonPolverino)
    int k_exp = 1;   // composition count (LongobardiZanella)
    Fqn delta;       // LunardonPolverino coefficient
    Fqn h;           // Psi parameter

    // grammar: "pr:s=1" | "lp:s=1,delta=<hex>" | "lz:k=1" | "psi:h=<hex>"
    static FamilySpec parse(const FieldCtx& ctx, const std::string& text);
};

// structured admissibility record; same four conditions as diagnose_h
using HCheck = HDiagnostic;
HCheck check_h(const FieldCtx& ctx, const Fqn& h);

// throws ConfigError naming the failed condition unless h is admissible
void require_admissible(const FieldCtx& ctx, const Fqn& h);

LinPoly psi(const FieldCtx& ctx, const Fqn& h);

// an F_q-subspace given both ways: as the kernel of a defining q-polynomial
// and as a canonical echelon basis
struct SubspaceDesc {
    LinPoly defining;
    std::vector<Fqn> basis;

    int dim() const { return (int)basis.size(); }
};

struct LMSplit {
    LinPoly L, M;
    SubspaceDesc ker_L, ker_M, im_L, im_M;
};

// psi = L + M with L = x^q - h^(1-q^(t+1)) x^(q^(t+1)),
// M = x^(q^(t-1)) + h^(1-q^(2t-1)) x^(q^(2t-1)); kernel and image descriptions
// are cross-checked against the actual maps at construction
LMSplit lm_split(const FieldCtx& ctx, const Fqn& h);

struct RTMaps {
    LinPoly R, T;                      // x^(q^t) + h^(q^(t-1)-q) x and x^(q^t) + h^(q-q^(t-1)) x
    Fqn rho, tau;                      // lex-least nonzero kernel elements
    Fqn scale;                         // h^(q^(t-1)-q); ker T = scale * ker R
};
RTMaps rt_maps(const FieldCtx& ctx, const Fqn& h);

LinPoly known_family(const FieldCtx& ctx, const FamilySpec& spec);

}  // namespace scatterlab
