// q-polynomials sum c_i x^(q^i) over F_(q^n), reduced modulo x^(q^n) - x:
// evaluation, composition, adjoint, the matrix bijection with n x n matrices
// over F_q, rank/kernel, inversion and span membership.
//
// Matrix convention: row i of to_matrix(f) holds the coordinates of
// f(alpha^i), so coordinate rows act on the right (x ~ u, f(x) ~ u*M) and
// to_matrix(compose(f, g)) == to_matrix(g) * to_matrix(f).

#pragma once

#include <optional>
#include <vector>

#include "scatterlab/gf.hpp"

namespace scatterlab {

struct LinPoly {
    const FieldCtx* ctx = nullptr;
    std::vector<Fqn> c;  // c[i] multiplies x^(q^i); always exactly n slots

    bool operator==(const LinPoly& o) const { return c == o.c; }
};

struct MatrixFq {
    int rows = 0, cols = 0;
    std::vector<std::uint16_t> a;  // row-major

    std::uint16_t& at(int i, int j) { return a[(std::size_t)i * cols + j]; }
    std::uint16_t at(int i, int j) const { return a[(std::size_t)i * cols + j]; }
};

LinPoly lp_zero(const FieldCtx& ctx);
LinPoly lp_monomial(const FieldCtx& ctx, int i, const Fqn& coeff);
LinPoly lp_identity(const FieldCtx& ctx);  // x itself
LinPoly lp_add(const LinPoly& f, const LinPoly& g);
LinPoly lp_sub(const LinPoly& f, const LinPoly& g);
LinPoly lp_scale(const Fqn& s, const LinPoly& f);
bool lp_is_zero(const LinPoly& f);
std::vector<int> lp_support(const LinPoly& f);

Fqn lp_eval(const LinPoly& f, const Fqn& x);
// images of the power basis (rows of the matrix representation)
std::vector<Fqn> lp_basis_images(const LinPoly& f);

// f after g, reduced mod x^(q^n) - x; throws ConfigError on context mismatch
LinPoly lp_compose(const LinPoly& f, const LinPoly& g);

// adjoint with respect to the bilinear form Tr(xy)
LinPoly lp_adjoint(const LinPoly& f);

// coefficient-wise x -> x^(p^e)
LinPoly lp_aut(const LinPoly& f, int e);

MatrixFq lp_to_matrix(const LinPoly& f);
LinPoly lp_from_matrix(const FieldCtx& ctx, const MatrixFq& m);

struct RankKernel {
    int rank = 0;
    std::vector<Fqn> kernel;  // canonical echelon basis of {x : f(x) = 0} over F_q
};
RankKernel lp_rank_kernel(const LinPoly& f);

// compositional inverse; requires rank n
LinPoly lp_invert(const LinPoly& f);

// coefficients expressing f as an F_(q^n)-combination of gens, if any
std::optional<std::vector<Fqn>> lp_span_membership(const LinPoly& f,
                                                   const std::vector<LinPoly>& gens);

// --- F_q matrix helpers (shared by mrd/equiv) ---

int matrix_rank(const FieldCtx& ctx, MatrixFq m);
// canonical basis of {v : M v = 0} (column vectors returned as rows)
std::vector<std::vector<std::uint16_t>> matrix_nullspace(const FieldCtx& ctx, MatrixFq m);
MatrixFq matrix_mul(const FieldCtx& ctx, const MatrixFq& a, const MatrixFq& b);
MatrixFq matrix_inverse(const FieldCtx& ctx, MatrixFq m);  // throws on singular
MatrixFq matrix_transpose(const MatrixFq& m);

// lexicographically least nonzero element of the F_q-span of the given
// vectors (coordinates over F_q); enumeration-backed
Fqn lex_least_nonzero_in_span(const FieldCtx& ctx, const std::vector<Fqn>& basis);

}  // namespace scatterlab
