#include "scatterlab/linpoly.hpp"

#include <algorithm>
#include <cmath>

namespace scatterlab {

namespace {

void check_ctx(const LinPoly& f, const LinPoly& g) {
    if (!(*f.ctx == *g.ctx)) throw ConfigError("context mismatch between q-polynomials");
}

// Gaussian elimination over F_(q^n): solve A x = b, A square or rectangular.
// Returns one solution (free unknowns set to zero) or nothing.
std::optional<std::vector<Fqn>> solve_fqn(const FieldCtx& ctx, std::vector<std::vector<Fqn>> A,
                                          std::vector<Fqn> b) {
    int rows = (int)A.size();
    int cols = rows ? (int)A[0].size() : 0;
    std::vector<int> pivot_col;
    int row = 0;
    for (int col = 0; col < cols && row < rows; ++col) {
        int sel = -1;
        for (int i = row; i < rows; ++i)
            if (!ctx.is_zero(A[i][col])) {
                sel = i;
                break;
            }
        if (sel < 0) continue;
        std::swap(A[sel], A[row]);
        std::swap(b[sel], b[row]);
        Fqn piv = ctx.inv(A[row][col]);
        for (int j = col; j < cols; ++j) A[row][j] = ctx.mul(A[row][j], piv);
        b[row] = ctx.mul(b[row], piv);
        for (int i = 0; i < rows; ++i) {
            if (i == row || ctx.is_zero(A[i][col])) continue;
            Fqn f = A[i][col];
            for (int j = col; j < cols; ++j)
                A[i][j] = ctx.sub(A[i][j], ctx.mul(f, A[row][j]));
            b[i] = ctx.sub(b[i], ctx.mul(f, b[row]));
        }
        pivot_col.push_back(col);
        ++row;
    }
    for (int i = row; i < rows; ++i)
        if (!ctx.is_zero(b[i])) return std::nullopt;
    std::vector<Fqn> x(cols, ctx.zero());
    for (int i = 0; i < (int)pivot_col.size(); ++i) x[pivot_col[i]] = b[i];
    return x;
}

}  // namespace

LinPoly lp_zero(const FieldCtx& ctx) {
    return LinPoly{&ctx, std::vector<Fqn>(ctx.n(), ctx.zero())};
}

LinPoly lp_monomial(const FieldCtx& ctx, int i, const Fqn& coeff) {
    LinPoly f = lp_zero(ctx);
    i %= ctx.n();
    if (i < 0) i += ctx.n();
    f.c[i] = coeff;
    return f;
}

LinPoly lp_identity(const FieldCtx& ctx) { return lp_monomial(ctx, 0, ctx.one()); }

LinPoly lp_add(const LinPoly& f, const LinPoly& g) {
    check_ctx(f, g);
    LinPoly h = lp_zero(*f.ctx);
    for (int i = 0; i < f.ctx->n(); ++i) h.c[i] = f.ctx->add(f.c[i], g.c[i]);
    return h;
}

LinPoly lp_sub(const LinPoly& f, const LinPoly& g) {
    check_ctx(f, g);
    LinPoly h = lp_zero(*f.ctx);
    for (int i = 0; i < f.ctx->n(); ++i) h.c[i] = f.ctx->sub(f.c[i], g.c[i]);
    return h;
}

LinPoly lp_scale(const Fqn& s, const LinPoly& f) {
    LinPoly h = lp_zero(*f.ctx);
    for (int i = 0; i < f.ctx->n(); ++i) h.c[i] = f.ctx->mul(s, f.c[i]);
    return h;
}

bool lp_is_zero(const LinPoly& f) {
    for (const Fqn& x : f.c)
        if (!f.ctx->is_zero(x)) return false;
    return true;
}

std::vector<int> lp_support(const LinPoly& f) {
    std::vector<int> s;
    for (int i = 0; i < f.ctx->n(); ++i)
        if (!f.ctx->is_zero(f.c[i])) s.push_back(i);
    return s;
}

Fqn lp_eval(const LinPoly& f, const Fqn& x) {
    const FieldCtx& ctx = *f.ctx;
    Fqn acc = ctx.zero(), conj = x;
    for (int i = 0; i < ctx.n(); ++i) {
        if (!ctx.is_zero(f.c[i])) acc = ctx.add(acc, ctx.mul(f.c[i], conj));
        if (i + 1 < ctx.n()) conj = ctx.frobenius(conj, 1);
    }
    return acc;
}

std::vector<Fqn> lp_basis_images(const LinPoly& f) {
    const FieldCtx& ctx = *f.ctx;
    std::vector<Fqn> img(ctx.n());
    for (int i = 0; i < ctx.n(); ++i) img[i] = lp_eval(f, ctx.basis()[i]);
    return img;
}

LinPoly lp_compose(const LinPoly& f, const LinPoly& g) {
    check_ctx(f, g);
    const FieldCtx& ctx = *f.ctx;
    int n = ctx.n();
    LinPoly h = lp_zero(ctx);
    for (int i = 0; i < n; ++i) {
        if (ctx.is_zero(f.c[i])) continue;
        for (int j = 0; j < n; ++j) {
            if (ctx.is_zero(g.c[j])) continue;
            int k = (i + j) % n;
            h.c[k] = ctx.add(h.c[k], ctx.mul(f.c[i], ctx.frobenius(g.c[j], i)));
        }
    }
    return h;
}

LinPoly lp_adjoint(const LinPoly& f) {
    const FieldCtx& ctx = *f.ctx;
    int n = ctx.n();
    LinPoly h = lp_zero(ctx);
    h.c[0] = f.c[0];
    for (int i = 1; i < n; ++i) h.c[n - i] = ctx.frobenius(f.c[i], n - i);
    return h;
}

LinPoly lp_aut(const LinPoly& f, int e) {
    const FieldCtx& ctx = *f.ctx;
    LinPoly h = lp_zero(ctx);
    for (int i = 0; i < ctx.n(); ++i) h.c[i] = ctx.aut_p(f.c[i], e);
    return h;
}

MatrixFq lp_to_matrix(const LinPoly& f) {
    const FieldCtx& ctx = *f.ctx;
    int n = ctx.n();
    MatrixFq m;
    m.rows = m.cols = n;
    m.a.resize((std::size_t)n * n);
    for (int i = 0; i < n; ++i) {
        Fqn img = lp_eval(f, ctx.basis()[i]);
        std::copy(img.c.begin(), img.c.end(), m.a.begin() + (std::size_t)i * n);
    }
    return m;
}

LinPoly lp_from_matrix(const FieldCtx& ctx, const MatrixFq& m) {
    int n = ctx.n();
    if (m.rows != n || m.cols != n) throw ConfigError("matrix shape must be n x n");
    // Solve sum_i c_i (alpha^j)^(q^i) = row_j for the coefficients c_i.
    std::vector<std::vector<Fqn>> A(n, std::vector<Fqn>(n));
    std::vector<Fqn> b(n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) A[j][i] = ctx.frobenius(ctx.basis()[j], i);
        Fqn row = ctx.zero();
        for (int k = 0; k < n; ++k) row.c[k] = m.at(j, k);
        b[j] = row;
    }
    auto sol = solve_fqn(ctx, std::move(A), std::move(b));
    if (!sol) throw std::logic_error("Moore system is always solvable");
    return LinPoly{&ctx, std::move(*sol)};
}

namespace {

// row echelon over F_q; returns rank, records pivot columns
int echelon(const FieldCtx& ctx, MatrixFq& m, std::vector<int>* pivots) {
    const SubField& fq = ctx.fq();
    int rank = 0;
    for (int col = 0; col < m.cols && rank < m.rows; ++col) {
        int sel = -1;
        for (int i = rank; i < m.rows; ++i)
            if (m.at(i, col)) {
                sel = i;
                break;
            }
        if (sel < 0) continue;
        for (int j = 0; j < m.cols; ++j) std::swap(m.a[(std::size_t)sel * m.cols + j],
                                                   m.a[(std::size_t)rank * m.cols + j]);
        std::uint16_t piv = fq.inv(m.at(rank, col));
        for (int j = col; j < m.cols; ++j) m.at(rank, j) = fq.mul(m.at(rank, j), piv);
        for (int i = 0; i < m.rows; ++i) {
            if (i == rank) continue;
            std::uint16_t c = m.at(i, col);
            if (!c) continue;
            for (int j = col; j < m.cols; ++j)
                m.at(i, j) = fq.sub(m.at(i, j), fq.mul(c, m.at(rank, j)));
        }
        if (pivots) pivots->push_back(col);
        ++rank;
    }
    return rank;
}

}  // namespace

int matrix_rank(const FieldCtx& ctx, MatrixFq m) { return echelon(ctx, m, nullptr); }

std::vector<std::vector<std::uint16_t>> matrix_nullspace(const FieldCtx& ctx, MatrixFq m) {
    const SubField& fq = ctx.fq();
    std::vector<int> pivots;
    int rank = echelon(ctx, m, &pivots);
    std::vector<std::vector<std::uint16_t>> basis;
    std::vector<bool> is_pivot(m.cols, false);
    for (int c : pivots) is_pivot[c] = true;
    for (int free = 0; free < m.cols; ++free) {
        if (is_pivot[free]) continue;
        std::vector<std::uint16_t> v(m.cols, 0);
        v[free] = 1;
        for (int i = 0; i < rank; ++i)
            v[pivots[i]] = fq.neg(m.at(i, free));
        basis.push_back(std::move(v));
    }
    return basis;
}

MatrixFq matrix_mul(const FieldCtx& ctx, const MatrixFq& a, const MatrixFq& b) {
    if (a.cols != b.rows) throw ConfigError("matrix shape mismatch");
    const SubField& fq = ctx.fq();
    MatrixFq c;
    c.rows = a.rows;
    c.cols = b.cols;
    c.a.assign((std::size_t)c.rows * c.cols, 0);
    for (int i = 0; i < a.rows; ++i)
        for (int k = 0; k < a.cols; ++k) {
            std::uint16_t s = a.at(i, k);
            if (!s) continue;
            const std::uint16_t* row = fq.mul_row(s);
            for (int j = 0; j < b.cols; ++j)
                if (b.at(k, j)) c.at(i, j) = fq.add(c.at(i, j), row[b.at(k, j)]);
        }
    return c;
}

MatrixFq matrix_inverse(const FieldCtx& ctx, MatrixFq m) {
    if (m.rows != m.cols) throw ConfigError("matrix must be square");
    const SubField& fq = ctx.fq();
    int n = m.rows;
    MatrixFq aug;
    aug.rows = n;
    aug.cols = 2 * n;
    aug.a.assign((std::size_t)n * 2 * n, 0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) aug.at(i, j) = m.at(i, j);
        aug.at(i, n + i) = 1;
    }
    // Gauss-Jordan with pivots restricted to the left block
    for (int col = 0; col < n; ++col) {
        int sel = -1;
        for (int i = col; i < n; ++i)
            if (aug.at(i, col)) {
                sel = i;
                break;
            }
        if (sel < 0) throw ConfigError("matrix is singular");
        for (int j = 0; j < 2 * n; ++j)
            std::swap(aug.a[(std::size_t)sel * 2 * n + j], aug.a[(std::size_t)col * 2 * n + j]);
        std::uint16_t piv = fq.inv(aug.at(col, col));
        for (int j = 0; j < 2 * n; ++j) aug.at(col, j) = fq.mul(aug.at(col, j), piv);
        for (int i = 0; i < n; ++i) {
            if (i == col) continue;
            std::uint16_t c = aug.at(i, col);
            if (!c) continue;
            for (int j = 0; j < 2 * n; ++j)
                aug.at(i, j) = fq.sub(aug.at(i, j), fq.mul(c, aug.at(col, j)));
        }
    }
    MatrixFq inv;
    inv.rows = inv.cols = n;
    inv.a.resize((std::size_t)n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) inv.at(i, j) = aug.at(i, n + j);
    return inv;
}

MatrixFq matrix_transpose(const MatrixFq& m) {
    MatrixFq t;
    t.rows = m.cols;
    t.cols = m.rows;
    t.a.resize(m.a.size());
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) t.at(j, i) = m.at(i, j);
    return t;
}

RankKernel lp_rank_kernel(const LinPoly& f) {
    const FieldCtx& ctx = *f.ctx;
    MatrixFq m = lp_to_matrix(f);
    // x ~ row u acts as u*M, so the kernel is the nullspace of the transpose
    auto null_basis = matrix_nullspace(ctx, matrix_transpose(m));
    RankKernel out;
    out.rank = ctx.n() - (int)null_basis.size();
    for (auto& v : null_basis) out.kernel.push_back(Fqn{std::move(v)});
    return out;
}

LinPoly lp_invert(const LinPoly& f) {
    const FieldCtx& ctx = *f.ctx;
    MatrixFq m = lp_to_matrix(f);
    MatrixFq mi;
    try {
        mi = matrix_inverse(ctx, std::move(m));
    } catch (const ConfigError&) {
        throw ConfigError("q-polynomial is not bijective, no compositional inverse");
    }
    return lp_from_matrix(ctx, mi);
}

std::optional<std::vector<Fqn>> lp_span_membership(const LinPoly& f,
                                                   const std::vector<LinPoly>& gens) {
    const FieldCtx& ctx = *f.ctx;
    int n = ctx.n();
    int m = (int)gens.size();
    std::vector<std::vector<Fqn>> A(n, std::vector<Fqn>(m));
    std::vector<Fqn> b(n);
    for (int g = 0; g < m; ++g) {
        check_ctx(f, gens[g]);
        for (int i = 0; i < n; ++i) A[i][g] = gens[g].c[i];
    }
    for (int i = 0; i < n; ++i) b[i] = f.c[i];
    return solve_fqn(ctx, std::move(A), std::move(b));
}

Fqn lex_least_nonzero_in_span(const FieldCtx& ctx, const std::vector<Fqn>& basis) {
    if (basis.empty()) throw ConfigError("empty span has no nonzero element");
    int dim = (int)basis.size();
    double bits = dim * std::log2((double)ctx.q());
    if (bits > 24) throw GuardRailError("span too large to enumerate");
    std::uint64_t total = 1;
    for (int i = 0; i < dim; ++i) total *= ctx.q();
    std::optional<Fqn> best;
    std::vector<std::uint16_t> digits(dim, 0);
    Fqn cur = ctx.zero();
    for (std::uint64_t it = 1; it < total; ++it) {
        int i = 0;
        while (digits[i] == ctx.q() - 1) {
            ctx.axpy_raw(cur.c.data(), ctx.fq().sub(0, (std::uint16_t)(ctx.q() - 1)),
                         basis[i].c.data());
            digits[i] = 0;
            ++i;
        }
        ctx.axpy_raw(cur.c.data(), ctx.fq().sub((std::uint16_t)(digits[i] + 1), digits[i]),
                     basis[i].c.data());
        ++digits[i];
        if (!ctx.is_zero(cur) && (!best || ctx.lex_less(cur, *best))) best = cur;
    }
    if (!best) throw ConfigError("span is trivial");
    return *best;
}

}  // namespace scatterlab
