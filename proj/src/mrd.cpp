#include "scatterlab/mrd.hpp"

#include <algorithm>
#include <cmath>

namespace scatterlab {

namespace {

// W = c x + d f for some c, d?  Works for any f, also with 0 in its support.
std::optional<std::pair<Fqn, Fqn>> span2_decompose(const FieldCtx& ctx, const LinPoly& f,
                                                   const std::vector<Fqn>& w) {
    int n = ctx.n();
    int pivot = -1;
    for (int i = 1; i < n; ++i)
        if (!ctx.is_zero(f.c[i])) {
            pivot = i;
            break;
        }
    if (pivot < 0) throw ConfigError("generator is collinear with x");
    Fqn d = ctx.mul(w[pivot], ctx.inv(f.c[pivot]));
    for (int i = 1; i < n; ++i) {
        if (i == pivot) continue;
        if (!(w[i] == ctx.mul(d, f.c[i]))) return std::nullopt;
    }
    Fqn c = ctx.sub(w[0], ctx.mul(d, f.c[0]));
    return std::make_pair(c, d);
}

bool is_cf_shape(const RankCode& code) {
    return code.gens.size() == 2 && code.gens[0] == lp_identity(*code.ctx);
}

void require_cf_shape(const RankCode& code) {
    if (!is_cf_shape(code))
        throw ConfigError("operation needs a two-generator code spanned by x and f");
}

int exact_log(std::uint64_t value, std::uint32_t base) {
    int d = 0;
    std::uint64_t v = 1;
    while (v < value) {
        v *= base;
        ++d;
    }
    if (v != value) throw std::logic_error("fiber size is not a power of q");
    return d;
}

// supports S and S+S (mod n) do not meet: compositions through f cannot
// shadow the coefficient slots of f itself
bool supports_decouple(const FieldCtx& ctx, const LinPoly& f) {
    std::vector<int> s = lp_support(f);
    if (s.empty()) return false;
    std::vector<bool> in_s(ctx.n(), false);
    for (int i : s) in_s[i] = true;
    if (in_s[0]) return false;
    for (int i : s)
        for (int j : s)
            if (in_s[(i + j) % ctx.n()]) return false;
    return true;
}

}  // namespace

RankCode code_from_scattered(const LinPoly& f, VerifyScattered verify, const ScanOptions& opts) {
    const FieldCtx& ctx = *f.ctx;
    std::vector<int> s = lp_support(f);
    if (s.empty() || (s.size() == 1 && s[0] == 0))
        throw ConfigError("f is a scalar multiple of x and never scattered");
    if (verify == VerifyScattered::Yes && !is_scattered_fiber(f, opts).scattered)
        throw ConfigError("f is not scattered");
    return RankCode{&ctx, {lp_identity(ctx), f}};
}

int min_distance_from_counts(const RankCode& code, const FiberCounts& counts) {
    require_cf_shape(code);
    const FieldCtx& ctx = *code.ctx;
    int max_dim = exact_log(counts.max_count + 1, ctx.q());
    return ctx.n() - max_dim;
}

int min_distance(const RankCode& code, const ScanOptions& opts) {
    if (is_cf_shape(code))
        return min_distance_from_counts(code, fiber_counts(code.gens[1], opts));
    return min_distance_by_rank(code, opts);
}

int min_distance_by_rank(const RankCode& code, const ScanOptions& opts) {
    const FieldCtx& ctx = *code.ctx;
    ctx.require_enumerable(opts.max_bits);
    int n = ctx.n(), m = (int)code.gens.size();
    if (m < 1) throw ConfigError("empty code");
    if ((m - 1) * ctx.order_bits() > 24)
        throw GuardRailError("too many projective codewords to enumerate");
    std::uint64_t qn = ctx.order();

    // basis images of every generator, for cheap row assembly
    std::vector<std::vector<Fqn>> img(m);
    for (int g = 0; g < m; ++g) img[g] = lp_basis_images(code.gens[g]);

    int best = n;
    std::vector<Fqn> coeff(m, ctx.zero());
    MatrixFq mat;
    mat.rows = mat.cols = n;
    mat.a.resize((std::size_t)n * n);
    // normalized representatives: first nonzero coefficient equal to 1
    for (int pivot = 0; pivot < m; ++pivot) {
        int free = m - 1 - pivot;
        std::uint64_t combos = 1;
        for (int i = 0; i < free; ++i) combos *= qn;
        for (std::uint64_t idx = 0; idx < combos; ++idx) {
            for (int g = 0; g < pivot; ++g) coeff[g] = ctx.zero();
            coeff[pivot] = ctx.one();
            std::uint64_t rest = idx;
            for (int i = 0; i < free; ++i) {
                coeff[pivot + 1 + i] = ctx.element(rest % qn);
                rest /= qn;
            }
            for (int row = 0; row < n; ++row) {
                Fqn v = ctx.zero();
                for (int g = pivot; g < m; ++g)
                    if (!ctx.is_zero(coeff[g])) v = ctx.add(v, ctx.mul(coeff[g], img[g][row]));
                std::copy(v.c.begin(), v.c.end(), mat.a.begin() + (std::size_t)row * n);
            }
            best = std::min(best, matrix_rank(ctx, mat));
            if (best == 0) throw std::logic_error("zero codeword among projective representatives");
        }
    }
    return best;
}

bool is_mrd_at_distance(const RankCode& code, int d) {
    // |C| = q^(nm) versus the bound q^(n(n-d+1)) in the square case
    int n = code.ctx->n(), m = (int)code.gens.size();
    return m == n - d + 1;
}

bool is_mrd(const RankCode& code, const ScanOptions& opts) {
    return is_mrd_at_distance(code, min_distance(code, opts));
}

namespace {

IdealizerReport right_idealizer_decoupled(const RankCode& code, const ScanOptions& opts) {
    const FieldCtx& ctx = *code.ctx;
    const LinPoly& f = code.gens[1];
    int n = ctx.n();
    std::vector<int> S = lp_support(f);
    int ns = (int)S.size();

    IdealizerReport rep;
    rep.side = IdealizerReport::Side::Right;
    rep.factored = true;

    // a-part: f(ax) = d f(x) for some d, i.e. all a^(q^i), i in S, coincide
    {
        std::vector<std::vector<Fqn>> frob_images(ns);
        for (int k = 0; k < ns; ++k) {
            frob_images[k].resize(n);
            for (int i = 0; i < n; ++i)
                frob_images[k][i] = ctx.frobenius(ctx.basis()[i], S[k]);
        }
        ElementWalker w(ctx);
        std::vector<int> slots(ns);
        for (int k = 0; k < ns; ++k) slots[k] = w.track(frob_images[k]);
        rep.a_part.push_back(ctx.zero());
        while (w.next()) {
            bool ok = true;
            const std::uint16_t* first = w.value(slots[0]);
            for (int k = 1; k < ns && ok; ++k) ok = ctx.eq_raw(first, w.value(slots[k]));
            if (ok) rep.a_part.push_back(ctx.wrap(w.coords()));
        }
        if ((std::uint64_t)rep.a_part.size() == ctx.order()) {
            rep.a_all = true;
            rep.a_part.clear();
        }
    }

    // b-part: f(b f(x)) is a multiple of x alone; every slot of S+S other
    // than 0 must cancel
    {
        std::vector<std::vector<std::pair<int, Fqn>>> terms(n);  // slot -> (i-index, f_i f_j^(q^i))
        for (int ki = 0; ki < ns; ++ki)
            for (int kj = 0; kj < ns; ++kj) {
                int slot = (S[ki] + S[kj]) % n;
                if (slot == 0) continue;
                terms[slot].push_back(
                    {ki, ctx.mul(f.c[S[ki]], ctx.frobenius(f.c[S[kj]], S[ki]))});
            }
        std::vector<int> active;
        for (int k = 0; k < n; ++k)
            if (!terms[k].empty()) active.push_back(k);

        std::vector<std::vector<Fqn>> frob_images(ns);
        for (int k = 0; k < ns; ++k) {
            frob_images[k].resize(n);
            for (int i = 0; i < n; ++i)
                frob_images[k][i] = ctx.frobenius(ctx.basis()[i], S[k]);
        }
        ElementWalker w(ctx);
        std::vector<int> slots(ns);
        for (int k = 0; k < ns; ++k) slots[k] = w.track(frob_images[k]);
        rep.b_part.push_back(ctx.zero());
        std::vector<std::uint16_t> acc(n), term(n);
        while (w.next()) {
            bool ok = true;
            for (int slot : active) {
                ctx.set_zero_raw(acc.data());
                for (auto& [ki, cst] : terms[slot]) {
                    ctx.mul_raw(term.data(), cst.c.data(), w.value(slots[ki]));
                    ctx.add_raw(acc.data(), acc.data(), term.data());
                }
                if (!ctx.is_zero_raw(acc.data())) {
                    ok = false;
                    break;
                }
            }
            if (ok) rep.b_part.push_back(ctx.wrap(w.coords()));
        }
    }

    rep.size = (rep.a_all ? ctx.order() : (std::uint64_t)rep.a_part.size()) *
               (std::uint64_t)rep.b_part.size();
    (void)opts;
    return rep;
}

IdealizerReport right_idealizer_fullscan(const RankCode& code, const ScanOptions& opts) {
    const FieldCtx& ctx = *code.ctx;
    const LinPoly& f = code.gens[1];
    int n = ctx.n();
    if (2 * ctx.order_bits() > 26)
        throw GuardRailError("idealizer pair scan too large; supports do not decouple");
    std::uint64_t qn = ctx.order();

    // U[a] = f(ax), V[b] = f(b f(x)) as coefficient vectors
    std::vector<Fqn> U((std::size_t)qn * n, ctx.zero()), V((std::size_t)qn * n, ctx.zero());
    for (std::uint64_t ai = 0; ai < qn; ++ai) {
        Fqn a = ctx.element(ai);
        for (int i = 0; i < n; ++i)
            if (!ctx.is_zero(f.c[i])) U[ai * n + i] = ctx.mul(f.c[i], ctx.frobenius(a, i));
    }
    for (std::uint64_t bi = 0; bi < qn; ++bi) {
        LinPoly comp = lp_compose(f, lp_scale(ctx.element(bi), f));
        for (int i = 0; i < n; ++i) V[bi * n + i] = comp.c[i];
    }

    IdealizerReport rep;
    rep.side = IdealizerReport::Side::Right;
    std::vector<Fqn> w(n);
    for (std::uint64_t ai = 0; ai < qn; ++ai)
        for (std::uint64_t bi = 0; bi < qn; ++bi) {
            for (int i = 0; i < n; ++i) w[i] = ctx.add(U[ai * n + i], V[bi * n + i]);
            if (span2_decompose(ctx, f, w))
                rep.pairs.push_back({ctx.element(ai), ctx.element(bi)});
        }
    rep.size = rep.pairs.size();
    (void)opts;
    return rep;
}

IdealizerReport left_idealizer(const RankCode& code, const ScanOptions& opts) {
    const FieldCtx& ctx = *code.ctx;
    const LinPoly& f = code.gens[1];
    int n = ctx.n(), rn = ctx.r() * n;

    // phi = a x + b f.  phi o c must stay in the code for every c; since
    // composition is only additive in the inner argument, c runs over an
    // F_p-basis {e x, e f}.  The a-part a e x / a e f always stays inside,
    // so only b is constrained:  b f(e x) and b f(e f(x)) must lie in C_f.
    std::vector<std::vector<Fqn>> conds;  // coefficient vectors to be scaled by b
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < ctx.r(); ++j) {
            Fqn e = ctx.zero();
            e.c[i] = (std::uint16_t)1;
            for (int rep = 0; rep < j; ++rep) e.c[i] = (std::uint16_t)(e.c[i] * ctx.p());
            // e = beta^j alpha^i ranges over an F_p-basis
            std::vector<Fqn> w1(n, ctx.zero());
            for (int k = 0; k < n; ++k)
                if (!ctx.is_zero(f.c[k])) w1[k] = ctx.mul(f.c[k], ctx.frobenius(e, k));
            conds.push_back(std::move(w1));
            LinPoly comp = lp_compose(f, lp_scale(e, f));
            conds.push_back(std::move(comp.c));
        }
    if ((int)conds.size() != 2 * rn) throw std::logic_error("basis condition count mismatch");

    IdealizerReport rep;
    rep.side = IdealizerReport::Side::Left;
    rep.factored = true;
    rep.a_all = true;
    rep.b_part.push_back(ctx.zero());

    ElementWalker w(ctx);
    std::vector<Fqn> scaled(n);
    while (w.next()) {
        Fqn b = ctx.wrap(w.coords());
        bool ok = true;
        for (const auto& cond : conds) {
            for (int i = 0; i < n; ++i) scaled[i] = ctx.mul(b, cond[i]);
            if (!span2_decompose(ctx, f, scaled)) {
                ok = false;
                break;
            }
        }
        if (ok) rep.b_part.push_back(b);
    }
    rep.size = ctx.order() * (std::uint64_t)rep.b_part.size();
    (void)opts;
    return rep;
}

}  // namespace

std::vector<std::pair<Fqn, Fqn>> IdealizerReport::coefficient_pairs(const FieldCtx& ctx) const {
    if (!factored) return pairs;
    std::vector<std::pair<Fqn, Fqn>> out;
    if (a_all) {
        for (std::uint64_t ai = 0; ai < ctx.order(); ++ai)
            for (const Fqn& b : b_part) out.push_back({ctx.element(ai), b});
    } else {
        for (const Fqn& a : a_part)
            for (const Fqn& b : b_part) out.push_back({a, b});
    }
    return out;
}

IdealizerReport idealizer(const RankCode& code, IdealizerReport::Side side,
                          const ScanOptions& opts) {
    require_cf_shape(code);
    const FieldCtx& ctx = *code.ctx;
    ctx.require_enumerable(opts.max_bits);

    IdealizerReport rep;
    if (side == IdealizerReport::Side::Left) {
        rep = left_idealizer(code, opts);
    } else if (supports_decouple(ctx, code.gens[1])) {
        rep = right_idealizer_decoupled(code, opts);
    } else {
        rep = right_idealizer_fullscan(code, opts);
    }

    if (rep.size > 1 && rep.size <= 64) rep.mult_table_hash = field_structure_hash(code, rep);
    return rep;
}

// Representation-free hash of the idealizer's field structure: elements are
// relabeled by discrete logarithm and the addition table is hashed in that
// labeling, minimized over the choice of generator.  Isomorphic idealizers
// hash identically regardless of how their elements sit inside L_(n,q)[x].
std::uint64_t field_structure_hash(const RankCode& code, const IdealizerReport& rep) {
    const FieldCtx& ctx = *code.ctx;
    auto pairs = rep.coefficient_pairs(ctx);
    std::size_t s = pairs.size();
    std::vector<LinPoly> elems;
    for (auto& [a, b] : pairs)
        elems.push_back(lp_add(lp_monomial(ctx, 0, a), lp_scale(b, code.gens[1])));

    auto find = [&](const LinPoly& x) -> int {
        for (std::size_t i = 0; i < s; ++i)
            if (elems[i] == x) return (int)i;
        throw std::logic_error("idealizer is not closed");
    };
    int zero = find(lp_zero(ctx));

    std::uint64_t best = ~0ull;
    for (std::size_t g = 0; g < s; ++g) {
        if ((int)g == zero) continue;
        // discrete-log labels: log[e] = k when e = gen^k; zero gets label s-1
        std::vector<int> log_of(s, -1);
        LinPoly pw = elems[g];
        std::size_t k = 0;
        bool generator = true;
        for (; k < s - 1; ++k) {
            int idx = find(pw);
            if (log_of[idx] >= 0) {
                generator = false;  // order smaller than s-1
                break;
            }
            log_of[idx] = (int)k;
            pw = lp_compose(pw, elems[g]);
        }
        if (!generator) continue;
        log_of[zero] = (int)s - 1;
        std::vector<int> by_label(s);
        for (std::size_t i = 0; i < s; ++i) by_label[log_of[i]] = (int)i;
        std::uint64_t h = 1469598103934665603ull;
        for (std::size_t i = 0; i < s; ++i)
            for (std::size_t j = 0; j < s; ++j) {
                LinPoly sum = lp_add(elems[by_label[i]], elems[by_label[j]]);
                h ^= (std::uint64_t)log_of[find(sum)];
                h *= 1099511628211ull;
            }
        best = std::min(best, h);
    }
    if (best == ~0ull) throw std::logic_error("idealizer has no multiplicative generator");
    return best;
}

}  // namespace scatterlab
