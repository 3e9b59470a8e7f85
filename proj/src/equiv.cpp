#include "scatterlab/equiv.hpp"

#include <algorithm>
#include <atomic>
#include <memory>
#include <mutex>
#include <numeric>
#include <unordered_map>

#include "scatterlab/parallel.hpp"

namespace scatterlab {

namespace {

// ---------------------------------------------------------------------------
// gl2 scans

struct JoinKeySlots {
    int pivot;                    // first support slot of f at index >= 1
    std::vector<int> slots;       // all slots 1..n-1 except the pivot
};

JoinKeySlots make_key_slots(const FieldCtx& ctx, const LinPoly& f) {
    JoinKeySlots ks;
    ks.pivot = -1;
    for (int i = 1; i < ctx.n(); ++i)
        if (!ctx.is_zero(f.c[i])) {
            ks.pivot = i;
            break;
        }
    if (ks.pivot < 0) throw ConfigError("f is collinear with x");
    for (int i = 1; i < ctx.n(); ++i)
        if (i != ks.pivot) ks.slots.push_back(i);
    return ks;
}

// Exhaustive search for g(ax + bf(x)) = cx + df(x), organized as a hash join
// over the separated a- and b-dependent parts of the coefficient equations.
// Returns the witness with the least (index(a), index(b)).
std::optional<EquivWitness> gl2_join(const LinPoly& f, const LinPoly& g,
                                     const EquivOptions& opts) {
    const FieldCtx& ctx = *f.ctx;
    ctx.require_enumerable(std::min(opts.max_bits, 21));  // keys hold q^n full rows
    int n = ctx.n();
    std::uint64_t qn = ctx.order();
    JoinKeySlots ks = make_key_slots(ctx, f);
    int klen = (int)ks.slots.size();
    Fqn f_pivot_inv = ctx.inv(f.c[ks.pivot]);

    // b side: keys plus the slot-0 and pivot-slot values of V(b) = g(b f(x))
    std::vector<std::uint16_t> keys((std::size_t)qn * klen * n);
    std::vector<std::uint16_t> v0((std::size_t)qn * n), vp((std::size_t)qn * n);
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> buckets;
    buckets.reserve((std::size_t)qn * 2);
    {
        for (std::uint64_t bi = 0; bi < qn; ++bi) {
            LinPoly v = lp_compose(g, lp_scale(ctx.element(bi), f));
            std::uint16_t* key = keys.data() + (std::size_t)bi * klen * n;
            for (int s = 0; s < klen; ++s) {
                int slot = ks.slots[s];
                Fqn kv;
                if (!ctx.is_zero(f.c[slot]))
                    kv = ctx.sub(ctx.mul(v.c[ks.pivot], f.c[slot]),
                                 ctx.mul(v.c[slot], f.c[ks.pivot]));
                else
                    kv = ctx.neg(v.c[slot]);
                std::copy(kv.c.begin(), kv.c.end(), key + (std::size_t)s * n);
            }
            std::copy(v.c[0].c.begin(), v.c[0].c.end(), v0.begin() + (std::size_t)bi * n);
            std::copy(v.c[ks.pivot].c.begin(), v.c[ks.pivot].c.end(),
                      vp.begin() + (std::size_t)bi * n);
            buckets[hash_coords(key, klen * n)].push_back((std::uint32_t)bi);
        }
    }

    // a side: U(a) = g(a x) has coefficients g_i a^(q^i) on the support of g
    std::vector<int> sg = lp_support(g);
    std::vector<std::vector<Fqn>> frob_images(sg.size());
    for (std::size_t k = 0; k < sg.size(); ++k) {
        frob_images[k].resize(n);
        for (int i = 0; i < n; ++i) frob_images[k][i] = ctx.frobenius(ctx.basis()[i], sg[k]);
    }

    ElementWalker w(ctx);
    std::vector<int> slots(sg.size());
    for (std::size_t k = 0; k < sg.size(); ++k) slots[k] = w.track(frob_images[k]);

    std::vector<Fqn> u(n, ctx.zero());
    std::vector<std::uint16_t> key((std::size_t)klen * n);
    auto consider = [&](std::uint64_t ai) -> std::optional<EquivWitness> {
        for (int i = 0; i < n; ++i) u[i] = ctx.zero();
        for (std::size_t k = 0; k < sg.size(); ++k)
            u[sg[k]] = ctx.mul(g.c[sg[k]], ctx.wrap(w.value(slots[k])));
        for (int s = 0; s < klen; ++s) {
            int slot = ks.slots[s];
            Fqn kv;
            if (!ctx.is_zero(f.c[slot]))
                kv = ctx.sub(ctx.mul(u[slot], f.c[ks.pivot]),
                             ctx.mul(u[ks.pivot], f.c[slot]));
            else
                kv = u[slot];
            std::copy(kv.c.begin(), kv.c.end(), key.begin() + (std::size_t)s * n);
        }
        auto it = buckets.find(hash_coords(key.data(), klen * n));
        if (it == buckets.end()) return std::nullopt;
        for (std::uint32_t bi : it->second) {
            if (!std::equal(key.begin(), key.end(), keys.begin() + (std::size_t)bi * klen * n))
                continue;
            Fqn a = ctx.element(ai), b = ctx.element(bi);
            Fqn d = ctx.mul(ctx.add(u[ks.pivot], ctx.wrap(vp.data() + (std::size_t)bi * n)),
                            f_pivot_inv);
            Fqn c = ctx.sub(ctx.add(u[0], ctx.wrap(v0.data() + (std::size_t)bi * n)),
                            ctx.mul(d, f.c[0]));
            if (ctx.is_zero(ctx.sub(ctx.mul(a, d), ctx.mul(b, c)))) continue;
            return EquivWitness{a, b, c, d, 0};
        }
        return std::nullopt;
    };

    if (auto res = consider(0)) return res;
    while (w.next())
        if (auto res = consider(w.index())) return res;
    return std::nullopt;
}

bool family_shape_decouples(const FieldCtx& ctx, const LinPoly& f, const LinPoly& g) {
    std::vector<int> sf = lp_support(f), sg = lp_support(g);
    if (sf.empty() || sf != sg) return false;
    std::vector<bool> in_s(ctx.n(), false);
    for (int i : sf) {
        if (i == 0) return false;
        in_s[i] = true;
    }
    for (int i : sf)
        for (int j : sf)
            if (in_s[(i + j) % ctx.n()]) return false;
    return true;
}

// Disjoint-support scan: g(ax) can only produce the support slots of f and
// g(bf(x)) only their pairwise sums, so the two coefficient families decouple
// and a witness exists iff one of the pure scans hits.
std::optional<EquivWitness> gl2_decoupled(const LinPoly& f, const LinPoly& g,
                                          const EquivOptions& opts) {
    const FieldCtx& ctx = *f.ctx;
    ctx.require_enumerable(opts.max_bits);
    if (!family_shape_decouples(ctx, f, g))
        throw ConfigError("decoupled scan needs matching disjoint supports");
    int n = ctx.n();
    std::vector<int> S = lp_support(f);
    int ns = (int)S.size();
    int pivot = S[0];
    Fqn f_pivot_inv = ctx.inv(f.c[pivot]);

    std::vector<std::vector<Fqn>> frob_images(ns);
    for (int k = 0; k < ns; ++k) {
        frob_images[k].resize(n);
        for (int i = 0; i < n; ++i) frob_images[k][i] = ctx.frobenius(ctx.basis()[i], S[k]);
    }

    // a-scan: g_i a^(q^i) = d f_i for all i in S
    {
        ElementWalker w(ctx);
        std::vector<int> slots(ns);
        for (int k = 0; k < ns; ++k) slots[k] = w.track(frob_images[k]);
        while (w.next()) {
            Fqn d = ctx.mul(ctx.mul(g.c[pivot], ctx.wrap(w.value(slots[0]))), f_pivot_inv);
            bool ok = true;
            for (int k = 1; k < ns && ok; ++k) {
                Fqn lhs = ctx.mul(g.c[S[k]], ctx.wrap(w.value(slots[k])));
                ok = lhs == ctx.mul(d, f.c[S[k]]);
            }
            if (ok) {
                Fqn a = ctx.wrap(w.coords());
                return EquivWitness{a, ctx.zero(), ctx.zero(), d, 0};
            }
        }
    }

    // b-scan: every slot of g(b f(x)) except x itself must vanish
    {
        std::vector<std::vector<std::pair<int, Fqn>>> terms(n);
        for (int ki = 0; ki < ns; ++ki)
            for (int kj = 0; kj < ns; ++kj) {
                int slot = (S[ki] + S[kj]) % n;
                terms[slot].push_back(
                    {ki, ctx.mul(g.c[S[ki]], ctx.frobenius(f.c[S[kj]], S[ki]))});
            }
        std::vector<int> active;
        for (int k = 1; k < n; ++k)
            if (!terms[k].empty()) active.push_back(k);

        ElementWalker w(ctx);
        std::vector<int> slots(ns);
        for (int k = 0; k < ns; ++k) slots[k] = w.track(frob_images[k]);
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
            if (!ok) continue;
            ctx.set_zero_raw(acc.data());
            for (auto& [ki, cst] : terms[0]) {
                ctx.mul_raw(term.data(), cst.c.data(), w.value(slots[ki]));
                ctx.add_raw(acc.data(), acc.data(), term.data());
            }
            if (ctx.is_zero_raw(acc.data())) continue;  // c = 0: singular matrix
            Fqn b = ctx.wrap(w.coords());
            return EquivWitness{ctx.zero(), b, ctx.wrap(acc.data()), ctx.zero(), 0};
        }
    }
    return std::nullopt;
}

}  // namespace

std::optional<EquivWitness> gl2_equiv_bruteforce(const LinPoly& f, const LinPoly& g,
                                                 const EquivOptions& opts) {
    if (!(*f.ctx == *g.ctx)) throw ConfigError("context mismatch");
    switch (opts.strategy) {
        case ScanStrategy::Join:
            return gl2_join(f, g, opts);
        case ScanStrategy::Decoupled:
            return gl2_decoupled(f, g, opts);
        case ScanStrategy::Auto:
        default:
            if (family_shape_decouples(*f.ctx, f, g)) return gl2_decoupled(f, g, opts);
            return gl2_join(f, g, opts);
    }
}

std::optional<EquivWitness> gammal2_equiv(const LinPoly& f, const LinPoly& g,
                                          const EquivOptions& opts) {
    const FieldCtx& ctx = *f.ctx;
    int rn = ctx.r() * ctx.n();
    for (int e = 0; e < rn; ++e) {
        auto w = gl2_equiv_bruteforce(lp_aut(f, e), g, opts);
        if (w) {
            w->rho_exp = e;
            return w;
        }
    }
    return std::nullopt;
}

bool verify_code_witness(const LinPoly& f, const LinPoly& g, const EquivWitness& w,
                         const ScanOptions& opts) {
    const FieldCtx& ctx = *f.ctx;
    ctx.require_enumerable(opts.max_bits);
    // invertibility first
    if (ctx.is_zero(ctx.sub(ctx.mul(w.a, w.d), ctx.mul(w.b, w.c)))) return false;
    LinPoly fr = lp_aut(f, w.rho_exp);
    std::vector<Fqn> f_img = lp_basis_images(fr);
    std::vector<Fqn> g_img = lp_basis_images(g);
    int n = ctx.n();

    ElementWalker walk(ctx);
    int slot = walk.track(f_img);
    std::vector<std::uint16_t> y(n), lhs(n), rhs(n), tmp(n);
    while (walk.next()) {
        const std::uint16_t* x = walk.coords();
        const std::uint16_t* fx = walk.value(slot);
        ctx.mul_raw(y.data(), w.a.c.data(), x);
        ctx.mul_raw(tmp.data(), w.b.c.data(), fx);
        ctx.add_raw(y.data(), y.data(), tmp.data());
        // g(y) through the basis images
        ctx.set_zero_raw(lhs.data());
        for (int i = 0; i < n; ++i)
            if (y[i]) ctx.axpy_raw(lhs.data(), y[i], g_img[i].c.data());
        ctx.mul_raw(rhs.data(), w.c.c.data(), x);
        ctx.mul_raw(tmp.data(), w.d.c.data(), fx);
        ctx.add_raw(rhs.data(), rhs.data(), tmp.data());
        if (!ctx.eq_raw(lhs.data(), rhs.data())) return false;
    }
    return true;
}

bool code_equiv_criterion(const FieldCtx& ctx, const Fqn& h, const Fqn& k) {
    if (ctx.t() <= 4)
        throw ConfigError("closed-form criterion requires t > 4; use the exhaustive oracle");
    require_admissible(ctx, h);
    require_admissible(ctx, k);
    int rn = ctx.r() * ctx.n();
    if (ctx.t() % 4 != 2) {
        Fqn nh = ctx.neg(h);
        for (int e = 0; e < rn; ++e) {
            Fqn kr = ctx.aut_p(k, e);
            if (kr == h || kr == nh) return true;
        }
        return false;
    }
    for (int e = 0; e < rn; ++e) {
        Fqn l = ctx.mul(h, ctx.inv(ctx.aut_p(k, e)));
        if (ctx.mul(l, ctx.frobenius(l, 2)) == ctx.one()) return true;
    }
    return false;
}

// ---------------------------------------------------------------------------
// code classification

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int x, int y) { parent[find(x)] = find(y); }
};

std::vector<Fqn> roots_of_unity_q2p1(const FieldCtx& ctx) {
    // all l with l^(q^2+1) = 1, by full enumeration
    ctx.require_enumerable();
    std::vector<Fqn> roots;
    ElementWalker w(ctx);
    std::vector<Fqn> f2(ctx.n());
    for (int i = 0; i < ctx.n(); ++i) f2[i] = ctx.frobenius(ctx.basis()[i], 2);
    int slot = w.track(f2);
    Fqn one = ctx.one();
    std::vector<std::uint16_t> prod(ctx.n());
    while (w.next()) {
        ctx.mul_raw(prod.data(), w.coords(), w.value(slot));
        if (ctx.eq_raw(prod.data(), one.c.data())) roots.push_back(ctx.wrap(w.coords()));
    }
    return roots;
}

void sort_classes(const FieldCtx& ctx, std::vector<std::vector<Fqn>>& classes) {
    for (auto& cls : classes)
        std::sort(cls.begin(), cls.end(),
                  [&](const Fqn& a, const Fqn& b) { return ctx.lex_less(a, b); });
    std::sort(classes.begin(), classes.end(), [&](const auto& x, const auto& y) {
        return ctx.lex_less(x.front(), y.front());
    });
}

std::optional<std::uint64_t> code_bound(const FieldCtx& ctx) {
    if (ctx.t() <= 4) return std::nullopt;
    std::uint64_t qt = 1;
    for (int i = 0; i < ctx.t(); ++i) qt *= ctx.q();
    std::uint64_t denom = (ctx.t() % 4 != 2)
                              ? 4ull * ctx.r() * ctx.t()
                              : 2ull * ctx.r() * ctx.t() * ((std::uint64_t)ctx.q() * ctx.q() + 1);
    return (qt + 1) / denom;
}

std::optional<std::uint64_t> linset_bound(const FieldCtx& ctx) {
    auto b = code_bound(ctx);
    if (!b) return std::nullopt;
    return *b / 2;
}

}  // namespace

OrbitReport classify_codes(const FieldCtx& ctx, ClassifyMode mode, const EquivOptions& opts) {
    std::vector<Fqn> adm = admissible_h(ctx, opts.max_bits);
    if (adm.empty()) throw ConfigError("no admissible h for these parameters");
    if (mode == ClassifyMode::Auto)
        mode = ctx.t() > 4 ? ClassifyMode::Criterion : ClassifyMode::Oracle;
    if (mode == ClassifyMode::Criterion && ctx.t() <= 4)
        throw ConfigError("criterion classification requires t > 4");

    int cnt = (int)adm.size();
    std::unordered_map<std::uint64_t, int> pos;
    for (int i = 0; i < cnt; ++i) pos[ctx.index_of(adm[i])] = i;
    // criterion orbits may pass through the few norm-fiber elements inside
    // F_(q^t); those are not in the admissible set and are skipped
    auto locate = [&](const Fqn& x) -> int {
        auto it = pos.find(ctx.index_of(x));
        return it == pos.end() ? -1 : it->second;
    };

    OrbitReport rep;
    rep.relation = "code_equiv";
    UnionFind uf(cnt);
    std::vector<std::uint64_t> xi(cnt, 0);
    int rn = ctx.r() * ctx.n();

    if (mode == ClassifyMode::Criterion) {
        rep.mode = "criterion";
        bool twist = ctx.t() % 4 == 2;
        std::vector<Fqn> roots;
        if (twist) roots = roots_of_unity_q2p1(ctx);
        for (int i = 0; i < cnt; ++i) {
            // GL multiplicity measured inside the admissible set
            std::uint64_t m = 0;
            if (!twist) {
                m = 1 + (pos.count(ctx.index_of(ctx.neg(adm[i]))) ? 1 : 0);
            } else {
                for (const Fqn& l : roots)
                    if (pos.count(ctx.index_of(ctx.mul(l, adm[i])))) ++m;
            }
            xi[i] = m;
            for (int e = 0; e < rn; ++e) {
                Fqn hr = ctx.aut_p(adm[i], e);
                if (!twist) {
                    int j = locate(hr), k = locate(ctx.neg(hr));
                    if (j >= 0) uf.unite(i, j);
                    if (k >= 0) uf.unite(i, k);
                } else {
                    for (const Fqn& l : roots) {
                        int j = locate(ctx.mul(l, hr));
                        if (j >= 0) uf.unite(i, j);
                    }
                }
            }
        }
    } else {
        rep.mode = "oracle";
        ctx.require_enumerable(opts.max_bits);
        // free identifications first: psi_(-h) = psi_h as polynomials, and the
        // coefficient automorphism h -> h^(p^e) twists the whole code
        auto locate_strict = [&](const Fqn& x) {
            int j = locate(x);
            if (j < 0) throw std::logic_error("Galois orbit left the admissible set");
            return j;
        };
        for (int i = 0; i < cnt; ++i) {
            uf.unite(i, locate_strict(ctx.neg(adm[i])));  // psi_(-h) = psi_h
            for (int e = 1; e < rn; ++e) uf.unite(i, locate_strict(ctx.aut_p(adm[i], e)));
        }
        // oracle merges between the remaining representatives
        std::vector<int> reps;
        for (int i = 0; i < cnt; ++i)
            if (std::find(reps.begin(), reps.end(), uf.find(i)) == reps.end())
                reps.push_back(uf.find(i));
        std::vector<LinPoly> polys;
        for (int r : reps) polys.push_back(psi(ctx, adm[r]));
        for (std::size_t i = 0; i < reps.size(); ++i)
            for (std::size_t j = i + 1; j < reps.size(); ++j) {
                if (uf.find(reps[i]) == uf.find(reps[j])) continue;
                if (gammal2_equiv(polys[i], polys[j], opts)) uf.unite(reps[i], reps[j]);
            }
        // GL-only multiplicities, also by oracle
        UnionFind gl(cnt);
        for (int i = 0; i < cnt; ++i) gl.unite(i, locate_strict(ctx.neg(adm[i])));
        std::vector<int> gl_reps;
        for (int i = 0; i < cnt; ++i)
            if (std::find(gl_reps.begin(), gl_reps.end(), gl.find(i)) == gl_reps.end())
                gl_reps.push_back(gl.find(i));
        std::vector<LinPoly> gl_polys;
        for (int r : gl_reps) gl_polys.push_back(psi(ctx, adm[r]));
        for (std::size_t i = 0; i < gl_reps.size(); ++i)
            for (std::size_t j = i + 1; j < gl_reps.size(); ++j) {
                if (gl.find(gl_reps[i]) == gl.find(gl_reps[j])) continue;
                if (gl2_equiv_bruteforce(gl_polys[i], gl_polys[j], opts))
                    gl.unite(gl_reps[i], gl_reps[j]);
            }
        std::vector<std::uint64_t> gl_size(cnt, 0);
        for (int i = 0; i < cnt; ++i) ++gl_size[gl.find(i)];
        for (int i = 0; i < cnt; ++i) xi[i] = gl_size[gl.find(i)];
    }

    std::unordered_map<int, std::vector<Fqn>> buckets;
    for (int i = 0; i < cnt; ++i) buckets[uf.find(i)].push_back(adm[i]);
    for (auto& [root, members] : buckets) rep.classes.push_back(members);
    sort_classes(ctx, rep.classes);
    std::uint64_t total = 0;
    for (auto& cls : rep.classes) total += cls.size();
    if (total != (std::uint64_t)cnt) throw std::logic_error("classes do not partition");

    for (int i = 0; i < cnt; ++i) rep.multiplicity.push_back({adm[i], xi[i]});
    rep.bound = code_bound(ctx);
    rep.bound_satisfied = !rep.bound || rep.classes.size() >= *rep.bound;
    return rep;
}

// ---------------------------------------------------------------------------
// linear sets on the line: tables and the 3-point search

namespace {

struct LineTables {
    std::uint64_t qn;
    std::vector<std::uint32_t> mul, add, inv, neg;

    std::uint32_t m(std::uint32_t a, std::uint32_t b) const { return mul[(std::size_t)a * qn + b]; }
    std::uint32_t s(std::uint32_t a, std::uint32_t b) const {
        return add[(std::size_t)a * qn + neg[b]];
    }
};

const LineTables& line_tables(const FieldCtx& ctx, std::uint64_t max_table) {
    static std::mutex mu;
    static std::map<std::tuple<int, int, int>, std::unique_ptr<LineTables>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(ctx.p(), ctx.r(), ctx.t());
    auto it = cache.find(key);
    if (it != cache.end()) return *it->second;
    std::uint64_t qn = ctx.order();
    if (qn > max_table)
        throw GuardRailError("point search needs full field tables; q^n exceeds the cap");
    auto tab = std::make_unique<LineTables>();
    tab->qn = qn;
    tab->mul.resize((std::size_t)qn * qn);
    tab->add.resize((std::size_t)qn * qn);
    tab->inv.resize(qn);
    tab->neg.resize(qn);
    std::vector<Fqn> elems(qn);
    for (std::uint64_t i = 0; i < qn; ++i) elems[i] = ctx.element(i);
    std::vector<std::uint16_t> buf(ctx.n());
    for (std::uint64_t i = 0; i < qn; ++i) {
        tab->neg[i] = (std::uint32_t)ctx.index_of(ctx.neg(elems[i]));
        if (i) tab->inv[i] = (std::uint32_t)ctx.index_of(ctx.inv(elems[i]));
        for (std::uint64_t j = 0; j < qn; ++j) {
            ctx.mul_raw(buf.data(), elems[i].c.data(), elems[j].c.data());
            tab->mul[(std::size_t)i * qn + j] = (std::uint32_t)ctx.index_raw(buf.data());
            ctx.add_raw(buf.data(), elems[i].c.data(), elems[j].c.data());
            tab->add[(std::size_t)i * qn + j] = (std::uint32_t)ctx.index_raw(buf.data());
        }
    }
    auto& ref = *tab;
    cache[key] = std::move(tab);
    return ref;
}

struct Bitmask {
    std::vector<std::uint64_t> bits;
    explicit Bitmask(std::uint64_t size) : bits((size + 64) / 64 + 1, 0) {}
    void set(std::uint64_t i) { bits[i >> 6] |= 1ull << (i & 63); }
    bool test(std::uint64_t i) const { return bits[i >> 6] >> (i & 63) & 1; }
};

// image of the finite point (1 : m) under (a b; c d): (a + b m : c + d m)
std::uint32_t apply_point(const LineTables& t, std::uint32_t a, std::uint32_t b, std::uint32_t c,
                          std::uint32_t d, std::uint32_t m, std::uint32_t inf_id) {
    std::uint32_t den = t.add[(std::size_t)a * t.qn + t.m(b, m)];
    std::uint32_t num = t.add[(std::size_t)c * t.qn + t.m(d, m)];
    if (den == 0) return inf_id;
    return t.m(num, t.inv[den]);
}

struct Frame {
    // matrix sending the anchor triple to (inf, 0, 1)
    std::uint32_t a, b, c, d;
};

}  // namespace

std::optional<EquivWitness> linset_pgl_equiv(const LinearSet& lf, const LinearSet& lg,
                                             const LinsetOptions& opts) {
    const FieldCtx& ctx = *lf.ctx;
    if (!(ctx == *lg.ctx)) throw ConfigError("context mismatch");
    if (lf.size() != lg.size()) return std::nullopt;
    if (lf.size() < 3) throw ConfigError("point search needs at least three points");
    const LineTables& tab = line_tables(ctx, opts.max_table);
    std::uint64_t qn = tab.qn;
    std::uint32_t inf_id = (std::uint32_t)qn;

    // anchors: the three lex-least points of lf (ratios are lex-sorted)
    std::uint32_t m0 = (std::uint32_t)ctx.index_of(lf.ratios[0]);
    std::uint32_t m1 = (std::uint32_t)ctx.index_of(lf.ratios[1]);
    std::uint32_t m2 = (std::uint32_t)ctx.index_of(lf.ratios[2]);
    // alpha: m -> lambda (m - m1) / (m - m0), lambda = (m2 - m0)/(m2 - m1)
    std::uint32_t lam = tab.m(tab.s(m2, m0), tab.inv[tab.s(m2, m1)]);
    Frame alpha{tab.neg[m0], 1, tab.neg[tab.m(lam, m1)], lam};

    std::vector<std::uint32_t> af;  // alpha(lf) without inf and 0, ascending
    Bitmask amask(qn + 1);
    for (const Fqn& mf : lf.ratios) {
        std::uint32_t id = apply_point(tab, alpha.a, alpha.b, alpha.c, alpha.d,
                                       (std::uint32_t)ctx.index_of(mf), inf_id);
        amask.set(id);
        if (id != inf_id && id != 0) af.push_back(id);
    }
    std::sort(af.begin(), af.end());

    std::vector<std::uint32_t> gpts;
    for (const Fqn& mg : lg.ratios) gpts.push_back((std::uint32_t)ctx.index_of(mg));
    std::size_t L = gpts.size();

    struct Hit {
        std::uint64_t rank;
        std::uint32_t q0, q1, lambda;
    };
    std::atomic<std::uint64_t> best_rank{UINT64_MAX};
    std::vector<std::optional<Hit>> found(effective_jobs(opts.jobs));

    parallel_ranges(L, opts.jobs, [&](int worker, std::uint64_t lo, std::uint64_t hi) {
        std::vector<std::uint32_t> bg;
        bg.reserve(L);
        Bitmask bmask(qn + 1);
        for (std::uint64_t i0 = lo; i0 < hi; ++i0) {
            if ((std::uint64_t)i0 * L * L >= best_rank.load(std::memory_order_relaxed)) break;
            std::uint32_t q0 = gpts[i0];
            for (std::uint64_t i1 = 0; i1 < L; ++i1) {
                if (i1 == i0) continue;
                std::uint64_t base = ((std::uint64_t)i0 * L + i1) * L;
                if (base >= best_rank.load(std::memory_order_relaxed)) break;
                std::uint32_t q1 = gpts[i1];
                // beta: m -> (m - q1)/(m - q0); lambda candidates are probed
                // in transformed-point order, fixed by the canonical order of
                // the target set
                std::fill(bmask.bits.begin(), bmask.bits.end(), 0);
                bg.clear();
                const std::uint32_t* sub_q0 = tab.add.data() + (std::size_t)tab.neg[q0] * qn;
                const std::uint32_t* sub_q1 = tab.add.data() + (std::size_t)tab.neg[q1] * qn;
                for (std::uint32_t m : gpts) {
                    std::uint32_t den = sub_q0[m];
                    std::uint32_t id = den ? tab.m(sub_q1[m], tab.inv[den]) : inf_id;
                    bmask.set(id);
                    if (id != inf_id && id != 0) bg.push_back(id);
                }
                if (bg.size() != af.size()) continue;  // 0 or inf coverage differs
                for (std::uint64_t il = 0; il < bg.size(); ++il) {
                    std::uint32_t lambda = bg[il];
                    bool ok = true;
                    for (std::uint32_t s : af)
                        if (!bmask.test(tab.m(lambda, s))) {
                            ok = false;
                            break;
                        }
                    if (!ok) continue;
                    std::uint64_t rank = base + il;
                    std::uint64_t cur = best_rank.load(std::memory_order_relaxed);
                    while (rank < cur &&
                           !best_rank.compare_exchange_weak(cur, rank, std::memory_order_relaxed)) {
                    }
                    if (!found[worker] || rank < found[worker]->rank)
                        found[worker] = Hit{rank, q0, q1, lambda};
                    break;  // smaller lambda-ranks for this (q0,q1) are done
                }
            }
        }
    });

    std::optional<Hit> best;
    for (auto& h : found)
        if (h && (!best || h->rank < best->rank)) best = h;
    if (!best) return std::nullopt;

    // witness matrix: beta^(-1) * diag(1, lambda) * alpha over the field
    Fqn a0 = ctx.neg(ctx.element(best->q0)), b0 = ctx.one();
    Fqn c0 = ctx.neg(ctx.element(best->q1)), d0 = ctx.one();
    // beta^(-1) = adj(beta) up to scale: (d0 -b0; -c0 a0)
    Fqn lambda = ctx.element(best->lambda);
    Fqn m0e = ctx.element(m0), m1e = ctx.element(m1);
    Fqn al_a = ctx.neg(m0e), al_b = ctx.one();
    Fqn al_c = ctx.neg(ctx.mul(ctx.element(lam), m1e)), al_d = ctx.element(lam);
    // D * alpha
    Fqn da = al_a, db = al_b;
    Fqn dc = ctx.mul(lambda, al_c), dd = ctx.mul(lambda, al_d);
    EquivWitness w;
    w.a = ctx.add(ctx.mul(d0, da), ctx.mul(ctx.neg(b0), dc));
    w.b = ctx.add(ctx.mul(d0, db), ctx.mul(ctx.neg(b0), dd));
    w.c = ctx.add(ctx.mul(ctx.neg(c0), da), ctx.mul(a0, dc));
    w.d = ctx.add(ctx.mul(ctx.neg(c0), db), ctx.mul(a0, dd));
    w.rho_exp = 0;
    if (!verify_linset_witness(lf, lg, w))
        throw std::logic_error("assembled projectivity fails the full set check");
    return w;
}

std::optional<EquivWitness> linset_pgammal_equiv(const LinearSet& lf, const LinearSet& lg,
                                                 const LinsetOptions& opts) {
    const FieldCtx& ctx = *lf.ctx;
    int rn = ctx.r() * ctx.n();
    for (int e = 0; e < rn; ++e) {
        LinearSet lfe;
        lfe.ctx = &ctx;
        lfe.source = lp_aut(lf.source, e);
        lfe.ratios.reserve(lf.ratios.size());
        for (const Fqn& m : lf.ratios) lfe.ratios.push_back(ctx.aut_p(m, e));
        std::sort(lfe.ratios.begin(), lfe.ratios.end(),
                  [&](const Fqn& a, const Fqn& b) { return ctx.lex_less(a, b); });
        auto w = linset_pgl_equiv(lfe, lg, opts);
        if (w) {
            w->rho_exp = e;
            return w;
        }
    }
    return std::nullopt;
}

bool verify_linset_witness(const LinearSet& lf, const LinearSet& lg, const EquivWitness& w) {
    const FieldCtx& ctx = *lf.ctx;
    if (lf.size() != lg.size()) return false;
    std::unordered_map<std::uint64_t, bool> target;
    for (const Fqn& m : lg.ratios) target[ctx.index_of(m)] = true;
    for (const Fqn& m : lf.ratios) {
        Fqn ms = ctx.aut_p(m, w.rho_exp);
        Fqn den = ctx.add(w.a, ctx.mul(w.b, ms));
        if (ctx.is_zero(den)) return false;  // would map onto the infinity point
        Fqn img = ctx.mul(ctx.add(w.c, ctx.mul(w.d, ms)), ctx.inv(den));
        if (!target.count(ctx.index_of(img))) return false;
    }
    return true;
}

bool lemma_coeff_identities(const LinPoly& f, const LinPoly& g) {
    const FieldCtx& ctx = *f.ctx;
    int n = ctx.n();
    if (!(f.c[0] == g.c[0])) return false;
    for (int k = 1; k < n; ++k) {
        Fqn lhs = ctx.mul(f.c[k], ctx.frobenius(f.c[n - k], k));
        Fqn rhs = ctx.mul(g.c[k], ctx.frobenius(g.c[n - k], k));
        if (!(lhs == rhs)) return false;
    }
    for (int k = 2; k < n; ++k) {
        auto triple = [&](const LinPoly& x) {
            Fqn t1 = ctx.mul(x.c[1], ctx.mul(ctx.frobenius(x.c[k - 1], 1),
                                             ctx.frobenius(x.c[n - k], k)));
            Fqn t2 = ctx.mul(x.c[k], ctx.mul(ctx.frobenius(x.c[n - 1], 1),
                                             ctx.frobenius(x.c[(n - k + 1) % n], k)));
            return ctx.add(t1, t2);
        };
        if (!(triple(f) == triple(g))) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// linear-set classification

namespace {

// Discrete-log view of F_(q^n)^*: all the set matching below happens in
// Z/(q^n - 1), where scaling is a shift, inversion is negation and the field
// automorphism x -> x^(p^e) is multiplication by p^e.
struct LogTables {
    std::uint64_t qn, m;          // m = qn - 1
    std::vector<std::uint32_t> exp;  // exp[k] = index of g^k
    std::vector<std::uint32_t> log;  // inverse map (log[1-index] = 0)
};

const LogTables& log_tables(const FieldCtx& ctx) {
    static std::mutex mu;
    static std::map<std::tuple<int, int, int>, std::unique_ptr<LogTables>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(ctx.p(), ctx.r(), ctx.t());
    auto it = cache.find(key);
    if (it != cache.end()) return *it->second;
    ctx.require_enumerable(26);
    auto tab = std::make_unique<LogTables>();
    tab->qn = ctx.order();
    tab->m = tab->qn - 1;
    std::vector<std::uint64_t> prime_divs;
    {
        std::uint64_t v = tab->m;
        for (std::uint64_t d = 2; d * d <= v; ++d)
            while (v % d == 0) {
                if (prime_divs.empty() || prime_divs.back() != d) prime_divs.push_back(d);
                v /= d;
            }
        if (v > 1) prime_divs.push_back(v);
    }
    Fqn gen;
    for (std::uint64_t idx = 2;; ++idx) {
        Fqn cand = ctx.element(idx);
        bool primitive = true;
        for (std::uint64_t d : prime_divs)
            if (ctx.pow_u64(cand, tab->m / d) == ctx.one()) {
                primitive = false;
                break;
            }
        if (primitive) {
            gen = cand;
            break;
        }
    }
    tab->exp.resize(tab->m);
    tab->log.assign(tab->qn, 0);
    Fqn cur = ctx.one();
    for (std::uint64_t k = 0; k < tab->m; ++k) {
        std::uint64_t idx = ctx.index_of(cur);
        tab->exp[k] = (std::uint32_t)idx;
        tab->log[idx] = (std::uint32_t)k;
        cur = ctx.mul(cur, gen);
    }
    auto& ref = *tab;
    cache[key] = std::move(tab);
    return ref;
}

struct RatioSet {
    bool has_zero = false;
    std::vector<std::uint32_t> logs;  // of the nonzero values
    Bitmask logmask;

    explicit RatioSet(std::uint64_t m) : logmask(m) {}
};

RatioSet ratio_set_of(const LogTables& lt, const LinPoly& f,
                      const ScanOptions& sopts) {
    FiberCounts counts = fiber_counts(f, sopts);
    RatioSet rs(lt.m);
    for (std::uint64_t v = 0; v < counts.count.size(); ++v) {
        if (!counts.count[v]) continue;
        if (v == 0) {
            rs.has_zero = true;
        } else {
            rs.logs.push_back(lt.log[v]);
            rs.logmask.set(lt.log[v]);
        }
    }
    return rs;
}

RatioSet apply_aut_set(const LogTables& lt, const RatioSet& s, int pe_mod) {
    RatioSet out(lt.m);
    out.has_zero = s.has_zero;
    for (std::uint32_t l : s.logs) {
        std::uint64_t nl = (std::uint64_t)((unsigned __int128)l * pe_mod % lt.m);
        out.logs.push_back((std::uint32_t)nl);
        out.logmask.set(nl);
    }
    return out;
}

// exists a shift (scaling) with shift + s2 == s1 in Z/m?  negate = true
// composes with log-negation (the reciprocal map m -> c/m)
bool shift_match(const LogTables& lt, const RatioSet& s1, const RatioSet& s2, bool negate) {
    if (negate && (s1.has_zero || s2.has_zero)) return false;  // 1/0 has no image
    if (!negate && s1.has_zero != s2.has_zero) return false;
    if (s1.logs.size() != s2.logs.size()) return false;
    if (s1.logs.empty()) return true;
    std::uint64_t m = lt.m;
    std::uint64_t base = negate ? (m - s2.logs[0]) % m : s2.logs[0];
    for (std::uint32_t target : s1.logs) {
        std::uint64_t shift = (target + m - base) % m;
        bool ok = true;
        for (std::uint32_t l : s2.logs) {
            std::uint64_t ll = negate ? (m - l) % m : l;
            if (!s1.logmask.test((ll + shift) % m)) {
                ok = false;
                break;
            }
        }
        if (ok) return true;
    }
    return false;
}

}  // namespace

OrbitReport classify_linsets(const FieldCtx& ctx, ClassifyMode mode, const LinsetOptions& opts) {
    std::vector<Fqn> adm = admissible_h(ctx, opts.max_bits);
    if (mode == ClassifyMode::Auto)
        mode = ctx.t() > 4 ? ClassifyMode::Criterion : ClassifyMode::Oracle;
    int cnt = (int)adm.size();
    int rn = ctx.r() * ctx.n();
    ScanOptions sopts{opts.jobs, opts.max_bits};

    OrbitReport rep;
    rep.relation = "linset_equiv";
    UnionFind uf(cnt);
    std::unordered_map<std::uint64_t, int> pos;
    for (int i = 0; i < cnt; ++i) pos[ctx.index_of(adm[i])] = i;

    // code classes first: code equivalence refines linear-set equivalence
    OrbitReport codes = classify_codes(
        ctx, mode == ClassifyMode::Oracle ? ClassifyMode::Oracle : ClassifyMode::Criterion,
        EquivOptions{opts.jobs, opts.max_bits, ScanStrategy::Auto});
    std::vector<std::uint64_t> code_class_of(cnt), code_class_size(codes.classes.size());
    for (std::size_t c = 0; c < codes.classes.size(); ++c) {
        code_class_size[c] = codes.classes[c].size();
        for (const Fqn& h : codes.classes[c]) code_class_of[pos.at(ctx.index_of(h))] = c;
    }
    for (std::size_t c = 0; c < codes.classes.size(); ++c) {
        int first = pos.at(ctx.index_of(codes.classes[c][0]));
        for (const Fqn& h : codes.classes[c]) uf.unite(first, pos.at(ctx.index_of(h)));
    }
    std::vector<int> reps;
    for (std::size_t c = 0; c < codes.classes.size(); ++c)
        reps.push_back(pos.at(ctx.index_of(codes.classes[c][0])));

    if (mode == ClassifyMode::Oracle) {
        rep.mode = "oracle";
        std::vector<LinearSet> sets(reps.size());
        for (std::size_t i = 0; i < reps.size(); ++i)
            sets[i] = linear_set(psi(ctx, adm[reps[i]]), sopts);
        for (std::size_t i = 0; i < reps.size(); ++i)
            for (std::size_t j = i + 1; j < reps.size(); ++j) {
                if (uf.find(reps[i]) == uf.find(reps[j])) continue;
                if (sets[i].ratios == sets[j].ratios ||
                    linset_pgammal_equiv(sets[i], sets[j], opts))
                    uf.unite(reps[i], reps[j]);
            }
    } else {
        rep.mode = "criterion_assisted";
        // between family members with t > 4, the only projectivities that can
        // identify the ratio sets are scalings and scaled reciprocals; the
        // automorphism loop supplies the semilinear part
        const LogTables& lt = log_tables(ctx);
        std::vector<RatioSet> base;
        for (std::size_t i = 0; i < reps.size(); ++i)
            base.push_back(ratio_set_of(lt, psi(ctx, adm[reps[i]]), sopts));
        std::vector<int> pe_mods(rn);
        {
            std::uint64_t pe = 1;
            for (int e = 0; e < rn; ++e) {
                pe_mods[e] = (int)pe;
                pe = (std::uint64_t)((unsigned __int128)pe * ctx.p() % lt.m);
            }
        }
        for (std::size_t j = 1; j < reps.size(); ++j) {
            std::vector<RatioSet> images;
            for (int e = 0; e < rn; ++e) images.push_back(apply_aut_set(lt, base[j], pe_mods[e]));
            for (std::size_t i = 0; i < j; ++i) {
                if (uf.find(reps[i]) == uf.find(reps[j])) continue;
                bool merged = false;
                for (int e = 0; e < rn && !merged; ++e)
                    merged = shift_match(lt, base[i], images[e], false) ||
                             shift_match(lt, base[i], images[e], true);
                if (merged) uf.unite(reps[i], reps[j]);
            }
        }
    }

    std::unordered_map<int, std::vector<Fqn>> buckets;
    for (int i = 0; i < cnt; ++i) buckets[uf.find(i)].push_back(adm[i]);
    for (auto& [root, members] : buckets) rep.classes.push_back(members);
    sort_classes(ctx, rep.classes);

    // epsilon_h: the GammaL multiplicity, i.e. the size of h's code class
    for (int i = 0; i < cnt; ++i)
        rep.multiplicity.push_back({adm[i], code_class_size[code_class_of[i]]});

    // which code classes merged into each linear-set class
    for (auto& cls : rep.classes) {
        std::vector<std::uint64_t> seen;
        for (const Fqn& h : cls) {
            std::uint64_t c = code_class_of[pos.at(ctx.index_of(h))];
            if (std::find(seen.begin(), seen.end(), c) == seen.end()) seen.push_back(c);
        }
        std::vector<std::uint64_t> sizes;
        for (std::uint64_t c : seen) sizes.push_back(code_class_size[c]);
        std::sort(sizes.begin(), sizes.end());
        if (!sizes.empty() && sizes.front() != sizes.back()) rep.epsilon_uniform = false;
        rep.class_code_sizes.push_back(std::move(sizes));
    }

    rep.bound = linset_bound(ctx);
    rep.bound_satisfied = !rep.bound || rep.classes.size() >= *rep.bound;
    return rep;
}

std::optional<std::string> ratio_set_relation(const LinPoly& f, const LinPoly& g,
                                              const ScanOptions& opts) {
    const FieldCtx& ctx = *f.ctx;
    const LogTables& lt = log_tables(ctx);
    RatioSet rf = ratio_set_of(lt, f, opts);
    RatioSet rg = ratio_set_of(lt, g, opts);
    int rn = ctx.r() * ctx.n();
    std::uint64_t pe = 1;
    for (int e = 0; e < rn; ++e) {
        RatioSet im = apply_aut_set(lt, rg, (int)pe);
        if (shift_match(lt, rf, im, false)) return "scaling";
        if (shift_match(lt, rf, im, true)) return "reciprocal";
        pe = (std::uint64_t)((unsigned __int128)pe * ctx.p() % lt.m);
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// adjoint witness, automorphisms, binomial criterion

AdjointEquivalence adjoint_equiv_witness(const FieldCtx& ctx, const Fqn& h,
                                         const ScanOptions& opts) {
    require_admissible(ctx, h);
    int t = ctx.t();
    LinPoly f = psi(ctx, h);

    // g(x) = h * adjoint(psi)(x / h)
    LinPoly ahat = lp_adjoint(f);
    LinPoly g = lp_zero(ctx);
    Fqn hinv = ctx.inv(h);
    for (int i = 0; i < ctx.n(); ++i)
        g.c[i] = ctx.mul(h, ctx.mul(ahat.c[i], ctx.frobenius(hinv, i)));
    {
        // closed form of the same polynomial
        LinPoly expect = lp_zero(ctx);
        expect.c[1] = ctx.one();
        expect.c[t - 1] = ctx.minus_one();
        expect.c[t + 1] = ctx.mul(h, ctx.inv(ctx.frobenius(h, t + 1)));
        expect.c[2 * t - 1] = ctx.mul(h, ctx.inv(ctx.frobenius(h, 2 * t - 1)));
        if (!(g == expect)) throw std::logic_error("adjoint-normalized polynomial mismatch");
    }

    // b = (z h / (h^(q^2+1) - 1))^(q^(2t-1)) with z = 1
    Fqn denom = ctx.sub(ctx.mul(h, ctx.frobenius(h, 2)), ctx.one());
    Fqn b = ctx.frobenius(ctx.mul(h, ctx.inv(denom)), 2 * t - 1);

    // solve c from one evaluation, then confirm c x = psi(b g(x)) everywhere
    LinPoly inner = lp_compose(f, lp_scale(b, g));
    Fqn x0 = ctx.basis()[0];
    Fqn c = lp_eval(inner, x0);  // x0 = 1
    ctx.require_enumerable(opts.max_bits);
    {
        LinPoly expect = lp_monomial(ctx, 0, c);
        std::vector<Fqn> img_inner = lp_basis_images(inner);
        std::vector<Fqn> img_cx = lp_basis_images(expect);
        ElementWalker w(ctx);
        int si = w.track(img_inner), sc = w.track(img_cx);
        while (w.next())
            if (!ctx.eq_raw(w.value(si), w.value(sc)))
                throw std::logic_error("adjoint witness identity fails under evaluation");
    }

    AdjointEquivalence out;
    out.g = g;
    out.witness = EquivWitness{ctx.zero(), b, c, ctx.zero(), 0};
    return out;
}

AutReport aut_group(const FieldCtx& ctx, const Fqn& h, bool with_idealizer,
                    const ScanOptions& opts) {
    require_admissible(ctx, h);
    AutReport rep;
    int rn = ctx.r() * ctx.n();
    bool twist = ctx.t() % 4 == 2;
    Fqn nh = ctx.neg(h);
    for (int e = 0; e < rn; ++e) {
        Fqn hr = ctx.aut_p(h, e);
        bool member = twist
                          ? ctx.mul(ctx.mul(hr, ctx.inv(h)),
                                    ctx.frobenius(ctx.mul(hr, ctx.inv(h)), 2)) == ctx.one()
                          : (hr == h || hr == nh);
        if (member) rep.exponents.push_back(e);
    }
    if (ctx.t() > 4 && ctx.order_bits() < 63) {
        rep.order_asserted = true;
        std::uint64_t qn = ctx.order();
        rep.order = (qn - 1) * ((std::uint64_t)ctx.q() * ctx.q() - 1) *
                    (std::uint64_t)rep.exponents.size();
    }
    if (with_idealizer && ctx.order_bits() <= opts.max_bits) {
        RankCode code = code_from_scattered(psi(ctx, h), VerifyScattered::No);
        rep.right_idealizer_size = idealizer(code, IdealizerReport::Side::Right, opts).size;
    }
    return rep;
}

bool lp_equiv_criterion(const FieldCtx& ctx, int s, int t_exp, const Fqn& eta,
                        const Fqn& theta) {
    int n = ctx.n();
    auto validate = [&](int e, const Fqn& coeff, const char* which) {
        if (e < 1 || 2 * e > n - 1)
            throw ConfigError(std::string(which) + ": exponent must satisfy 1 <= s <= (n-1)/2");
        if (std::gcd(e, n) != 1)
            throw ConfigError(std::string(which) + ": gcd(s, n) must be 1");
        Fqn nrm = ctx.norm(coeff, 1);
        if (ctx.is_zero(nrm) || nrm == ctx.one())
            throw ConfigError(std::string(which) + ": N(coefficient) must avoid {0,1}");
    };
    validate(s, eta, "first polynomial");
    validate(t_exp, theta, "second polynomial");
    if (s != t_exp) return false;
    int m = std::gcd(2 * s, n);
    Fqn a = ctx.norm(theta, m), b = ctx.norm(eta, m);
    for (int e = 0; e < ctx.r() * m; ++e)
        if (a == ctx.aut_p(b, e)) return true;
    return false;
}

}  // namespace scatterlab
