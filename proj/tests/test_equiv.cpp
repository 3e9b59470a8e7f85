#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "scatterlab/equiv.hpp"
#include "scatterlab/scatter.hpp"

using namespace scatterlab;

namespace {

Fqn rnd(const FieldCtx& ctx, std::mt19937_64& rng) {
    Fqn x = ctx.zero();
    for (int i = 0; i < ctx.n(); ++i) x.c[i] = (std::uint16_t)(rng() % ctx.q());
    return x;
}

Fqn rnd_nonzero(const FieldCtx& ctx, std::mt19937_64& rng) {
    for (;;) {
        Fqn x = rnd(ctx, rng);
        if (!ctx.is_zero(x)) return x;
    }
}

}  // namespace

TEST_CASE("gl2 search: reflexivity, monomial separation, join/decoupled agreement") {
    FieldCtx ctx = FieldCtx::make(3, 1, 3);
    std::vector<Fqn> hs = admissible_h(ctx);
    LinPoly f = psi(ctx, hs[0]);

    auto self_w = gl2_equiv_bruteforce(f, f);
    REQUIRE(self_w.has_value());
    CHECK(verify_code_witness(f, f, *self_w));

    // exponents s and n-s give one code: the coordinate swap carries the
    // graph of x^q onto the graph of x^(q^(n-1)) -- this is the reason the
    // monomial family contributes phi(n)/2 classes, not phi(n)
    LinPoly m1 = lp_monomial(ctx, 1, ctx.one());
    LinPoly m5 = lp_monomial(ctx, 5, ctx.one());
    auto w15 = gl2_equiv_bruteforce(m1, m5);
    REQUIRE(w15.has_value());
    CHECK(verify_code_witness(m1, m5, *w15));
    // a genuinely separated pair needs s distinct from +-1 mod n: n = 8, s = 3
    FieldCtx c8 = FieldCtx::make(3, 1, 4);
    CHECK(!gammal2_equiv(lp_monomial(c8, 1, c8.one()), lp_monomial(c8, 3, c8.one()))
               .has_value());

    // negated parameter gives the identical polynomial
    CHECK(gl2_equiv_bruteforce(f, psi(ctx, ctx.neg(hs[0]))).has_value());

    // the decoupled scan needs t >= 4 for disjoint supports; at t = 4 both
    // strategies must agree, witnesses verified by evaluation
    FieldCtx c4 = FieldCtx::make(3, 1, 4);
    std::vector<Fqn> hs4 = admissible_h(c4);
    EquivOptions join_opt;
    join_opt.strategy = ScanStrategy::Join;
    EquivOptions dec_opt;
    dec_opt.strategy = ScanStrategy::Decoupled;
    std::mt19937_64 rng(3);
    for (int it = 0; it < 6; ++it) {
        const Fqn& a = hs4[rng() % hs4.size()];
        const Fqn& b = hs4[rng() % hs4.size()];
        LinPoly fa = psi(c4, a), fb = psi(c4, b);
        auto wj = gl2_equiv_bruteforce(fa, fb, join_opt);
        auto wd = gl2_equiv_bruteforce(fa, fb, dec_opt);
        CHECK(wj.has_value() == wd.has_value());
        if (wj) CHECK(verify_code_witness(fa, fb, *wj));
        if (wd) CHECK(verify_code_witness(fa, fb, *wd));
    }
    // t = 3 supports overlap: the decoupled scan must refuse
    CHECK_THROWS_AS(gl2_equiv_bruteforce(f, f, dec_opt), ConfigError);
}

TEST_CASE("semilinear layer: coefficient conjugation is found with the right exponent") {
    FieldCtx ctx = FieldCtx::make(3, 1, 3);
    std::vector<Fqn> hs = admissible_h(ctx);
    LinPoly f = psi(ctx, hs[0]);
    LinPoly g = psi(ctx, ctx.aut_p(hs[0], 1));
    auto w = gammal2_equiv(f, g);
    REQUIRE(w.has_value());
    CHECK(w->rho_exp == 1);
    CHECK(verify_code_witness(f, g, *w));
}

TEST_CASE("scaling invariance of the equivalence verdict") {
    FieldCtx ctx = FieldCtx::make(3, 1, 3);
    std::vector<Fqn> hs = admissible_h(ctx);
    std::mt19937_64 rng(5);
    LinPoly f = psi(ctx, hs[0]);
    for (const Fqn& k : {hs[1], hs[3], hs[15]}) {
        LinPoly g = psi(ctx, k);
        bool base = gl2_equiv_bruteforce(f, g).has_value();
        Fqn lam = rnd_nonzero(ctx, rng), mu = rnd_nonzero(ctx, rng);
        // lambda * g(mu x) spans the same pair of graph directions
        LinPoly g2 = lp_scale(lam, lp_compose(g, lp_monomial(ctx, 0, mu)));
        CHECK(gl2_equiv_bruteforce(f, g2).has_value() == base);
    }
}

TEST_CASE("witness relations compose: symmetry and transitivity on samples") {
    FieldCtx ctx = FieldCtx::make(3, 1, 3);
    std::vector<Fqn> hs = admissible_h(ctx);
    // h, h^p, h^(p^2) are pairwise equivalent with composable witnesses
    LinPoly a = psi(ctx, hs[0]);
    LinPoly b = psi(ctx, ctx.aut_p(hs[0], 1));
    LinPoly c = psi(ctx, ctx.aut_p(hs[0], 2));
    auto wab = gammal2_equiv(a, b);
    auto wba = gammal2_equiv(b, a);
    auto wac = gammal2_equiv(a, c);
    auto wbc = gammal2_equiv(b, c);
    REQUIRE(wab.has_value());
    CHECK(wba.has_value());  // symmetry of the relation
    REQUIRE(wbc.has_value());
    CHECK(wac.has_value());  // transitivity of the relation
    CHECK(verify_code_witness(a, c, *wac));
}

TEST_CASE("closed-form criterion at t = 5 and its guard at small t") {
    FieldCtx ctx = FieldCtx::make(3, 1, 5);
    std::vector<Fqn> hs = admissible_h(ctx);
    const Fqn& h = hs[0];
    CHECK(code_equiv_criterion(ctx, h, ctx.neg(h)));
    CHECK(code_equiv_criterion(ctx, h, ctx.aut_p(h, 3)));
    CHECK(code_equiv_criterion(ctx, h, ctx.neg(ctx.aut_p(h, 7))));

    FieldCtx c3 = FieldCtx::make(3, 1, 3);
    std::vector<Fqn> hs3 = admissible_h(c3);
    CHECK_THROWS_AS(code_equiv_criterion(c3, hs3[0], hs3[1]), ConfigError);
}

TEST_CASE("criterion agrees with the decoupled oracle on sampled pairs at t = 5") {
    FieldCtx ctx = FieldCtx::make(3, 1, 5);
    std::vector<Fqn> hs = admissible_h(ctx);
    std::mt19937_64 rng(7);
    EquivOptions dec;
    dec.strategy = ScanStrategy::Decoupled;
    int agree = 0;
    for (int it = 0; it < 6; ++it) {
        const Fqn& h = hs[rng() % hs.size()];
        const Fqn& k = hs[rng() % hs.size()];
        bool crit = code_equiv_criterion(ctx, h, k);
        bool oracle = gammal2_equiv(psi(ctx, h), psi(ctx, k), dec).has_value();
        CHECK(crit == oracle);
        agree += (crit == oracle);
    }
    CHECK(agree == 6);
}

TEST_CASE("code classification by criterion and by oracle") {
    FieldCtx c5 = FieldCtx::make(3, 1, 5);
    OrbitReport crit = classify_codes(c5, ClassifyMode::Criterion);
    REQUIRE(crit.bound.has_value());
    CHECK(*crit.bound == 12);
    CHECK(crit.bound_satisfied);
    CHECK(crit.class_count() >= 12);
    for (auto& [h, m] : crit.multiplicity) CHECK(m == 2);
    std::size_t total = 0;
    for (auto& cls : crit.classes) total += cls.size();
    CHECK(total == 244);

    FieldCtx c3 = FieldCtx::make(3, 1, 3);
    OrbitReport oracle = classify_codes(c3, ClassifyMode::Oracle);
    CHECK(!oracle.bound.has_value());
    std::size_t total3 = 0;
    for (auto& cls : oracle.classes) total3 += cls.size();
    CHECK(total3 == 28);
    // spot-check the partition against the pairwise oracle
    std::mt19937_64 rng(11);
    auto class_of = [&](const Fqn& h) {
        for (std::size_t c = 0; c < oracle.classes.size(); ++c)
            for (const Fqn& k : oracle.classes[c])
                if (k == h) return c;
        throw std::logic_error("h missing from partition");
    };
    std::vector<Fqn> hs3 = admissible_h(c3);
    for (int it = 0; it < 8; ++it) {
        const Fqn& h = hs3[rng() % hs3.size()];
        const Fqn& k = hs3[rng() % hs3.size()];
        bool same = class_of(h) == class_of(k);
        CHECK(same == gammal2_equiv(psi(c3, h), psi(c3, k)).has_value());
    }

    FieldCtx c6 = FieldCtx::make(3, 1, 6);
    OrbitReport t6 = classify_codes(c6, ClassifyMode::Criterion);
    REQUIRE(t6.bound.has_value());
    CHECK(*t6.bound == 6);
    CHECK(t6.bound_satisfied);
}

TEST_CASE("linear set equivalence search") {
    FieldCtx ctx = FieldCtx::make(3, 1, 3);
    std::vector<Fqn> hs = admissible_h(ctx);
    LinearSet lf = linear_set(psi(ctx, hs[0]));

    auto self_w = linset_pgl_equiv(lf, lf);
    REQUIRE(self_w.has_value());
    CHECK(verify_linset_witness(lf, lf, *self_w));

    // pseudo-regulus sets coincide, so the identity-like witness exists
    LinearSet p1 = linear_set(lp_monomial(ctx, 1, ctx.one()));
    LinearSet p5 = linear_set(lp_monomial(ctx, 5, ctx.one()));
    auto w15 = linset_pgl_equiv(p1, p5);
    REQUIRE(w15.has_value());
    CHECK(verify_linset_witness(p1, p5, *w15));

    // adjoint: same set
    LinearSet la = linear_set(lp_adjoint(psi(ctx, hs[0])));
    CHECK(lf.ratios == la.ratios);

    // different cardinalities are never equivalent
    LinearSet small = linear_set(lp_monomial(ctx, 3, ctx.one()));  // gcd(3, n) > 1
    CHECK(small.size() != lf.size());
    CHECK(!linset_pgl_equiv(lf, small).has_value());
}

TEST_CASE("projectivity images of a set are recovered by the search") {
    FieldCtx ctx = FieldCtx::make(3, 1, 3);
    std::vector<Fqn> hs = admissible_h(ctx);
    LinearSet lf = linear_set(psi(ctx, hs[0]));
    std::mt19937_64 rng(13);

    // transform lf by a random invertible matrix and demand a witness back
    Fqn a = rnd(ctx, rng), b = rnd(ctx, rng), c = rnd(ctx, rng), d = rnd(ctx, rng);
    while (ctx.is_zero(ctx.sub(ctx.mul(a, d), ctx.mul(b, c)))) {
        a = rnd(ctx, rng);
        d = rnd(ctx, rng);
    }
    LinearSet lg;
    lg.ctx = &ctx;
    lg.source = lf.source;
    bool degenerate = false;
    for (const Fqn& m : lf.ratios) {
        Fqn den = ctx.add(a, ctx.mul(b, m));
        if (ctx.is_zero(den)) {
            degenerate = true;  // image hits infinity: not a linear-set frame
            break;
        }
        lg.ratios.push_back(ctx.mul(ctx.add(c, ctx.mul(d, m)), ctx.inv(den)));
    }
    if (!degenerate) {
        std::sort(lg.ratios.begin(), lg.ratios.end(),
                  [&](const Fqn& x, const Fqn& y) { return ctx.lex_less(x, y); });
        auto w = linset_pgl_equiv(lf, lg);
        REQUIRE(w.has_value());
        CHECK(verify_linset_witness(lf, lg, *w));
    }
}

TEST_CASE("code witnesses convert to linear-set witnesses") {
    FieldCtx ctx = FieldCtx::make(3, 1, 3);
    std::vector<Fqn> hs = admissible_h(ctx);
    LinPoly f = psi(ctx, hs[0]);
    LinPoly g = psi(ctx, ctx.aut_p(hs[0], 2));
    auto w = gammal2_equiv(f, g);
    REQUIRE(w.has_value());
    // the same matrix and automorphism act projectively: through the defining
    // relation y = a x + b f'(x), g(y) = c x + d f'(x), every f-point lands
    // in the g-set
    LinearSet lg = linear_set(g);
    bool all_inside = true;
    LinPoly fr = lp_aut(f, w->rho_exp);
    ElementWalker walk(ctx);
    std::vector<bool> target(ctx.order(), false);
    for (const Fqn& m : lg.ratios) target[ctx.index_of(m)] = true;
    while (walk.next()) {
        Fqn x = ctx.wrap(walk.coords());
        Fqn fx = lp_eval(fr, x);
        Fqn y = ctx.add(ctx.mul(w->a, x), ctx.mul(w->b, fx));
        Fqn gy = ctx.add(ctx.mul(w->c, x), ctx.mul(w->d, fx));
        if (ctx.is_zero(y)) {
            all_inside = false;
            break;
        }
        if (!target[ctx.index_of(ctx.mul(gy, ctx.inv(y)))]) {
            all_inside = false;
            break;
        }
    }
    CHECK(all_inside);
}

TEST_CASE("coefficient identities necessary for equal linear sets") {
    FieldCtx ctx = FieldCtx::make(3, 1, 3);
    std::vector<Fqn> hs = admissible_h(ctx);
    LinPoly f = psi(ctx, hs[0]);
    CHECK(lemma_coeff_identities(f, f));

    // adjoint-normalized polynomial defines the same set; identities hold
    AdjointEquivalence ae = adjoint_equiv_witness(ctx, hs[0]);
    CHECK(linear_set(f).ratios == linear_set(ae.g).ratios);
    CHECK(lemma_coeff_identities(f, ae.g));

    // a pair with different sets and a violated identity
    std::mt19937_64 rng(17);
    bool found = false;
    for (int it = 0; it < 60 && !found; ++it) {
        LinPoly g = lp_zero(ctx);
        for (int i = 1; i < ctx.n(); ++i) g.c[i] = rnd(ctx, rng);
        if (lp_is_zero(g)) continue;
        if (!lemma_coeff_identities(f, g)) {
            CHECK(linear_set(f).ratios != linear_set(g).ratios);
            found = true;
        }
    }
    CHECK(found);
}

TEST_CASE("linear-set classification at t = 3 refines code classes") {
    FieldCtx ctx = FieldCtx::make(3, 1, 3);
    OrbitReport codes = classify_codes(ctx, ClassifyMode::Oracle);
    OrbitReport sets = classify_linsets(ctx, ClassifyMode::Oracle);
    std::size_t total = 0;
    for (auto& cls : sets.classes) total += cls.size();
    CHECK(total == 28);
    CHECK(sets.class_count() <= codes.class_count());
    // code-equivalent pairs stay together in the linear-set partition
    auto set_class_of = [&](const Fqn& h) {
        for (std::size_t c = 0; c < sets.classes.size(); ++c)
            for (const Fqn& k : sets.classes[c])
                if (k == h) return c;
        throw std::logic_error("missing h");
    };
    for (auto& cls : codes.classes) {
        std::size_t c0 = set_class_of(cls[0]);
        for (const Fqn& h : cls) CHECK(set_class_of(h) == c0);
    }
    // epsilon values are the code-class sizes
    for (auto& [h, eps] : sets.multiplicity) {
        bool matched = false;
        for (auto& cls : codes.classes)
            if (std::find(cls.begin(), cls.end(), h) != cls.end()) {
                CHECK(eps == cls.size());
                matched = true;
            }
        CHECK(matched);
    }
}

TEST_CASE("ratio-set relations: scaling and reciprocal images are detected") {
    FieldCtx ctx = FieldCtx::make(3, 1, 3);
    std::vector<Fqn> hs = admissible_h(ctx);
    std::mt19937_64 rng(19);
    LinPoly f = psi(ctx, hs[0]);

    // d * f has ratio set d * R_f
    Fqn d = rnd_nonzero(ctx, rng);
    CHECK(ratio_set_relation(f, lp_scale(d, f)) == std::string("scaling"));
    // a conjugated parameter is a scaling after some automorphism
    CHECK(ratio_set_relation(f, psi(ctx, ctx.aut_p(hs[0], 1))).has_value());

    // c * inverse(f) realizes the reciprocal set when f is bijective.  For
    // this family the answer comes back "scaling": the adjoint witness has
    // antidiagonal shape, which forces c * inv(R_f) = R_f, so both relations
    // hold and the scaling route is reported first.
    REQUIRE(lp_rank_kernel(f).rank == ctx.n());
    LinPoly finv = lp_invert(f);
    auto rel = ratio_set_relation(f, lp_scale(d, finv));
    REQUIRE(rel.has_value());
    // and the 3-point oracle confirms those sets are projectively equivalent
    LinearSet lf = linear_set(f);
    LinearSet lg = linear_set(lp_scale(d, finv));
    CHECK(linset_pgl_equiv(lf, lg).has_value());

    // a generic bijective polynomial is not self-reciprocal, so the inverse
    // relation must surface as "reciprocal" there
    FieldCtx c4 = FieldCtx::make(3, 1, 2);
    bool pure_reciprocal_seen = false;
    for (int it = 0; it < 200 && !pure_reciprocal_seen; ++it) {
        LinPoly g = lp_zero(c4);
        for (int i = 0; i < c4.n(); ++i)
            for (int k = 0; k < c4.n(); ++k) g.c[i].c[k] = (std::uint16_t)(rng() % c4.q());
        if (lp_rank_kernel(g).rank != c4.n()) continue;
        auto r = ratio_set_relation(g, lp_invert(g));
        REQUIRE(r.has_value());  // swap always relates a graph to its inverse
        pure_reciprocal_seen = *r == "reciprocal";
    }
    CHECK(pure_reciprocal_seen);

    // unrelated member: relation should match the code-level verdict pattern
    // (the t = 3 partition showed distinct classes stay unrelated)
    OrbitReport codes = classify_codes(ctx, ClassifyMode::Oracle);
    if (codes.classes.size() >= 2) {
        const Fqn& other = codes.classes[1][0];
        bool related = ratio_set_relation(f, psi(ctx, other)).has_value();
        bool equivalent = linset_pgammal_equiv(lf, linear_set(psi(ctx, other))).has_value();
        CHECK(related == equivalent);
    }
}

TEST_CASE("criterion-assisted linear-set classification at t = 5") {
    FieldCtx ctx = FieldCtx::make(3, 1, 5);
    OrbitReport sets = classify_linsets(ctx, ClassifyMode::Criterion);
    REQUIRE(sets.bound.has_value());
    CHECK(*sets.bound == 6);
    CHECK(sets.bound_satisfied);
    std::size_t total = 0;
    for (auto& cls : sets.classes) total += cls.size();
    CHECK(total == 244);
    CHECK(sets.epsilon_uniform);
}

TEST_CASE("explicit adjoint-code witness for every h at t = 3") {
    FieldCtx ctx = FieldCtx::make(3, 1, 3);
    int t = ctx.t();
    for (const Fqn& h : admissible_h(ctx)) {
        AdjointEquivalence ae = adjoint_equiv_witness(ctx, h);
        // b-identity from the construction: b^(q^(t+1)) = h^(q^2-1) b^q
        Fqn lhs = ctx.frobenius(ae.witness.b, t + 1);
        Fqn rhs = ctx.mul(ctx.mul(ctx.frobenius(h, 2), ctx.inv(h)),
                          ctx.frobenius(ae.witness.b, 1));
        CHECK(lhs == rhs);
        CHECK(!ctx.is_zero(ae.witness.b));
        CHECK(!ctx.is_zero(ae.witness.c));
    }
}

TEST_CASE("automorphism data") {
    FieldCtx c5 = FieldCtx::make(3, 1, 5);
    std::vector<Fqn> hs = admissible_h(c5);
    AutReport rep = aut_group(c5, hs[0], true);
    CHECK(!rep.exponents.empty());
    CHECK(rep.exponents[0] == 0);  // identity automorphism
    CHECK(rep.order_asserted);
    CHECK(rep.order == (c5.order() - 1) * ((std::uint64_t)c5.q() * c5.q() - 1) *
                           rep.exponents.size());
    CHECK(rep.right_idealizer_size == (std::uint64_t)c5.q() * c5.q());

    FieldCtx c3 = FieldCtx::make(3, 1, 3);
    AutReport r3 = aut_group(c3, admissible_h(c3)[0], true);
    CHECK(!r3.order_asserted);  // structure only claimed beyond t = 4
    CHECK(r3.right_idealizer_size > 0);
}

TEST_CASE("binomial-code criterion against the exhaustive oracle at n = 4") {
    FieldCtx ctx = FieldCtx::make(3, 1, 2);  // n = 4
    std::mt19937_64 rng(23);
    auto valid_coeff = [&](const Fqn& d) {
        Fqn nrm = ctx.norm(d, 1);
        return !ctx.is_zero(nrm) && !(nrm == ctx.one());
    };
    auto binomial = [&](const Fqn& d) {
        LinPoly f = lp_monomial(ctx, 1, d);
        f.c[3] = ctx.one();
        return f;
    };
    Fqn some_valid = ctx.element(4);
    REQUIRE(valid_coeff(some_valid));
    CHECK(lp_equiv_criterion(ctx, 1, 1, some_valid, some_valid));

    // criterion-positive pairs are always oracle-positive (this direction has
    // an explicit witness by construction)
    std::uint64_t q2m1 = (std::uint64_t)ctx.q() * ctx.q() - 1;
    int positives = 0;
    while (positives < 10) {
        Fqn eta = rnd_nonzero(ctx, rng);
        if (!valid_coeff(eta)) continue;
        Fqn w = rnd_nonzero(ctx, rng);
        Fqn theta = ctx.mul(ctx.aut_p(eta, (int)(rng() % 8)), ctx.pow_u64(w, q2m1));
        if (!valid_coeff(theta)) continue;
        CHECK(lp_equiv_criterion(ctx, 1, 1, eta, theta));
        CHECK(gammal2_equiv(binomial(eta), binomial(theta)).has_value());
        ++positives;
    }

    // exhaustive picture at q = 3, n = 4: the norm relation splits the 40
    // valid coefficients into 2 classes, but the oracle proves all 40
    // equivalent -- the compositional inverse of a binomial is again a
    // binomial when n = 4, an identification the norm relation cannot see.
    // Every cross-class merge must carry a witness that verifies by full
    // evaluation.
    std::vector<Fqn> etas;
    for (std::uint64_t i = 1; i < ctx.order(); ++i)
        if (valid_coeff(ctx.element(i))) etas.push_back(ctx.element(i));
    CHECK(etas.size() == 40);
    int cross_checked = 0;
    for (std::size_t j = 1; j < etas.size() && cross_checked < 4; ++j) {
        if (lp_equiv_criterion(ctx, 1, 1, etas[0], etas[j])) continue;
        auto w = gammal2_equiv(binomial(etas[0]), binomial(etas[j]));
        REQUIRE(w.has_value());
        CHECK(verify_code_witness(binomial(etas[0]), binomial(etas[j]), *w));
        ++cross_checked;
    }
    CHECK(cross_checked == 4);

    // at n = 6 the inverse of a binomial is no longer a binomial and the two
    // routes agree on both verdicts
    FieldCtx c6 = FieldCtx::make(3, 1, 3);
    auto binom6 = [&](const Fqn& d) {
        LinPoly f = lp_monomial(c6, 1, d);
        f.c[5] = c6.one();
        return f;
    };
    auto valid6 = [&](const Fqn& d) {
        Fqn nrm = c6.norm(d, 1);
        return !c6.is_zero(nrm) && !(nrm == c6.one());
    };
    int agreements = 0, negatives6 = 0;
    while (agreements < 16) {
        Fqn eta = rnd_nonzero(c6, rng), theta = rnd_nonzero(c6, rng);
        if (!valid6(eta) || !valid6(theta)) continue;
        bool crit = lp_equiv_criterion(c6, 1, 1, eta, theta);
        bool oracle = gammal2_equiv(binom6(eta), binom6(theta)).has_value();
        CHECK(crit == oracle);
        negatives6 += !oracle;
        ++agreements;
    }
    CHECK(negatives6 >= 3);

    CHECK_THROWS_AS(lp_equiv_criterion(ctx, 1, 1, ctx.one(), some_valid), ConfigError);
    CHECK_THROWS_AS(lp_equiv_criterion(ctx, 2, 2, some_valid, some_valid), ConfigError);
}
