#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "scatterlab/gf.hpp"

using namespace scatterlab;

namespace {

Fqn random_elem(const FieldCtx& ctx, std::mt19937_64& rng) {
    Fqn x = ctx.zero();
    for (int i = 0; i < ctx.n(); ++i) x.c[i] = (std::uint16_t)(rng() % ctx.q());
    return x;
}

Fqn random_nonzero(const FieldCtx& ctx, std::mt19937_64& rng) {
    for (;;) {
        Fqn x = random_elem(ctx, rng);
        if (!ctx.is_zero(x)) return x;
    }
}

}  // namespace

TEST_CASE("context construction is deterministic and validated") {
    FieldCtx a = FieldCtx::make(3, 1, 3);
    FieldCtx b = FieldCtx::make(3, 1, 3);
    CHECK(a.irr_qn() == b.irr_qn());
    CHECK(a.q() == 3);
    CHECK(a.n() == 6);
    CHECK(a.order() == 729);
    CHECK(FieldCtx::make(3, 1, 5).order() == 59049);

    CHECK_THROWS_AS(FieldCtx::make(4, 1, 3), ConfigError);  // not prime
    CHECK_THROWS_AS(FieldCtx::make(3, 0, 3), ConfigError);
    CHECK_THROWS_AS(FieldCtx::make(3, 1, 0), ConfigError);
}

TEST_CASE("modulus choices match the independently computed least tuples") {
    // frozen from an external enumeration of monic irreducibles in the
    // constant-first coefficient order
    auto low = [](const FieldCtx& c) {
        return std::vector<std::uint16_t>(c.irr_qn().begin(), c.irr_qn().end() - 1);
    };
    CHECK(low(FieldCtx::make(3, 1, 3)) == std::vector<std::uint16_t>{1, 0, 0, 0, 1, 1});
    CHECK(low(FieldCtx::make(3, 1, 5)) ==
          std::vector<std::uint16_t>{1, 0, 0, 0, 0, 0, 0, 0, 2, 0});
    CHECK(low(FieldCtx::make(3, 1, 6)) ==
          std::vector<std::uint16_t>{1, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 1});
    CHECK(low(FieldCtx::make(5, 1, 3)) == std::vector<std::uint16_t>{1, 0, 0, 0, 1, 1});
    // middle level: F_9 over F_3 gets y^2 + 1, F_25 over F_5 gets y^2 + y + 1
    CHECK(FieldCtx::make(3, 2, 3).fq().irr() == std::vector<std::uint16_t>{1, 0, 1});
    CHECK(FieldCtx::make(5, 2, 1).fq().irr() == std::vector<std::uint16_t>{1, 1, 1});
}

TEST_CASE("field axioms hold on randomized triples") {
    for (auto [p, r, t] : {std::tuple{3, 1, 3}, {5, 1, 3}, {3, 2, 2}, {7, 1, 2}}) {
        FieldCtx ctx = FieldCtx::make(p, r, t);
        std::mt19937_64 rng(12345);
        for (int it = 0; it < 200; ++it) {
            Fqn x = random_elem(ctx, rng), y = random_elem(ctx, rng), z = random_elem(ctx, rng);
            CHECK(ctx.add(x, y) == ctx.add(y, x));
            CHECK(ctx.mul(x, y) == ctx.mul(y, x));
            CHECK(ctx.add(ctx.add(x, y), z) == ctx.add(x, ctx.add(y, z)));
            CHECK(ctx.mul(ctx.mul(x, y), z) == ctx.mul(x, ctx.mul(y, z)));
            CHECK(ctx.mul(x, ctx.add(y, z)) == ctx.add(ctx.mul(x, y), ctx.mul(x, z)));
            CHECK(ctx.add(x, ctx.neg(x)) == ctx.zero());
            if (!ctx.is_zero(x)) CHECK(ctx.mul(x, ctx.inv(x)) == ctx.one());
        }
    }
}

TEST_CASE("powers and inversion edge cases") {
    FieldCtx ctx = FieldCtx::make(3, 1, 3);
    std::mt19937_64 rng(99);
    CHECK_THROWS_AS(ctx.inv(ctx.zero()), ConfigError);
    for (int it = 0; it < 50; ++it) {
        Fqn x = random_nonzero(ctx, rng);
        CHECK(ctx.pow_u64(x, ctx.order() - 1) == ctx.one());
        CHECK(ctx.pow_u64(ctx.one(), rng() % 100000) == ctx.one());
        CHECK(ctx.pow_u64(x, 0) == ctx.one());
    }
}

TEST_CASE("frobenius is an F_q-linear field automorphism of order n") {
    FieldCtx ctx = FieldCtx::make(3, 2, 2);  // q = 9, n = 4
    std::mt19937_64 rng(7);
    int n = ctx.n();
    for (int it = 0; it < 100; ++it) {
        Fqn x = random_elem(ctx, rng), y = random_elem(ctx, rng);
        int j = (int)(rng() % (2 * n));
        CHECK(ctx.frobenius(x, 0) == x);
        CHECK(ctx.frobenius(ctx.frobenius(x, j), n - (j % n)) == x);
        CHECK(ctx.frobenius(ctx.add(x, y), j) ==
              ctx.add(ctx.frobenius(x, j), ctx.frobenius(y, j)));
        CHECK(ctx.frobenius(ctx.mul(x, y), j) ==
              ctx.mul(ctx.frobenius(x, j), ctx.frobenius(y, j)));
        // F_q-linearity, including scalars
        std::uint16_t lam = (std::uint16_t)(rng() % ctx.q());
        CHECK(ctx.frobenius(ctx.mul(ctx.embed(lam), x), j) ==
              ctx.mul(ctx.embed(lam), ctx.frobenius(x, j)));
        CHECK(ctx.frobenius(ctx.embed(lam), j) == ctx.embed(lam));
    }
    // p-power automorphism composes correctly: p^r = q
    for (int it = 0; it < 20; ++it) {
        Fqn x = random_elem(ctx, rng);
        CHECK(ctx.aut_p(x, ctx.r()) == ctx.frobenius(x, 1));
        CHECK(ctx.aut_p(ctx.aut_p(x, 3), ctx.r() * ctx.n() - 3) == x);
    }
}

TEST_CASE("norm and trace land in the subfield and match the closed form") {
    FieldCtx ctx = FieldCtx::make(3, 1, 3);
    std::mt19937_64 rng(21);
    std::uint64_t qn = ctx.order();
    for (int it = 0; it < 60; ++it) {
        Fqn x = random_nonzero(ctx, rng);
        Fqn nrm = ctx.norm(x, 1);
        CHECK(nrm == ctx.pow_u64(x, (qn - 1) / (ctx.q() - 1)));
        CHECK(ctx.in_base_subfield(nrm));
        Fqn tr = ctx.trace(x, 1);
        CHECK(ctx.frobenius(tr, 1) == tr);
        Fqn nrm2 = ctx.norm(x, 2);
        CHECK(ctx.in_subfield(nrm2, 2));
        CHECK(nrm2 == ctx.pow_u64(x, (qn - 1) / (ctx.q() * ctx.q() - 1)));
    }
    CHECK(ctx.norm(ctx.one(), 3) == ctx.one());
    CHECK_THROWS_AS(ctx.norm(ctx.one(), 4), ConfigError);  // 4 does not divide 6
    CHECK_THROWS_AS(ctx.trace(ctx.one(), 5), ConfigError);
}

TEST_CASE("admissible h enumeration: counts, fiber size, necessary conditions") {
    struct Case {
        int p, r, t;
        std::size_t expect;
    };
    // #admissible = q^t + 1 - #{x in F_(q^t) : x^2 = -1}
    for (Case c : {Case{3, 1, 3, 28}, Case{5, 1, 3, 124}, Case{3, 1, 5, 244}}) {
        FieldCtx ctx = FieldCtx::make(c.p, c.r, c.t);
        std::vector<Fqn> hs = admissible_h(ctx);
        CHECK(hs.size() == c.expect);

        // fiber of the half-norm over -1 has size exactly q^t + 1
        std::uint64_t qt = 1;
        for (int i = 0; i < c.t; ++i) qt *= ctx.q();
        std::uint64_t in_half = 0;
        ElementWalker w(ctx);
        Fqn m1 = ctx.minus_one();
        while (w.next()) {
            Fqn x = ctx.wrap(w.coords());
            Fqn xt = ctx.frobenius(x, c.t);
            if (ctx.mul(x, xt) == m1 && xt == x) ++in_half;
        }
        CHECK(hs.size() + in_half == qt + 1);

        for (const Fqn& h : hs) {
            HDiagnostic d = diagnose_h(ctx, h);
            CHECK(d.admissible());
            CHECK(d.q2_power_free);  // h^(q^2+1) != 1
            CHECK(d.no_flip);        // h^(q^(t-2)) != -h
        }
        // deterministic order
        for (std::size_t i = 1; i < hs.size(); ++i) CHECK(ctx.lex_less(hs[i - 1], hs[i]));
    }
}

TEST_CASE("admissible h requires odd q") {
    FieldCtx ctx = FieldCtx::make(2, 1, 3);
    CHECK_THROWS_AS(admissible_h(ctx), ConfigError);
}

TEST_CASE("hex round trip and canonical encodings") {
    FieldCtx ctx = FieldCtx::make(3, 2, 2);
    std::mt19937_64 rng(5);
    for (int it = 0; it < 100; ++it) {
        Fqn x = random_elem(ctx, rng);
        CHECK(ctx.from_hex(ctx.to_hex(x)) == x);
        CHECK(ctx.element(ctx.index_of(x)) == x);
    }
    CHECK_THROWS_AS(ctx.from_hex("zz"), ConfigError);
    CHECK(ctx.to_hex(ctx.zero()) == std::string(ctx.n() * ctx.hex_digits_per_coord(), '0'));
}

TEST_CASE("walkers agree with direct evaluation") {
    FieldCtx ctx = FieldCtx::make(3, 1, 2);
    std::vector<Fqn> images(ctx.n());
    for (int i = 0; i < ctx.n(); ++i) images[i] = ctx.frobenius(ctx.basis()[i], 1);

    ElementWalker w(ctx);
    int slot = w.track(images);
    do {
        Fqn x = ctx.wrap(w.coords());
        CHECK(ctx.wrap(w.value(slot)) == ctx.frobenius(x, 1));
        CHECK(ctx.index_of(x) == w.index());
    } while (w.next());
    CHECK(w.index() == ctx.order() - 1);

    // seek lands on the same values
    ElementWalker w2(ctx);
    int s2 = w2.track(images);
    w2.seek(57);
    CHECK(ctx.wrap(w2.coords()) == ctx.element(57));
    CHECK(ctx.wrap(w2.value(s2)) == ctx.frobenius(ctx.element(57), 1));

    // projective walk covers each F_q^*-coset exactly once
    ProjWalker pw(ctx);
    std::uint64_t reps = 0;
    std::vector<bool> seen(ctx.order(), false);
    while (pw.next()) {
        ++reps;
        Fqn x = ctx.wrap(pw.coords());
        for (std::uint32_t c = 1; c < ctx.q(); ++c) {
            std::uint64_t idx = ctx.index_of(ctx.mul(ctx.embed((std::uint16_t)c), x));
            CHECK(!seen[idx]);
            seen[idx] = true;
        }
    }
    CHECK(reps == (ctx.order() - 1) / (ctx.q() - 1));
}
