#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "scatterlab/family.hpp"
#include "scatterlab/scatter.hpp"

using namespace scatterlab;

namespace {

LinPoly rnd_poly(const FieldCtx& ctx, std::mt19937_64& rng) {
    LinPoly f = lp_zero(ctx);
    for (int i = 0; i < ctx.n(); ++i)
        for (int k = 0; k < ctx.n(); ++k) f.c[i].c[k] = (std::uint16_t)(rng() % ctx.q());
    return f;
}

}  // namespace

TEST_CASE("family members over F_3^6 pass both checkers with full linear sets") {
    FieldCtx ctx = FieldCtx::make(3, 1, 3);
    std::uint64_t expect = (ctx.order() - 1) / (ctx.q() - 1);
    for (const Fqn& h : admissible_h(ctx)) {
        LinPoly f = psi(ctx, h);
        ScatterVerdict v = is_scattered_fiber(f);
        CHECK(v.scattered);
        CHECK(is_scattered_gamma(f));
        CHECK(linear_set(f).size() == expect);
    }
}

TEST_CASE("monomial cases: x^(q^2) over F_(q^4) fails with a usable witness") {
    FieldCtx ctx = FieldCtx::make(3, 1, 2);  // n = 4
    LinPoly f = lp_monomial(ctx, 2, ctx.one());
    ScatterVerdict v = is_scattered_fiber(f);
    CHECK(!v.scattered);
    REQUIRE(v.witness.has_value());
    auto [z, y] = *v.witness;
    // equal ratios but F_q-independent
    CHECK(ctx.mul(lp_eval(f, z), y) == ctx.mul(lp_eval(f, y), z));
    CHECK(!ctx.in_base_subfield(ctx.mul(y, ctx.inv(z))));
    CHECK(!is_scattered_gamma(f));
    CHECK(linear_set(f).size() < (ctx.order() - 1) / (ctx.q() - 1));

    FieldCtx c6 = FieldCtx::make(3, 1, 3);
    CHECK(is_scattered_fiber(lp_monomial(c6, 1, c6.one())).scattered);
    // x^q + x^(q^3) over F_3^6 is not scattered
    LinPoly g = lp_add(lp_monomial(c6, 1, c6.one()), lp_monomial(c6, 3, c6.one()));
    CHECK(!is_scattered_fiber(g).scattered);
    CHECK(!is_scattered_gamma(g));
}

TEST_CASE("fiber and gamma routes agree on random polynomials") {
    FieldCtx ctx = FieldCtx::make(3, 1, 3);
    std::mt19937_64 rng(31);
    int scattered_seen = 0;
    for (int it = 0; it < 50; ++it) {
        LinPoly f = rnd_poly(ctx, rng);
        if (lp_is_zero(f)) continue;
        bool a = is_scattered_fiber(f).scattered;
        bool b = is_scattered_gamma(f);
        CHECK(a == b);
        scattered_seen += a;
    }
    INFO("scattered among random: ", scattered_seen);
}

TEST_CASE("linear set properties") {
    FieldCtx ctx = FieldCtx::make(3, 1, 3);
    std::uint64_t expect = (ctx.order() - 1) / (ctx.q() - 1);

    // pseudo-regulus: all coprime exponents give the same point set
    LinearSet s1 = linear_set(lp_monomial(ctx, 1, ctx.one()));
    LinearSet s5 = linear_set(lp_monomial(ctx, 5, ctx.one()));
    CHECK(s1.size() == expect);
    CHECK(s1.ratios == s5.ratios);

    // the adjoint defines the same linear set
    for (const Fqn& h : {admissible_h(ctx)[0], admissible_h(ctx)[19]}) {
        LinPoly f = psi(ctx, h);
        CHECK(linear_set(f).ratios == linear_set(lp_adjoint(f)).ratios);
    }

    // points are canonical, sorted, and never the infinity point
    for (const ProjPoint& pt : s1.points()) CHECK(!pt.infinity);
    for (std::size_t i = 1; i < s1.ratios.size(); ++i)
        CHECK(ctx.lex_less(s1.ratios[i - 1], s1.ratios[i]));
}

TEST_CASE("fiber counts expose every kernel dimension") {
    FieldCtx ctx = FieldCtx::make(3, 1, 2);
    std::mt19937_64 rng(17);
    for (int it = 0; it < 10; ++it) {
        LinPoly f = rnd_poly(ctx, rng);
        if (lp_is_zero(f)) continue;
        FiberCounts counts = fiber_counts(f);
        // fiber of value v (plus zero) is the kernel of f - v x
        for (std::uint64_t v = 0; v < counts.count.size(); ++v) {
            LinPoly shifted = lp_sub(f, lp_monomial(ctx, 0, ctx.element(v)));
            RankKernel rk = lp_rank_kernel(shifted);
            std::uint64_t expect = 1;
            for (std::size_t i = 0; i < rk.kernel.size(); ++i) expect *= ctx.q();
            CHECK(counts.count[v] + 1 == expect);
        }
    }
}

TEST_CASE("csv point stream") {
    FieldCtx ctx = FieldCtx::make(3, 1, 2);
    LinearSet s = linear_set(lp_monomial(ctx, 1, ctx.one()));
    std::ostringstream os;
    write_points_csv(os, s);
    std::string text = os.str();
    std::size_t lines = std::count(text.begin(), text.end(), '\n');
    CHECK(lines == s.size() + 1);  // header + one row per point
    CHECK(text.substr(0, 6) == "x0,x1\n");
}

TEST_CASE("scan guard rails") {
    FieldCtx ctx = FieldCtx::make(3, 1, 3);
    ScanOptions tight;
    tight.max_bits = 5;  // 729 > 2^5
    CHECK_THROWS_AS(fiber_counts(lp_identity(ctx), tight), GuardRailError);
}
