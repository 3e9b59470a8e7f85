#include "scatterlab/family.hpp"

#include <numeric>

namespace scatterlab {

namespace {

// h^(q^a - q^b)
Fqn h_pow_diff(const FieldCtx& ctx, const Fqn& h, int a, int b) {
    return ctx.mul(ctx.frobenius(h, a), ctx.inv(ctx.frobenius(h, b)));
}

// canonical echelon basis of the kernel of a q-polynomial
std::vector<Fqn> kernel_basis(const LinPoly& f) { return lp_rank_kernel(f).kernel; }

void verify_image_description(const FieldCtx& ctx, const LinPoly& map, const LinPoly& defining,
                              int expected_dim) {
    RankKernel rk = lp_rank_kernel(defining);
    if ((int)rk.kernel.size() != expected_dim)
        throw std::logic_error("image description has wrong dimension");
    for (int i = 0; i < ctx.n(); ++i) {
        Fqn img = lp_eval(map, ctx.basis()[i]);
        if (!ctx.is_zero(lp_eval(defining, img)))
            throw std::logic_error("image description does not annihilate the map image");
    }
    if (lp_rank_kernel(map).rank != expected_dim)
        throw std::logic_error("map rank disagrees with image description");
}

}  // namespace

HCheck check_h(const FieldCtx& ctx, const Fqn& h) {
    HCheck d = diagnose_h(ctx, h);
    // admissibility forces the two derived conditions
    if (d.admissible() && !(d.q2_power_free && d.no_flip))
        throw std::logic_error("admissible h violates a derived condition");
    return d;
}

void require_admissible(const FieldCtx& ctx, const Fqn& h) {
    HCheck d = check_h(ctx, h);
    if (!d.norm_is_minus_one)
        throw ConfigError("inadmissible h: h^(q^t+1) != -1");
    if (!d.outside_half_field)
        throw ConfigError("inadmissible h: h lies in F_(q^t)");
}

LinPoly psi(const FieldCtx& ctx, const Fqn& h) {
    if (ctx.p() == 2) throw ConfigError("the psi family requires odd q");
    if (ctx.t() < 3) throw ConfigError("the psi family requires t >= 3");
    require_admissible(ctx, h);
    int t = ctx.t();
    LinPoly f = lp_zero(ctx);
    f.c[1] = ctx.one();
    f.c[t - 1] = ctx.one();
    f.c[t + 1] = ctx.neg(h_pow_diff(ctx, h, 0, t + 1));  // -h^(1-q^(t+1))
    f.c[2 * t - 1] = h_pow_diff(ctx, h, 0, 2 * t - 1);   // h^(1-q^(2t-1))
    return f;
}

LMSplit lm_split(const FieldCtx& ctx, const Fqn& h) {
    if (ctx.t() < 3) throw ConfigError("lm_split requires t >= 3");
    require_admissible(ctx, h);
    int t = ctx.t(), n = ctx.n();
    LMSplit s;
    s.L = lp_zero(ctx);
    s.L.c[1] = ctx.one();
    s.L.c[t + 1] = ctx.neg(h_pow_diff(ctx, h, 0, t + 1));
    s.M = lp_zero(ctx);
    s.M.c[t - 1] = ctx.one();
    s.M.c[2 * t - 1] = h_pow_diff(ctx, h, 0, 2 * t - 1);

    // ker L: x - h^(q^(2t-1)-q^t) x^(q^t) = 0
    s.ker_L.defining = lp_zero(ctx);
    s.ker_L.defining.c[0] = ctx.one();
    s.ker_L.defining.c[t] = ctx.neg(h_pow_diff(ctx, h, 2 * t - 1, t));
    // ker M: x + h^(q^(t+1)-q^t) x^(q^t) = 0
    s.ker_M.defining = lp_zero(ctx);
    s.ker_M.defining.c[0] = ctx.one();
    s.ker_M.defining.c[t] = h_pow_diff(ctx, h, t + 1, t);
    // im L: z^(q^t) + h^(q^t-q) z = 0
    s.im_L.defining = lp_zero(ctx);
    s.im_L.defining.c[t] = ctx.one();
    s.im_L.defining.c[0] = h_pow_diff(ctx, h, t, 1);
    // im M: z^(q^t) - h^(q^t-q^(t-1)) z = 0
    s.im_M.defining = lp_zero(ctx);
    s.im_M.defining.c[t] = ctx.one();
    s.im_M.defining.c[0] = ctx.neg(h_pow_diff(ctx, h, t, t - 1));

    s.ker_L.basis = kernel_basis(s.ker_L.defining);
    s.ker_M.basis = kernel_basis(s.ker_M.defining);
    s.im_L.basis = kernel_basis(s.im_L.defining);
    s.im_M.basis = kernel_basis(s.im_M.defining);

    // cross-check the closed-form descriptions against the maps themselves
    if (kernel_basis(s.L) != s.ker_L.basis || kernel_basis(s.M) != s.ker_M.basis)
        throw std::logic_error("kernel description mismatch");
    if (s.ker_L.dim() != t || s.ker_M.dim() != t)
        throw std::logic_error("kernel dimension is not t");
    verify_image_description(ctx, s.L, s.im_L.defining, n - t);
    verify_image_description(ctx, s.M, s.im_M.defining, n - t);
    return s;
}

RTMaps rt_maps(const FieldCtx& ctx, const Fqn& h) {
    if (ctx.t() < 3) throw ConfigError("rt_maps requires t >= 3");
    require_admissible(ctx, h);
    int t = ctx.t();
    RTMaps rt;
    rt.scale = h_pow_diff(ctx, h, t - 1, 1);
    rt.R = lp_zero(ctx);
    rt.R.c[t] = ctx.one();
    rt.R.c[0] = rt.scale;  // h^(q^(t-1)-q)
    rt.T = lp_zero(ctx);
    rt.T.c[t] = ctx.one();
    rt.T.c[0] = h_pow_diff(ctx, h, 1, t - 1);

    auto kr = kernel_basis(rt.R);
    auto kt = kernel_basis(rt.T);
    if ((int)kr.size() != t || (int)kt.size() != t)
        throw std::logic_error("ker R / ker T dimension is not t");
    // ker T = scale * ker R
    for (const Fqn& v : kr)
        if (!ctx.is_zero(lp_eval(rt.T, ctx.mul(rt.scale, v))))
            throw std::logic_error("ker T != scale * ker R");
    rt.rho = lex_least_nonzero_in_span(ctx, kr);
    rt.tau = lex_least_nonzero_in_span(ctx, kt);
    return rt;
}

LinPoly known_family(const FieldCtx& ctx, const FamilySpec& spec) {
    int n = ctx.n(), t = ctx.t();
    switch (spec.kind) {
        case FamilySpec::Kind::PseudoRegulus: {
            if (spec.s < 1 || spec.s > n - 1 || std::gcd(spec.s, n) != 1)
                throw ConfigError("pseudo-regulus family requires 1 <= s <= n-1 and gcd(s,n) = 1");
            return lp_monomial(ctx, spec.s, ctx.one());
        }
        case FamilySpec::Kind::LunardonPolverino: {
            if (n < 4) throw ConfigError("this family requires n >= 4");
            if (std::gcd(spec.s, n) != 1)
                throw ConfigError("this family requires gcd(s,n) = 1");
            Fqn nrm = ctx.norm(spec.delta, 1);
            if (ctx.is_zero(nrm) || nrm == ctx.one())
                throw ConfigError("this family requires N(delta) outside {0,1}");
            LinPoly f = lp_monomial(ctx, spec.s, spec.delta);
            f.c[(n - spec.s) % n] = ctx.one();
            return f;
        }
        case FamilySpec::Kind::LongobardiZanella: {
            if (ctx.p() == 2) throw ConfigError("this family requires odd q");
            bool ok = (t % 2 == 0 && std::gcd(spec.k_exp, t) == 1) ||
                      (t % 2 == 1 && std::gcd(spec.k_exp, 2 * t) == 1 && ctx.q() % 4 == 1);
            if (!ok)
                throw ConfigError(
                    "parameters must satisfy: t even with gcd(k,t) = 1, or t odd with "
                    "gcd(k,2t) = 1 and q = 1 (mod 4)");
            Fqn half = ctx.inv(ctx.from_int(2));
            LinPoly base = lp_zero(ctx);
            base.c[1] = half;
            base.c[t - 1] = half;
            base.c[t + 1] = ctx.neg(half);
            base.c[2 * t - 1] = half;
            LinPoly f = base;
            for (int i = 1; i < spec.k_exp; ++i) f = lp_compose(base, f);
            return f;
        }
        case FamilySpec::Kind::Psi:
            return psi(ctx, spec.h);
    }
    throw ConfigError("unknown family kind");
}

FamilySpec FamilySpec::parse(const FieldCtx& ctx, const std::string& text) {
    auto colon = text.find(':');
    if (colon == std::string::npos) throw ConfigError("family spec must look like 'pr:s=1'");
    std::string head = text.substr(0, colon);
    FamilySpec spec;
    if (head == "pr")
        spec.kind = Kind::PseudoRegulus;
    else if (head == "lp")
        spec.kind = Kind::LunardonPolverino;
    else if (head == "lz")
        spec.kind = Kind::LongobardiZanella;
    else if (head == "psi")
        spec.kind = Kind::Psi;
    else
        throw ConfigError("unknown family '" + head + "' (expected pr, lp, lz or psi)");

    std::string rest = text.substr(colon + 1);
    std::size_t pos = 0;
    while (pos < rest.size()) {
        auto comma = rest.find(',', pos);
        std::string item = rest.substr(pos, comma == std::string::npos ? std::string::npos
                                                                       : comma - pos);
        pos = comma == std::string::npos ? rest.size() : comma + 1;
        auto eq = item.find('=');
        if (eq == std::string::npos) throw ConfigError("family parameter must look like key=value");
        std::string key = item.substr(0, eq), val = item.substr(eq + 1);
        if (key == "s")
            spec.s = std::stoi(val);
        else if (key == "k")
            spec.k_exp = std::stoi(val);
        else if (key == "delta")
            spec.delta = ctx.from_hex(val);
        else if (key == "h")
            spec.h = ctx.from_hex(val);
        else
            throw ConfigError("unknown family parameter '" + key + "'");
    }
    return spec;
}

}  // namespace scatterlab
