#include "scatterlab/report.hpp"

namespace scatterlab {

Json ctx_to_json(const FieldCtx& ctx) {
    Json j;
    j["p"] = ctx.p();
    j["r"] = ctx.r();
    j["t"] = ctx.t();
    j["n"] = ctx.n();
    j["q"] = ctx.q();
    if (ctx.order_bits() < 63) j["order"] = ctx.order();
    // coefficient lists little-endian by degree
    j["irr_q"] = ctx.fq().irr();
    j["irr_qn"] = ctx.irr_qn();
    j["basis"] = "power";
    return j;
}

Json linpoly_to_json(const LinPoly& f) {
    Json arr = Json::array();
    for (const Fqn& c : f.c) arr.push_back(f.ctx->to_hex(c));
    return arr;
}

Json linear_set_to_json(const LinearSet& set) {
    Json j;
    j["size"] = set.size();
    Json pts = Json::array();
    for (const Fqn& m : set.ratios) pts.push_back(set.ctx->to_hex(m));
    j["points"] = pts;
    return j;
}

Json witness_to_json(const FieldCtx& ctx, const EquivWitness& w) {
    Json j;
    j["a"] = ctx.to_hex(w.a);
    j["b"] = ctx.to_hex(w.b);
    j["c"] = ctx.to_hex(w.c);
    j["d"] = ctx.to_hex(w.d);
    j["rho_exp"] = w.rho_exp;
    return j;
}

Json idealizer_to_json(const FieldCtx& ctx, const IdealizerReport& rep) {
    Json j;
    j["side"] = rep.side == IdealizerReport::Side::Left ? "left" : "right";
    j["size"] = rep.size;
    if (rep.factored) {
        j["scalar_part"] = rep.a_all ? Json("all") : [&] {
            Json arr = Json::array();
            for (const Fqn& a : rep.a_part) arr.push_back(ctx.to_hex(a));
            return arr;
        }();
        Json bp = Json::array();
        for (const Fqn& b : rep.b_part) bp.push_back(ctx.to_hex(b));
        j["twist_part"] = bp;
    } else {
        Json pr = Json::array();
        for (auto& [a, b] : rep.pairs) pr.push_back({ctx.to_hex(a), ctx.to_hex(b)});
        j["pairs"] = pr;
    }
    if (rep.mult_table_hash) j["mult_table_hash"] = rep.mult_table_hash;
    return j;
}

Json orbit_to_json(const FieldCtx& ctx, const OrbitReport& rep) {
    Json j;
    j["relation"] = rep.relation;
    j["mode"] = rep.mode;
    j["class_count"] = rep.class_count();
    if (rep.bound) {
        j["bound"] = *rep.bound;
        j["bound_satisfied"] = rep.bound_satisfied;
    }
    Json classes = Json::array();
    for (auto& cls : rep.classes) {
        Json c = Json::array();
        for (const Fqn& h : cls) c.push_back(ctx.to_hex(h));
        classes.push_back(c);
    }
    j["classes"] = classes;
    Json mult = Json::object();
    for (auto& [h, m] : rep.multiplicity) mult[ctx.to_hex(h)] = m;
    j["multiplicity"] = mult;
    if (!rep.class_code_sizes.empty()) {
        j["class_code_sizes"] = rep.class_code_sizes;
        j["epsilon_uniform"] = rep.epsilon_uniform;
    }
    return j;
}

Json aut_to_json(const AutReport& rep) {
    Json j;
    j["automorphism_exponents"] = rep.exponents;
    j["order_asserted"] = rep.order_asserted;
    if (rep.order_asserted) j["order"] = rep.order;
    if (rep.right_idealizer_size) j["right_idealizer_size"] = rep.right_idealizer_size;
    return j;
}

}  // namespace scatterlab
