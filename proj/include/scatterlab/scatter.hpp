// Scatteredness verification by two independent routes, and construction of
// the linear set L_f = { <(x, f(x))> : x in F_(q^n)^* } of PG(1, q^n).
//
// The fiber route classifies every x by the value f(x)/x: the fiber over v
// plus zero is exactly ker(f - v x), an F_q-subspace, so f is scattered iff
// every fiber has size q - 1.  The gamma route checks that f(gx) - g f(x)
// has trivial kernel for every g outside F_q.

#pragma once

#include <optional>
#include <ostream>
#include <utility>

#include "scatterlab/linpoly.hpp"

namespace scatterlab {

struct ScanOptions {
    int jobs = 0;  // 0 = hardware concurrency
    int max_bits = kDefaultEnumBits;
};

// (1 : m) for finite points; (0 : 1) is the infinity point
struct ProjPoint {
    bool infinity = false;
    Fqn m;
};

struct LinearSet {
    const FieldCtx* ctx = nullptr;
    std::vector<Fqn> ratios;  // finite points (1 : m), sorted in lex order
    LinPoly source;

    std::size_t size() const { return ratios.size(); }
    std::vector<ProjPoint> points() const;
};

// full fiber statistics of x -> f(x)/x on F_(q^n)^*, indexed by value index
struct FiberCounts {
    std::vector<std::uint32_t> count;
    std::uint32_t max_count = 0;
};

FiberCounts fiber_counts(const LinPoly& f, const ScanOptions& opts = {});

struct ScatterVerdict {
    bool scattered = false;
    // on failure: two F_q-independent elements with equal f(x)/x
    std::optional<std::pair<Fqn, Fqn>> witness;
};

ScatterVerdict is_scattered_fiber(const LinPoly& f, const ScanOptions& opts = {});

bool is_scattered_gamma(const LinPoly& f, const ScanOptions& opts = {});

LinearSet linear_set(const LinPoly& f, const ScanOptions& opts = {});
LinearSet linear_set_from_counts(const LinPoly& f, const FiberCounts& counts);

// one point encoding per line, canonical order
void write_points_csv(std::ostream& os, const LinearSet& set);

}  // namespace scatterlab
