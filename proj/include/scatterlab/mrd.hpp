// Rank-metric codes C_f = { a x + b f(x) : a, b in F_(q^n) }: minimum
// distance, the Singleton-like bound, and left/right idealizers.

#pragma once

#include <optional>
#include <utility>

#include "scatterlab/scatter.hpp"

namespace scatterlab {

struct RankCode {
    const FieldCtx* ctx = nullptr;
    std::vector<LinPoly> gens;  // F_(q^n)-span; for C_f: [x, f]
};

enum class VerifyScattered { Yes, No };

// C_f; rejects f collinear with x, optionally re-verifies scatteredness
RankCode code_from_scattered(const LinPoly& f,
                             VerifyScattered verify = VerifyScattered::Yes,
                             const ScanOptions& opts = {});

// min over nonzero codewords of n - kernel_dim.  For [x, f] codes this reads
// every kernel dimension off one fiber scan (ker(ax + f) - 0 is the fiber of
// f(x)/x over -a); other shapes walk projective combinations and compute
// matrix ranks.
int min_distance(const RankCode& code, const ScanOptions& opts = {});
int min_distance_from_counts(const RankCode& code, const FiberCounts& counts);

// exhaustive per-codeword rank route (independent of the fiber route)
int min_distance_by_rank(const RankCode& code, const ScanOptions& opts = {});

// |C| against q^(n(n-d+1)) at d = min_distance
bool is_mrd(const RankCode& code, const ScanOptions& opts = {});
bool is_mrd_at_distance(const RankCode& code, int d);

struct IdealizerReport {
    enum class Side { Left, Right };
    Side side;
    std::uint64_t size = 0;  // including zero

    // factored shape: elements are exactly { a x + b f : a in A, b in B }
    bool factored = false;
    bool a_all = false;           // A = F_(q^n)
    std::vector<Fqn> a_part;      // A, unless a_all
    std::vector<Fqn> b_part;      // B
    // fallback shape from the full pair scan
    std::vector<std::pair<Fqn, Fqn>> pairs;

    std::uint64_t mult_table_hash = 0;  // 0 when not computed

    std::vector<std::pair<Fqn, Fqn>> coefficient_pairs(const FieldCtx& ctx) const;
};

IdealizerReport idealizer(const RankCode& code, IdealizerReport::Side side,
                          const ScanOptions& opts = {});

// canonical hash of the idealizer's abstract field structure (discrete-log
// relabeling, minimized over generators); equal for isomorphic idealizers
std::uint64_t field_structure_hash(const RankCode& code, const IdealizerReport& rep);

}  // namespace scatterlab
