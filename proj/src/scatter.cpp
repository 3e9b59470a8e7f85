#include "scatterlab/scatter.hpp"

#include <algorithm>
#include <atomic>

#include "scatterlab/parallel.hpp"

namespace scatterlab {

namespace {

constexpr std::size_t kChunk = 512;

// Montgomery batch inversion over a chunk of nonzero elements.
class BatchInverter {
  public:
    BatchInverter(const FieldCtx& ctx)
        : ctx_(&ctx), n_(ctx.n()), xs_(kChunk * n_), prefix_(kChunk * n_), inv_(kChunk * n_) {}

    std::size_t size() const { return size_; }
    bool full() const { return size_ == kChunk; }

    void push(const std::uint16_t* x) {
        std::copy(x, x + n_, xs_.begin() + size_ * n_);
        if (size_ == 0)
            std::copy(x, x + n_, prefix_.begin());
        else
            ctx_->mul_raw(prefix_.data() + size_ * n_, prefix_.data() + (size_ - 1) * n_, x);
        ++size_;
    }

    // invert everything pushed so far; inv(i) valid until the next push
    void flush() {
        if (!size_) return;
        std::vector<std::uint16_t> acc(n_), next(n_);
        ctx_->inv_raw(acc.data(), prefix_.data() + (size_ - 1) * n_);
        for (std::size_t i = size_; i-- > 1;) {
            ctx_->mul_raw(inv_.data() + i * n_, acc.data(), prefix_.data() + (i - 1) * n_);
            ctx_->mul_raw(next.data(), acc.data(), xs_.data() + i * n_);
            std::swap(acc, next);
        }
        std::copy(acc.begin(), acc.end(), inv_.begin());
        size_ = 0;
    }

    const std::uint16_t* inv(std::size_t i) const { return inv_.data() + i * n_; }

  private:
    const FieldCtx* ctx_;
    int n_;
    std::size_t size_ = 0;
    std::vector<std::uint16_t> xs_, prefix_, inv_;
};

}  // namespace

FiberCounts fiber_counts(const LinPoly& f, const ScanOptions& opts) {
    const FieldCtx& ctx = *f.ctx;
    ctx.require_enumerable(opts.max_bits);
    std::uint64_t total = ctx.order();
    int n = ctx.n();

    FiberCounts out;
    out.count.assign(total, 0);
    std::vector<Fqn> images = lp_basis_images(f);

    parallel_ranges(total - 1, opts.jobs, [&](int, std::uint64_t lo, std::uint64_t hi) {
        ElementWalker w(ctx);
        int slot = w.track(images);
        w.seek(lo + 1);  // skip zero
        BatchInverter batch(ctx);
        std::vector<std::uint64_t> fx_ids;
        std::vector<std::uint16_t> fx_store;
        std::vector<std::uint16_t> ratio(n);
        auto drain = [&] {
            std::size_t m = batch.size();
            batch.flush();
            for (std::size_t i = 0; i < m; ++i) {
                ctx.mul_raw(ratio.data(), fx_store.data() + i * n, batch.inv(i));
                std::uint64_t v = ctx.index_raw(ratio.data());
                std::atomic_ref<std::uint32_t> cell(out.count[v]);
                cell.fetch_add(1, std::memory_order_relaxed);
            }
            fx_store.clear();
        };
        std::uint64_t steps = hi - lo;
        for (std::uint64_t k = 0; k < steps; ++k) {
            batch.push(w.coords());
            fx_store.insert(fx_store.end(), w.value(slot), w.value(slot) + n);
            if (batch.full()) drain();
            if (k + 1 < steps) w.next();
        }
        drain();
    });

    for (std::uint32_t c : out.count) out.max_count = std::max(out.max_count, c);
    return out;
}

ScatterVerdict is_scattered_fiber(const LinPoly& f, const ScanOptions& opts) {
    const FieldCtx& ctx = *f.ctx;
    FiberCounts counts = fiber_counts(f, opts);
    std::uint32_t qm1 = ctx.q() - 1;
    ScatterVerdict verdict;
    verdict.scattered = counts.max_count <= qm1;
    if (verdict.scattered) return verdict;

    // deterministic witness: the least over-populated value, its first two
    // F_q-independent preimages in walk order
    std::uint64_t bad = 0;
    while (counts.count[bad] <= qm1) ++bad;
    Fqn value = ctx.element(bad);
    std::vector<Fqn> images = lp_basis_images(f);
    ElementWalker w(ctx);
    int slot = w.track(images);
    std::optional<Fqn> first;
    std::vector<std::uint16_t> ratio(ctx.n()), xinv(ctx.n());
    while (w.next()) {
        ctx.inv_raw(xinv.data(), w.coords());
        ctx.mul_raw(ratio.data(), w.value(slot), xinv.data());
        if (!ctx.eq_raw(ratio.data(), value.c.data())) continue;
        Fqn x = ctx.wrap(w.coords());
        if (!first) {
            first = x;
            continue;
        }
        if (!ctx.in_base_subfield(ctx.mul(x, ctx.inv(*first)))) {
            verdict.witness = std::make_pair(*first, x);
            return verdict;
        }
    }
    throw std::logic_error("over-populated fiber without independent preimages");
}

bool is_scattered_gamma(const LinPoly& f, const ScanOptions& opts) {
    const FieldCtx& ctx = *f.ctx;
    ctx.require_enumerable(opts.max_bits);
    int n = ctx.n();
    Fqn one = ctx.one();
    // gamma runs over coset representatives of F_(q^n)^* / F_q^*; the
    // condition is invariant under F_q^*-scaling of gamma
    ProjWalker w(ctx);
    while (w.next()) {
        Fqn gamma = ctx.wrap(w.coords());
        if (gamma == one) continue;  // the only representative inside F_q
        LinPoly g = lp_zero(ctx);
        bool zero = true;
        for (int i = 0; i < n; ++i) {
            if (ctx.is_zero(f.c[i])) continue;
            Fqn d = ctx.sub(ctx.frobenius(gamma, i), gamma);
            g.c[i] = ctx.mul(f.c[i], d);
            if (!ctx.is_zero(g.c[i])) zero = false;
        }
        if (zero) return false;  // f(gamma x) = gamma f(x) identically
        if (lp_rank_kernel(g).rank != n) return false;
    }
    return true;
}

LinearSet linear_set_from_counts(const LinPoly& f, const FiberCounts& counts) {
    const FieldCtx& ctx = *f.ctx;
    LinearSet set;
    set.ctx = &ctx;
    set.source = f;
    for (std::uint64_t v = 0; v < counts.count.size(); ++v)
        if (counts.count[v]) set.ratios.push_back(ctx.element(v));
    std::sort(set.ratios.begin(), set.ratios.end(),
              [&](const Fqn& a, const Fqn& b) { return ctx.lex_less(a, b); });
    return set;
}

LinearSet linear_set(const LinPoly& f, const ScanOptions& opts) {
    return linear_set_from_counts(f, fiber_counts(f, opts));
}

std::vector<ProjPoint> LinearSet::points() const {
    std::vector<ProjPoint> pts;
    pts.reserve(ratios.size());
    for (const Fqn& m : ratios) pts.push_back(ProjPoint{false, m});
    return pts;
}

void write_points_csv(std::ostream& os, const LinearSet& set) {
    os << "x0,x1\n";
    for (const Fqn& m : set.ratios) os << "1," << set.ctx->to_hex(m) << "\n";
}

}  // namespace scatterlab
