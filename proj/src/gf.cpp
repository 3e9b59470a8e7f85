#include "scatterlab/gf.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace scatterlab {

namespace {

bool is_prime(int p) {
    if (p < 2) return false;
    for (int d = 2; (std::int64_t)d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

// Minimal field interface used by the generic polynomial routines below.
struct PrimeOps {
    int p;
    std::uint32_t q() const { return (std::uint32_t)p; }
    std::uint16_t add(std::uint16_t a, std::uint16_t b) const { return (std::uint16_t)((a + b) % p); }
    std::uint16_t sub(std::uint16_t a, std::uint16_t b) const { return (std::uint16_t)((a + p - b) % p); }
    std::uint16_t mul(std::uint16_t a, std::uint16_t b) const { return (std::uint16_t)((std::uint32_t)a * b % p); }
    std::uint16_t inv(std::uint16_t a) const {
        std::uint16_t res = 1, base = a;
        int e = p - 2;
        while (e) {
            if (e & 1) res = mul(res, base);
            base = mul(base, base);
            e >>= 1;
        }
        return res;
    }
    std::uint16_t from_lex_rank(std::uint16_t k) const { return k; }
};

struct TableOps {
    const SubField* f;
    std::uint32_t q() const { return f->q(); }
    std::uint16_t add(std::uint16_t a, std::uint16_t b) const { return f->add(a, b); }
    std::uint16_t sub(std::uint16_t a, std::uint16_t b) const { return f->sub(a, b); }
    std::uint16_t mul(std::uint16_t a, std::uint16_t b) const { return f->mul(a, b); }
    std::uint16_t inv(std::uint16_t a) const { return f->inv(a); }
    std::uint16_t from_lex_rank(std::uint16_t k) const { return f->from_lex_rank(k); }
};

using Coeffs = std::vector<std::uint16_t>;  // little-endian by degree

template <class F>
int pdeg(const Coeffs& a) {
    for (int i = (int)a.size() - 1; i >= 0; --i)
        if (a[i]) return i;
    return -1;
}

// c = a*b mod m, m monic of degree d; a,b of degree < d
template <class F>
Coeffs pmulmod(const F& fld, const Coeffs& a, const Coeffs& b, const Coeffs& m) {
    int d = (int)m.size() - 1;
    Coeffs r(2 * d - 1, 0);
    for (int i = 0; i < d; ++i) {
        if (!a[i]) continue;
        for (int j = 0; j < d; ++j)
            if (b[j]) r[i + j] = fld.add(r[i + j], fld.mul(a[i], b[j]));
    }
    for (int k = 2 * d - 2; k >= d; --k) {
        std::uint16_t c = r[k];
        if (!c) continue;
        r[k] = 0;
        for (int j = 0; j < d; ++j)
            if (m[j]) r[k - d + j] = fld.sub(r[k - d + j], fld.mul(c, m[j]));
    }
    r.resize(d);
    return r;
}

template <class F>
Coeffs ppow_q(const F& fld, Coeffs g, const Coeffs& m) {
    int d = (int)m.size() - 1;
    Coeffs res(d, 0);
    res[0] = 1;
    std::uint32_t e = fld.q();
    while (e) {
        if (e & 1) res = pmulmod(fld, res, g, m);
        g = pmulmod(fld, g, g, m);
        e >>= 1;
    }
    return res;
}

template <class F>
Coeffs pgcd(const F& fld, Coeffs a, Coeffs b) {
    while (pdeg<F>(b) >= 0) {
        int da = pdeg<F>(a), db = pdeg<F>(b);
        if (da < db) {
            std::swap(a, b);
            continue;
        }
        std::uint16_t invl = fld.inv(b[db]);
        while (da >= db && da >= 0) {
            std::uint16_t c = fld.mul(a[da], invl);
            for (int j = 0; j <= db; ++j)
                a[da - db + j] = fld.sub(a[da - db + j], fld.mul(c, b[j]));
            da = pdeg<F>(a);
        }
        std::swap(a, b);
    }
    return a;
}

std::vector<int> prime_factors(int n) {
    std::vector<int> fs;
    for (int d = 2; d * d <= n; ++d)
        while (n % d == 0) {
            if (fs.empty() || fs.back() != d) fs.push_back(d);
            n /= d;
        }
    if (n > 1) fs.push_back(n);
    return fs;
}

// low = (c_0 .. c_{d-1}) of a monic degree-d polynomial
template <class F>
bool poly_irreducible(const F& fld, const Coeffs& low) {
    int d = (int)low.size();
    if (d == 1) return true;
    Coeffs m = low;
    m.push_back(1);
    Coeffs x(d, 0);
    x[1] = 1;
    // xs[k] = x^(q^k) mod m
    std::vector<Coeffs> xs;
    xs.push_back(x);
    Coeffs cur = x;
    for (int k = 1; k <= d; ++k) {
        cur = ppow_q(fld, cur, m);
        xs.push_back(cur);
    }
    if (xs[d] != x) return false;
    for (int l : prime_factors(d)) {
        Coeffs diff(d, 0);
        for (int i = 0; i < d; ++i) diff[i] = fld.sub(xs[d / l][i], x[i]);
        Coeffs g = pgcd(fld, m, diff);
        if (pdeg<F>(g) != 0) return false;
    }
    return true;
}

// Lexicographically least monic irreducible of degree d: coefficient tuples
// (c_0,...,c_{d-1}) are compared constant term first, each coefficient in the
// lex order of its own digit tuple.
template <class F>
Coeffs lex_least_irreducible(const F& fld, int d) {
    std::uint32_t q = fld.q();
    if (d == 1) return Coeffs{0};  // x itself
    std::vector<std::uint32_t> rank(d, 0);
    rank[0] = 1;  // constant term must be nonzero or x divides
    Coeffs low(d);
    for (;;) {
        for (int i = 0; i < d; ++i) low[i] = fld.from_lex_rank((std::uint16_t)rank[i]);
        if (poly_irreducible(fld, low)) return low;
        int i = d - 1;
        while (i >= 0 && rank[i] == q - 1) {
            rank[i] = (i == 0) ? 1 : 0;  // keep the constant term nonzero
            --i;
        }
        if (i < 0) throw std::logic_error("no irreducible polynomial found");
        ++rank[i];
    }
}

std::vector<std::uint16_t> digits_of(std::uint32_t code, int p, int r) {
    std::vector<std::uint16_t> d(r);
    for (int i = 0; i < r; ++i) {
        d[i] = (std::uint16_t)(code % p);
        code /= p;
    }
    return d;
}

}  // namespace

// ---------------------------------------------------------------------------
// SubField

SubField::SubField(int p, int r) : p_(p), r_(r) {
    if (!is_prime(p)) throw ConfigError("p = " + std::to_string(p) + " is not prime");
    if (r < 1) throw ConfigError("extension degree r must be >= 1");
    std::uint64_t q = 1;
    for (int i = 0; i < r; ++i) {
        q *= (std::uint64_t)p;
        if (q > kMaxSubfieldOrder)
            throw ConfigError("q = p^r exceeds the table-backed subfield cap");
    }
    q_ = (std::uint32_t)q;

    PrimeOps fp{p};
    irr_ = lex_least_irreducible(fp, r);
    irr_.push_back(1);

    Coeffs mod = irr_;
    add_.resize((std::size_t)q_ * q_);
    sub_.resize((std::size_t)q_ * q_);
    mul_.resize((std::size_t)q_ * q_);
    neg_.resize(q_);
    inv_.resize(q_, 0);

    std::vector<Coeffs> digs(q_);
    for (std::uint32_t a = 0; a < q_; ++a) digs[a] = digits_of(a, p, r);

    auto code_of = [&](const Coeffs& d) {
        std::uint32_t c = 0;
        for (int i = r - 1; i >= 0; --i) c = c * p + d[i];
        return (std::uint16_t)c;
    };

    for (std::uint32_t a = 0; a < q_; ++a) {
        Coeffs nd(r);
        for (int i = 0; i < r; ++i) nd[i] = fp.sub(0, digs[a][i]);
        neg_[a] = code_of(nd);
        for (std::uint32_t b = 0; b < q_; ++b) {
            Coeffs s(r), d(r);
            for (int i = 0; i < r; ++i) {
                s[i] = fp.add(digs[a][i], digs[b][i]);
                d[i] = fp.sub(digs[a][i], digs[b][i]);
            }
            add_[a * q_ + b] = code_of(s);
            sub_[a * q_ + b] = code_of(d);
            mul_[a * q_ + b] = code_of(pmulmod(fp, digs[a], digs[b], mod));
        }
    }
    for (std::uint32_t a = 1; a < q_; ++a) {
        if (inv_[a]) continue;
        for (std::uint32_t b = a; b < q_; ++b)
            if (mul_[a * q_ + b] == 1) {
                inv_[a] = (std::uint16_t)b;
                inv_[b] = (std::uint16_t)a;
                break;
            }
        if (!inv_[a]) throw std::logic_error("subfield inverse missing; modulus not irreducible?");
    }

    lex_code_.resize(q_);
    std::iota(lex_code_.begin(), lex_code_.end(), 0);
    std::sort(lex_code_.begin(), lex_code_.end(), [&](std::uint16_t a, std::uint16_t b) {
        return digs[a] < digs[b];
    });
    lex_rank_.resize(q_);
    for (std::uint32_t k = 0; k < q_; ++k) lex_rank_[lex_code_[k]] = (std::uint16_t)k;
}

std::uint16_t SubField::inv(std::uint16_t a) const {
    if (a == 0) throw ConfigError("inversion of zero");
    return inv_[a];
}

std::uint16_t SubField::pow_u64(std::uint16_t a, std::uint64_t e) const {
    std::uint16_t res = 1;
    while (e) {
        if (e & 1) res = mul(res, a);
        a = mul(a, a);
        e >>= 1;
    }
    return res;
}

// ---------------------------------------------------------------------------
// FieldCtx

FieldCtx::FieldCtx(SubField fq, int t) : fq_(std::move(fq)), t_(t), n_(2 * t) {}

FieldCtx FieldCtx::make(int p, int r, int t) {
    if (t < 1) throw ConfigError("t must be >= 1");
    if (2 * t > kMaxTowerDegree) throw ConfigError("n = 2t exceeds the supported degree cap");
    SubField fq(p, r);
    FieldCtx ctx(std::move(fq), t);
    int n = ctx.n_;

    TableOps ops{&ctx.fq_};
    ctx.irr_qn_ = lex_least_irreducible(ops, n);
    ctx.irr_qn_.push_back(1);
    if (!poly_irreducible(ops, Coeffs(ctx.irr_qn_.begin(), ctx.irr_qn_.end() - 1)))
        throw std::logic_error("chosen modulus failed the irreducibility test");

    ctx.order_bits_ = n * std::log2((double)ctx.q());
    std::uint32_t qm1 = ctx.q() - 1;
    ctx.hexw_ = 1;
    while (qm1 >> (4 * ctx.hexw_)) ++ctx.hexw_;

    // x^(n+m) mod irr_qn for m = 0 .. n-2
    ctx.red_.assign((std::size_t)(n - 1) * n, 0);
    {
        std::vector<std::uint16_t> row(n);
        for (int j = 0; j < n; ++j) row[j] = ctx.fq_.neg(ctx.irr_qn_[j]);
        for (int m = 0; m < n - 1; ++m) {
            std::copy(row.begin(), row.end(), ctx.red_.begin() + (std::size_t)m * n);
            if (m + 1 < n - 1) {
                std::uint16_t top = row[n - 1];
                for (int j = n - 1; j > 0; --j) row[j] = row[j - 1];
                row[0] = 0;
                if (top)
                    for (int j = 0; j < n; ++j)
                        row[j] = ctx.fq_.add(row[j], ctx.fq_.mul(top, ctx.red_[j]));
            }
        }
    }

    // frob_[j][i] = coordinates of (alpha^i)^(q^j)
    ctx.frob_.assign((std::size_t)n * n * n, 0);
    for (int i = 0; i < n; ++i) ctx.frob_[(std::size_t)i * n + i] = 1;  // j = 0
    {
        Coeffs x(n, 0);
        x[1] = 1;
        Coeffs aq = ppow_q(TableOps{&ctx.fq_}, x, ctx.irr_qn_);  // alpha^q
        std::vector<std::uint16_t> pw(n, 0), tmp(n);
        pw[0] = 1;
        auto* f1 = ctx.frob_.data() + (std::size_t)n * n;
        for (int i = 0; i < n; ++i) {
            std::copy(pw.begin(), pw.end(), f1 + (std::size_t)i * n);
            if (i + 1 < n) {
                ctx.mul_raw(tmp.data(), pw.data(), aq.data());
                pw = tmp;
            }
        }
        for (int j = 2; j < n; ++j) {
            auto* prev = ctx.frob_.data() + (std::size_t)(j - 1) * n * n;
            auto* dst = ctx.frob_.data() + (std::size_t)j * n * n;
            for (int i = 0; i < n; ++i) {
                std::uint16_t out[kMaxTowerDegree] = {0};
                const std::uint16_t* src = prev + (std::size_t)i * n;
                for (int k = 0; k < n; ++k)
                    if (src[k]) ctx.axpy_raw(out, src[k], f1 + (std::size_t)k * n);
                std::copy(out, out + n, dst + (std::size_t)i * n);
            }
        }
    }

    ctx.basis_.resize(n);
    for (int i = 0; i < n; ++i) {
        ctx.basis_[i].c.assign(n, 0);
        ctx.basis_[i].c[i] = 1;
    }
    return ctx;
}

std::uint64_t FieldCtx::order() const {
    if (order_bits_ > 63.5) throw GuardRailError("q^n does not fit in 64 bits");
    std::uint64_t v = 1;
    for (int i = 0; i < n_; ++i) v *= q();
    return v;
}

void FieldCtx::require_enumerable(int max_bits) const {
    if (order_bits_ > (double)max_bits)
        throw GuardRailError("enumeration guard: q^n exceeds 2^" + std::to_string(max_bits));
}

Fqn FieldCtx::zero() const { return Fqn{std::vector<std::uint16_t>(n_, 0)}; }

Fqn FieldCtx::one() const {
    Fqn x = zero();
    x.c[0] = 1;
    return x;
}

Fqn FieldCtx::minus_one() const {
    Fqn x = zero();
    x.c[0] = fq_.neg(1);
    return x;
}

bool FieldCtx::is_zero(const Fqn& x) const { return is_zero_raw(x.c.data()); }

Fqn FieldCtx::add(const Fqn& x, const Fqn& y) const {
    Fqn z = zero();
    add_raw(z.c.data(), x.c.data(), y.c.data());
    return z;
}

Fqn FieldCtx::sub(const Fqn& x, const Fqn& y) const {
    Fqn z = zero();
    sub_raw(z.c.data(), x.c.data(), y.c.data());
    return z;
}

Fqn FieldCtx::neg(const Fqn& x) const {
    Fqn z = zero();
    for (int i = 0; i < n_; ++i) z.c[i] = fq_.neg(x.c[i]);
    return z;
}

Fqn FieldCtx::mul(const Fqn& x, const Fqn& y) const {
    Fqn z = zero();
    mul_raw(z.c.data(), x.c.data(), y.c.data());
    return z;
}

Fqn FieldCtx::inv(const Fqn& x) const {
    Fqn z = zero();
    inv_raw(z.c.data(), x.c.data());
    return z;
}

Fqn FieldCtx::pow_u64(const Fqn& x, std::uint64_t e) const {
    Fqn res = one(), base = x;
    while (e) {
        if (e & 1) res = mul(res, base);
        base = mul(base, base);
        e >>= 1;
    }
    return res;
}

Fqn FieldCtx::frobenius(const Fqn& x, int j) const {
    Fqn z = zero();
    frob_raw(z.c.data(), x.c.data(), j);
    return z;
}

Fqn FieldCtx::aut_p(const Fqn& x, int e) const {
    int rn = r() * n_;
    e %= rn;
    if (e < 0) e += rn;
    // p^e = q^(e/r) * p^(e%r); peel the cheap q-power part off first
    Fqn z = frobenius(x, e / r());
    for (int i = 0; i < e % r(); ++i) z = pow_u64(z, (std::uint64_t)p());
    return z;
}

Fqn FieldCtx::norm(const Fqn& x, int m) const {
    if (m < 1 || n_ % m != 0) throw ConfigError("norm: m must divide n");
    Fqn acc = x, conj = x;
    for (int i = 1; i < n_ / m; ++i) {
        conj = frobenius(conj, m);
        acc = mul(acc, conj);
    }
    if (!(frobenius(acc, m) == acc)) throw std::logic_error("norm left the target subfield");
    return acc;
}

Fqn FieldCtx::trace(const Fqn& x, int m) const {
    if (m < 1 || n_ % m != 0) throw ConfigError("trace: m must divide n");
    Fqn acc = x, conj = x;
    for (int i = 1; i < n_ / m; ++i) {
        conj = frobenius(conj, m);
        acc = add(acc, conj);
    }
    if (!(frobenius(acc, m) == acc)) throw std::logic_error("trace left the target subfield");
    return acc;
}

Fqn FieldCtx::embed(std::uint16_t code) const {
    if (code >= q()) throw ConfigError("embed: code out of range");
    Fqn x = zero();
    x.c[0] = code;
    return x;
}

Fqn FieldCtx::from_int(std::int64_t v) const {
    std::int64_t m = v % p();
    if (m < 0) m += p();
    return embed((std::uint16_t)m);
}

bool FieldCtx::in_base_subfield(const Fqn& x) const {
    for (int i = 1; i < n_; ++i)
        if (x.c[i]) return false;
    return true;
}

bool FieldCtx::in_subfield(const Fqn& x, int m) const { return frobenius(x, m) == x; }

std::uint64_t FieldCtx::index_of(const Fqn& x) const { return index_raw(x.c.data()); }

Fqn FieldCtx::element(std::uint64_t idx) const {
    Fqn x = zero();
    for (int i = 0; i < n_; ++i) {
        x.c[i] = (std::uint16_t)(idx % q());
        idx /= q();
    }
    if (idx) throw ConfigError("element index out of range");
    return x;
}

bool FieldCtx::lex_less(const Fqn& x, const Fqn& y) const {
    for (int i = 0; i < n_; ++i) {
        std::uint16_t a = fq_.lex_rank(x.c[i]), b = fq_.lex_rank(y.c[i]);
        if (a != b) return a < b;
    }
    return false;
}

std::string FieldCtx::to_hex(const Fqn& x) const {
    static const char* digits = "0123456789abcdef";
    std::string s;
    s.reserve((std::size_t)n_ * hexw_);
    for (int i = 0; i < n_; ++i)
        for (int d = hexw_ - 1; d >= 0; --d) s.push_back(digits[(x.c[i] >> (4 * d)) & 15]);
    return s;
}

Fqn FieldCtx::from_hex(std::string_view s) const {
    if ((int)s.size() != n_ * hexw_)
        throw ConfigError("element hex string must have exactly " +
                          std::to_string(n_ * hexw_) + " digits");
    Fqn x = zero();
    auto val = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    };
    for (int i = 0; i < n_; ++i) {
        std::uint32_t code = 0;
        for (int d = 0; d < hexw_; ++d) {
            int v = val(s[(std::size_t)i * hexw_ + d]);
            if (v < 0) throw ConfigError("invalid hex digit in element string");
            code = (code << 4) | (std::uint32_t)v;
        }
        if (code >= q()) throw ConfigError("element coordinate out of range");
        x.c[i] = (std::uint16_t)code;
    }
    return x;
}

void FieldCtx::set_zero_raw(std::uint16_t* dst) const { std::fill(dst, dst + n_, 0); }

void FieldCtx::add_raw(std::uint16_t* dst, const std::uint16_t* x, const std::uint16_t* y) const {
    for (int i = 0; i < n_; ++i) dst[i] = fq_.add(x[i], y[i]);
}

void FieldCtx::sub_raw(std::uint16_t* dst, const std::uint16_t* x, const std::uint16_t* y) const {
    for (int i = 0; i < n_; ++i) dst[i] = fq_.sub(x[i], y[i]);
}

void FieldCtx::axpy_raw(std::uint16_t* acc, std::uint16_t s, const std::uint16_t* v) const {
    if (!s) return;
    const std::uint16_t* row = fq_.mul_row(s);
    for (int i = 0; i < n_; ++i)
        if (v[i]) acc[i] = fq_.add(acc[i], row[v[i]]);
}

void FieldCtx::mul_raw(std::uint16_t* dst, const std::uint16_t* x, const std::uint16_t* y) const {
    std::uint16_t buf[2 * kMaxTowerDegree] = {0};
    for (int i = 0; i < n_; ++i) {
        if (!x[i]) continue;
        const std::uint16_t* row = fq_.mul_row(x[i]);
        for (int j = 0; j < n_; ++j)
            if (y[j]) buf[i + j] = fq_.add(buf[i + j], row[y[j]]);
    }
    for (int k = 2 * n_ - 2; k >= n_; --k) {
        std::uint16_t c = buf[k];
        if (!c) continue;
        const std::uint16_t* red = red_.data() + (std::size_t)(k - n_) * n_;
        const std::uint16_t* row = fq_.mul_row(c);
        for (int j = 0; j < n_; ++j)
            if (red[j]) buf[j] = fq_.add(buf[j], row[red[j]]);
    }
    std::copy(buf, buf + n_, dst);
}

void FieldCtx::inv_raw(std::uint16_t* dst, const std::uint16_t* x) const {
    if (is_zero_raw(x)) throw ConfigError("inversion of zero");
    // extended Euclid in F_q[y] against the modulus
    int cap = n_ + 1;
    std::vector<std::uint16_t> r0(irr_qn_), r1(x, x + n_), t0(cap, 0), t1(cap, 0), tmp(cap);
    r1.resize(cap, 0);
    t1[0] = 1;
    auto deg = [&](const std::vector<std::uint16_t>& v) {
        for (int i = cap - 1; i >= 0; --i)
            if (v[i]) return i;
        return -1;
    };
    int d0 = deg(r0), d1 = deg(r1);
    while (d1 > 0) {
        std::uint16_t lt = fq_.inv(r1[d1]);
        while (d0 >= d1) {
            std::uint16_t c = fq_.mul(r0[d0], lt);
            int sh = d0 - d1;
            for (int j = 0; j <= d1; ++j)
                if (r1[j]) r0[sh + j] = fq_.sub(r0[sh + j], fq_.mul(c, r1[j]));
            for (int j = 0; j + sh < cap; ++j)
                if (t1[j]) t0[sh + j] = fq_.sub(t0[sh + j], fq_.mul(c, t1[j]));
            d0 = deg(r0);
            if (d0 < 0) break;
        }
        std::swap(r0, r1);
        std::swap(t0, t1);
        std::swap(d0, d1);
    }
    // r1 is a nonzero constant: dst = t1 / r1
    std::uint16_t s = fq_.inv(r1[0]);
    for (int i = 0; i < n_; ++i) dst[i] = fq_.mul(t1[i], s);
}

void FieldCtx::frob_raw(std::uint16_t* dst, const std::uint16_t* x, int j) const {
    j %= n_;
    if (j < 0) j += n_;
    if (j == 0) {
        std::copy(x, x + n_, dst);
        return;
    }
    std::uint16_t out[kMaxTowerDegree] = {0};
    const std::uint16_t* tab = frob_.data() + (std::size_t)j * n_ * n_;
    for (int i = 0; i < n_; ++i)
        if (x[i]) axpy_raw(out, x[i], tab + (std::size_t)i * n_);
    std::copy(out, out + n_, dst);
}

bool FieldCtx::eq_raw(const std::uint16_t* x, const std::uint16_t* y) const {
    return std::equal(x, x + n_, y);
}

bool FieldCtx::is_zero_raw(const std::uint16_t* x) const {
    for (int i = 0; i < n_; ++i)
        if (x[i]) return false;
    return true;
}

std::uint64_t FieldCtx::index_raw(const std::uint16_t* x) const {
    std::uint64_t idx = 0;
    for (int i = n_ - 1; i >= 0; --i) idx = idx * q() + x[i];
    return idx;
}

// ---------------------------------------------------------------------------

std::uint64_t hash_coords(const std::uint16_t* c, int n) {
    std::uint64_t h = 1469598103934665603ull;
    for (int i = 0; i < n; ++i) {
        h ^= c[i];
        h *= 1099511628211ull;
    }
    return h;
}

HDiagnostic diagnose_h(const FieldCtx& ctx, const Fqn& h) {
    HDiagnostic d;
    Fqn ht = ctx.frobenius(h, ctx.t());
    d.norm_is_minus_one = ctx.mul(h, ht) == ctx.minus_one();
    d.outside_half_field = !(ht == h);
    d.q2_power_free = !(ctx.mul(h, ctx.frobenius(h, 2)) == ctx.one());
    d.no_flip = !(ctx.frobenius(h, ctx.t() - 2) == ctx.neg(h));
    return d;
}

std::vector<Fqn> admissible_h(const FieldCtx& ctx, int max_bits) {
    if (ctx.p() == 2) throw ConfigError("admissible h requires odd q");
    ctx.require_enumerable(max_bits);
    int n = ctx.n();
    std::vector<Fqn> ft(n);
    for (int i = 0; i < n; ++i) ft[i] = ctx.frobenius(ctx.basis()[i], ctx.t());

    ElementWalker w(ctx);
    int slot = w.track(ft);
    Fqn m1 = ctx.minus_one();
    std::vector<std::uint16_t> prod(n);
    std::vector<Fqn> out;
    while (w.next()) {
        const std::uint16_t* x = w.coords();
        const std::uint16_t* xt = w.value(slot);
        ctx.mul_raw(prod.data(), x, xt);
        if (ctx.eq_raw(prod.data(), m1.c.data()) && !ctx.eq_raw(xt, x)) out.push_back(ctx.wrap(x));
    }
    std::sort(out.begin(), out.end(),
              [&](const Fqn& a, const Fqn& b) { return ctx.lex_less(a, b); });
    return out;
}

// ---------------------------------------------------------------------------
// ElementWalker

ElementWalker::ElementWalker(const FieldCtx& ctx)
    : ctx_(&ctx), n_(ctx.n()), q_(ctx.q()), index_(0) {
    ctx.require_enumerable();
    total_ = ctx.order();
    coords_.assign(n_, 0);
}

int ElementWalker::track(const std::vector<Fqn>& basis_images) {
    images_.resize((std::size_t)(slots_ + 1) * n_ * n_);
    auto* dst = images_.data() + (std::size_t)slots_ * n_ * n_;
    for (int i = 0; i < n_; ++i)
        std::copy(basis_images[i].c.begin(), basis_images[i].c.end(), dst + (std::size_t)i * n_);
    values_.resize((std::size_t)(slots_ + 1) * n_, 0);
    return slots_++;
}

bool ElementWalker::next() {
    if (index_ + 1 >= total_) return false;
    const SubField& fq = ctx_->fq();
    int i = 0;
    while (coords_[i] == q_ - 1) {
        std::uint16_t delta = fq.sub(0, (std::uint16_t)(q_ - 1));
        for (int s = 0; s < slots_; ++s)
            ctx_->axpy_raw(values_.data() + (std::size_t)s * n_, delta,
                           images_.data() + ((std::size_t)s * n_ + i) * n_);
        coords_[i] = 0;
        ++i;
    }
    std::uint16_t old = coords_[i];
    std::uint16_t delta = fq.sub((std::uint16_t)(old + 1), old);
    for (int s = 0; s < slots_; ++s)
        ctx_->axpy_raw(values_.data() + (std::size_t)s * n_, delta,
                       images_.data() + ((std::size_t)s * n_ + i) * n_);
    coords_[i] = (std::uint16_t)(old + 1);
    ++index_;
    return true;
}

void ElementWalker::reset() {
    index_ = 0;
    std::fill(coords_.begin(), coords_.end(), 0);
    std::fill(values_.begin(), values_.end(), 0);
}

void ElementWalker::seek(std::uint64_t idx) {
    if (idx >= total_) throw ConfigError("walker seek out of range");
    index_ = idx;
    for (int i = 0; i < n_; ++i) {
        coords_[i] = (std::uint16_t)(idx % q_);
        idx /= q_;
    }
    std::fill(values_.begin(), values_.end(), 0);
    for (int s = 0; s < slots_; ++s)
        for (int i = 0; i < n_; ++i)
            if (coords_[i])
                ctx_->axpy_raw(values_.data() + (std::size_t)s * n_, coords_[i],
                               images_.data() + ((std::size_t)s * n_ + i) * n_);
}

// ---------------------------------------------------------------------------
// ProjWalker

ProjWalker::ProjWalker(const FieldCtx& ctx) : ctx_(&ctx), n_(ctx.n()), q_(ctx.q()) {
    ctx.require_enumerable();
    coords_.assign(n_, 0);
    pivot_ = -1;
}

int ProjWalker::track(const std::vector<Fqn>& basis_images) {
    images_.resize((std::size_t)(slots_ + 1) * n_ * n_);
    auto* dst = images_.data() + (std::size_t)slots_ * n_ * n_;
    for (int i = 0; i < n_; ++i)
        std::copy(basis_images[i].c.begin(), basis_images[i].c.end(), dst + (std::size_t)i * n_);
    values_.resize((std::size_t)(slots_ + 1) * n_, 0);
    return slots_++;
}

void ProjWalker::enter_block(int pivot) {
    pivot_ = pivot;
    std::fill(coords_.begin(), coords_.end(), 0);
    coords_[pivot] = 1;  // the code of 1
    for (int s = 0; s < slots_; ++s)
        std::copy(images_.begin() + ((std::size_t)s * n_ + pivot) * n_,
                  images_.begin() + ((std::size_t)s * n_ + pivot + 1) * n_,
                  values_.begin() + (std::size_t)s * n_);
}

bool ProjWalker::next() {
    if (pivot_ < 0) {
        enter_block(0);
        return true;
    }
    const SubField& fq = ctx_->fq();
    int i = pivot_ + 1;
    while (i < n_ && coords_[i] == q_ - 1) {
        std::uint16_t delta = fq.sub(0, (std::uint16_t)(q_ - 1));
        for (int s = 0; s < slots_; ++s)
            ctx_->axpy_raw(values_.data() + (std::size_t)s * n_, delta,
                           images_.data() + ((std::size_t)s * n_ + i) * n_);
        coords_[i] = 0;
        ++i;
    }
    if (i == n_) {
        if (pivot_ + 1 == n_) return false;
        enter_block(pivot_ + 1);
        return true;
    }
    std::uint16_t old = coords_[i];
    std::uint16_t delta = fq.sub((std::uint16_t)(old + 1), old);
    for (int s = 0; s < slots_; ++s)
        ctx_->axpy_raw(values_.data() + (std::size_t)s * n_, delta,
                       images_.data() + ((std::size_t)s * n_ + i) * n_);
    coords_[i] = (std::uint16_t)(old + 1);
    return true;
}

void ProjWalker::reset() {
    pivot_ = -1;
    std::fill(coords_.begin(), coords_.end(), 0);
    std::fill(values_.begin(), values_.end(), 0);
}

}  // namespace scatterlab
