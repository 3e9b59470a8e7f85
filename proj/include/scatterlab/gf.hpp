// Exact arithmetic in the two-level field tower F_p < F_q = F_(p^r) < F_(q^n).
//
// The middle field F_q is table-backed (codes 0..q-1, code = sum d_i p^i for
// the coefficient digits of the residue class modulo irr_q).  Elements of
// F_(q^n) are dense length-n coordinate vectors over F_q relative to the
// power basis of irr_qn.  Both irreducibles are the lexicographically least
// monic irreducible over their base field (coefficient tuples compared
// constant term first), so identical (p, r, t) always rebuild bit-identical
// contexts.

#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace scatterlab {

// invalid parameters / malformed input
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// an enumeration-backed operation was asked to walk more elements than allowed
struct GuardRailError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr int kMaxTowerDegree = 64;          // n = 2t cap
inline constexpr std::uint32_t kMaxSubfieldOrder = 2048;  // table-backed F_q cap
inline constexpr int kDefaultEnumBits = 40;         // scans require q^n <= 2^40

// Table-backed F_q = F_p[y]/(irr_q).  All binary operations are single table
// lookups; built once per FieldCtx.
class SubField {
  public:
    SubField(int p, int r);

    int p() const { return p_; }
    int r() const { return r_; }
    std::uint32_t q() const { return q_; }
    const std::vector<std::uint16_t>& irr() const { return irr_; }

    std::uint16_t add(std::uint16_t a, std::uint16_t b) const { return add_[a * q_ + b]; }
    std::uint16_t sub(std::uint16_t a, std::uint16_t b) const { return sub_[a * q_ + b]; }
    std::uint16_t mul(std::uint16_t a, std::uint16_t b) const { return mul_[a * q_ + b]; }
    std::uint16_t neg(std::uint16_t a) const { return neg_[a]; }
    std::uint16_t inv(std::uint16_t a) const;
    std::uint16_t pow_u64(std::uint16_t a, std::uint64_t e) const;

    // rank of a code in the lexicographic order of coefficient digit tuples
    // (digit 0 compared first); for r = 1 this is the code itself
    std::uint16_t lex_rank(std::uint16_t a) const { return lex_rank_[a]; }
    std::uint16_t from_lex_rank(std::uint16_t k) const { return lex_code_[k]; }

    const std::uint16_t* mul_row(std::uint16_t a) const { return mul_.data() + a * q_; }

  private:
    int p_, r_;
    std::uint32_t q_;
    std::vector<std::uint16_t> irr_;  // monic, digit coefficients, length r+1
    std::vector<std::uint16_t> add_, sub_, mul_, neg_, inv_, lex_rank_, lex_code_;
};

// Element of F_(q^n): coords[i] multiplies alpha^i, alpha a root of irr_qn.
struct Fqn {
    std::vector<std::uint16_t> c;

    bool operator==(const Fqn&) const = default;
};

// Structured admissibility diagnostic for a candidate h (all four conditions
// evaluated so a caller can report which one failed).
struct HDiagnostic {
    bool norm_is_minus_one = false;   // h^(q^t+1) == -1
    bool outside_half_field = false;  // h not in F_(q^t)
    bool q2_power_free = false;       // h^(q^2+1) != 1
    bool no_flip = false;             // h^(q^(t-2)) != -h

    bool admissible() const { return norm_is_minus_one && outside_half_field; }
};

class FieldCtx {
  public:
    // deterministic construction; throws ConfigError on bad parameters
    static FieldCtx make(int p, int r, int t);

    int p() const { return fq_.p(); }
    int r() const { return fq_.r(); }
    int t() const { return t_; }
    int n() const { return n_; }
    std::uint32_t q() const { return fq_.q(); }
    const SubField& fq() const { return fq_; }
    const std::vector<std::uint16_t>& irr_qn() const { return irr_qn_; }

    // q^n as u64; throws GuardRailError when it does not fit
    std::uint64_t order() const;
    double order_bits() const { return order_bits_; }
    // throws GuardRailError unless q^n <= 2^max_bits
    void require_enumerable(int max_bits = kDefaultEnumBits) const;

    Fqn zero() const;
    Fqn one() const;
    Fqn minus_one() const;
    bool is_zero(const Fqn& x) const;

    Fqn add(const Fqn& x, const Fqn& y) const;
    Fqn sub(const Fqn& x, const Fqn& y) const;
    Fqn neg(const Fqn& x) const;
    Fqn mul(const Fqn& x, const Fqn& y) const;
    Fqn inv(const Fqn& x) const;  // throws ConfigError on zero
    Fqn pow_u64(const Fqn& x, std::uint64_t e) const;

    Fqn frobenius(const Fqn& x, int j) const;  // x^(q^j), j mod n
    Fqn aut_p(const Fqn& x, int e) const;      // x^(p^e), e mod rn
    Fqn norm(const Fqn& x, int m) const;       // N_(q^n / q^m)
    Fqn trace(const Fqn& x, int m) const;      // Tr_(q^n / q^m)

    Fqn embed(std::uint16_t code) const;       // F_q -> F_(q^n)
    Fqn from_int(std::int64_t v) const;        // prime-field constant
    bool in_base_subfield(const Fqn& x) const; // x in F_q
    bool in_subfield(const Fqn& x, int m) const;

    // enumeration index: sum code(c_i) * q^i (internal walk/count order)
    std::uint64_t index_of(const Fqn& x) const;
    Fqn element(std::uint64_t idx) const;

    // canonical report order: coordinate tuples compared lexicographically,
    // coordinate 0 first, each coordinate by its digit tuple
    bool lex_less(const Fqn& x, const Fqn& y) const;

    std::string to_hex(const Fqn& x) const;
    Fqn from_hex(std::string_view s) const;
    int hex_digits_per_coord() const { return hexw_; }

    // --- raw kernels over coordinate arrays of length n (scan hot paths) ---
    void set_zero_raw(std::uint16_t* dst) const;
    void add_raw(std::uint16_t* dst, const std::uint16_t* x, const std::uint16_t* y) const;
    void sub_raw(std::uint16_t* dst, const std::uint16_t* x, const std::uint16_t* y) const;
    // acc += s * v  for an F_q scalar s
    void axpy_raw(std::uint16_t* acc, std::uint16_t s, const std::uint16_t* v) const;
    void mul_raw(std::uint16_t* dst, const std::uint16_t* x, const std::uint16_t* y) const;
    void inv_raw(std::uint16_t* dst, const std::uint16_t* x) const;
    void frob_raw(std::uint16_t* dst, const std::uint16_t* x, int j) const;
    bool eq_raw(const std::uint16_t* x, const std::uint16_t* y) const;
    bool is_zero_raw(const std::uint16_t* x) const;
    std::uint64_t index_raw(const std::uint16_t* x) const;

    Fqn wrap(const std::uint16_t* x) const { return Fqn{{x, x + n_}}; }

    // power basis alpha^i
    const std::vector<Fqn>& basis() const { return basis_; }

    bool operator==(const FieldCtx& o) const {
        return p() == o.p() && r() == o.r() && t_ == o.t_;
    }

  private:
    FieldCtx(SubField fq, int t);

    SubField fq_;
    int t_, n_;
    double order_bits_;
    int hexw_;
    std::vector<std::uint16_t> irr_qn_;  // monic, length n+1, F_q codes
    std::vector<std::uint16_t> red_;     // rows m=0..n-2: x^(n+m) mod irr_qn
    std::vector<std::uint16_t> frob_;    // [j][i][k]: coord k of (alpha^i)^(q^j)
    std::vector<Fqn> basis_;
};

// All h with h^(q^t+1) = -1 and h outside F_(q^t), by full enumeration,
// sorted in canonical lex order.  Requires odd q.
std::vector<Fqn> admissible_h(const FieldCtx& ctx, int max_bits = kDefaultEnumBits);

HDiagnostic diagnose_h(const FieldCtx& ctx, const Fqn& h);

std::uint64_t hash_coords(const std::uint16_t* c, int n);

// Odometer over all q^n coordinate vectors in index order (coordinate 0
// fastest).  Registered F_q-linear maps are maintained incrementally, O(n)
// per step per map.
class ElementWalker {
  public:
    explicit ElementWalker(const FieldCtx& ctx);

    // register a linear map by its images of the power basis; returns slot id
    int track(const std::vector<Fqn>& basis_images);

    const std::uint16_t* coords() const { return coords_.data(); }
    const std::uint16_t* value(int slot) const { return values_.data() + slot * n_; }
    std::uint64_t index() const { return index_; }
    bool next();  // false once the walk is exhausted
    void reset();
    // position the walk at an arbitrary index (tracked values recomputed)
    void seek(std::uint64_t idx);

  private:
    const FieldCtx* ctx_;
    int n_;
    std::uint32_t q_;
    std::uint64_t index_, total_;
    std::vector<std::uint16_t> coords_;
    std::vector<std::uint16_t> images_;  // per slot: n images * n coords
    std::vector<std::uint16_t> values_;
    int slots_ = 0;
};

// Walks the (q^n-1)/(q-1) normalized representatives of F_(q^n)^* / F_q^*
// (first nonzero coordinate equal to 1), with the same incremental tracking.
class ProjWalker {
  public:
    explicit ProjWalker(const FieldCtx& ctx);

    int track(const std::vector<Fqn>& basis_images);

    const std::uint16_t* coords() const { return coords_.data(); }
    const std::uint16_t* value(int slot) const { return values_.data() + slot * n_; }
    bool next();
    void reset();

  private:
    void enter_block(int pivot);

    const FieldCtx* ctx_;
    int n_;
    std::uint32_t q_;
    int pivot_;
    std::vector<std::uint16_t> coords_;
    std::vector<std::uint16_t> images_;
    std::vector<std::uint16_t> values_;
    int slots_ = 0;
};

}  // namespace scatterlab
