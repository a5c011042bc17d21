#pragma once

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "ssk/multi_index.hpp"
#include "ssk/scalar.hpp"
#include "ssk/series.hpp"

namespace ssk {

// Ring membership flag. The differential side is DHatN < DHat < DSym, the
// pseudodifferential side DHatN < EHat < PiHat, with DHat < EHat,
// DSym < PiHat, and VElem (constant coefficients) < EHat. Mixed arithmetic
// promotes to the least common upper kind.
enum class Kind { DHatN, DHat, DSym, VElem, EHat, PiHat };

const char* kind_name(Kind k);
Kind kind_parse(const std::string& s);
bool kind_leq(Kind a, Kind b);
Kind kind_join(Kind a, Kind b);
bool kind_allows_negative_dn(Kind k);
bool kind_is_differential(Kind k); // kinds that act on power series
bool kind_forbids_x(Kind k);       // VElem
bool kind_forbids_dn(Kind k);      // DHatN

// Truncation window. A value is exact for every monomial with total x-degree
// <= x_deg and (when the kind admits negative powers) d_n-exponent >= -dn_tail.
struct Prec {
    int x_deg = 0;
    int dn_tail = 0;
    friend bool operator==(const Prec&, const Prec&) = default;
};

// Window component for finitely supported data that is known exactly. Large
// enough that the product window arithmetic treats the factor as untruncated,
// small enough to stay clear of integer overflow in the window sums.
inline constexpr int wide_window = 1 << 20;

struct OpMono {
    MIdx x;
    MIdx d;

    bool operator==(const OpMono&) const = default;
};

// Canonical monomial order: (|x|, x lex, d anti-lex). Serialization and all
// iteration use it, so equal values print identically.
struct OpMonoLess {
    bool operator()(const OpMono& a, const OpMono& b) const;
};

// Truncated element of one of the completed operator rings. Monomials are
// stored in the x-left / d-right normal form x^i d^k with exact scalar
// coefficients; no zero coefficient and nothing outside the precision window
// is ever stored. ord_bound is a bound on |k| - |i| valid for the untruncated
// value, carried through arithmetic (sum under mul, max under add); the
// attained maximum over stored monomials is ord() and can be smaller.
//
// Truncation convention: the stored top d_n-exponent is trusted as the
// operator's ord_n. Constructors taking external data inherit it from the
// terms; every pipeline in this library keeps leading d_n-data at x-valuation
// 0, so the top level cannot hide beyond the x window.
class Op {
public:
    using Terms = std::map<OpMono, Scalar, OpMonoLess>;

    static Op zero(int n, Kind kind, Prec prec);
    static Op constant(int n, Kind kind, Prec prec, const Scalar& c);
    static Op one(int n, Kind kind, Prec prec) { return constant(n, kind, prec, Scalar(1)); }
    static Op monomial(int n, Kind kind, Prec prec, const MIdx& x, const MIdx& d, const Scalar& c);
    // d_axis; kind defaults to the smallest differential kind containing it.
    static Op d(int n, int axis, Prec prec);
    static Op from_terms(int n, Kind kind, Prec prec,
                         const std::vector<std::tuple<MIdx, MIdx, Scalar>>& entries,
                         std::optional<int> ord_bound = std::nullopt);
    // Multiplication operator by a coefficient series (d-part zero).
    static Op from_series(const Series& f, Kind kind, int dn_tail);

    int n() const { return n_; }
    Kind kind() const { return kind_; }
    const Prec& prec() const { return prec_; }
    int ord_bound() const { return ord_bound_; }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_one() const;
    Scalar coeff(const MIdx& x, const MIdx& d) const;

    Op operator-() const;
    Op scaled(const Scalar& c) const;
    friend Op operator+(const Op& a, const Op& b);
    friend Op operator-(const Op& a, const Op& b);
    friend Op operator*(const Op& a, const Op& b);
    Op pow(int e) const;

    Series apply(const Series& f) const;

    // max |k| - |i| over stored monomials; nullopt for the zero operator.
    std::optional<long> ord() const;
    // Largest d_n-exponent with a nonzero coefficient and its coefficient
    // operator (d_n stripped). KindIncompatible for DSym, where the d_n-degree
    // of the untruncated value is unbounded in principle.
    long ord_n() const;
    Op ht_n() const;

    Op symbol() const;
    Op homogeneous_component(long m) const;

    // Slice P_(i) = i! (coefficient block at x^i), constant coefficients.
    Op slice(const MIdx& i) const;
    // Sum of x^k P_(k) / k! over |k| = q.
    Op partial_slice(int q) const;
    Op project_pi() const;

    Op truncated(Prec p) const;
    // Reinterpret under another kind; checks the kind's shape constraints.
    Op with_kind(Kind k) const;
    Op with_ord_bound(int b) const;

    // Coefficient of d_n^j as an operator with d_n-exponent zero.
    Op dn_coefficient(int j) const;
    // Right multiplication by d_n^delta (pure exponent shift).
    Op shifted_dn(int delta) const;

    bool operator==(const Op& o) const { return n_ == o.n_ && terms_ == o.terms_; }
    bool operator!=(const Op& o) const { return !(*this == o); }

    std::string to_string() const;

private:
    int n_ = 0;
    Kind kind_ = Kind::DSym;
    Prec prec_;
    int ord_bound_ = 0;
    Terms terms_;

    Op() = default;
    void insert_term(const MIdx& x, const MIdx& d, const Scalar& c);
    void check_term_shape(const MIdx& x, const MIdx& d) const;
    friend Op diamond(const Op& f, const Op& P);
};

// pi(f o P): the constant-coefficient block of the composition. f must be a
// polynomial element of the spectral module (x-free, nonnegative exponents).
Op diamond(const Op& f, const Op& P);

Op commutator(const Op& a, const Op& b);

// Growth vector: entry q is the top d_q-exponent among monomials surviving
// the filters for axes above q (extraction runs from axis n down to 1).
// Undefined (GammaUndefined) for the zero operator and for kind DSym.
MIdx gamma_order(const Op& P);
// Iterated leading coefficient: the x-series multiplying d^gamma.
Series gamma_leading_series(const Op& P);
bool is_monic_gamma(const Op& P);
// ord(P) <= |gamma_order(P)|. Fails for operators whose order is carried by
// monomials outside the leading filter.
bool satisfies_a1(const Op& P);

struct QuasiEllipticEntry {
    MIdx gamma;
    long ell = 0;
    bool shape_ok = false;
    bool monic_ok = false;
    bool ord_ok = false;
};
struct QuasiEllipticReport {
    bool pass = false;
    std::vector<QuasiEllipticEntry> entries;
    std::string detail; // first failure, empty when pass
};
// Checks the tuple shape (P_1, .., P_n): gamma(P_i) = e_i + l_i e_n for
// i < n, gamma(P_n) = l_n e_n with l_n > 0, each P_i monic with
// ord = |gamma|. Expects exactly n operators.
QuasiEllipticReport check_quasi_elliptic(const std::vector<Op>& tuple);

// Linear independence of { d^k diamond sigma(P) : |k| = m } for every
// m <= grade, checked by exact rank.
bool is_regular_up_to(const Op& P, int grade);
// ord(P) == 0 and regular up to the given certification grade.
bool is_unit(const Op& P, int grade);
// Two-sided inverse within the precision window. Handles ord-0 regular
// operators of differential kind (triangular solve along the ord grading)
// and d_n-monic operators of tail kind (geometric series). NotAUnit when
// the shape fits neither or a solve step degenerates.
Op invert_unit_op(const Op& P);

// True when every monomial of a with total x-degree <= window.x_deg and
// d_n-exponent >= -window.dn_tail vanishes.
bool is_zero_within(const Op& a, const Prec& window);

// d/dx_axis applied to every coefficient (the commutator [d_axis, a]); the
// x window drops by one. PrecisionExhausted when no window remains.
Op coeff_derivative(const Op& a, int axis);
// Primitive in x_axis with zero constant of integration, applied to every
// coefficient; the x window grows by one.
Op coeff_antiderivative(const Op& a, int axis);

// Sharp left-factor degree cost of the multiplication window rule:
// max over monomials of (sum_q max(k_q, 0) - |i|), clamped at >= 0.
int mul_degree_cost(const Op& a);

} // namespace ssk
