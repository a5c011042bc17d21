#pragma once

#include <map>
#include <optional>
#include <string>

#include "ssk/operator.hpp"

namespace ssk {

// Laurent-in-d_n view of the pseudodifferential rings: the value is the sum
// of level(l) * d_n^l over integer levels l, where each level coefficient is
// free of d_n (kind DHatN). Every level carries its own x-degree window, so a
// pipeline that digs through many tail levels loses x-precision gradually
// with depth instead of charging one flat window for the worst level.
//
// Claims: a stored level is exact through its own window; a missing level at
// or above tail() is exactly zero; everything below tail() is unknown. The
// product routine both consumes and produces these claims, including the
// extra unknowns created when d_n-powers differentiate a truncated
// coefficient past its window.
class GOp {
public:
    // The zero value, exact down to the given tail claim.
    GOp(int n, int tail);
    // Split a flat operator by d_n-exponent. Every level inherits the flat
    // x window; for kinds with d_n-tails the tail claim is
    // -flat.prec().dn_tail, for differential kinds the negative levels are
    // exactly zero. When the x window is finite, levels in the claimed range
    // with no stored term become windowed zeros, since the flat claim says
    // nothing about them past the window. The caller must pass an operator
    // whose top d_n-exponent is attained by a stored term (always true for
    // exact data and for operators with a monic d_n-leading term).
    explicit GOp(const Op& flat);

    static GOp constant(int n, const Scalar& c, int tail);
    static GOp one(int n, int tail) { return constant(n, Scalar(1), tail); }
    // d_n^k as an exact value.
    static GOp dn_power(int n, int k, int tail);
    // A single d_n-free coefficient placed at the given level; other levels
    // at or above the tail claim are exactly zero.
    static GOp from_level(const Op& coeff, int level, int tail);

    int n() const { return n_; }
    int tail() const { return tail_; }
    // Highest stored level, or tail() - 1 when nothing is stored.
    int top() const;
    const std::map<int, Op>& stored() const { return lev_; }
    // Coefficient at a level: the stored value, an exact zero at or above
    // tail(), PrecisionExhausted below it.
    Op level(int l) const;
    // x window claimed at a level (wide for the exact-zero levels).
    int window(int l) const;

    GOp operator-() const;
    GOp scaled(const Scalar& c) const;
    friend GOp operator+(const GOp& a, const GOp& b);
    friend GOp operator-(const GOp& a, const GOp& b);
    friend GOp operator*(const GOp& a, const GOp& b);

    // Inverse of 1 + (strictly negative levels) by the geometric series.
    GOp neumann_inverse() const;
    // Inverse of an operator whose top level is the constant 1: factor out
    // the d_n-power and invert the rest as above. NotAUnit otherwise.
    GOp inverse() const;
    // Integer powers; negative exponents go through inverse().
    GOp pow(int e) const;

    // Raise the tail claim, dropping levels below it.
    GOp with_tail(int new_tail) const;

    // Max over stored terms of |d| + level - |x|; nullopt when nothing is
    // stored. This is the attained ord of the represented operator.
    std::optional<long> stored_ord() const;

    // Claims cover the flat window: tail() <= -w.dn_tail and every level at
    // or above -w.dn_tail has x window >= w.x_deg.
    bool covers(Prec w) const;
    // Every monomial inside the flat window vanishes. PrecisionExhausted
    // when the claims do not cover the window.
    bool is_zero_through(Prec w) const;

    // Reassemble a flat operator on the given window; PrecisionExhausted
    // when the claims do not cover it.
    Op to_op(Kind kind, Prec w) const;

    std::string to_string() const;

private:
    int n_ = 0;
    int tail_ = 0;
    std::map<int, Op> lev_; // level -> d_n-free coefficient, kind DHatN

    void put(int l, Op coeff); // keeps zero coefficients: they carry windows
};

GOp commutator(const GOp& a, const GOp& b);

// True when every stored term inside its level's x window vanishes, so the
// value is indistinguishable from zero at the claimed precision. Terms past
// a window carry no claim and are ignored.
bool vanishes_within_claims(const GOp& g);

} // namespace ssk
