#pragma once

#include <map>
#include <optional>
#include <vector>

#include "ssk/operator.hpp"
#include "ssk/series.hpp"

namespace ssk {

// Finitely certified subspaces of the d_n-Laurent module and the dressing
// operators attached to them: the wave operator built slice by slice from a
// graded basis, its unit/monic factorization, the transport of stabilizing
// elements to differential operators, and the two constructions passing
// between commutative operator rings and (ring, subspace) pairs.

// A graded subspace presented by one basis element per x-free multi-index k
// with |k| <= cutoff. Element w_k has kind VElem and attained order
// mu + |k|; within each grade the top homogeneous parts are linearly
// independent, which pins the dimension count of every graded piece. prec
// records the d_n depth every basis element is claimed through.
struct SubspaceW {
    int n = 0;
    int mu = 0;
    int cutoff = 0;
    std::map<MIdx, Op, DegLexLess> basis;
    Prec prec{};
};

// Validates the certificate: complete index set, x-free elements with
// nonnegative exponents on the early axes, exact orders, and grade-by-grade
// independence of the top parts. Shape problems report DimensionMismatch or
// KindIncompatible, order and independence failures report HilbertViolation.
void check_subspace(const SubspaceW& w);

// Replaces every basis element by its leading exponent monomial under the
// d_n-dominant comparison, with coefficient one.
SubspaceW support(const SubspaceW& w);

// dim of the graded piece of total order k, read off the certificate.
long hilbert_function(const SubspaceW& w, long k);

// The basis from the diamond images of the plain d-monomials: w_k = d^k <> s
// for |k| <= cutoff, with mu read from the image of 1. s must carry an x
// window of at least cutoff.
SubspaceW diamond_subspace(const Op& s, int cutoff);

enum class BasisChoice {
    Canonical, // row-reduce each grade of the basis before the recursion
    AsGiven,
};

// Wave operator of the subspace: the operator S with d^k <> S = w_k for the
// selected basis, assembled slice by slice. Kind DSym when no negative
// d_n-exponents appear, PiHat otherwise. Errors: HilbertViolation,
// PrecisionExhausted.
Op build_sato_general(const SubspaceW& w, BasisChoice choice = BasisChoice::Canonical);

// The unique wave operator of the shape 1 + (negative d_n levels), for a
// subspace of index zero whose leading exponents are the plain d-monomials.
// The basis is first renormalized so the nonnegative part of each element is
// exactly d^k; the output does not depend on the presentation. Errors:
// SupportNotFull when the renormalization system is unsolvable (or mu is
// nonzero), HilbertViolation via the certificate check.
Op build_sato_monic(const SubspaceW& w);

struct UnitFactorization {
    Op unit;  // order-zero invertible differential factor
    Op monic; // 1 + negative d_n levels
};

// Split a wave operator as unit * monic. The monic factor is rebuilt from
// the diamond images of s, so it only depends on the subspace s dresses,
// not on the presentation of s itself. Errors: SupportNotFull when the
// image subspace has no monic wave operator, SystemInconsistent when the
// quotient keeps negative levels inside its claimed window.
UnitFactorization unit_factorize(const Op& s);

// True when no stored monomial inside the claim window carries a negative
// d_n-exponent, so the operator acts on the polynomial module.
bool membership_F(const Op& p);

// Transport of a stabilizing element: the differential operator L with
// s * f = L * s, computed by expressing each w_k * f over the diamond basis
// of s and rebuilding L from the resulting coordinates. out_x_deg bounds the
// x-degree of L; the default -1 derives it from the window of s. Errors:
// NotStabilizing when some w_k * f leaves the subspace within the claims,
// PrecisionExhausted when the window of s cannot support the request.
Op sato_transport(const Op& s, const Op& f, int out_x_deg = -1);

// A commutative ring of constant-coefficient elements acting on a subspace
// from the right.
struct SchurPair {
    std::vector<Op> a_generators; // kind VElem
    SubspaceW w;
    std::optional<long> rank_hint;
};

// Certificate check: the subspace is valid and every generator maps each
// basis element back into the subspace, for the grades the cutoff can
// decide. Errors: NotStabilizing, plus the subspace errors.
void check_pair(const SchurPair& pair);

// From a commuting family of differential operators containing a
// quasi-elliptic tuple (listed first) to the pair: conjugate every
// generator to constant coefficients through the shared frame and read the
// subspace off the inverse dressing operator. cutoff bounds the basis
// grades, depth the d_n claim of the transported generators. Errors:
// NotQuasiElliptic, NotCommuting, and the frame errors.
SchurPair construction1(const std::vector<Op>& bs, int cutoff, int depth);

// Back from a pair with index zero and full support: conjugate every
// generator by the monic wave operator. Errors: NotStabilizing when a
// conjugate keeps negative levels inside its window, SupportNotFull via the
// monic construction.
std::vector<Op> construction2(const SchurPair& pair);

struct RankReport {
    long rank = 0;
    int budget = 0;
    bool exact = false; // the count repeated at budget - 1
};

// Budgeted rank of the subspace over the fraction field of the generated
// ring: basis elements are taken in grade order and counted when no
// relation b * w = sum of ring multiples of the earlier picks exists with
// b a nonzero combination of ring monomials within the degree budget. The
// count can only overshoot the true rank, and the exact flag records
// whether shrinking the budget by one changes it. Errors: BudgetExhausted
// when no nonconstant ring monomial fits the budget.
RankReport analytical_rank(const SchurPair& pair, int degree_budget);

struct SpectralBasis {
    std::vector<Series> basis;
    int out_deg = 0;
    bool stabilized = false; // dimension repeated at out_deg - 1
};

// Basis of the joint eigenvalue problem Q f = chi_Q f solved through total
// degree out_deg: one linear system over the series coefficients, one
// equation per generator and target degree it can still see. Errors:
// NotCommuting, DimensionMismatch for a chi of the wrong length,
// PrecisionExhausted when a generator window is too shallow.
SpectralBasis solve_spectral(const std::vector<Op>& bs, const std::vector<Scalar>& chi,
                             int out_deg);

} // namespace ssk
