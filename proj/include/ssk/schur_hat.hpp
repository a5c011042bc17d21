#pragma once

#include <vector>

#include "ssk/graded.hpp"
#include "ssk/operator.hpp"
#include "ssk/series.hpp"

namespace ssk {

// Normalization and dressing for commuting tuples whose leading terms follow
// the staircase pattern gamma(P_i) = e_i + l_i e_n, gamma(P_n) = l_n e_n.
// The steps here take such a tuple to a conjugate with constant-coefficient
// leading data, extract l-th roots in the d_n-Laurent ring, and build the
// dressing operator that moves the roots onto the flat generators d_i. All
// precision claims flow through the graded layer; nothing is certified past
// the windows the inputs carry.

// l-th root of a monic operator whose top level l is the constant 1. The
// result has top level 1 with coefficient 1 and a tail claim as deep as the
// input supports, at most p.tail() - l + 1 and shallower when a finite x
// window erodes under the level-by-level Leibniz derivatives. Its l-th
// power reproduces p through the shared claims. Errors: GammaShapeMismatch
// when the top level is not l, NotMonic when the level-l coefficient is not
// the constant 1.
GOp nth_root(const GOp& p, int l);

// Companion root L_i = P_i * L^{-l_i} for the remaining tuple members. The
// input must have top level l_i with a single d-monomial coefficient d_j for
// some axis j < n. Checks commutation of the result with l_root inside the
// claimed windows. Errors: GammaShapeMismatch, NotMonic, NotCommuting.
GOp quotient_root(const GOp& pi, const GOp& l_root, int li);

struct NormalizeResult {
    Series f;              // unit series, f(0) = 1
    Op s;                  // exponential conjugator from the second stage
    Op s_inv;              // its exact inverse, kept so callers skip a
                           // general unit inversion
    std::vector<Op> primed; // s^-1 f^-1 P_i f s, the normalized tuple
};

// Conjugate a commuting quasi-elliptic tuple so that the level-l_i leading
// coefficients become the bare d_i and the level l_n - 1 of P_n vanishes.
// x_prec is the x-degree through which the conjugators are expanded; the
// primed tuple carries the windows that survive the conjugation products.
// Errors: NotCommuting, NotQuasiElliptic.
NormalizeResult normalize(const std::vector<Op>& ps, int x_prec);

// Dressing operator for a normalized root tuple: ls holds L_1 .. L_n-1 with
// exact top d_i, then L_n = d_n + v with v free of x_1 .. x_n-1 at level 0.
// Returns S of order 0 with S^-1 d_i S = L_i and S^-1 (d_n + v_0) S = L_n,
// certified down to level -min_i(-tail_i). Errors: NotQuasiElliptic for a
// tuple of the wrong shape, SystemInconsistent when the defect system fails
// its closedness checks, PrecisionExhausted when no finite tail depth is
// claimed by inputs that still carry defects.
GOp dressing_operator(const std::vector<GOp>& ls);

// The assembled conjugation data for one quasi-elliptic tuple: the
// normalization unit f and exponential s with their inverses, and the
// dressing pair. Built once, then reused to transport any number of
// centralizer elements through the same chain.
struct ConstantFrame {
    int n = 0;
    std::vector<long> ells; // growth exponents l_1 .. l_n of the tuple
    Series f;
    Op fw, fi;   // multiplication by f and by 1/f
    Op s, s_inv; // second-stage exponential conjugator
    GOp dress, dress_inv;
};

// Normalize the tuple, extract the roots with tail claim -rt, and dress.
// x_prec is the x window the conjugators are expanded through. Errors:
// NotQuasiElliptic, NotCommuting from the normalization, and the root and
// dressing errors of the steps above.
ConstantFrame constant_frame(const std::vector<Op>& ps, int rt, int x_prec);

// Push one element q through the frame's conjugations and reassemble on the
// requested window with kind VElem. q must commute with the tuple the frame
// was built from; x-dependence surviving inside the claimed windows reports
// NotCommuting, claims falling short of the window report
// PrecisionExhausted.
Op frame_transport(const ConstantFrame& fr, const Op& q, Prec out);

// Full chain: conjugate an element q of the centralizer of a commuting
// quasi-elliptic tuple to a constant-coefficient operator, by normalizing
// the tuple, extracting roots, dressing, and transporting q through the
// same conjugations. The result is reassembled on the requested window with
// kind VElem. Errors: NotCommuting, NotQuasiElliptic, SystemInconsistent,
// PrecisionExhausted.
Op centralizer_to_constants(const Op& q, const std::vector<Op>& ps, Prec out);

} // namespace ssk
