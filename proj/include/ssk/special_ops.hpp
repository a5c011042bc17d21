#pragma once

#include <vector>

#include "ssk/operator.hpp"
#include "ssk/series.hpp"

namespace ssk {

// Operator realizing the substitution endomorphism f |-> f(x + u). Built as
// the commutative exponential sum_i u^i d^i / i! with all series coefficients
// placed left of the derivative part. Every u_q needs valuation >= 1
// (NotNilpotentShift otherwise) and precision at least prec.x_deg.
Op shift_operator(const std::vector<Series>& u, Prec prec);

// Substitution x_axis = 0, i.e. the shift with u_axis = -x_axis.
Op delta_op(int n, int axis, Prec prec);

// Right inverse of d_axis: applies to x_axis^m as x_axis^{m+1}/(m+1).
// Satisfies d * I = 1 and I * d = 1 - delta.
Op integrator_op(int n, int axis, Prec prec);

// The order-zero operator exp((zeta_k^i - 1) x_axis * d_axis) whose action
// rescales x_axis by the root of unity zeta_k^i.
Op root_of_unity_op(int n, unsigned k, long i, int axis, Prec prec);

// Conjugator for an invertible linear change of variables: the operator
// S = c0 exp(sum_i (sum_j (C_ij - delta_ij) x_j) * d_i), which satisfies
// S^-1 d_i S = sum_j C_ij d_j. The inverse conjugator is the same
// construction applied to (C^-1, c0^-1). Throws SingularMatrix when C is not
// invertible and NotAUnit when c0 = 0.
Op linear_change_conjugator(const std::vector<std::vector<Scalar>>& C, const Scalar& c0,
                            Prec prec);

// Formal inverse of the map F = (x_1 - H_1, ..., x_n - H_n) with val(H_i)
// >= 2, correct modulo degree out_deg. When the truncated Jacobian
// determinant is exactly 1 the closed differential formula
// G_i = sum_p d^p (x_i H^p) / p! is used; otherwise the inverse is solved
// degree by degree (it always exists formally). Throws ValuationTooLow when
// some H_i has valuation < 2.
std::vector<Series> abhyankar_inverse(const std::vector<Series>& F, int out_deg);

// Recovers U from the composite V = U o F, modulo degree out_deg, with the
// same Jacobian dispatch: the formula sum_p d^p (V H^p) / p! when j(F) = 1,
// composition with the inverse map otherwise.
Series abhyankar_transport(const Series& composite, const std::vector<Series>& F,
                           int out_deg);

} // namespace ssk
