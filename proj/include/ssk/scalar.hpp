#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

#include "ssk/errors.hpp"

namespace ssk {

using Rat = mpq_class;

Rat rat(long num, long den = 1);
std::string rat_to_string(const Rat& r);

unsigned euler_phi(unsigned k);

// Monic k-th cyclotomic polynomial, dense coefficient vector of length phi(k)+1,
// constant term first. Exact integers (stored as Rat for uniformity).
const std::vector<Rat>& cyclotomic_poly(unsigned k);

// An exact element of Q or of Q(zeta_k), stored in the power basis
// 1, z, ..., z^{phi(k)-1} reduced modulo the k-th cyclotomic polynomial.
// k == 1 is the plain rational case. Mixed-order arithmetic lifts both
// operands into Q(zeta_lcm); an element whose reduced form is rational
// collapses back to k == 1, so equality of values implies equality of
// representations.
class Scalar {
public:
    Scalar() : k_(1), c_(1, Rat(0)) {}
    Scalar(long v) : k_(1), c_(1, Rat(v)) {}
    Scalar(const Rat& v) : k_(1), c_(1, v) {}
    Scalar(long num, long den) : k_(1), c_(1, rat(num, den)) {}

    static Scalar zeta(unsigned k);
    // Interprets coeffs as c0 + c1*z + c2*z^2 + ... (any length), reduces.
    static Scalar cyclotomic(unsigned k, std::vector<Rat> coeffs);

    unsigned order() const { return k_; }
    const std::vector<Rat>& coeffs() const { return c_; }
    bool is_rational() const { return k_ == 1; }
    const Rat& rational() const;

    bool is_zero() const;
    bool is_one() const;

    Scalar operator-() const;
    Scalar& operator+=(const Scalar& o);
    Scalar& operator-=(const Scalar& o);
    Scalar& operator*=(const Scalar& o);
    Scalar& operator/=(const Scalar& o);
    friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
    friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
    friend Scalar operator*(Scalar a, const Scalar& b) { return a *= b; }
    friend Scalar operator/(Scalar a, const Scalar& b) { return a /= b; }

    Scalar inverse() const;

    bool operator==(const Scalar& o) const;
    bool operator!=(const Scalar& o) const { return !(*this == o); }
    // Total order on canonical representations (order, then coeffs); used only
    // to keep containers deterministic, no arithmetic meaning.
    bool operator<(const Scalar& o) const;

    // "p" / "p/q" for rationals, "cyc(k)[c0,c1,...]" otherwise.
    std::string to_string() const;
    static Scalar parse(const std::string& s);

    // When order lifting is disabled, mixed cyclotomic orders raise
    // IncompatibleCyclotomicOrders instead of lifting to the lcm.
    static bool order_lifting_enabled;

private:
    unsigned k_;
    std::vector<Rat> c_; // length phi(k_), reduced mod Phi_{k_}
    static Scalar from_raw(unsigned k, std::vector<Rat> raw);
    Scalar lifted_to(unsigned m) const;
    void collapse();
};

} // namespace ssk
