#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ssk/multi_index.hpp"
#include "ssk/scalar.hpp"

namespace ssk {

// Truncated element of K[[x_1..x_n]]. prec() is the degree V through which the
// value is exact: every monomial of total degree <= V is stored with its true
// coefficient and nothing of higher degree is kept. Values are immutable after
// construction; all operations are pure and return fresh series with a sound
// output precision.
class Series {
public:
    using Terms = std::map<MIdx, Scalar, DegLexLess>;

    Series(int n, int prec_deg);
    static Series constant(int n, const Scalar& c, int prec_deg);
    static Series monomial(int n, const MIdx& e, const Scalar& c, int prec_deg);
    static Series variable(int n, int axis, int prec_deg);
    static Series from_terms(int n, int prec_deg, std::vector<std::pair<MIdx, Scalar>> entries);

    int n() const { return n_; }
    int prec() const { return prec_; }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    // Minimal total degree of a stored term; nullopt is the valuation of 0.
    std::optional<long> valuation() const;
    Scalar coeff(const MIdx& e) const;
    Scalar constant_term() const { return coeff(midx_zero(n_)); }
    // The homogeneous part of the given total degree.
    Series graded_part(int deg) const;

    Series truncated(int new_prec) const;

    Series operator-() const;
    friend Series operator+(const Series& a, const Series& b);
    friend Series operator-(const Series& a, const Series& b);
    friend Series operator*(const Series& a, const Series& b);
    Series scaled(const Scalar& c) const;

    Series derivative(int axis) const;
    // Primitive in x_axis with zero constant of integration.
    Series antiderivative(int axis) const;

    // f(g_1, ..., g_n); requires every valuation(g_i) >= 1.
    static Series compose(const Series& f, const std::vector<Series>& g);
    Series invert_unit() const;
    // exp(f); requires valuation >= 1 so the power sum is degreewise finite.
    Series exp() const;

    bool operator==(const Series& o) const { return n_ == o.n_ && terms_ == o.terms_; }
    bool operator!=(const Series& o) const { return !(*this == o); }

    std::string to_string() const;

private:
    int n_;
    int prec_;
    Terms terms_;
    void insert_term(const MIdx& e, const Scalar& c);
};

} // namespace ssk
