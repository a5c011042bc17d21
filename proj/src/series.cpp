#include "ssk/series.hpp"

#include <algorithm>

namespace ssk {

namespace {
void check_same_shape(const Series& a, const Series& b) {
    if (a.n() != b.n())
        fail(Errc::DimensionMismatch,
             "series in " + std::to_string(a.n()) + " and " + std::to_string(b.n()) + " variables");
}
} // namespace

Series::Series(int n, int prec_deg) : n_(n), prec_(prec_deg) {
    if (n < 0 || prec_deg < 0) fail(Errc::PrecisionExhausted, "series precision must be nonnegative");
}

Series Series::constant(int n, const Scalar& c, int prec_deg) {
    Series s(n, prec_deg);
    s.insert_term(midx_zero(n), c);
    return s;
}

Series Series::monomial(int n, const MIdx& e, const Scalar& c, int prec_deg) {
    Series s(n, prec_deg);
    s.insert_term(e, c);
    return s;
}

Series Series::variable(int n, int axis, int prec_deg) {
    return monomial(n, midx_unit(n, axis), Scalar(1), prec_deg);
}

Series Series::from_terms(int n, int prec_deg, std::vector<std::pair<MIdx, Scalar>> entries) {
    Series s(n, prec_deg);
    for (auto& [e, c] : entries) s.insert_term(e, c);
    return s;
}

void Series::insert_term(const MIdx& e, const Scalar& c) {
    if (static_cast<int>(e.size()) != n_) fail(Errc::DimensionMismatch, "multi-index length != n");
    for (auto v : e)
        if (v < 0) fail(Errc::ParseError, "negative exponent in series term " + midx_to_string(e));
    if (c.is_zero() || midx_sum(e) > prec_) return;
    auto [it, fresh] = terms_.emplace(e, c);
    if (!fresh) {
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

std::optional<long> Series::valuation() const {
    if (terms_.empty()) return std::nullopt;
    return midx_sum(terms_.begin()->first); // map is ordered by total degree
}

Scalar Series::coeff(const MIdx& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? Scalar(0) : it->second;
}

Series Series::graded_part(int deg) const {
    Series r(n_, prec_);
    for (const auto& [e, c] : terms_) {
        long d = midx_sum(e);
        if (d > deg) break;
        if (d == deg) r.insert_term(e, c);
    }
    return r;
}

Series Series::truncated(int new_prec) const {
    Series r(n_, std::min(new_prec, prec_));
    for (const auto& [e, c] : terms_) {
        if (midx_sum(e) > r.prec_) break;
        r.terms_.emplace(e, c);
    }
    return r;
}

Series Series::operator-() const {
    Series r(n_, prec_);
    for (const auto& [e, c] : terms_) r.terms_.emplace(e, -c);
    return r;
}

Series operator+(const Series& a, const Series& b) {
    check_same_shape(a, b);
    Series r(a.n_, std::min(a.prec_, b.prec_));
    for (const auto& [e, c] : a.terms_) r.insert_term(e, c);
    for (const auto& [e, c] : b.terms_) r.insert_term(e, c);
    return r;
}

Series operator-(const Series& a, const Series& b) { return a + (-b); }

Series operator*(const Series& a, const Series& b) {
    check_same_shape(a, b);
    Series r(a.n_, std::min(a.prec_, b.prec_));
    for (const auto& [ea, ca] : a.terms_) {
        long da = midx_sum(ea);
        if (da > r.prec_) break;
        for (const auto& [eb, cb] : b.terms_) {
            if (da + midx_sum(eb) > r.prec_) break;
            r.insert_term(midx_add(ea, eb), ca * cb);
        }
    }
    return r;
}

Series Series::scaled(const Scalar& c) const {
    Series r(n_, prec_);
    if (c.is_zero()) return r;
    for (const auto& [e, k] : terms_) r.terms_.emplace(e, k * c);
    return r;
}

Series Series::derivative(int axis) const {
    if (prec_ == 0) fail(Errc::PrecisionExhausted, "derivative of a degree-0 truncation");
    Series r(n_, prec_ - 1);
    for (const auto& [e, c] : terms_) {
        int32_t m = e[static_cast<size_t>(axis)];
        if (m == 0) continue;
        MIdx d = e;
        d[static_cast<size_t>(axis)] = m - 1;
        r.insert_term(d, c * Scalar(m));
    }
    return r;
}

Series Series::antiderivative(int axis) const {
    Series r(n_, prec_ + 1);
    for (const auto& [e, c] : terms_) {
        MIdx d = e;
        int32_t m = ++d[static_cast<size_t>(axis)];
        r.insert_term(d, c / Scalar(m));
    }
    return r;
}

Series Series::compose(const Series& f, const std::vector<Series>& g) {
    if (static_cast<int>(g.size()) != f.n_)
        fail(Errc::DimensionMismatch, "compose needs one inner series per variable");
    int prec = f.prec_;
    for (const auto& gi : g) {
        check_same_shape(g[0], gi);
        auto v = gi.valuation();
        if (v.has_value() && *v < 1)
            fail(Errc::CompositionNotNilpotent, "inner series has nonzero constant term");
        prec = std::min(prec, gi.prec_);
    }
    int gn = g.empty() ? 0 : g[0].n_;
    Series out(gn, prec);
    // Memoized powers of each inner series; exponents are bounded by prec
    // because each g_i has valuation >= 1.
    std::vector<std::vector<Series>> powers(g.size());
    for (size_t i = 0; i < g.size(); ++i) powers[i].push_back(Series::constant(gn, Scalar(1), prec));
    auto power_of = [&](size_t i, int32_t e) -> const Series& {
        auto& tower = powers[i];
        while (static_cast<int32_t>(tower.size()) <= e) tower.push_back(tower.back() * g[i]);
        return tower[static_cast<size_t>(e)];
    };
    for (const auto& [e, c] : f.terms_) {
        if (midx_sum(e) > prec) break;
        Series term = Series::constant(gn, c, prec);
        for (size_t i = 0; i < g.size(); ++i)
            if (e[i] != 0) term = term * power_of(i, e[i]);
        out = out + term;
    }
    return out;
}

Series Series::invert_unit() const {
    Scalar c0 = constant_term();
    if (c0.is_zero()) fail(Errc::NotAUnit, "series with zero constant term has no inverse");
    // f = c0 (1 - u) with val(u) >= 1; invert by the geometric series, built
    // with a Horner loop so prec_ multiplications suffice.
    Series u = Series::constant(n_, Scalar(1), prec_) - scaled(c0.inverse());
    Series acc = Series::constant(n_, Scalar(1), prec_);
    for (int step = 0; step < prec_; ++step) acc = Series::constant(n_, Scalar(1), prec_) + u * acc;
    return acc.scaled(c0.inverse());
}

Series Series::exp() const {
    if (!is_zero() && *valuation() < 1)
        fail(Errc::ValuationTooLow, "series exponential needs a zero constant term");
    Series acc = Series::constant(n_, Scalar(1), prec_);
    Series term = acc;
    for (int k = 1; k <= prec_; ++k) {
        term = (term * *this).scaled(Scalar(Rat(1) / Rat(k)));
        if (term.is_zero()) break;
        acc = acc + term;
    }
    return acc;
}

std::string Series::to_string() const {
    if (terms_.empty()) return "0";
    std::string s;
    for (const auto& [e, c] : terms_) {
        if (!s.empty()) s += " + ";
        s += c.to_string();
        for (int i = 0; i < n_; ++i) {
            if (e[static_cast<size_t>(i)] != 0)
                s += "*x" + std::to_string(i + 1) + "^" + std::to_string(e[static_cast<size_t>(i)]);
        }
    }
    return s;
}

} // namespace ssk
