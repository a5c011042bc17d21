#include "ssk/operator.hpp"

#include <algorithm>
#include <climits>
#include <sstream>

#include "ssk/errors.hpp"

namespace ssk {

const char* kind_name(Kind k) {
    switch (k) {
        case Kind::DHatN: return "DHatN";
        case Kind::DHat: return "DHat";
        case Kind::DSym: return "DSym";
        case Kind::VElem: return "VElem";
        case Kind::EHat: return "EHat";
        case Kind::PiHat: return "PiHat";
    }
    return "?";
}

Kind kind_parse(const std::string& s) {
    for (Kind k : {Kind::DHatN, Kind::DHat, Kind::DSym, Kind::VElem, Kind::EHat, Kind::PiHat})
        if (s == kind_name(k)) return k;
    fail(Errc::ParseError, "unknown kind '" + s + "'");
}

bool kind_leq(Kind a, Kind b) {
    if (a == b) return true;
    switch (a) {
        case Kind::DHatN:
            return b == Kind::DHat || b == Kind::DSym || b == Kind::EHat || b == Kind::PiHat;
        case Kind::DHat:
            return b == Kind::DSym || b == Kind::EHat || b == Kind::PiHat;
        case Kind::DSym:
            return b == Kind::PiHat;
        case Kind::VElem:
            return b == Kind::EHat || b == Kind::PiHat;
        case Kind::EHat:
            return b == Kind::PiHat;
        case Kind::PiHat:
            return false;
    }
    return false;
}

Kind kind_join(Kind a, Kind b) {
    // Scan upper bounds from small to large; any two upper bounds of a given
    // pair in this poset are comparable, so the first hit is the join.
    for (Kind k : {Kind::DHatN, Kind::VElem, Kind::DHat, Kind::DSym, Kind::EHat, Kind::PiHat})
        if (kind_leq(a, k) && kind_leq(b, k)) return k;
    return Kind::PiHat;
}

bool kind_allows_negative_dn(Kind k) {
    return k == Kind::VElem || k == Kind::EHat || k == Kind::PiHat;
}

bool kind_is_differential(Kind k) {
    return k == Kind::DHatN || k == Kind::DHat || k == Kind::DSym;
}

bool kind_forbids_x(Kind k) { return k == Kind::VElem; }

bool kind_forbids_dn(Kind k) { return k == Kind::DHatN; }

bool OpMonoLess::operator()(const OpMono& a, const OpMono& b) const {
    long sa = midx_sum(a.x), sb = midx_sum(b.x);
    if (sa != sb) return sa < sb;
    int c = lex_cmp(a.x, b.x);
    if (c != 0) return c < 0;
    return antilex_cmp(a.d, b.d) < 0;
}

namespace {

Rat falling_factorial(long j, long t) {
    Rat r(1);
    for (long s = 0; s < t; ++s) r *= Rat(j - s);
    return r;
}

} // namespace

void Op::check_term_shape(const MIdx& x, const MIdx& d) const {
    if ((int)x.size() != n_ || (int)d.size() != n_)
        fail(Errc::DimensionMismatch, "operator term arity mismatch");
    for (int q = 0; q < n_; ++q) {
        if (x[q] < 0) fail(Errc::ParseError, "negative x-exponent in operator term");
        if (d[q] < 0 && (q + 1 < n_ || !kind_allows_negative_dn(kind_)))
            fail(Errc::KindIncompatible,
                 std::string("negative d-exponent not allowed for kind ") + kind_name(kind_));
        if (x[q] > 0 && kind_forbids_x(kind_))
            fail(Errc::KindIncompatible, "x-dependence not allowed for kind VElem");
        if (q + 1 == n_ && d[q] != 0 && kind_forbids_dn(kind_))
            fail(Errc::KindIncompatible, "d_n not allowed for kind DHatN");
    }
}

void Op::insert_term(const MIdx& x, const MIdx& d, const Scalar& c) {
    if (c.is_zero()) return;
    if (midx_sum(x) > prec_.x_deg) return;
    if (n_ > 0 && d[n_ - 1] < -prec_.dn_tail) return;
    OpMono m{x, d};
    auto it = terms_.find(m);
    if (it == terms_.end()) {
        terms_.emplace(std::move(m), c);
    } else {
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

Op Op::zero(int n, Kind kind, Prec prec) {
    if (n <= 0) fail(Errc::DimensionMismatch, "operator needs n >= 1");
    if (prec.x_deg < 0 || prec.dn_tail < 0)
        fail(Errc::PrecisionExhausted, "operator precision window is negative");
    Op p;
    p.n_ = n;
    p.kind_ = kind;
    p.prec_ = prec;
    p.ord_bound_ = 0;
    return p;
}

Op Op::constant(int n, Kind kind, Prec prec, const Scalar& c) {
    Op p = zero(n, kind, prec);
    p.insert_term(midx_zero(n), midx_zero(n), c);
    return p;
}

Op Op::monomial(int n, Kind kind, Prec prec, const MIdx& x, const MIdx& d, const Scalar& c) {
    Op p = zero(n, kind, prec);
    p.check_term_shape(x, d);
    p.insert_term(x, d, c);
    p.ord_bound_ = (int)std::max<long>(0, midx_sum(d) - midx_sum(x));
    return p;
}

Op Op::d(int n, int axis, Prec prec) {
    Kind kind = (axis + 1 == n) ? Kind::DHat : Kind::DHatN;
    Op p = zero(n, kind, prec);
    p.insert_term(midx_zero(n), midx_unit(n, axis), Scalar(1));
    p.ord_bound_ = 1;
    return p;
}

Op Op::from_terms(int n, Kind kind, Prec prec,
                  const std::vector<std::tuple<MIdx, MIdx, Scalar>>& entries,
                  std::optional<int> ord_bound) {
    Op p = zero(n, kind, prec);
    long attained = 0;
    for (const auto& [x, d, c] : entries) {
        p.check_term_shape(x, d);
        p.insert_term(x, d, c);
        attained = std::max(attained, midx_sum(d) - midx_sum(x));
    }
    p.ord_bound_ = ord_bound ? *ord_bound : (int)attained;
    for (const auto& [m, c] : p.terms_)
        if (midx_sum(m.d) - midx_sum(m.x) > p.ord_bound_)
            fail(Errc::OrderMismatch, "stored term exceeds declared ord_bound");
    return p;
}

Op Op::from_series(const Series& f, Kind kind, int dn_tail) {
    Op p = zero(f.n(), kind, Prec{f.prec(), dn_tail});
    for (const auto& [e, c] : f.terms()) p.insert_term(e, midx_zero(f.n()), c);
    p.ord_bound_ = 0;
    return p;
}

bool Op::is_one() const {
    if (terms_.size() != 1) return false;
    const auto& [m, c] = *terms_.begin();
    return midx_is_zero(m.x) && midx_is_zero(m.d) && c.is_one();
}

Scalar Op::coeff(const MIdx& x, const MIdx& d) const {
    auto it = terms_.find(OpMono{x, d});
    return it == terms_.end() ? Scalar(0) : it->second;
}

Op Op::operator-() const {
    Op r = *this;
    for (auto& [m, c] : r.terms_) c = -c;
    return r;
}

Op Op::scaled(const Scalar& c) const {
    Op r = zero(n_, kind_, prec_);
    r.ord_bound_ = ord_bound_;
    if (c.is_zero()) return r;
    for (const auto& [m, v] : terms_) r.terms_.emplace(m, v * c);
    return r;
}

Op operator+(const Op& a, const Op& b) {
    if (a.n_ != b.n_) fail(Errc::DimensionMismatch, "operator arity mismatch");
    Kind k = kind_join(a.kind_, b.kind_);
    Prec p{std::min(a.prec_.x_deg, b.prec_.x_deg), std::min(a.prec_.dn_tail, b.prec_.dn_tail)};
    Op r = Op::zero(a.n_, k, p);
    r.ord_bound_ = std::max(a.ord_bound_, b.ord_bound_);
    for (const auto& [m, c] : a.terms_) r.insert_term(m.x, m.d, c);
    for (const auto& [m, c] : b.terms_) r.insert_term(m.x, m.d, c);
    return r;
}

Op operator-(const Op& a, const Op& b) { return a + (-b); }

namespace {

// Stored data bounds used by the output window of a product.
struct MulProfile {
    long dn_sup = 0;      // max d_n over stored terms, 0 when empty
    bool has_neg_dn = false;
    bool touches_xn = false;
    int degree_cost = 0;  // max over terms of sum_q max(k_q,0) - |i|
};

MulProfile profile_of(const Op& a) {
    MulProfile pr;
    int n = a.n();
    bool first = true;
    for (const auto& [m, c] : a.terms()) {
        long dn = m.d[n - 1];
        pr.dn_sup = first ? dn : std::max(pr.dn_sup, dn);
        first = false;
        if (dn < 0) pr.has_neg_dn = true;
        if (m.x[n - 1] > 0) pr.touches_xn = true;
        long pos = 0;
        for (int q = 0; q < n; ++q) pos += std::max<long>(m.d[q], 0);
        pr.degree_cost = std::max(pr.degree_cost, (int)(pos - midx_sum(m.x)));
    }
    if (first) pr.dn_sup = 0;
    pr.degree_cost = std::max(pr.degree_cost, 0);
    return pr;
}

} // namespace

int mul_degree_cost(const Op& a) { return profile_of(a).degree_cost; }

Op operator*(const Op& a, const Op& b) {
    if (a.n_ != b.n_) fail(Errc::DimensionMismatch, "operator arity mismatch");
    const int n = a.n_;
    Kind kind = kind_join(a.kind_, b.kind_);

    MulProfile pa = profile_of(a), pb = profile_of(b);

    // Tail window: a factor with a truncated d_n-tail pollutes output levels
    // from (-tail - 1 + other factor's top d_n) downward.
    int n_out;
    if (kind_allows_negative_dn(kind)) {
        long ca = !kind_allows_negative_dn(a.kind_) ? LONG_MAX
                  : a.prec_.dn_tail >= wide_window ? wide_window
                                                   : a.prec_.dn_tail - std::max<long>(pb.dn_sup, 0);
        long cb = !kind_allows_negative_dn(b.kind_) ? LONG_MAX
                  : b.prec_.dn_tail >= wide_window ? wide_window
                                                   : b.prec_.dn_tail - std::max<long>(pa.dn_sup, 0);
        long m = std::min(ca, cb);
        if (m < 0) fail(Errc::PrecisionExhausted, "product d_n-tail window is negative");
        n_out = (int)std::min<long>(m, std::max(a.prec_.dn_tail, b.prec_.dn_tail));
    } else {
        n_out = std::min(a.prec_.dn_tail, b.prec_.dn_tail);
    }

    // x window: left-factor derivatives eat right-factor degrees; negative
    // d_n-powers on the left can additionally pull unknown high x_n-degrees
    // of the right factor down into the tail window.
    long t_window = 0;
    if (pa.has_neg_dn && pb.touches_xn && kind_allows_negative_dn(kind))
        t_window = std::max<long>(pb.dn_sup + n_out, 0);
    // Exact data stays exact: every derivative of a fully known factor is
    // known, so the degree costs only charge finite windows.
    long bx = b.prec_.x_deg >= wide_window ? wide_window
                                           : b.prec_.x_deg - pa.degree_cost - t_window;
    long v_out = std::min<long>(std::min<long>(a.prec_.x_deg, (long)wide_window), bx);
    if (v_out < 0) fail(Errc::PrecisionExhausted, "product x-degree window is negative");

    Op r = Op::zero(n, kind, Prec{(int)v_out, n_out});
    r.ord_bound_ = a.ord_bound_ + b.ord_bound_;

    // Componentwise Leibniz: d^k x^j = sum_t C(k,t) (j)_t x^(j-t) d^(k-t).
    std::vector<std::pair<int32_t, Rat>> axis[8];
    std::vector<std::pair<int32_t, Rat>>* ax =
        n <= 8 ? axis : new std::vector<std::pair<int32_t, Rat>>[n];

    for (const auto& [ma, caa] : a.terms_) {
        if (midx_sum(ma.x) > v_out) continue; // output x-degree only grows from here
        for (const auto& [mb, cbb] : b.terms_) {
            long tmax_total = 0;
            for (int q = 0; q < n; ++q) {
                int32_t k = ma.d[q], j = mb.x[q];
                int32_t tm = (k >= 0) ? std::min(k, j) : j;
                tmax_total += tm;
                ax[q].clear();
                for (int32_t t = 0; t <= tm; ++t) {
                    Rat f = binom(k, t) * falling_factorial(j, t);
                    if (f != 0) ax[q].emplace_back(t, f);
                }
            }
            if (midx_sum(ma.x) + midx_sum(mb.x) - tmax_total > v_out) continue;
            Scalar base = caa * cbb;
            // odometer over the per-axis Leibniz choices
            std::vector<size_t> pos(n, 0);
            while (true) {
                Rat f(1);
                MIdx x(n), d(n);
                for (int q = 0; q < n; ++q) {
                    auto& [t, fq] = ax[q][pos[q]];
                    f *= fq;
                    x[q] = ma.x[q] + mb.x[q] - t;
                    d[q] = ma.d[q] + mb.d[q] - t;
                }
                r.insert_term(x, d, base * Scalar(f));
                int q = 0;
                while (q < n && ++pos[q] == ax[q].size()) pos[q++] = 0;
                if (q == n) break;
            }
        }
    }
    if (ax != axis) delete[] ax;
    return r;
}

Op Op::pow(int e) const {
    if (e < 0) fail(Errc::NotAUnit, "negative operator power");
    Op r = Op::one(n_, kind_, prec_);
    for (int s = 0; s < e; ++s) r = r * *this;
    return r;
}

Series Op::apply(const Series& f) const {
    if (!kind_is_differential(kind_))
        fail(Errc::KindIncompatible,
             std::string("operators of kind ") + kind_name(kind_) + " do not act on series");
    if (f.n() != n_) fail(Errc::DimensionMismatch, "series arity mismatch");
    int fw = f.prec() >= wide_window ? wide_window : f.prec() - (int)mul_degree_cost(*this);
    int out_prec = std::min({prec_.x_deg, wide_window, fw});
    if (out_prec < 0) fail(Errc::PrecisionExhausted, "apply output precision is negative");
    std::vector<std::pair<MIdx, Scalar>> out;
    for (const auto& [m, c] : terms_) {
        for (const auto& [e, cf] : f.terms()) {
            if (!midx_leq(m.d, e)) continue;
            Rat fac(1);
            for (int q = 0; q < n_; ++q) fac *= falling_factorial(e[q], m.d[q]);
            if (fac == 0) continue;
            out.emplace_back(midx_add(midx_sub(e, m.d), m.x), c * cf * Scalar(fac));
        }
    }
    return Series::from_terms(n_, out_prec, std::move(out));
}

std::optional<long> Op::ord() const {
    if (terms_.empty()) return std::nullopt;
    long best = LONG_MIN;
    for (const auto& [m, c] : terms_) best = std::max(best, midx_sum(m.d) - midx_sum(m.x));
    return best;
}

Op Op::truncated(Prec p) const {
    if (p.x_deg > prec_.x_deg || p.dn_tail > prec_.dn_tail)
        fail(Errc::PrecisionExhausted, "cannot widen a precision window by truncation");
    Op r = zero(n_, kind_, p);
    r.ord_bound_ = ord_bound_;
    for (const auto& [m, c] : terms_) r.insert_term(m.x, m.d, c);
    return r;
}

Op Op::with_kind(Kind k) const {
    Op r = zero(n_, k, prec_);
    r.ord_bound_ = ord_bound_;
    for (const auto& [m, c] : terms_) {
        r.check_term_shape(m.x, m.d);
        r.terms_.emplace(m, c);
    }
    return r;
}

Op Op::with_ord_bound(int b) const {
    Op r = *this;
    for (const auto& [m, c] : terms_)
        if (midx_sum(m.d) - midx_sum(m.x) > b)
            fail(Errc::OrderMismatch, "stored term exceeds requested ord_bound");
    r.ord_bound_ = b;
    return r;
}

Op Op::dn_coefficient(int j) const {
    Op r = zero(n_, kind_is_differential(kind_) || kind_ == Kind::VElem ? kind_ : Kind::EHat, prec_);
    long bound = 0;
    for (const auto& [m, c] : terms_) {
        if (m.d[n_ - 1] != j) continue;
        MIdx d = m.d;
        d[n_ - 1] = 0;
        r.insert_term(m.x, d, c);
        bound = std::max(bound, midx_sum(d) - midx_sum(m.x));
    }
    r.ord_bound_ = (int)bound;
    return r;
}

Op Op::shifted_dn(int delta) const {
    Kind k = kind_;
    Op r = zero(n_, delta < 0 && !kind_allows_negative_dn(k) ? Kind::EHat : k, prec_);
    for (const auto& [m, c] : terms_) {
        MIdx d = m.d;
        d[n_ - 1] += delta;
        r.insert_term(m.x, d, c);
    }
    r.ord_bound_ = ord_bound_ + delta;
    return r;
}

Op commutator(const Op& a, const Op& b) { return a * b - b * a; }

bool is_zero_within(const Op& a, const Prec& window) {
    int n = a.n();
    for (const auto& [m, c] : a.terms()) {
        if (midx_sum(m.x) > window.x_deg) continue;
        if (m.d[n - 1] < -window.dn_tail) continue;
        return false;
    }
    return true;
}

Op coeff_derivative(const Op& a, int axis) {
    if (axis < 0 || axis >= a.n()) fail(Errc::DimensionMismatch, "axis out of range");
    int w = a.prec().x_deg >= wide_window ? a.prec().x_deg : a.prec().x_deg - 1;
    if (w < 0) fail(Errc::PrecisionExhausted, "no x window left for a coefficient derivative");
    std::vector<std::tuple<MIdx, MIdx, Scalar>> ts;
    for (const auto& [m, c] : a.terms()) {
        if (m.x[axis] == 0) continue;
        MIdx x = m.x;
        Scalar s = c * Scalar(x[axis]);
        x[axis] -= 1;
        ts.push_back({std::move(x), m.d, std::move(s)});
    }
    return Op::from_terms(a.n(), a.kind(), Prec{w, a.prec().dn_tail}, ts, a.ord_bound() + 1);
}

Op coeff_antiderivative(const Op& a, int axis) {
    if (axis < 0 || axis >= a.n()) fail(Errc::DimensionMismatch, "axis out of range");
    int w = a.prec().x_deg >= wide_window ? a.prec().x_deg : a.prec().x_deg + 1;
    std::vector<std::tuple<MIdx, MIdx, Scalar>> ts;
    for (const auto& [m, c] : a.terms()) {
        MIdx x = m.x;
        x[axis] += 1;
        ts.push_back({x, m.d, c / Scalar(x[axis])});
    }
    return Op::from_terms(a.n(), a.kind(), Prec{w, a.prec().dn_tail}, ts, a.ord_bound());
}

std::string Op::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : terms_) {
        if (!first) os << " + ";
        first = false;
        os << "(" << c.to_string() << ")";
        for (int q = 0; q < n_; ++q)
            if (m.x[q] != 0) os << "*x" << q + 1 << "^" << m.x[q];
        for (int q = 0; q < n_; ++q)
            if (m.d[q] != 0) os << "*d" << q + 1 << "^" << m.d[q];
    }
    return os.str();
}

} // namespace ssk
