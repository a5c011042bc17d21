#include <algorithm>
#include <sstream>

#include "ssk/errors.hpp"
#include "ssk/operator.hpp"

namespace ssk {

long Op::ord_n() const {
    if (kind_ == Kind::DSym)
        fail(Errc::KindIncompatible, "ord_n is unbounded for kind DSym");
    if (terms_.empty()) fail(Errc::OrderMismatch, "ord_n of the zero operator");
    long best = terms_.begin()->first.d[n_ - 1];
    for (const auto& [m, c] : terms_) best = std::max<long>(best, m.d[n_ - 1]);
    return best;
}

Op Op::ht_n() const { return dn_coefficient((int)ord_n()); }

Op Op::symbol() const {
    auto d = ord();
    Op r = zero(n_, kind_, prec_);
    r.ord_bound_ = ord_bound_;
    if (!d) return r;
    for (const auto& [m, c] : terms_)
        if (midx_sum(m.d) - midx_sum(m.x) == *d) r.terms_.emplace(m, c);
    return r;
}

Op Op::homogeneous_component(long m) const {
    Op r = zero(n_, kind_, prec_);
    r.ord_bound_ = ord_bound_;
    for (const auto& [t, c] : terms_)
        if (midx_sum(t.x) - midx_sum(t.d) == m) r.terms_.emplace(t, c);
    return r;
}

Op Op::slice(const MIdx& i) const {
    if ((int)i.size() != n_) fail(Errc::DimensionMismatch, "slice index arity mismatch");
    long deg = midx_sum(i);
    if (deg > prec_.x_deg)
        fail(Errc::PrecisionExhausted, "slice index beyond the x-degree window");
    Scalar f(midx_factorial(i));
    Op r = zero(n_, Kind::VElem, Prec{prec_.x_deg - (int)deg, prec_.dn_tail});
    for (const auto& [m, c] : terms_)
        if (m.x == i) r.insert_term(midx_zero(n_), m.d, c * f);
    r.ord_bound_ = ord_bound_ + (int)deg;
    return r;
}

Op Op::partial_slice(int q) const {
    Op r = zero(n_, kind_, prec_);
    r.ord_bound_ = ord_bound_;
    for (const auto& [m, c] : terms_)
        if (midx_sum(m.x) == q) r.terms_.emplace(m, c);
    return r;
}

Op Op::project_pi() const {
    Op r = zero(n_, Kind::VElem, prec_);
    r.ord_bound_ = ord_bound_;
    for (const auto& [m, c] : terms_)
        if (midx_is_zero(m.x)) r.terms_.emplace(m, c);
    return r;
}

Op diamond(const Op& f, const Op& P) {
    for (const auto& [m, c] : f.terms()) {
        if (!midx_is_zero(m.x))
            fail(Errc::KindIncompatible, "diamond left factor must be x-free");
        for (int q = 0; q < f.n(); ++q)
            if (m.d[q] < 0)
                fail(Errc::KindIncompatible,
                     "diamond left factor must have nonnegative exponents");
    }
    return (f * P).project_pi();
}

MIdx gamma_order(const Op& P) {
    if (P.kind() == Kind::DSym)
        fail(Errc::GammaUndefined, "growth vector undefined for kind DSym");
    if (P.is_zero())
        fail(Errc::GammaUndefined, "growth vector undefined for the zero operator");
    const int n = P.n();
    std::vector<const Op::Terms::value_type*> live;
    for (const auto& t : P.terms()) live.push_back(&t);
    MIdx g(n);
    for (int q = n - 1; q >= 0; --q) {
        int32_t top = live.front()->first.d[q];
        for (auto* t : live) top = std::max(top, t->first.d[q]);
        g[q] = top;
        live.erase(std::remove_if(live.begin(), live.end(),
                                  [&](auto* t) { return t->first.d[q] != top; }),
                   live.end());
    }
    return g;
}

Series gamma_leading_series(const Op& P) {
    MIdx g = gamma_order(P);
    std::vector<std::pair<MIdx, Scalar>> out;
    for (const auto& [m, c] : P.terms())
        if (m.d == g) out.emplace_back(m.x, c);
    return Series::from_terms(P.n(), P.prec().x_deg, std::move(out));
}

bool is_monic_gamma(const Op& P) {
    Series lead = gamma_leading_series(P);
    return lead.terms().size() == 1 && lead.constant_term().is_one();
}

bool satisfies_a1(const Op& P) {
    MIdx g = gamma_order(P);
    auto d = P.ord();
    return d && *d <= midx_sum(g);
}

QuasiEllipticReport check_quasi_elliptic(const std::vector<Op>& tuple) {
    QuasiEllipticReport rep;
    if (tuple.empty()) fail(Errc::DimensionMismatch, "empty operator tuple");
    const int n = tuple[0].n();
    if ((int)tuple.size() != n)
        fail(Errc::DimensionMismatch, "tuple size must equal the variable count");
    rep.pass = true;
    auto note = [&](const std::string& s) {
        if (rep.detail.empty()) rep.detail = s;
        rep.pass = false;
    };
    for (int i = 0; i < n; ++i) {
        const Op& p = tuple[i];
        if (p.n() != n) fail(Errc::DimensionMismatch, "mixed arity in operator tuple");
        QuasiEllipticEntry e;
        std::ostringstream tag;
        tag << "P_" << i + 1;
        MIdx g;
        try {
            g = gamma_order(p);
        } catch (const Error&) {
            note(tag.str() + ": growth vector undefined");
            rep.entries.push_back(e);
            continue;
        }
        e.gamma = g;
        e.ell = g[n - 1];
        e.shape_ok = true;
        for (int q = 0; q + 1 < n; ++q) {
            int32_t want = (q == i) ? 1 : 0;
            if (g[q] != want) e.shape_ok = false;
        }
        if (i + 1 == n) {
            if (e.ell <= 0) e.shape_ok = false;
        } else {
            if (e.ell < 0) e.shape_ok = false;
            if (n == 1) e.shape_ok = false; // unreachable, n==1 means i+1==n
        }
        if (!e.shape_ok) note(tag.str() + ": growth vector has the wrong shape");
        e.monic_ok = is_monic_gamma(p);
        if (!e.monic_ok) note(tag.str() + ": leading coefficient is not 1");
        auto d = p.ord();
        e.ord_ok = d && *d == midx_sum(g);
        if (!e.ord_ok) note(tag.str() + ": ord does not match the growth vector");
        rep.entries.push_back(e);
    }
    return rep;
}

} // namespace ssk
