#include "ssk/graded.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "ssk/errors.hpp"

namespace ssk {

namespace {

Op exact_zero_level(int n) { return Op::zero(n, Kind::DHatN, Prec{wide_window, 0}); }

// Highest stored level with a nonzero coefficient; tail - 1 when none. Levels
// stored with empty terms count for claims but not for value shape.
int top_nonzero(const GOp& g) {
    for (auto it = g.stored().rbegin(); it != g.stored().rend(); ++it)
        if (!it->second.is_zero()) return it->first;
    return g.tail() - 1;
}

} // namespace

GOp::GOp(int n, int tail) : n_(n), tail_(tail) {}

GOp::GOp(const Op& flat) : n_(flat.n()) {
    bool laurent = kind_allows_negative_dn(flat.kind());
    tail_ = laurent ? -flat.prec().dn_tail : -wide_window;
    std::map<int, std::vector<std::tuple<MIdx, MIdx, Scalar>>> grp;
    for (const auto& [m, c] : flat.terms()) {
        MIdx d = m.d;
        int l = d[n_ - 1];
        d[n_ - 1] = 0;
        grp[l].push_back({m.x, std::move(d), c});
    }
    Prec w{flat.prec().x_deg, 0};
    for (auto& [l, ts] : grp) lev_.emplace(l, Op::from_terms(n_, Kind::DHatN, w, ts));
    if (flat.prec().x_deg < wide_window) {
        // A finite x window can hide terms at any d_n-exponent the shape
        // allows, so a level with no stored term inside the claimed range is
        // only zero through that window, not exactly. Store it as a windowed
        // zero rather than letting the exact-zero default overclaim.
        int lo = laurent ? tail_ : 0;
        int hi = std::max(top(), lo);
        for (int l = lo; l <= hi; ++l)
            if (!lev_.count(l)) lev_.emplace(l, Op::zero(n_, Kind::DHatN, w));
    }
}

GOp GOp::constant(int n, const Scalar& c, int tail) {
    GOp g(n, tail);
    if (!c.is_zero()) g.lev_.emplace(0, Op::constant(n, Kind::DHatN, Prec{wide_window, 0}, c));
    return g;
}

GOp GOp::dn_power(int n, int k, int tail) {
    if (k < tail) fail(Errc::PrecisionExhausted, "d_n power below the requested tail claim");
    GOp g(n, tail);
    g.lev_.emplace(k, Op::one(n, Kind::DHatN, Prec{wide_window, 0}));
    return g;
}

GOp GOp::from_level(const Op& coeff, int level, int tail) {
    if (level < tail) fail(Errc::PrecisionExhausted, "coefficient level below the requested tail claim");
    std::vector<std::tuple<MIdx, MIdx, Scalar>> ts;
    for (const auto& [m, c] : coeff.terms()) ts.push_back({m.x, m.d, c});
    GOp g(coeff.n(), tail);
    g.lev_.emplace(level, Op::from_terms(coeff.n(), Kind::DHatN, Prec{coeff.prec().x_deg, 0}, ts,
                                         coeff.ord_bound()));
    return g;
}

int GOp::top() const { return lev_.empty() ? tail_ - 1 : lev_.rbegin()->first; }

Op GOp::level(int l) const {
    if (l < tail_) fail(Errc::PrecisionExhausted, "level below the tail claim");
    auto it = lev_.find(l);
    return it != lev_.end() ? it->second : exact_zero_level(n_);
}

int GOp::window(int l) const {
    if (l < tail_) fail(Errc::PrecisionExhausted, "level below the tail claim");
    auto it = lev_.find(l);
    return it != lev_.end() ? it->second.prec().x_deg : wide_window;
}

void GOp::put(int l, Op coeff) {
    if (l < tail_) return;
    lev_.insert_or_assign(l, std::move(coeff));
}

GOp GOp::operator-() const {
    GOp r(n_, tail_);
    for (const auto& [l, c] : lev_) r.lev_.emplace(l, -c);
    return r;
}

GOp GOp::scaled(const Scalar& c) const {
    GOp r(n_, tail_);
    for (const auto& [l, v] : lev_) r.lev_.emplace(l, v.scaled(c));
    return r;
}

GOp operator+(const GOp& a, const GOp& b) {
    if (a.n_ != b.n_) fail(Errc::DimensionMismatch, "graded operands over different variable counts");
    GOp c(a.n_, std::max(a.tail_, b.tail_));
    std::set<int> keys;
    for (const auto& [l, v] : a.lev_) keys.insert(l);
    for (const auto& [l, v] : b.lev_) keys.insert(l);
    for (int l : keys) {
        if (l < c.tail_) continue;
        c.lev_.emplace(l, a.level(l) + b.level(l));
    }
    return c;
}

GOp operator-(const GOp& a, const GOp& b) { return a + (-b); }

GOp operator*(const GOp& A, const GOp& B) {
    if (A.n_ != B.n_) fail(Errc::DimensionMismatch, "graded operands over different variable counts");
    int n = A.n_;
    // Unknown content below a factor's tail can reach this high in the
    // product; nothing at or below that is claimable.
    long tail = std::max<long>(static_cast<long>(A.tail_) + B.top(),
                               static_cast<long>(A.top()) + B.tail_);
    // Exact data stays exact: a tail at the sentinel depth means the factor
    // is exactly zero below it, so the product floor starts at the sentinel
    // too instead of drifting up by the top shifts. The window caps below
    // still raise it when truncated coefficients hide deep content.
    if (A.tail_ <= -wide_window && B.tail_ <= -wide_window) tail = -wide_window;

    std::map<int, Op> acc;
    auto add_into = [&](int l, Op term) {
        auto it = acc.find(l);
        if (it == acc.end())
            acc.emplace(l, std::move(term));
        else
            it->second = it->second + term;
    };

    for (const auto& [m, b] : B.lev_) {
        int vb = b.prec().x_deg;
        bool exact_b = vb >= wide_window;
        Op der = b;
        for (int t = 0;; ++t) {
            if (t > 0) {
                if (exact_b && der.is_zero()) break;
                if (!exact_b && t > vb) {
                    // The t-th coefficient derivative is no longer claimed;
                    // every remaining contribution lands below this line.
                    for (const auto& [la, a] : A.lev_)
                        if (la < 0 || t <= la) tail = std::max(tail, static_cast<long>(la) + m - t + 1);
                    break;
                }
                der = coeff_derivative(der, n - 1);
            }
            bool alive = false;
            for (const auto& [la, a] : A.lev_) {
                if (la >= 0 && t > la) continue; // the Leibniz sum ended exactly
                long bx = exact_b ? wide_window
                                  : static_cast<long>(vb) - t - mul_degree_cost(a);
                int wout = static_cast<int>(
                    std::min<long>(std::min<long>(a.prec().x_deg, (long)wide_window), bx));
                if (wout < 0) {
                    tail = std::max(tail, static_cast<long>(la) + m - t + 1);
                    continue;
                }
                add_into(la + m - t, (a * der).scaled(Scalar(binom(la, t))));
                if (la < 0 || t < la) alive = true;
            }
            if (!alive) break;
        }
    }

    GOp C(n, static_cast<int>(std::min<long>(tail, wide_window)));
    for (auto& [l, v] : acc) {
        if (l < C.tail_) continue;
        C.lev_.emplace(l, std::move(v));
    }
    return C;
}

GOp GOp::neumann_inverse() const {
    if (top() > 0) fail(Errc::NotAUnit, "graded geometric inverse needs top level 0");
    if (!level(0).is_one()) fail(Errc::NotAUnit, "graded geometric inverse needs leading coefficient 1");
    GOp negT = one(n_, tail_) - *this;
    bool neg_content = false;
    for (const auto& [l, v] : negT.lev_)
        if (!v.is_zero()) { neg_content = true; break; }
    // With nonzero negative levels the geometric series has terms at every
    // depth, so a tail claim near the exact sentinel would never converge
    // within its own floor. Ask the caller for a finite depth instead.
    if (neg_content && tail_ <= -(wide_window / 2))
        fail(Errc::PrecisionExhausted,
             "geometric inverse at an exact tail claim is an infinite series; "
             "raise the tail to a finite depth first");
    GOp r = one(n_, tail_);
    GOp term = r;
    int guard = (tail_ < 0 ? -tail_ : 0) + 2;
    for (int j = 0; j < guard; ++j) {
        term = term * negT;
        // Terms from here on carry data only below the claim floor; their
        // window contributions repeat ones already folded in.
        if (top_nonzero(term) < r.tail_) break;
        r = r + term;
    }
    return r;
}

GOp GOp::inverse() const {
    int tp = top();
    if (lev_.empty() || !level(tp).is_one())
        fail(Errc::NotAUnit, "graded inverse needs a monic top level");
    // Factor the top power of d_n to the right: X = M d_n^tp with M monic at
    // level 0, so X^-1 = d_n^-tp M^-1. The shift factor is exact data.
    GOp shift = dn_power(n_, -tp, -wide_window);
    GOp m = *this * shift;
    return shift * m.neumann_inverse();
}

GOp GOp::pow(int e) const {
    if (e < 0) return inverse().pow(-e);
    GOp r = one(n_, -wide_window);
    for (int i = 0; i < e; ++i) r = r * *this;
    return r;
}

GOp GOp::with_tail(int new_tail) const {
    if (new_tail < tail_) fail(Errc::PrecisionExhausted, "cannot widen a tail claim by truncation");
    GOp r(n_, new_tail);
    for (const auto& [l, v] : lev_)
        if (l >= new_tail) r.lev_.emplace(l, v);
    return r;
}

std::optional<long> GOp::stored_ord() const {
    std::optional<long> best;
    for (const auto& [l, v] : lev_)
        for (const auto& [m, c] : v.terms()) {
            long o = midx_sum(m.d) + l - midx_sum(m.x);
            if (!best || o > *best) best = o;
        }
    return best;
}

bool GOp::covers(Prec w) const {
    if (tail_ > -w.dn_tail) return false;
    for (const auto& [l, v] : lev_)
        if (l >= -w.dn_tail && v.prec().x_deg < w.x_deg) return false;
    return true;
}

bool GOp::is_zero_through(Prec w) const {
    if (!covers(w)) fail(Errc::PrecisionExhausted, "claims do not cover the requested window");
    for (const auto& [l, v] : lev_) {
        if (l < -w.dn_tail) continue;
        for (const auto& [m, c] : v.terms())
            if (midx_sum(m.x) <= w.x_deg) return false;
    }
    return true;
}

Op GOp::to_op(Kind kind, Prec w) const {
    if (!covers(w)) fail(Errc::PrecisionExhausted, "claims do not cover the requested window");
    std::vector<std::tuple<MIdx, MIdx, Scalar>> ts;
    std::optional<int> bound;
    for (const auto& [l, v] : lev_) {
        if (l < -w.dn_tail) continue;
        int lb = v.ord_bound() + l;
        if (!bound || lb > *bound) bound = lb;
        for (const auto& [m, c] : v.terms()) {
            MIdx d = m.d;
            d[n_ - 1] = l;
            ts.push_back({m.x, std::move(d), c});
        }
    }
    return Op::from_terms(n_, kind, w, ts, bound);
}

std::string GOp::to_string() const {
    if (lev_.empty()) return "0 (tail " + std::to_string(tail_) + ")";
    std::ostringstream os;
    for (auto it = lev_.rbegin(); it != lev_.rend(); ++it) {
        if (it != lev_.rbegin()) os << " ; ";
        os << "[" << it->first << " @" << it->second.prec().x_deg << "] " << it->second.to_string();
    }
    os << " (tail " << tail_ << ")";
    return os.str();
}

GOp commutator(const GOp& a, const GOp& b) { return a * b - b * a; }

bool vanishes_within_claims(const GOp& g) {
    for (const auto& [l, v] : g.stored())
        for (const auto& [m, c] : v.terms())
            if (midx_sum(m.x) <= v.prec().x_deg) return false;
    return true;
}

} // namespace ssk
