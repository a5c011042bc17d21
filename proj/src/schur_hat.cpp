#include "ssk/schur_hat.hpp"

#include <algorithm>
#include <climits>
#include <functional>
#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "ssk/errors.hpp"

namespace ssk {
namespace {

// Keep only terms whose x-exponents vanish on every axis below `limit`.
Op late_axes_part(const Op& a, int limit) {
    std::vector<std::tuple<MIdx, MIdx, Scalar>> ts;
    for (const auto& [m, c] : a.terms()) {
        bool keep = true;
        for (int j = 0; j < limit && keep; ++j)
            if (m.x[j] > 0) keep = false;
        if (keep) ts.push_back({m.x, m.d, c});
    }
    return Op::from_terms(a.n(), a.kind(), a.prec(), ts, a.ord_bound());
}

// A term inside the window with an x-exponent on an axis below `limit`.
bool has_early_x(const Op& a, int limit) {
    for (const auto& [m, c] : a.terms()) {
        if (midx_sum(m.x) > a.prec().x_deg) continue;
        for (int j = 0; j < limit; ++j)
            if (m.x[j] > 0) return true;
    }
    return false;
}

// Path potential for the gradient system d_q s = v_q over axes q < limit:
// integrate v_0 along x_0, then v_1 with x_0 frozen at zero along x_1, and
// so on. When the system is closed this is its unique solution vanishing at
// the origin of the first `limit` axes; the callers re-check each equation
// afterwards, which is exactly the closedness test.
Op path_potential(const std::vector<Op>& vs, int limit) {
    Op s = Op::zero(vs[0].n(), vs[0].kind(), vs[0].prec());
    for (int q = 0; q < limit; ++q)
        s = s + coeff_antiderivative(late_axes_part(vs[q], q), q);
    return s;
}

// Exponential of a d_n-free element of K[[x_n]][d_1..d_n-1]. Such elements
// commute with each other, so the power sum can run on series coefficients
// grouped by d-exponent; the only truncation is the requested x window and
// no derivative charges apply. Requires x_n-valuation >= 1 so the sum is
// degreewise finite.
Op commutative_exp(const Op& q, int x_prec, Kind kind) {
    int n = q.n();
    std::map<MIdx, std::vector<std::pair<MIdx, Scalar>>, DegLexLess> grp;
    for (const auto& [m, c] : q.terms()) {
        if (m.x[n - 1] < 1)
            fail(Errc::ValuationTooLow, "operator exponential needs x_n-valuation >= 1");
        if (midx_sum(m.x) > x_prec) continue;
        grp[m.d].push_back({m.x, c});
    }
    std::map<MIdx, Series, DegLexLess> qd, acc, cur;
    for (auto& [d, ts] : grp) qd.emplace(d, Series::from_terms(n, x_prec, std::move(ts)));
    acc.emplace(midx_zero(n), Series::constant(n, Scalar(1), x_prec));
    cur = acc;
    for (int k = 1; k <= x_prec; ++k) {
        std::map<MIdx, Series, DegLexLess> nxt;
        for (const auto& [da, sa] : cur)
            for (const auto& [db, sb] : qd) {
                Series p = (sa * sb).scaled(Scalar(1, k));
                if (p.is_zero()) continue;
                MIdx d = midx_add(da, db);
                auto it = nxt.find(d);
                if (it == nxt.end()) nxt.emplace(d, p);
                else it->second = it->second + p;
            }
        cur = std::move(nxt);
        bool live = false;
        for (const auto& [d, s] : cur)
            if (!s.is_zero()) live = true;
        if (!live) break;
        for (const auto& [d, s] : cur) {
            auto it = acc.find(d);
            if (it == acc.end()) acc.emplace(d, s);
            else it->second = it->second + s;
        }
    }
    std::vector<std::tuple<MIdx, MIdx, Scalar>> ts;
    for (const auto& [d, s] : acc)
        for (const auto& [e, c] : s.terms()) ts.push_back({e, d, c});
    return Op::from_terms(n, kind, Prec{x_prec, 0}, ts);
}

bool exactly_zero(const GOp& g) {
    if (g.tail() > -wide_window) return false;
    for (const auto& [l, v] : g.stored()) {
        if (!v.is_zero()) return false;
        if (v.prec().x_deg < wide_window) return false;
    }
    return true;
}

// Lowest stored nonzero level strictly below zero across the tuple, or 1
// when there is none. Levels below zero are exactly the defects the
// dressing has to remove.
int defect_floor(const std::vector<GOp>& cs) {
    int md = 1;
    for (const auto& c : cs)
        for (const auto& [l, v] : c.stored())
            if (l < 0 && !v.is_zero()) md = std::min(md, l);
    return md;
}

} // namespace

GOp nth_root(const GOp& p, int l) {
    int n = p.n();
    if (l < 1)
        fail(Errc::GammaShapeMismatch, "nth_root: root order must be positive");
    if (p.top() != l)
        fail(Errc::GammaShapeMismatch, "nth_root: top level " + std::to_string(p.top()) +
                                           " does not match root order " + std::to_string(l));
    if (!p.level(l).is_one())
        fail(Errc::NotMonic, "nth_root: leading coefficient is not the constant 1");

    bool exact = p.tail() <= -wide_window;
    int tail_l = p.tail() - l + 1;
    std::map<int, Op> us;
    auto partial = [&](int tail) {
        GOp g = GOp::dn_power(n, 1, tail);
        for (const auto& [m, u] : us) g = g + GOp::from_level(u, m, tail);
        return g;
    };
    // Triangular solve down the levels. At step j the candidate carries the
    // solved coefficients and a tail claim at j, so level l - 1 + j of its
    // l-th power holds exactly the cross terms not involving the unknown
    // u_j; the defect against p at that level divided by l is u_j itself.
    int solved = 1;
    for (int j = 0; j >= tail_l; --j) {
        if (exact) {
            // A fully exact input closes only if the root is a finite sum,
            // so probe the candidate built so far and stop on exact match.
            GOp cand = partial(-wide_window);
            if (exactly_zero(cand.pow(l) - p)) return cand;
            if (-j > 256)
                fail(Errc::PrecisionExhausted,
                     "nth_root: exact input shows no finite root within depth 256; "
                     "pass a finite tail claim instead");
        }
        GOp f = partial(j).pow(l);
        // Leibniz derivatives burn one x-degree per level, so a finite x
        // window supports fewer levels than the d_n tail alone would. Stop
        // at the last level the power still claims.
        if (l - 1 + j < f.tail()) break;
        Op defect = p.level(l - 1 + j) - f.level(l - 1 + j);
        us.emplace(j, defect.scaled(Scalar(1, l)));
        solved = j;
    }
    return partial(solved);
}

GOp quotient_root(const GOp& pi, const GOp& l_root, int li) {
    int n = pi.n();
    if (li < 0 || pi.top() != li)
        fail(Errc::GammaShapeMismatch, "quotient_root: top level " + std::to_string(pi.top()) +
                                           " does not match the stated d_n-order " +
                                           std::to_string(li));
    Op topc = pi.level(li);
    if (topc.terms().size() != 1)
        fail(Errc::GammaShapeMismatch,
             "quotient_root: leading coefficient is not a single d-monomial");
    const auto& [mono, c] = *topc.terms().begin();
    if (midx_sum(mono.x) != 0 || midx_sum(mono.d) != 1 || mono.d[n - 1] != 0)
        fail(Errc::GammaShapeMismatch,
             "quotient_root: leading coefficient must be d_i for an axis i < n");
    if (c != Scalar(1))
        fail(Errc::NotMonic, "quotient_root: leading coefficient of d_i is not 1");
    if (l_root.top() != 1)
        fail(Errc::GammaShapeMismatch, "quotient_root: root factor must have top level 1");
    if (!l_root.level(1).is_one())
        fail(Errc::NotMonic, "quotient_root: root factor is not monic");

    GOp res = pi * l_root.pow(-li);
    if (res.top() != 0)
        fail(Errc::GammaShapeMismatch, "quotient_root: quotient has unexpected top level");
    if (!vanishes_within_claims(commutator(res, l_root)))
        fail(Errc::NotCommuting, "quotient_root: quotient does not commute with the root");
    return res;
}

NormalizeResult normalize(const std::vector<Op>& ps, int x_prec) {
    if (ps.empty()) fail(Errc::DimensionMismatch, "normalize: empty tuple");
    int n = ps[0].n();
    if (x_prec < 0) fail(Errc::PrecisionExhausted, "normalize: negative x window");
    for (size_t i = 0; i < ps.size(); ++i)
        for (size_t j = i + 1; j < ps.size(); ++j) {
            Op c = commutator(ps[i], ps[j]);
            if (!is_zero_within(c, c.prec()))
                fail(Errc::NotCommuting, "normalize: tuple members " + std::to_string(i + 1) +
                                             " and " + std::to_string(j + 1) +
                                             " do not commute");
        }
    QuasiEllipticReport rep = check_quasi_elliptic(ps);
    if (!rep.pass) fail(Errc::NotQuasiElliptic, "normalize: " + rep.detail);
    int ln = static_cast<int>(rep.entries[n - 1].ell);

    // First stage: a unit series twist removing the pure-function defects
    // g_i sitting next to d_i in the leading coefficients.
    Series f = Series::constant(n, Scalar(1), x_prec);
    std::vector<Op> mid = ps;
    if (n > 1) {
        std::vector<Series> gs;
        for (int i = 0; i + 1 < n; ++i) {
            int li = static_cast<int>(rep.entries[i].ell);
            Op lev = GOp(ps[i]).level(li);
            Op rem = lev - Op::d(n, i, lev.prec());
            int w = std::min(rem.prec().x_deg, x_prec);
            std::vector<std::pair<MIdx, Scalar>> ts;
            for (const auto& [m, c] : rem.terms()) {
                if (midx_sum(m.d) != 0)
                    fail(Errc::NotQuasiElliptic,
                         "normalize: leading coefficient of member " + std::to_string(i + 1) +
                             " is not d_i plus a multiplication operator");
                if (m.x[n - 1] > 0)
                    fail(Errc::NotCommuting, "normalize: leading defect of member " +
                                                 std::to_string(i + 1) + " depends on x_n");
                if (midx_sum(m.x) <= w) ts.push_back({m.x, c});
            }
            gs.push_back(Series::from_terms(n, w, std::move(ts)));
        }
        Series phi = Series::constant(n, Scalar(0), x_prec);
        for (int q = 0; q + 1 < n; ++q) {
            std::vector<std::pair<MIdx, Scalar>> ts;
            for (const auto& [e, c] : gs[q].terms()) {
                bool keep = true;
                for (int j = 0; j < q && keep; ++j)
                    if (e[j] > 0) keep = false;
                if (keep) ts.push_back({e, c});
            }
            phi = phi + Series::from_terms(n, gs[q].prec(), std::move(ts)).antiderivative(q);
        }
        for (int q = 0; q + 1 < n; ++q)
            if (!(phi.derivative(q) - gs[q]).is_zero())
                fail(Errc::NotCommuting,
                     "normalize: the leading defects are not a closed gradient system");
        if (!phi.is_zero()) {
            f = (-phi).exp();
            Op fw = Op::from_series(f, ps[0].kind(), ps[0].prec().dn_tail);
            Op fi = Op::from_series(f.invert_unit(), ps[0].kind(), ps[0].prec().dn_tail);
            for (auto& m : mid) m = fi * m * fw;
        }
    }

    // Second stage: an exponential conjugator clearing level l_n - 1 of the
    // last member. Its argument lives in the commutative ring
    // K[[x_n]][d_1..d_n-1], so the inverse is the exponential of the
    // negative and both expansions are exact through the window.
    Op s = Op::one(n, mid[n - 1].kind(), Prec{wide_window, mid[n - 1].prec().dn_tail});
    Op s_inv = s;
    Op pcoef = GOp(mid[n - 1]).level(ln - 1);
    if (has_early_x(pcoef, n - 1))
        fail(Errc::NotCommuting,
             "normalize: level l_n - 1 of the last member depends on x_1..x_n-1 "
             "after the unit twist");
    Op qop = coeff_antiderivative(late_axes_part(pcoef, n - 1), n - 1).scaled(Scalar(-1, ln));
    if (!qop.is_zero()) {
        s = commutative_exp(qop, x_prec, mid[n - 1].kind());
        s_inv = commutative_exp(qop.scaled(Scalar(-1)), x_prec, mid[n - 1].kind());
        for (auto& m : mid) m = s_inv * m * s;
    }
    Op lev = GOp(mid[n - 1]).level(ln - 1);
    if (!is_zero_within(lev, lev.prec()))
        fail(Errc::NotCommuting, "normalize: a defect survived at level l_n - 1");
    return {std::move(f), std::move(s), std::move(s_inv), std::move(mid)};
}

GOp dressing_operator(const std::vector<GOp>& ls) {
    if (ls.empty()) fail(Errc::DimensionMismatch, "dressing_operator: empty tuple");
    int n = ls[0].n();
    if (static_cast<int>(ls.size()) != n)
        fail(Errc::DimensionMismatch, "dressing_operator: expected one root per axis");
    for (int i = 0; i + 1 < n; ++i) {
        if (ls[i].top() != 0)
            fail(Errc::NotQuasiElliptic, "dressing_operator: root " + std::to_string(i + 1) +
                                             " must have top level 0");
        Op lev = ls[i].level(0);
        if (!(lev == Op::d(n, i, lev.prec())))
            fail(Errc::NotQuasiElliptic, "dressing_operator: root " + std::to_string(i + 1) +
                                             " must have exact leading part d_i");
    }
    const GOp& lnr = ls[n - 1];
    if (lnr.top() != 1 || !lnr.level(1).is_one())
        fail(Errc::NotQuasiElliptic,
             "dressing_operator: last root must be monic with top level 1");
    Op v0 = lnr.level(0);
    if (has_early_x(v0, n - 1))
        fail(Errc::NotQuasiElliptic,
             "dressing_operator: level 0 of the last root must be free of x_1..x_n-1");

    int K = INT_MAX;
    for (const auto& l : ls) K = std::min(K, -l.tail());
    if (K < 1)
        fail(Errc::PrecisionExhausted,
             "dressing_operator: roots carry no tail claims to dress through");
    std::vector<GOp> cur = ls;
    if (K >= wide_window) {
        if (defect_floor(cur) > 0) return GOp::one(n, -wide_window);
        fail(Errc::PrecisionExhausted,
             "dressing_operator: fully exact claims with defects never terminate; "
             "raise the tails to a finite depth first");
    }
    int work_tail = -K - 2;
    for (auto& c : cur) c = c.with_tail(-K);

    GOp sinv = GOp::one(n, work_tail);
    for (int k = 1; k <= K; ++k) {
        if (defect_floor(cur) > -k) break;
        std::vector<Op> vs;
        vs.reserve(n);
        for (const auto& c : cur) vs.push_back(c.level(-k));
        Op s2 = Op::zero(n, Kind::DHatN, Prec{wide_window, 0});
        if (n > 1) {
            std::vector<Op> neg;
            neg.reserve(n - 1);
            for (int q = 0; q + 1 < n; ++q) neg.push_back(-vs[q]);
            s2 = path_potential(neg, n - 1);
            for (int q = 0; q + 1 < n; ++q) {
                Op d = coeff_derivative(s2, q) + vs[q];
                if (!is_zero_within(d, d.prec()))
                    fail(Errc::SystemInconsistent,
                         "dressing_operator: defect system not closed along axis " +
                             std::to_string(q + 1) + " at level " + std::to_string(-k));
            }
        }
        Op r = -vs[n - 1] - coeff_derivative(s2, n - 1) - commutator(v0, s2);
        if (has_early_x(r, n - 1))
            fail(Errc::SystemInconsistent,
                 "dressing_operator: residual at level " + std::to_string(-k) +
                     " depends on x_1..x_n-1");
        Op sk = s2 + coeff_antiderivative(late_axes_part(r, n - 1), n - 1);
        Op e = coeff_derivative(sk, n - 1) + commutator(v0, sk) + vs[n - 1];
        if (!is_zero_within(e, e.prec()))
            fail(Errc::SystemInconsistent,
                 "dressing_operator: the d_n-equation fails at level " + std::to_string(-k));
        if (sk.is_zero()) continue;
        GOp stepc = GOp::one(n, -wide_window) + GOp::from_level(sk, -k, -wide_window);
        GOp stepi = stepc.with_tail(work_tail).neumann_inverse();
        for (auto& c : cur) c = stepi * c * stepc;
        sinv = sinv * stepc;
    }
    for (int i = 0; i + 1 < n; ++i) {
        GOp diff = cur[i] - GOp::from_level(Op::d(n, i, Prec{wide_window, 0}), 0, -wide_window);
        if (!vanishes_within_claims(diff))
            fail(Errc::SystemInconsistent,
                 "dressing_operator: root " + std::to_string(i + 1) +
                     " did not reduce to d_i");
    }
    GOp diffn =
        cur[n - 1] - (GOp::dn_power(n, 1, -wide_window) + GOp::from_level(v0, 0, -wide_window));
    if (!vanishes_within_claims(diffn))
        fail(Errc::SystemInconsistent,
             "dressing_operator: last root did not reduce to d_n plus its level-0 part");
    return sinv.neumann_inverse();
}

ConstantFrame constant_frame(const std::vector<Op>& ps, int rt, int x_prec) {
    if (ps.empty()) fail(Errc::DimensionMismatch, "constant_frame: empty tuple");
    int n = ps[0].n();
    QuasiEllipticReport rep = check_quasi_elliptic(ps);
    if (!rep.pass) fail(Errc::NotQuasiElliptic, "constant_frame: " + rep.detail);
    std::vector<long> ells;
    ells.reserve(n);
    for (const auto& e : rep.entries) ells.push_back(e.ell);

    NormalizeResult nr = normalize(ps, x_prec);
    GOp lroot = nth_root(GOp(nr.primed[n - 1]).with_tail(-rt), static_cast<int>(ells[n - 1]));
    std::vector<GOp> roots;
    roots.reserve(n);
    for (int i = 0; i + 1 < n; ++i)
        roots.push_back(quotient_root(GOp(nr.primed[i]).with_tail(-rt), lroot,
                                      static_cast<int>(ells[i])));
    roots.push_back(lroot);
    GOp dress = dressing_operator(roots);
    GOp dress_inv = dress.inverse();

    Op fw = Op::from_series(nr.f, ps[0].kind(), ps[0].prec().dn_tail);
    Op fi = Op::from_series(nr.f.invert_unit(), ps[0].kind(), ps[0].prec().dn_tail);
    return ConstantFrame{n,     ells,  nr.f, std::move(fw),    std::move(fi),
                         nr.s,  nr.s_inv,    std::move(dress), std::move(dress_inv)};
}

Op frame_transport(const ConstantFrame& fr, const Op& q, Prec out) {
    const int n = fr.n;
    Op a = fr.s_inv * (fr.fi * q * fr.fw) * fr.s;
    GOp qp = fr.dress * GOp(a) * fr.dress_inv;

    if (!qp.covers(out))
        fail(Errc::PrecisionExhausted,
             "frame_transport: claims after the chain do not cover the "
             "requested window");
    std::vector<std::tuple<MIdx, MIdx, Scalar>> ts;
    for (const auto& [l, v] : qp.stored()) {
        if (l < -out.dn_tail) continue;
        for (const auto& [m, c] : v.terms()) {
            long xd = midx_sum(m.x);
            if (xd == 0) {
                MIdx d = m.d;
                d[n - 1] = l;
                ts.push_back({m.x, d, c});
            } else if (xd <= v.prec().x_deg) {
                fail(Errc::NotCommuting,
                     "frame_transport: conjugated operator is not "
                     "constant-coefficient at level " +
                         std::to_string(l));
            }
        }
    }
    return Op::from_terms(n, Kind::VElem, out, ts);
}

Op centralizer_to_constants(const Op& q, const std::vector<Op>& ps, Prec out) {
    if (ps.empty()) fail(Errc::DimensionMismatch, "centralizer_to_constants: empty tuple");
    int n = ps[0].n();
    for (size_t i = 0; i < ps.size(); ++i) {
        Op c = commutator(q, ps[i]);
        if (!is_zero_within(c, c.prec()))
            fail(Errc::NotCommuting, "centralizer_to_constants: q does not commute with "
                                     "tuple member " +
                                         std::to_string(i + 1));
    }
    QuasiEllipticReport rep = check_quasi_elliptic(ps);
    if (!rep.pass) fail(Errc::NotQuasiElliptic, "centralizer_to_constants: " + rep.detail);
    int ln = static_cast<int>(rep.entries[n - 1].ell);
    int mq = 0;
    for (const auto& [m, c] : q.terms()) mq = std::max(mq, static_cast<int>(m.d[n - 1]));

    // Working margins: the chain digs one level per dressing step and the
    // conjugation products charge the windows, so provision both beyond the
    // requested claims and let the reassembly below report honestly when
    // they were not enough.
    int kd = out.dn_tail + mq + ln + 6;
    int rt = kd + ln + 2;
    int wx = out.x_deg + 2 * rt + 8;

    ConstantFrame fr = constant_frame(ps, rt, wx);
    return frame_transport(fr, q, out);
}

} // namespace ssk
