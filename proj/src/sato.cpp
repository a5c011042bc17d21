#include <algorithm>
#include <set>
#include <string>

#include "ssk/errors.hpp"
#include "ssk/graded.hpp"
#include "ssk/linsolve.hpp"
#include "ssk/sato.hpp"
#include "ssk/schur_hat.hpp"

namespace ssk {

namespace {

// Exact d-monomial with nonnegative exponents, the left factor of a diamond.
Op dpow(int n, const MIdx& t) {
    return Op::monomial(n, Kind::VElem, Prec{wide_window, wide_window}, midx_zero(n), t,
                        Scalar(1));
}

// Product of the componentwise binomials C(k, t).
Scalar midx_binom(const MIdx& k, const MIdx& t) {
    Rat f(1);
    for (size_t q = 0; q < k.size(); ++q) f *= binom(k[q], t[q]);
    return Scalar(f);
}

// Every nonzero t <= k componentwise, via an odometer.
template <class F>
void for_each_sub(const MIdx& k, F&& visit) {
    const int n = (int)k.size();
    MIdx t = midx_zero(n);
    while (true) {
        int q = 0;
        while (q < n && t[q] == k[q]) t[q++] = 0;
        if (q == n) break;
        ++t[q];
        visit(t);
    }
}

// d_n-dominant comparison on exponent vectors; the leading exponent of a
// basis element is the maximal one.
bool lead_less(const MIdx& a, const MIdx& b) { return antilex_cmp(a, b) < 0; }

// S = sum over k of x^k S_(k) / k! from the slice table. The shared claims
// are the cutoff in x and the shallowest slice claim in d_n.
Op assemble_slices(int n, int cutoff, const std::map<MIdx, Op, DegLexLess>& slices) {
    std::vector<std::tuple<MIdx, MIdx, Scalar>> ts;
    int dnw = wide_window;
    bool laurent = false;
    for (const auto& [k, s] : slices) {
        dnw = std::min(dnw, s.prec().dn_tail);
        Scalar f(Rat(1) / midx_factorial(k));
        for (const auto& [m, c] : s.terms()) {
            if (m.d[n - 1] < 0) laurent = true;
            ts.push_back({k, m.d, c * f});
        }
    }
    Kind kd = laurent ? Kind::PiHat : Kind::DSym;
    return Op::from_terms(n, kd, Prec{cutoff, std::min(dnw, wide_window)}, ts);
}

// w_k minus the lower slices already fixed: the grade-by-grade recursion
// shared by the general and the transport builds.
std::map<MIdx, Op, DegLexLess> slice_recursion(int n, int cutoff,
                                               const std::map<MIdx, Op, DegLexLess>& targets) {
    std::map<MIdx, Op, DegLexLess> slices;
    for (int m = 0; m <= cutoff; ++m) {
        for (const auto& k : indices_of_degree(n, m)) {
            Op s = targets.at(k);
            for_each_sub(k, [&](const MIdx& t) {
                if (t == k && midx_sum(k) == 0) return;
                s = s - (slices.at(midx_sub(k, t)) * dpow(n, t)).scaled(midx_binom(k, t));
            });
            slices.emplace(k, std::move(s));
        }
    }
    return slices;
}

// Coordinates of an x-free operator: one row entry per stored d-exponent at
// claim depth `depth` or shallower.
void fill_row(ColIndex<MIdx>& coords, std::map<int, SparseRow>& rows, int col, const Op& a,
              int n, int depth) {
    for (const auto& [m, c] : a.terms()) {
        if (m.d[n - 1] < -depth) continue;
        rows[coords.of(m.d)][col] = rows[coords.of(m.d)][col] + c;
    }
}

} // namespace

void check_subspace(const SubspaceW& w) {
    if (w.n <= 0) fail(Errc::DimensionMismatch, "subspace needs a positive variable count");
    if (w.cutoff < 0) fail(Errc::DimensionMismatch, "subspace cutoff must be nonnegative");
    auto all = indices_up_to_degree(w.n, w.cutoff);
    if (w.basis.size() != all.size())
        fail(Errc::HilbertViolation, "basis must hold one element per index up to the cutoff");
    for (const auto& k : all)
        if (!w.basis.count(k))
            fail(Errc::HilbertViolation, "basis is missing the index " + midx_to_string(k));
    for (const auto& [k, a] : w.basis) {
        if ((int)k.size() != w.n) fail(Errc::DimensionMismatch, "basis index arity mismatch");
        if (a.n() != w.n) fail(Errc::DimensionMismatch, "basis element arity mismatch");
        for (const auto& [m, c] : a.terms()) {
            if (!midx_is_zero(m.x))
                fail(Errc::KindIncompatible, "basis elements must be x-free");
            for (int q = 0; q + 1 < w.n; ++q)
                if (m.d[q] < 0)
                    fail(Errc::KindIncompatible,
                         "basis elements may only be Laurent in the last axis");
        }
        auto d = a.ord();
        if (!d || *d != w.mu + midx_sum(k))
            fail(Errc::HilbertViolation, "basis element at " + midx_to_string(k) +
                                             " does not have order mu + |k|");
    }
    for (int m = 0; m <= w.cutoff; ++m) {
        ColIndex<MIdx> cols;
        std::vector<SparseRow> rows;
        for (const auto& k : indices_of_degree(w.n, m)) {
            Op top = w.basis.at(k).symbol();
            SparseRow r;
            for (const auto& [t, c] : top.terms()) r[cols.of(t.d)] = c;
            rows.push_back(std::move(r));
        }
        if (rank_of_rows(rows) != (int)rows.size())
            fail(Errc::HilbertViolation,
                 "top parts of grade " + std::to_string(m) + " are linearly dependent");
    }
}

SubspaceW support(const SubspaceW& w) {
    check_subspace(w);
    SubspaceW out = w;
    out.basis.clear();
    for (const auto& [k, a] : w.basis) {
        const MIdx* lead = nullptr;
        for (const auto& [m, c] : a.terms())
            if (!lead || lead_less(*lead, m.d)) lead = &m.d;
        out.basis.emplace(
            k, Op::monomial(w.n, Kind::VElem, a.prec(), midx_zero(w.n), *lead, Scalar(1)));
    }
    return out;
}

long hilbert_function(const SubspaceW& w, long k) {
    if (k < w.mu) return 0;
    Rat b = binom(w.n + (k - w.mu), w.n);
    return (long)b.get_num().get_si();
}

SubspaceW diamond_subspace(const Op& s, int cutoff) {
    const int n = s.n();
    if (s.prec().x_deg < cutoff)
        fail(Errc::PrecisionExhausted, "x window of the operator is below the cutoff");
    SubspaceW w;
    w.n = n;
    w.cutoff = cutoff;
    int dnw = wide_window;
    for (const auto& k : indices_up_to_degree(n, cutoff)) {
        Op wk = diamond(dpow(n, k), s);
        dnw = std::min(dnw, wk.prec().dn_tail);
        w.basis.emplace(k, std::move(wk));
    }
    auto d0 = w.basis.at(midx_zero(n)).ord();
    if (!d0) fail(Errc::HilbertViolation, "the diamond image of 1 vanished");
    w.mu = (int)*d0;
    w.prec = Prec{wide_window, dnw};
    return w;
}

namespace {

// Row-reduce every grade of the basis on the top-part coordinates, carrying
// the full elements through the row operations. Pivots are chosen along the
// d_n-dominant order, so the reduced grade is a deterministic function of
// the spanned space.
std::map<MIdx, Op, DegLexLess> canonical_basis(const SubspaceW& w) {
    std::map<MIdx, Op, DegLexLess> out;
    for (int m = 0; m <= w.cutoff; ++m) {
        auto ks = indices_of_degree(w.n, m);
        struct Row {
            std::map<MIdx, Scalar> sym;
            Op full;
        };
        std::vector<Row> rows;
        std::set<MIdx, bool (*)(const MIdx&, const MIdx&)> monos(lead_less);
        for (const auto& k : ks) {
            Row r{{}, w.basis.at(k)};
            for (const auto& [t, c] : r.full.symbol().terms()) {
                r.sym.emplace(t.d, c);
                monos.insert(t.d);
            }
            rows.push_back(std::move(r));
        }
        size_t done = 0;
        for (auto it = monos.rbegin(); it != monos.rend() && done < rows.size(); ++it) {
            const MIdx& col = *it;
            size_t p = done;
            while (p < rows.size() &&
                   (!rows[p].sym.count(col) || rows[p].sym.at(col).is_zero()))
                ++p;
            if (p == rows.size()) continue;
            std::swap(rows[done], rows[p]);
            Scalar inv = Scalar(1) / rows[done].sym.at(col);
            for (auto& [mm, c] : rows[done].sym) c = c * inv;
            rows[done].full = rows[done].full.scaled(inv);
            for (size_t r = 0; r < rows.size(); ++r) {
                if (r == done) continue;
                auto hit = rows[r].sym.find(col);
                if (hit == rows[r].sym.end() || hit->second.is_zero()) continue;
                Scalar f = hit->second;
                for (const auto& [mm, c] : rows[done].sym) {
                    auto slot = rows[r].sym.find(mm);
                    if (slot == rows[r].sym.end())
                        rows[r].sym.emplace(mm, -(c * f));
                    else
                        slot->second = slot->second - c * f;
                }
                rows[r].full = rows[r].full - rows[done].full.scaled(f);
            }
            ++done;
        }
        if (done != rows.size())
            fail(Errc::HilbertViolation,
                 "grade " + std::to_string(m) + " reduced to fewer elements than indices");
        for (size_t i = 0; i < ks.size(); ++i) out.emplace(ks[i], rows[i].full);
    }
    return out;
}

} // namespace

Op build_sato_general(const SubspaceW& w, BasisChoice choice) {
    check_subspace(w);
    auto basis = (choice == BasisChoice::Canonical) ? canonical_basis(w) : w.basis;
    auto slices = slice_recursion(w.n, w.cutoff, basis);
    return assemble_slices(w.n, w.cutoff, slices);
}

Op build_sato_monic(const SubspaceW& w) {
    check_subspace(w);
    if (w.mu != 0)
        fail(Errc::SupportNotFull, "the monic construction needs index zero");
    if (w.prec.dn_tail < 0)
        fail(Errc::PrecisionExhausted,
             "the monic construction needs claims through level zero");
    const int n = w.n;

    // Renormalize the basis grade by grade: the combination of elements of
    // grade at most m whose nonnegative part is exactly d^k. The solve runs
    // over every nonnegative exponent seen so far, plus k itself so a
    // missing power shows up as an inconsistency.
    std::map<MIdx, Op, DegLexLess> norm;
    std::vector<std::pair<MIdx, const Op*>> pool;
    for (int m = 0; m <= w.cutoff; ++m) {
        for (const auto& k : indices_of_degree(n, m)) pool.emplace_back(k, &w.basis.at(k));
        for (const auto& k : indices_of_degree(n, m)) {
            ColIndex<MIdx> coords;
            std::vector<SparseRow> rows;
            std::vector<Scalar> rhs;
            std::map<MIdx, SparseRow> by_mono;
            for (size_t j = 0; j < pool.size(); ++j)
                for (const auto& [mm, c] : pool[j].second->terms())
                    if (mm.d[n - 1] >= 0) by_mono[mm.d][(int)j] = c;
            by_mono[k]; // ensure the target power contributes a row
            for (const auto& [mono, row] : by_mono) {
                rows.push_back(row);
                rhs.push_back(mono == k ? Scalar(1) : Scalar(0));
            }
            LinearSolution sol = solve_linear(rows, rhs, (int)pool.size());
            if (!sol.consistent)
                fail(Errc::SupportNotFull,
                     "no combination has nonnegative part d^" + midx_to_string(k));
            Op acc = Op::zero(n, Kind::VElem, Prec{wide_window, wide_window});
            for (size_t j = 0; j < pool.size(); ++j)
                if (!sol.x[j].is_zero()) acc = acc + pool[j].second->scaled(sol.x[j]);
            norm.emplace(k, std::move(acc));
        }
    }

    // Recursion with the targets re-picked per step: the known lower slices
    // fix the nonnegative part of the grade, and the matching combination of
    // normalized elements supplies the unique negative completion.
    std::map<MIdx, Op, DegLexLess> slices;
    for (int m = 0; m <= w.cutoff; ++m) {
        for (const auto& k : indices_of_degree(n, m)) {
            if (m == 0) {
                slices.emplace(k, norm.at(k));
                continue;
            }
            Op t = Op::zero(n, Kind::VElem, Prec{wide_window, wide_window});
            for_each_sub(k, [&](const MIdx& tt) {
                t = t + (slices.at(midx_sub(k, tt)) * dpow(n, tt)).scaled(midx_binom(k, tt));
            });
            Op s = -t;
            for (const auto& [mm, c] : t.terms()) {
                if (mm.d[n - 1] < 0) continue;
                if (midx_sum(mm.d) > w.cutoff)
                    fail(Errc::PrecisionExhausted,
                         "the recursion needs normalized elements past the cutoff");
                s = s + norm.at(mm.d).scaled(c);
            }
            for (const auto& [mm, c] : s.terms())
                if (mm.d[n - 1] >= 0 && mm.d[n - 1] <= s.prec().dn_tail + 0 &&
                    !c.is_zero())
                    fail(Errc::HilbertViolation,
                         "the normalized recursion left a nonnegative residue at " +
                             midx_to_string(k));
            slices.emplace(k, std::move(s));
        }
    }
    return assemble_slices(n, w.cutoff, slices);
}

UnitFactorization unit_factorize(const Op& s) {
    int cutoff = s.prec().x_deg;
    if (cutoff >= wide_window) {
        int mx = 0;
        for (const auto& [m, c] : s.terms()) mx = std::max(mx, (int)midx_sum(m.x));
        cutoff = mx;
    }
    SubspaceW w = diamond_subspace(s, cutoff);
    if (w.mu != 0) fail(Errc::SupportNotFull, "unit factorization needs index zero");
    Op monic = build_sato_monic(w);

    GOp gi = GOp(monic).neumann_inverse();
    GOp u = GOp(s) * gi;
    std::vector<std::tuple<MIdx, MIdx, Scalar>> ts;
    int xw = cutoff;
    for (const auto& [l, v] : u.stored()) {
        if (l < 0) {
            if (!is_zero_within(v, v.prec()))
                fail(Errc::SystemInconsistent,
                     "the quotient by the monic factor keeps level " + std::to_string(l));
            continue;
        }
        xw = std::min(xw, v.prec().x_deg);
        for (const auto& [m, c] : v.terms()) {
            MIdx d = m.d;
            d[s.n() - 1] = l;
            ts.push_back({m.x, d, c});
        }
    }
    Op unit = Op::from_terms(s.n(), Kind::DHat, Prec{xw, 0}, ts);
    return UnitFactorization{std::move(unit), std::move(monic)};
}

bool membership_F(const Op& p) {
    for (const auto& [m, c] : p.terms())
        if (m.d[p.n() - 1] < 0 && midx_sum(m.x) <= p.prec().x_deg) return false;
    return true;
}

Op sato_transport(const Op& s, const Op& f, int out_x_deg) {
    const int n = s.n();
    if (f.n() != n) fail(Errc::DimensionMismatch, "transport arity mismatch");
    for (const auto& [m, c] : f.terms())
        if (!midx_is_zero(m.x))
            fail(Errc::KindIncompatible, "transport source must be x-free");
    if (f.is_zero()) return Op::zero(n, Kind::DSym, Prec{std::max(out_x_deg, 0), 0});
    int df = (int)std::max<long>(*f.ord(), 0);
    int sw = s.prec().x_deg;
    if (out_x_deg < 0) {
        if (sw >= wide_window)
            fail(Errc::PrecisionExhausted,
                 "pass an output degree to transport through an exact operator");
        out_x_deg = sw - df;
        if (out_x_deg < 0)
            fail(Errc::PrecisionExhausted, "the window of the operator is below ord(f)");
    }
    int need = out_x_deg + df;
    if (sw < need)
        fail(Errc::PrecisionExhausted,
             "the operator window cannot support the requested output degree");

    std::vector<std::pair<MIdx, Op>> vs;
    for (const auto& k : indices_up_to_degree(n, need))
        vs.emplace_back(k, diamond(dpow(n, k), s));

    std::map<MIdx, Op, DegLexLess> targets;
    for (const auto& k : indices_up_to_degree(n, out_x_deg)) {
        Op u = vs[0].second; // placeholder shape, replaced below
        for (const auto& [j, v] : vs)
            if (j == k) u = v * f;
        int depth = std::min(u.prec().dn_tail, wide_window);
        long lim = midx_sum(k) + df;
        ColIndex<MIdx> coords;
        std::map<int, SparseRow> by_row;
        int ncols = 0;
        std::vector<int> used;
        for (size_t j = 0; j < vs.size(); ++j) {
            if (midx_sum(vs[j].first) > lim) continue;
            depth = std::min(depth, vs[j].second.prec().dn_tail);
            used.push_back((int)j);
        }
        for (size_t c = 0; c < used.size(); ++c)
            fill_row(coords, by_row, (int)c, vs[used[c]].second, n, depth);
        ncols = (int)used.size();
        std::map<int, Scalar> rhs_by;
        for (const auto& [m, c] : u.terms()) {
            if (m.d[n - 1] < -depth) continue;
            rhs_by[coords.of(m.d)] = c;
        }
        std::vector<SparseRow> rows(coords.size());
        std::vector<Scalar> rhs(coords.size(), Scalar(0));
        for (auto& [ri, row] : by_row) rows[ri] = std::move(row);
        for (auto& [ri, c] : rhs_by) rhs[ri] = c;
        LinearSolution sol = solve_linear(rows, rhs, ncols);
        if (!sol.consistent)
            fail(Errc::NotStabilizing, "w_" + midx_to_string(k) +
                                           " * f leaves the subspace within the claims");
        Op target = Op::zero(n, Kind::VElem, Prec{wide_window, wide_window});
        for (size_t c = 0; c < used.size(); ++c)
            if (!sol.x[c].is_zero())
                target = target + dpow(n, vs[used[c]].first).scaled(sol.x[c]);
        targets.emplace(k, std::move(target));
    }
    auto slices = slice_recursion(n, out_x_deg, targets);
    Op l = assemble_slices(n, out_x_deg, slices);
    return l.with_kind(Kind::DSym);
}

void check_pair(const SchurPair& pair) {
    check_subspace(pair.w);
    const int n = pair.w.n;
    std::vector<std::pair<MIdx, const Op*>> basis;
    for (const auto& [k, a] : pair.w.basis) basis.emplace_back(k, &a);
    for (size_t g = 0; g < pair.a_generators.size(); ++g) {
        const Op& a = pair.a_generators[g];
        if (a.n() != n) fail(Errc::DimensionMismatch, "generator arity mismatch");
        auto d = a.ord();
        if (!d) continue;
        long da = std::max<long>(*d, 0);
        for (const auto& [k, wk] : pair.w.basis) {
            if (midx_sum(k) + da > pair.w.cutoff) continue;
            Op u = wk * a;
            int depth = u.prec().dn_tail;
            ColIndex<MIdx> coords;
            std::map<int, SparseRow> by_row;
            std::vector<int> used;
            for (size_t j = 0; j < basis.size(); ++j) {
                if (midx_sum(basis[j].first) > midx_sum(k) + da) continue;
                depth = std::min(depth, basis[j].second->prec().dn_tail);
                used.push_back((int)j);
            }
            for (size_t c = 0; c < used.size(); ++c)
                fill_row(coords, by_row, (int)c, *basis[used[c]].second, n, depth);
            std::map<int, Scalar> rhs_by;
            for (const auto& [m, c] : u.terms()) {
                if (m.d[n - 1] < -depth) continue;
                rhs_by[coords.of(m.d)] = c;
            }
            std::vector<SparseRow> rows(coords.size());
            std::vector<Scalar> rhs(coords.size(), Scalar(0));
            for (auto& [ri, row] : by_row) rows[ri] = std::move(row);
            for (auto& [ri, c] : rhs_by) rhs[ri] = c;
            LinearSolution sol = solve_linear(rows, rhs, (int)used.size());
            if (!sol.consistent)
                fail(Errc::NotStabilizing,
                     "generator " + std::to_string(g + 1) + " moves w_" +
                         midx_to_string(k) + " outside the subspace");
        }
    }
}

SchurPair construction1(const std::vector<Op>& bs, int cutoff, int depth) {
    if (bs.empty()) fail(Errc::DimensionMismatch, "no generators given");
    const int n = bs[0].n();
    if ((int)bs.size() < n)
        fail(Errc::DimensionMismatch, "the generators must start with the full tuple");
    std::vector<Op> tuple(bs.begin(), bs.begin() + n);
    QuasiEllipticReport rep = check_quasi_elliptic(tuple);
    if (!rep.pass) fail(Errc::NotQuasiElliptic, "construction1: " + rep.detail);
    for (size_t i = 0; i < bs.size(); ++i)
        for (size_t j = i + 1; j < bs.size(); ++j) {
            Op c = commutator(bs[i], bs[j]);
            if (!is_zero_within(c, c.prec()))
                fail(Errc::NotCommuting, "generators " + std::to_string(i + 1) + " and " +
                                             std::to_string(j + 1) + " do not commute");
        }
    int ln = (int)rep.entries[n - 1].ell;
    int mq = 0;
    for (const auto& b : bs)
        for (const auto& [m, c] : b.terms()) mq = std::max(mq, (int)m.d[n - 1]);

    int kd = depth + cutoff + mq + ln + 6;
    int rt = kd + ln + 2;
    int wx = cutoff + 2 * rt + 8;
    ConstantFrame fr = constant_frame(tuple, rt, wx);

    SchurPair pair;
    for (const auto& b : bs)
        pair.a_generators.push_back(frame_transport(fr, b, Prec{0, depth}));

    Op sinv = fr.dress_inv.to_op(Kind::EHat, Prec{cutoff, depth + cutoff});
    pair.w = diamond_subspace(sinv, cutoff);
    check_subspace(pair.w);
    for (const auto& [k, wk] : support(pair.w).basis)
        if (!wk.coeff(midx_zero(n), k).is_one())
            fail(Errc::SupportNotFull,
                 "the dressed subspace does not lead with d^" + midx_to_string(k));
    check_pair(pair);
    return pair;
}

std::vector<Op> construction2(const SchurPair& pair) {
    check_pair(pair);
    const int n = pair.w.n;
    Op monic = build_sato_monic(pair.w);
    GOp g(monic);
    GOp gi = g.neumann_inverse();
    std::vector<Op> out;
    for (const auto& a : pair.a_generators) {
        GOp b = g * GOp(a) * gi;
        std::vector<std::tuple<MIdx, MIdx, Scalar>> ts;
        int xw = wide_window;
        for (const auto& [l, v] : b.stored()) {
            if (l < 0) {
                if (!is_zero_within(v, v.prec()))
                    fail(Errc::NotStabilizing,
                         "a conjugated generator keeps level " + std::to_string(l));
                continue;
            }
            xw = std::min(xw, v.prec().x_deg);
            for (const auto& [m, c] : v.terms()) {
                MIdx d = m.d;
                d[n - 1] = l;
                ts.push_back({m.x, d, c});
            }
        }
        out.push_back(Op::from_terms(n, Kind::DHat, Prec{xw, 0}, ts));
    }
    return out;
}

namespace {

// All products of the generators with total order within the budget,
// including the empty product 1. Generators must have positive attained
// order; zero or order-zero generators trip the budget error since their
// powers never leave the budget.
std::vector<Op> ring_monomials(const std::vector<Op>& gens, int budget) {
    const int n = gens[0].n();
    std::vector<Op> out;
    out.push_back(Op::one(n, Kind::VElem, Prec{wide_window, wide_window}));
    std::vector<long> ords;
    for (const auto& a : gens) {
        auto d = a.ord();
        if (!d || *d <= 0)
            fail(Errc::BudgetExhausted,
                 "ring monomials need generators of positive order");
        ords.push_back(*d);
    }
    std::vector<int> e(gens.size(), 0);
    while (true) {
        size_t q = 0;
        while (q < e.size()) {
            long deg = ords[q];
            for (size_t r = 0; r < e.size(); ++r) deg += e[r] * ords[r];
            if (deg <= budget) break;
            e[q++] = 0;
        }
        if (q == e.size()) break;
        ++e[q];
        Op p = Op::one(n, Kind::VElem, Prec{wide_window, wide_window});
        for (size_t r = 0; r < e.size(); ++r)
            for (int s = 0; s < e[r]; ++s) p = p * gens[r];
        out.push_back(std::move(p));
    }
    return out;
}

long rank_once(const SchurPair& pair, int budget) {
    const int n = pair.w.n;
    std::vector<Op> gens;
    for (const auto& a : pair.a_generators) {
        auto d = a.ord();
        if (d && *d == 0 && a.terms().size() == 1 && midx_is_zero(a.terms().begin()->first.d))
            continue; // scalars never extend the span
        if (!a.is_zero()) gens.push_back(a);
    }
    std::vector<Op> prods = ring_monomials(gens, budget);
    if (prods.size() <= 1)
        fail(Errc::BudgetExhausted, "no ring monomial fits the degree budget");

    std::vector<const Op*> chosen;
    long count = 0;
    for (const auto& [k, wk] : pair.w.basis) {
        // Does some nonzero combination b of ring monomials send w_k into
        // the span of the earlier picks over the ring? Solve the
        // homogeneous system and look for a nullspace vector with a
        // nonzero b-part.
        std::vector<Op> left;
        for (const auto& p : prods) left.push_back(wk * p);
        std::vector<Op> right;
        for (const Op* g : chosen)
            for (const auto& p : prods) right.push_back(*g * p);
        int depth = wide_window;
        for (const auto& a : left) depth = std::min(depth, a.prec().dn_tail);
        for (const auto& a : right) depth = std::min(depth, a.prec().dn_tail);
        ColIndex<MIdx> coords;
        std::map<int, SparseRow> by_row;
        int col = 0;
        for (const auto& a : left) fill_row(coords, by_row, col++, a, n, depth);
        for (const auto& a : right) fill_row(coords, by_row, col++, a.scaled(Scalar(-1)), n, depth);
        std::vector<SparseRow> rows(coords.size());
        for (auto& [ri, row] : by_row) rows[ri] = std::move(row);
        std::vector<Scalar> rhs(coords.size(), Scalar(0));
        LinearSolution sol = solve_linear(rows, rhs, col, true);
        bool dependent = false;
        for (const auto& v : sol.nullspace) {
            for (size_t c = 0; c < left.size(); ++c)
                if (!v[c].is_zero()) {
                    dependent = true;
                    break;
                }
            if (dependent) break;
        }
        if (!dependent) {
            chosen.push_back(&wk);
            ++count;
        }
    }
    return count;
}

} // namespace

RankReport analytical_rank(const SchurPair& pair, int degree_budget) {
    check_subspace(pair.w);
    RankReport rep;
    rep.budget = degree_budget;
    rep.rank = rank_once(pair, degree_budget);
    rep.exact = false;
    if (degree_budget > 0) {
        try {
            rep.exact = rank_once(pair, degree_budget - 1) == rep.rank;
        } catch (const Error&) {
            rep.exact = false;
        }
    }
    return rep;
}

SpectralBasis solve_spectral(const std::vector<Op>& bs, const std::vector<Scalar>& chi,
                             int out_deg) {
    if (bs.empty()) fail(Errc::DimensionMismatch, "no generators given");
    if (chi.size() != bs.size())
        fail(Errc::DimensionMismatch, "one character value per generator is required");
    if (out_deg < 0) fail(Errc::DimensionMismatch, "output degree must be nonnegative");
    const int n = bs[0].n();
    for (size_t i = 0; i < bs.size(); ++i)
        for (size_t j = i + 1; j < bs.size(); ++j) {
            Op c = commutator(bs[i], bs[j]);
            if (!is_zero_within(c, c.prec()))
                fail(Errc::NotCommuting, "generators " + std::to_string(i + 1) + " and " +
                                             std::to_string(j + 1) + " do not commute");
        }

    auto nullbasis = [&](int deg) {
        auto alphas = indices_up_to_degree(n, deg);
        ColIndex<MIdx> cols;
        for (const auto& a : alphas) cols.of(a);
        std::vector<SparseRow> rows;
        for (size_t g = 0; g < bs.size(); ++g) {
            const Op& q = bs[g];
            long dq = 0;
            for (const auto& [m, c] : q.terms()) dq = std::max(dq, midx_sum(m.d));
            long lim = deg - dq;
            if (lim < 0) continue;
            std::map<MIdx, SparseRow, DegLexLess> by_beta;
            for (const auto& a : alphas) {
                Series xa(n, deg);
                xa = Series::monomial(n, deg, a, Scalar(1));
                Series img = q.apply(xa);
                if (img.prec() < lim)
                    fail(Errc::PrecisionExhausted,
                         "generator " + std::to_string(g + 1) +
                             " window is too shallow for the output degree");
                for (const auto& [b, v] : img.terms())
                    if (midx_sum(b) <= lim) by_beta[b][cols.of(a)] = v;
            }
            for (const auto& a : alphas) {
                if (midx_sum(a) > lim) continue;
                SparseRow& r = by_beta[a];
                r[cols.of(a)] = r[cols.of(a)] - chi[g];
            }
            for (auto& [b, r] : by_beta) rows.push_back(std::move(r));
        }
        std::vector<Scalar> rhs(rows.size(), Scalar(0));
        return solve_linear(rows, rhs, cols.size(), true);
    };

    auto sol = nullbasis(out_deg);
    SpectralBasis out;
    out.out_deg = out_deg;
    auto alphas = indices_up_to_degree(n, out_deg);
    for (const auto& v : sol.nullspace) {
        std::vector<std::pair<MIdx, Scalar>> ts;
        for (size_t c = 0; c < alphas.size(); ++c)
            if (!v[c].is_zero()) ts.emplace_back(alphas[c], v[c]);
        out.basis.push_back(Series::from_terms(n, out_deg, std::move(ts)));
    }
    if (out_deg > 0) {
        auto prev = nullbasis(out_deg - 1);
        out.stabilized = prev.nullspace.size() == sol.nullspace.size();
    }
    return out;
}

} // namespace ssk
