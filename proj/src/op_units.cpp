#include <algorithm>

#include "ssk/errors.hpp"
#include "ssk/linsolve.hpp"
#include "ssk/operator.hpp"

namespace ssk {

namespace {

// Key for a unit-inversion unknown or equation: one operator monomial.
struct MonoKey {
    MIdx x, d;
    bool operator<(const MonoKey& o) const {
        if (x != o.x) return lex_cmp(x, o.x) < 0;
        return lex_cmp(d, o.d) < 0;
    }
};

} // namespace

bool is_regular_up_to(const Op& P, int grade) {
    Op sig = P.symbol();
    if (sig.is_zero()) return false;
    const int n = P.n();
    for (int m = 0; m <= grade; ++m) {
        auto ks = indices_of_degree(n, m);
        std::vector<SparseRow> rows;
        ColIndex<MIdx> cols;
        for (const auto& k : ks) {
            // The probe is exact data; a wide tail keeps the product window
            // from charging it as if it were truncated.
            Prec probe{sig.prec().x_deg, wide_window};
            Op dk = Op::monomial(n, Kind::VElem, probe, midx_zero(n), k, Scalar(1));
            Op row = diamond(dk, sig);
            SparseRow r;
            for (const auto& [mo, c] : row.terms()) r.emplace(cols.of(mo.d), c);
            rows.push_back(std::move(r));
        }
        if (rank_of_rows(rows) != (int)ks.size()) return false;
    }
    return true;
}

bool is_unit(const Op& P, int grade) {
    auto d = P.ord();
    return d && *d == 0 && is_regular_up_to(P, grade);
}

namespace {

Op invert_differential_unit(const Op& P) {
    auto d = P.ord();
    if (!d || *d != 0)
        fail(Errc::NotAUnit, "inversion needs ord 0 for differential kinds");
    const int n = P.n();
    const int V = P.prec().x_deg;
    const Op P0 = P.symbol();
    Op X = Op::zero(n, P.kind(), P.prec());
    Op R = Op::one(n, P.kind(), P.prec()); // running 1 - P*X

    for (int r = 0; r <= V; ++r) {
        for (int m = r; m <= V; ++m) {
            // unknown block: monomials x^i d^k with |i| = m, |k| = m - r
            std::vector<std::pair<MIdx, MIdx>> unknowns;
            for (const auto& i : indices_of_degree(n, m))
                for (const auto& k : indices_of_degree(n, m - r)) {
                    if (kind_forbids_dn(P.kind()) && k[n - 1] != 0) continue;
                    unknowns.emplace_back(i, k);
                }
            if (unknowns.empty()) continue;

            ColIndex<MonoKey> eq;
            std::vector<SparseRow> coltmp(unknowns.size());
            for (size_t u = 0; u < unknowns.size(); ++u) {
                Op base = Op::monomial(n, P.kind(), P.prec(), unknowns[u].first,
                                       unknowns[u].second, Scalar(1));
                Op img = P0 * base;
                for (const auto& [mo, c] : img.terms()) {
                    if (midx_sum(mo.x) != m) continue;
                    if (midx_sum(mo.d) - midx_sum(mo.x) != -r) continue;
                    coltmp[u].emplace(eq.of(MonoKey{mo.x, mo.d}), c);
                }
            }
            for (const auto& [mo, c] : R.terms()) {
                if (midx_sum(mo.x) != m) continue;
                if (midx_sum(mo.d) - midx_sum(mo.x) != -r) continue;
                eq.of(MonoKey{mo.x, mo.d});
            }
            // transpose the per-unknown columns into equation rows
            std::vector<SparseRow> rows(eq.size());
            for (size_t u = 0; u < unknowns.size(); ++u)
                for (const auto& [row, c] : coltmp[u]) rows[row].emplace((int)u, c);
            std::vector<Scalar> rhs(eq.size(), Scalar(0));
            for (int row = 0; row < eq.size(); ++row) {
                const MonoKey& k = eq.keys[row];
                rhs[row] = R.coeff(k.x, k.d);
            }
            LinearSolution sol = solve_linear(rows, rhs, (int)unknowns.size());
            if (!sol.consistent)
                fail(Errc::NotAUnit, "graded inversion step is inconsistent, operator is not regular");
            std::vector<std::tuple<MIdx, MIdx, Scalar>> add;
            for (size_t u = 0; u < unknowns.size(); ++u)
                if (!sol.x[u].is_zero())
                    add.emplace_back(unknowns[u].first, unknowns[u].second, sol.x[u]);
            if (add.empty()) continue;
            Op dX = Op::from_terms(n, P.kind(), P.prec(), add);
            X = X + dX;
            R = R - P * dX;
        }
    }
    if (!(P * X - Op::one(n, P.kind(), P.prec())).is_zero() ||
        !(X * P - Op::one(n, P.kind(), P.prec())).is_zero())
        fail(Errc::NotAUnit, "inversion residual is nonzero within the window");
    return X;
}

Op invert_tail_monic(const Op& P) {
    if (P.is_zero()) fail(Errc::NotAUnit, "zero operator has no inverse");
    const int n = P.n();
    long D = P.ord_n();
    Op ht = P.dn_coefficient((int)D);
    const auto& ht_terms = ht.terms();
    bool scalar_top = ht_terms.size() == 1 && midx_is_zero(ht_terms.begin()->first.x) &&
                      midx_is_zero(ht_terms.begin()->first.d);
    if (!scalar_top)
        fail(Errc::NotAUnit, "top d_n coefficient must be a nonzero scalar");
    Scalar c = ht_terms.begin()->second;

    Op S = P.shifted_dn((int)-D).scaled(c.inverse()) -
           Op::one(n, P.kind(), P.prec());
    // every monomial of S now has d_n < 0, so the Neumann series ends once
    // the power drops below the tail window
    Op acc = Op::one(n, P.kind(), P.prec());
    for (int q = 0; q <= P.prec().dn_tail; ++q)
        acc = Op::one(n, acc.kind(), acc.prec()) - S * acc;
    Op shift = Op::monomial(n, Kind::EHat, acc.prec(), midx_zero(n),
                            midx_unit(n, n - 1, (int32_t)-D), Scalar(1));
    Op X = (shift * acc).scaled(c.inverse());
    if (!(P * X - Op::one(n, X.kind(), X.prec())).is_zero() ||
        !(X * P - Op::one(n, X.kind(), X.prec())).is_zero())
        fail(Errc::NotAUnit, "inversion residual is nonzero within the window");
    return X;
}

} // namespace

Op invert_unit_op(const Op& P) {
    if (kind_allows_negative_dn(P.kind())) return invert_tail_monic(P);
    return invert_differential_unit(P);
}

} // namespace ssk
