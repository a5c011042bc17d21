#include "doctest.h"

#include <random>
#include <vector>

#include "ssk/errors.hpp"
#include "ssk/linsolve.hpp"
#include "ssk/special_ops.hpp"

using namespace ssk;

namespace {

Prec pr(int x_deg, int tail = 0) { return Prec{x_deg, tail}; }

// Identity comparison at the common claim window.
bool same_within_window(const Op& a, const Op& b) {
    Prec w{std::min(a.prec().x_deg, b.prec().x_deg),
           std::min(a.prec().dn_tail, b.prec().dn_tail)};
    return a.truncated(w) == b.truncated(w);
}

Series x_var(int n, int axis, int prec) { return Series::variable(n, axis, prec); }

Series random_series(std::mt19937_64& rng, int n, int min_val, int max_deg, int prec) {
    std::uniform_int_distribution<int> coef(-3, 3);
    std::vector<std::pair<MIdx, Scalar>> ts;
    for (const MIdx& e : indices_up_to_degree(n, max_deg)) {
        if (midx_sum(e) < min_val) continue;
        int c = coef(rng);
        if (c != 0) ts.push_back({e, Scalar(c)});
    }
    return Series::from_terms(n, prec, ts);
}

} // namespace

TEST_CASE("shift operator acts as substitution") {
    // u = (x2, 0): x1^2 goes to (x1+x2)^2.
    int n = 2, deg = 6;
    std::vector<Series> u{x_var(n, 1, deg), Series(n, deg)};
    Op P = shift_operator(u, pr(deg));
    CHECK(P.ord() == 0);
    Series f = Series::monomial(n, {2, 0}, Scalar(1), deg);
    Series g = P.apply(f);
    CHECK(g.coeff({2, 0}) == Scalar(1));
    CHECK(g.coeff({1, 1}) == Scalar(2));
    CHECK(g.coeff({0, 2}) == Scalar(1));

    // u = 0 gives the identity operator.
    std::vector<Series> z(2, Series(2, deg));
    CHECK(shift_operator(z, pr(deg)) == Op::one(2, Kind::DSym, pr(deg)));

    // Zero-valuation directions are rejected.
    std::vector<Series> badu{Series::constant(1, Scalar(1), deg)};
    CHECK_THROWS_AS(shift_operator(badu, pr(deg)), Error);
    try {
        shift_operator(badu, pr(deg));
    } catch (const Error& e) {
        CHECK(e.code() == Errc::NotNilpotentShift);
    }
}

TEST_CASE("shift operator against the composition oracle") {
    std::mt19937_64 rng(1123);
    for (int rep = 0; rep < 10; ++rep) {
        int n = 1 + (rep % 2), deg = 7;
        std::vector<Series> u, subst;
        for (int q = 0; q < n; ++q) {
            Series uq = random_series(rng, n, 1, 3, deg);
            u.push_back(uq);
            subst.push_back(x_var(n, q, deg) + uq);
        }
        Op P = shift_operator(u, pr(deg));
        Series f = random_series(rng, n, 0, 4, deg);
        Series via_op = P.apply(f);
        Series via_subst = Series::compose(f, subst);
        int w = std::min(via_op.prec(), via_subst.prec());
        CHECK(via_op.truncated(w) == via_subst.truncated(w));
    }
}

TEST_CASE("shift operators compose like substitutions") {
    std::mt19937_64 rng(2711);
    int n = 2, deg = 6;
    for (int rep = 0; rep < 5; ++rep) {
        std::vector<Series> u, v, xu, w;
        for (int q = 0; q < n; ++q) {
            u.push_back(random_series(rng, n, 1, 3, deg));
            v.push_back(random_series(rng, n, 1, 3, deg));
            xu.push_back(x_var(n, q, deg) + u[q]);
        }
        for (int q = 0; q < n; ++q) w.push_back(u[q] + Series::compose(v[q], xu));
        Op lhs = shift_operator(u, pr(deg)) * shift_operator(v, pr(deg));
        Op rhs = shift_operator(w, pr(deg));
        CHECK(same_within_window(lhs, rhs));
    }
}

TEST_CASE("delta evaluates a variable at zero") {
    int n = 2, deg = 6;
    Op d1 = delta_op(n, 0, pr(deg));
    Series f = x_var(n, 0, deg) + Series::monomial(n, {0, 2}, Scalar(1), deg);
    Series g = d1.apply(f);
    CHECK(g.coeff({1, 0}) == Scalar(0));
    CHECK(g.coeff({0, 2}) == Scalar(1));
}

TEST_CASE("integrator identities") {
    int n = 2, deg = 8;
    Prec p = pr(deg);
    Op I1 = integrator_op(n, 0, p);
    Op d1 = Op::d(n, 0, p).with_kind(Kind::DSym);

    // Action: x1^2 integrates to x1^3/3.
    Series f = Series::monomial(n, {2, 0}, Scalar(1), deg);
    CHECK(I1.apply(f).coeff({3, 0}) == Scalar(1, 3));

    // d * I = 1 and I * d = 1 - delta, as operator identities.
    CHECK(same_within_window(d1 * I1, Op::one(n, Kind::DSym, p)));
    CHECK(same_within_window(I1 * d1 + delta_op(n, 0, p), Op::one(n, Kind::DSym, p)));
}

TEST_CASE("root of unity operator relations") {
    int n = 2, deg = 6;
    Prec p = pr(deg);
    const unsigned k = 4;
    Op A1 = root_of_unity_op(n, k, 1, 0, p);
    Op A2 = root_of_unity_op(n, k, 2, 0, p);
    Op A3 = root_of_unity_op(n, k, 3, 0, p);

    // Group law in the exponent index.
    CHECK(same_within_window(A1 * A1, A2));
    CHECK(same_within_window(A1 * A2, A3));
    CHECK(same_within_window(A1 * A3, Op::one(n, Kind::DSym, p)));

    // d_q^p A = zeta^{p i} A d_q^p and the integrator twin with zeta^{-p i}.
    Scalar z = Scalar::zeta(k);
    Op dq = Op::d(n, 0, p).with_kind(Kind::DSym);
    CHECK(same_within_window(dq * A1, (A1 * dq).scaled(z)));
    Op I = integrator_op(n, 0, p);
    CHECK(same_within_window(I * A1, (A1 * I).scaled(z.inverse())));

    // A_{2;1,q} realizes the sign flip of one variable.
    Op par = root_of_unity_op(n, 2, 1, 0, p);
    Series g = Series::monomial(n, {3, 1}, Scalar(2), deg) +
               Series::monomial(n, {2, 0}, Scalar(5), deg);
    Series flipped = par.apply(g);
    CHECK(flipped.coeff({3, 1}) == Scalar(-2));
    CHECK(flipped.coeff({2, 0}) == Scalar(5));
}

TEST_CASE("linear change conjugator") {
    int n = 2, deg = 8;
    Prec p = pr(deg);
    std::vector<std::vector<Scalar>> C{{Scalar(1), Scalar(0)}, {Scalar(1), Scalar(1)}};
    Op S = linear_change_conjugator(C, Scalar(1), p);
    Op Sinv = linear_change_conjugator(matrix_inverse(C), Scalar(1), p);
    CHECK(same_within_window(S * Sinv, Op::one(n, Kind::DSym, p)));

    // Conjugation mixes derivations by the columns of C:
    // S^-1 d_i S = sum_j C[j][i] d_j, so here d_1 -> d_1 + d_2 and d_2 -> d_2.
    Op d1 = Op::d(n, 0, p).with_kind(Kind::DSym);
    Op d2 = Op::d(n, 1, p).with_kind(Kind::DSym);
    CHECK(same_within_window(Sinv * (d1 * S), d1 + d2));
    CHECK(same_within_window(Sinv * (d2 * S), d2));

    // Identity matrix gives the identity operator; composition reverses order.
    std::vector<std::vector<Scalar>> id{{Scalar(1), Scalar(0)}, {Scalar(0), Scalar(1)}};
    CHECK(linear_change_conjugator(id, Scalar(1), p) == Op::one(n, Kind::DSym, p));

    std::vector<std::vector<Scalar>> C2{{Scalar(2), Scalar(0)}, {Scalar(1), Scalar(1)}};
    std::vector<std::vector<Scalar>> C2C;
    for (int i = 0; i < n; ++i) {
        std::vector<Scalar> row;
        for (int j = 0; j < n; ++j) {
            Scalar s(0);
            for (int t = 0; t < n; ++t) s += C2[i][t] * C[t][j];
            row.push_back(s);
        }
        C2C.push_back(row);
    }
    Op lhs = linear_change_conjugator(C, Scalar(1), p) *
             linear_change_conjugator(C2, Scalar(1), p);
    CHECK(same_within_window(lhs, linear_change_conjugator(C2C, Scalar(1), p)));

    // Validation gates.
    std::vector<std::vector<Scalar>> sing{{Scalar(1), Scalar(2)}, {Scalar(2), Scalar(4)}};
    CHECK_THROWS_AS(linear_change_conjugator(sing, Scalar(1), p), Error);
    CHECK_THROWS_AS(linear_change_conjugator(C, Scalar(0), p), Error);
}

TEST_CASE("abhyankar inverse of the quadratic one-variable map") {
    // F = x - x^2 falls outside the unit-Jacobian formula; the fallback solves
    // G degree by degree. Coefficients of G are the Catalan numbers.
    int deg = 10;
    Series F = x_var(1, 0, deg) - Series::monomial(1, {2}, Scalar(1), deg);
    std::vector<Series> G = abhyankar_inverse({F}, deg);
    REQUIRE(G.size() == 1);
    long cat[] = {1, 1, 2, 5, 14, 42, 132, 429, 1430, 4862};
    for (int m = 1; m <= deg; ++m) CHECK(G[0].coeff({m}) == Scalar(cat[m - 1]));

    // Both compositions give the identity modulo the degree.
    Series back = Series::compose(G[0], {F.truncated(deg)});
    CHECK(back == x_var(1, 0, deg));
    Series fore = Series::compose(F.truncated(deg), G);
    CHECK(fore == x_var(1, 0, deg));
}

TEST_CASE("abhyankar inverse, triangular two-variable map") {
    int deg = 8;
    // F = (x1 + x2^2, x2) has Jacobian determinant 1; the closed formula runs.
    Series F1 = x_var(2, 0, deg) + Series::monomial(2, {0, 2}, Scalar(1), deg);
    Series F2 = x_var(2, 1, deg);
    std::vector<Series> G = abhyankar_inverse({F1, F2}, deg);
    CHECK(G[0] == x_var(2, 0, deg) - Series::monomial(2, {0, 2}, Scalar(1), deg));
    CHECK(G[1] == x_var(2, 1, deg));
}

TEST_CASE("abhyankar inverse round trips on unit-Jacobian maps") {
    std::mt19937_64 rng(90125);
    int deg = 8;
    for (int rep = 0; rep < 8; ++rep) {
        // Triangular shape: H1 depends only on x2, H2 = 0, so j(F) = 1.
        Series H1(2, deg);
        std::uniform_int_distribution<int> coef(-2, 2);
        for (int m = 2; m <= 3; ++m) {
            int c = coef(rng);
            if (c != 0) H1 = H1 + Series::monomial(2, {0, m}, Scalar(c), deg);
        }
        Series F1 = x_var(2, 0, deg) - H1;
        Series F2 = x_var(2, 1, deg);
        std::vector<Series> F{F1, F2};
        std::vector<Series> G = abhyankar_inverse(F, deg);
        for (int i = 0; i < 2; ++i) {
            CHECK(Series::compose(G[i], F) == x_var(2, i, deg));
            CHECK(Series::compose(F[i].truncated(deg), G) == x_var(2, i, deg));
        }
        // The inverse of the inverse recovers the map.
        std::vector<Series> FF = abhyankar_inverse(G, deg);
        CHECK(FF[0] == F1.truncated(deg));
        CHECK(FF[1] == F2.truncated(deg));
    }
}

TEST_CASE("abhyankar transport") {
    int deg = 8;
    // Recover x^2 from its composite with F = x - x^2.
    Series F = x_var(1, 0, deg) - Series::monomial(1, {2}, Scalar(1), deg);
    Series U = Series::monomial(1, {2}, Scalar(1), deg);
    Series V = Series::compose(U, {F});
    CHECK(abhyankar_transport(V, {F}, deg) == U);

    // Unit-Jacobian path round trip with a random observable.
    std::mt19937_64 rng(777);
    Series H1 = Series::monomial(2, {0, 2}, Scalar(2), deg);
    Series F1 = x_var(2, 0, deg) - H1;
    Series F2 = x_var(2, 1, deg);
    for (int rep = 0; rep < 5; ++rep) {
        Series W = random_series(rng, 2, 0, 4, deg);
        Series comp = Series::compose(W, {F1, F2});
        CHECK(abhyankar_transport(comp, {F1, F2}, deg) == W.truncated(deg));
    }

    // Valuation gate: H with valuation 1 is rejected.
    Series badF = x_var(1, 0, deg) - x_var(1, 0, deg).scaled(Scalar(1, 2));
    CHECK_THROWS_AS(abhyankar_inverse({badF}, deg), Error);
    try {
        abhyankar_inverse({badF}, deg);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::ValuationTooLow);
    }
}
