#include <random>

#include "doctest.h"
#include "ssk/errors.hpp"
#include "ssk/graded.hpp"

using namespace ssk;

namespace {

Prec pr(int x, int dn = 0) { return Prec{x, dn}; }

Op random_flat(std::mt19937_64& rng, int n, Kind kind, Prec prec, int nterms) {
    std::uniform_int_distribution<int> xe(0, 2), de(0, 2), coef(-4, 4);
    std::uniform_int_distribution<int> tail(kind_allows_negative_dn(kind) ? -prec.dn_tail : 0, 2);
    std::vector<std::tuple<MIdx, MIdx, Scalar>> ts;
    for (int t = 0; t < nterms; ++t) {
        MIdx x(n, 0), d(n, 0);
        for (int q = 0; q < n; ++q) {
            x[q] = xe(rng);
            d[q] = de(rng);
        }
        if (kind == Kind::DHatN) d[n - 1] = 0;
        if (kind_allows_negative_dn(kind)) d[n - 1] = tail(rng);
        int c = coef(rng);
        if (c == 0) c = 1;
        ts.push_back({x, d, Scalar(c)});
    }
    return Op::from_terms(n, kind, prec, ts);
}

// Reassemble the graded value on the window both results claim and compare
// term lists there. Returns false only on a genuine disagreement; an empty
// common window never happens with the generators below.
bool matches_flat(const GOp& g, const Op& flat, Kind kind) {
    int nc = std::min<int>(flat.prec().dn_tail, -g.tail());
    int wx = flat.prec().x_deg;
    for (const auto& [l, v] : g.stored())
        if (l >= -nc) wx = std::min(wx, v.prec().x_deg);
    if (wx < 0) return false;
    Prec w{wx, nc};
    return g.to_op(kind, w) == flat.truncated(w);
}

} // namespace

TEST_CASE("graded split and reassembly round-trips") {
    std::mt19937_64 rng(2024);
    for (int rep = 0; rep < 20; ++rep) {
        int n = 1 + (int)(rng() % 3);
        Prec p = pr(5, 3);
        Op flat = random_flat(rng, n, Kind::EHat, p, 5);
        GOp g(flat);
        CHECK(g.covers(p));
        CHECK(g.to_op(Kind::EHat, p) == flat);
    }
}

TEST_CASE("graded product matches flat product where both claim") {
    std::mt19937_64 rng(77);
    int compared = 0;
    for (int rep = 0; rep < 25; ++rep) {
        int n = 1 + (int)(rng() % 2);
        Prec p = pr(8, 4);
        Op A = random_flat(rng, n, Kind::EHat, p, 4);
        Op B = random_flat(rng, n, Kind::EHat, p, 4);
        Op AB = Op::zero(n, Kind::EHat, p);
        try {
            AB = A * B;
        } catch (const Error&) {
            continue; // the flat window model can give up on deep tails
        }
        GOp g = GOp(A) * GOp(B);
        CHECK(matches_flat(g, AB, Kind::EHat));
        ++compared;
    }
    CHECK(compared >= 15);
}

TEST_CASE("graded product matches flat product on differential operators") {
    std::mt19937_64 rng(78);
    for (int rep = 0; rep < 25; ++rep) {
        int n = 1 + (int)(rng() % 3);
        Prec p = pr(8);
        Op A = random_flat(rng, n, Kind::DHat, p, 4);
        Op B = random_flat(rng, n, Kind::DHat, p, 4);
        CHECK(matches_flat(GOp(A) * GOp(B), A * B, Kind::DHat));
    }
}

TEST_CASE("per-level windows beat the flat rectangle on deep tails") {
    // dn^-1 against an x_n-dependent coefficient spends one x-degree per
    // level it digs, so the windows form a staircase instead of paying the
    // whole depth up front.
    int n = 1;
    Prec p = pr(6, 3);
    Op f = Op::from_terms(n, Kind::EHat, p, {{{1}, {0}, Scalar(1)}}); // x_1
    GOp g = GOp::dn_power(n, -1, -wide_window) * GOp(f);
    // d^-1 x = x d^-1 - d^-2 from the falling factorial of -1.
    CHECK(g.level(-1).coeff({1}, {0}) == Scalar(1));
    CHECK(g.level(-2).coeff({0}, {0}) == Scalar(-1));
    CHECK(g.window(-1) == 6);
    CHECK(g.window(-2) == 5);
    CHECK(g.window(-3) == 4);
}

TEST_CASE("graded neumann inverse") {
    std::mt19937_64 rng(79);
    for (int rep = 0; rep < 15; ++rep) {
        int n = 1 + (int)(rng() % 2);
        // 1 + strictly negative levels, coefficients claimed through degree 12.
        GOp u = GOp::one(n, -4);
        int depth = 1 + (int)(rng() % 3);
        for (int l = 1; l <= depth; ++l) {
            Op c = random_flat(rng, n, Kind::DHatN, pr(12), 2);
            u = u + GOp::from_level(c, -l, -4);
        }
        GOp v = u.neumann_inverse();
        GOp lhs = (u * v) - GOp::one(n, -4);
        GOp rhs = (v * u) - GOp::one(n, -4);
        CHECK(vanishes_within_claims(lhs));
        CHECK(vanishes_within_claims(rhs));
        // The claims themselves reach a usable window.
        CHECK(lhs.is_zero_through(Prec{2, 2}));
        CHECK(rhs.is_zero_through(Prec{2, 2}));
    }
}

TEST_CASE("graded inverse of a monic operator") {
    int n = 2;
    // L = d_2 + x_2 d_1 from exact data.
    Op c0 = Op::from_terms(n, Kind::DHatN, pr(wide_window), {{{0, 1}, {1, 0}, Scalar(1)}});
    GOp L = GOp::dn_power(n, 1, -8) + GOp::from_level(c0, 0, -8);
    GOp Linv = L.inverse();
    Prec w{3, 4};
    CHECK((L * Linv - GOp::one(n, -8)).is_zero_through(w));
    CHECK((Linv * L - GOp::one(n, -8)).is_zero_through(w));
    // Powers against the inverse telescope.
    GOp id = L.pow(2) * Linv.pow(2);
    CHECK((id - GOp::one(n, -8)).is_zero_through(Prec{2, 3}));
}

TEST_CASE("graded tail claims track unknown content") {
    int n = 1;
    // Factors claimed only to finite tails leave the product unclaimed where
    // one side's unknown region can reach.
    Op A = Op::from_terms(n, Kind::EHat, pr(4, 2), {{{0}, {-2}, Scalar(1)}});
    Op B = Op::from_terms(n, Kind::EHat, pr(4, 3), {{{0}, {-3}, Scalar(1)}});
    GOp g = GOp(A) * GOp(B);
    CHECK(g.level(-5).is_one());
    CHECK(g.tail() == -5);
    CHECK_THROWS_AS((void)g.level(-6), Error);
}

TEST_CASE("windowed flat conversion stores windowed zeros at gap levels") {
    int n = 1;
    // d^2 with x window 4: the flat claim says nothing about x^5 d, so the
    // split may not present level 1 as exactly zero.
    Op A = Op::from_terms(n, Kind::DHat, pr(4), {{{0}, {2}, Scalar(1)}});
    GOp g(A);
    CHECK(g.window(2) == 4);
    CHECK(g.window(1) == 4);
    CHECK(g.window(0) == 4);
    CHECK(g.level(1).is_zero());
    // Negative levels of a differential operator really are exactly zero.
    CHECK(g.window(-1) == wide_window);
    CHECK(g.tail() == -wide_window);
}

TEST_CASE("coefficient derivative windows") {
    int n = 2;
    Op a = Op::from_terms(n, Kind::DHatN, pr(5), {{{2, 1}, {1, 0}, Scalar(3)}});
    Op d = coeff_derivative(a, 0);
    CHECK(d.coeff({1, 1}, {1, 0}) == Scalar(6));
    CHECK(d.prec().x_deg == 4);
    Op back = coeff_antiderivative(d, 0);
    CHECK(back.coeff({2, 1}, {1, 0}) == Scalar(3));
    CHECK(back.prec().x_deg == 5);
    CHECK(coeff_antiderivative(coeff_derivative(a, 1), 1) == a);
}

TEST_CASE("series exponential") {
    int n = 2;
    Series x = Series::variable(n, 0, 8);
    Series y = Series::variable(n, 1, 8);
    Series g = x + y * y;
    Series e = g.exp();
    CHECK((e * (-g).exp()).truncated(8) == Series::constant(n, Scalar(1), 8));
    // d/dx exp(g) = (dg/dx) exp(g); the window drops by one degree.
    CHECK(e.derivative(0).truncated(7) == (g.derivative(0) * e).truncated(7));
    CHECK_THROWS_AS((void)Series::constant(n, Scalar(2), 8).exp(), Error);
}
