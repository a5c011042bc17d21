#include "ssk/special_ops.hpp"

#include <tuple>

#include "ssk/errors.hpp"
#include "ssk/linsolve.hpp"

namespace ssk {

namespace {

// Re-states the precision claim of a finitely determined series. Only valid
// when the caller knows the wider coefficients are determined by the stored
// ones (valuation arguments below); Series::truncated refuses to widen for
// good reason, so the cast stays local to this file.
Series lift(const Series& s, int prec) {
    std::vector<std::pair<MIdx, Scalar>> ts;
    for (const auto& [e, c] : s.terms()) ts.push_back({e, c});
    return Series::from_terms(s.n(), prec, std::move(ts));
}

Scalar scalar_pow(Scalar base, long e) {
    Scalar r(1);
    for (long i = 0; i < e; ++i) r *= base;
    return r;
}

// Determinant of a square series matrix by cofactor expansion along the
// first row. The matrices here are n x n for small n.
Series series_det(const std::vector<std::vector<Series>>& M) {
    const size_t n = M.size();
    if (n == 1) return M[0][0];
    Series acc(M[0][0].n(), M[0][0].prec());
    for (size_t j = 0; j < n; ++j) {
        if (M[0][j].is_zero()) continue;
        std::vector<std::vector<Series>> minor;
        for (size_t r = 1; r < n; ++r) {
            std::vector<Series> row;
            for (size_t c = 0; c < n; ++c)
                if (c != j) row.push_back(M[r][c]);
            minor.push_back(std::move(row));
        }
        Series term = M[0][j] * series_det(minor);
        acc = (j % 2 == 0) ? acc + term : acc - term;
    }
    return acc;
}

void validate_map(const std::vector<Series>& F, int out_deg, int* n_out,
                  std::vector<Series>* H_out) {
    if (F.empty()) fail(Errc::DimensionMismatch, "empty map");
    if (out_deg < 1) fail(Errc::PrecisionExhausted, "output degree must be positive");
    const int n = F[0].n();
    if ((int)F.size() != n)
        fail(Errc::DimensionMismatch, "map needs one series per variable");
    for (const auto& f : F) {
        if (f.n() != n) fail(Errc::DimensionMismatch, "mixed arities in map");
        if (f.prec() < out_deg)
            fail(Errc::PrecisionExhausted, "map components need precision >= out_deg");
    }
    std::vector<Series> H;
    for (int i = 0; i < n; ++i) {
        Series hi = Series::variable(n, i, F[i].prec()) - F[i];
        auto v = hi.valuation();
        if (v && *v < 2)
            fail(Errc::ValuationTooLow, "map must be x_i minus a valuation >= 2 part");
        H.push_back(hi.truncated(out_deg));
    }
    *n_out = n;
    *H_out = std::move(H);
}

bool jacobian_is_one(const std::vector<Series>& F, int n, int out_deg) {
    // Certification on the truncation only: the determinant is compared with 1
    // through degree out_deg - 1, the window the given data supports.
    std::vector<std::vector<Series>> DF(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) DF[i].push_back(F[i].truncated(out_deg).derivative(j));
    Series det = series_det(DF);
    Series one = Series::constant(n, Scalar(1), det.prec());
    return det == one;
}

// sum over multi-indices p of d^p (seed * H^p) / p!, the Abhyankar series.
// Output degree m only ever involves H-coefficients of degree <= m (each of
// the |p| factors has valuation >= 2 and the seed at least 1), so powers of
// the degree-out_deg truncation of H may be carried at the lifted window.
Series abhyankar_sum(const Series& seed, const std::vector<Series>& H, int n,
                     int out_deg) {
    const int wide = 2 * out_deg + 1;
    std::vector<std::vector<Series>> pw(n);
    for (int q = 0; q < n; ++q) {
        pw[q].push_back(Series::constant(n, Scalar(1), wide));
        Series hq = lift(H[q], wide);
        for (int m = 1; m < out_deg; ++m) pw[q].push_back(pw[q].back() * hq);
    }
    Series wide_seed = lift(seed.truncated(out_deg), wide);
    Series acc(n, out_deg);
    for (const MIdx& p : indices_up_to_degree(n, out_deg > 0 ? out_deg - 1 : 0)) {
        Series term = wide_seed;
        for (int q = 0; q < n; ++q)
            if (p[q] > 0) term = term * pw[q][p[q]];
        if (term.is_zero()) continue;
        for (int q = 0; q < n; ++q)
            for (int32_t s = 0; s < p[q]; ++s) term = term.derivative(q);
        acc = acc + term.scaled(Scalar(1) / Scalar(midx_factorial(p))).truncated(out_deg);
    }
    return acc;
}

} // namespace

Op shift_operator(const std::vector<Series>& u, Prec prec) {
    if (u.empty()) fail(Errc::DimensionMismatch, "empty shift data");
    const int n = u[0].n();
    if ((int)u.size() != n)
        fail(Errc::DimensionMismatch, "shift needs one series per variable");
    for (const auto& s : u) {
        if (s.n() != n) fail(Errc::DimensionMismatch, "mixed arities in shift data");
        auto v = s.valuation();
        if (v && *v < 1)
            fail(Errc::NotNilpotentShift, "shift directions need valuation >= 1");
        if (s.prec() < prec.x_deg)
            fail(Errc::PrecisionExhausted, "shift directions need precision >= x_deg");
    }

    std::vector<std::vector<Series>> pw(n);
    for (int q = 0; q < n; ++q) {
        pw[q].push_back(Series::constant(n, Scalar(1), prec.x_deg));
        for (int m = 1; m <= prec.x_deg; ++m)
            pw[q].push_back(pw[q].back() * u[q].truncated(prec.x_deg));
    }

    std::vector<std::tuple<MIdx, MIdx, Scalar>> ts;
    for (const MIdx& i : indices_up_to_degree(n, prec.x_deg)) {
        Series c = pw[0][i[0]];
        for (int q = 1; q < n; ++q) {
            if (c.is_zero()) break;
            c = c * pw[q][i[q]];
        }
        if (c.is_zero()) continue;
        Scalar f = Scalar(1) / Scalar(midx_factorial(i));
        for (const auto& [e, cf] : c.terms()) ts.push_back({e, i, cf * f});
    }
    return Op::from_terms(n, Kind::DSym, prec, ts).with_ord_bound(0);
}

Op delta_op(int n, int axis, Prec prec) {
    std::vector<Series> u(n, Series(n, prec.x_deg));
    u[(size_t)axis] = Series::monomial(n, midx_unit(n, axis), Scalar(-1), prec.x_deg);
    return shift_operator(u, prec);
}

Op integrator_op(int n, int axis, Prec prec) {
    if (axis < 0 || axis >= n) fail(Errc::DimensionMismatch, "axis out of range");
    std::vector<std::tuple<MIdx, MIdx, Scalar>> ts;
    for (int k = 0; k + 1 <= prec.x_deg; ++k) {
        Scalar c = Scalar(k % 2 == 0 ? 1 : -1) / Scalar(factorial(k + 1));
        ts.push_back({midx_unit(n, axis, k + 1), midx_unit(n, axis, k), c});
    }
    return Op::from_terms(n, Kind::DSym, prec, ts).with_ord_bound(-1);
}

Op root_of_unity_op(int n, unsigned k, long i, int axis, Prec prec) {
    if (axis < 0 || axis >= n) fail(Errc::DimensionMismatch, "axis out of range");
    if (k == 0) fail(Errc::ParseError, "root order must be positive");
    Scalar base = scalar_pow(Scalar::zeta(k), ((i % (long)k) + (long)k) % (long)k) - Scalar(1);
    std::vector<std::tuple<MIdx, MIdx, Scalar>> ts;
    Scalar c(1);
    for (int m = 0; m <= prec.x_deg; ++m) {
        if (m > 0) {
            c *= base;
            c /= Scalar(m);
        }
        if (c == Scalar(0)) break;
        ts.push_back({midx_unit(n, axis, m), midx_unit(n, axis, m), c});
    }
    return Op::from_terms(n, Kind::DSym, prec, ts).with_ord_bound(0);
}

Op linear_change_conjugator(const std::vector<std::vector<Scalar>>& C, const Scalar& c0,
                            Prec prec) {
    const int n = (int)C.size();
    if (n == 0) fail(Errc::DimensionMismatch, "empty matrix");
    if (c0 == Scalar(0)) fail(Errc::NotAUnit, "leading factor c0 must be nonzero");
    matrix_inverse(C); // invertibility gate; throws SingularMatrix

    std::vector<Series> u;
    for (int i = 0; i < n; ++i) {
        if ((int)C[i].size() != n) fail(Errc::DimensionMismatch, "matrix is not square");
        Series ui(n, prec.x_deg);
        for (int j = 0; j < n; ++j) {
            Scalar cij = C[i][j];
            if (i == j) cij -= Scalar(1);
            if (!(cij == Scalar(0)))
                ui = ui + Series::monomial(n, midx_unit(n, j), cij, prec.x_deg);
        }
        u.push_back(std::move(ui));
    }
    return shift_operator(u, prec).scaled(c0);
}

std::vector<Series> abhyankar_inverse(const std::vector<Series>& F, int out_deg) {
    int n = 0;
    std::vector<Series> H;
    validate_map(F, out_deg, &n, &H);

    if (jacobian_is_one(F, n, out_deg)) {
        std::vector<Series> G;
        for (int i = 0; i < n; ++i)
            G.push_back(abhyankar_sum(Series::variable(n, i, out_deg), H, n, out_deg));
        return G;
    }

    // General formal inverse, solved degree by degree: the degree-(d+1)
    // correction of G_i is the degree-(d+1) defect of x_i - G_i(F), because
    // F is the identity to first order.
    std::vector<Series> G, Ftr;
    for (int i = 0; i < n; ++i) {
        G.push_back(Series::variable(n, i, out_deg));
        Ftr.push_back(F[i].truncated(out_deg));
    }
    for (int d = 1; d < out_deg; ++d) {
        for (int i = 0; i < n; ++i) {
            Series defect = Series::variable(n, i, out_deg) - Series::compose(G[i], Ftr);
            G[i] = G[i] + defect.graded_part(d + 1);
        }
    }
    return G;
}

Series abhyankar_transport(const Series& composite, const std::vector<Series>& F,
                           int out_deg) {
    int n = 0;
    std::vector<Series> H;
    validate_map(F, out_deg, &n, &H);
    if (composite.n() != n) fail(Errc::DimensionMismatch, "series arity mismatch");
    if (composite.prec() < out_deg)
        fail(Errc::PrecisionExhausted, "composite needs precision >= out_deg");

    if (jacobian_is_one(F, n, out_deg))
        return abhyankar_sum(composite, H, n, out_deg);
    std::vector<Series> G = abhyankar_inverse(F, out_deg);
    return Series::compose(composite.truncated(out_deg), G);
}

} // namespace ssk
