#include "ssk/linsolve.hpp"

#include <algorithm>

#include "ssk/errors.hpp"

namespace ssk {

namespace {

// Subtract factor * src from dst, dropping cancelled entries.
void axpy(SparseRow& dst, const Scalar& factor, const SparseRow& src) {
    if (factor.is_zero()) return;
    for (const auto& [col, v] : src) {
        auto it = dst.find(col);
        if (it == dst.end()) {
            dst.emplace(col, -(factor * v));
        } else {
            it->second -= factor * v;
            if (it->second.is_zero()) dst.erase(it);
        }
    }
}

struct Echelon {
    // pivot column -> (row, rhs); rows kept fully reduced against each other
    std::map<int, std::pair<SparseRow, Scalar>> pivots;
    bool contradiction = false;

    void add(SparseRow row, Scalar rhs) {
        for (auto it = row.begin(); it != row.end();) {
            auto pv = pivots.find(it->first);
            if (pv == pivots.end()) {
                ++it;
                continue;
            }
            Scalar f = it->second;
            axpy(row, f, pv->second.first);
            rhs -= f * pv->second.second;
            it = row.upper_bound(pv->first);
        }
        if (row.empty()) {
            if (!rhs.is_zero()) contradiction = true;
            return;
        }
        int pcol = row.begin()->first;
        Scalar inv = row.begin()->second.inverse();
        for (auto& [c, v] : row) v *= inv;
        rhs *= inv;
        for (auto& [c, pr] : pivots) {
            auto hit = pr.first.find(pcol);
            if (hit == pr.first.end()) continue;
            Scalar f = hit->second;
            axpy(pr.first, f, row);
            pr.second -= f * rhs;
        }
        pivots.emplace(pcol, std::make_pair(std::move(row), std::move(rhs)));
    }
};

} // namespace

LinearSolution solve_linear(const std::vector<SparseRow>& rows,
                            const std::vector<Scalar>& rhs,
                            int ncols,
                            bool want_nullspace) {
    if (rows.size() != rhs.size())
        fail(Errc::DimensionMismatch, "row/rhs count mismatch in linear solve");
    Echelon e;
    for (size_t i = 0; i < rows.size(); ++i) {
        e.add(rows[i], rhs[i]);
        if (e.contradiction) return LinearSolution{};
    }
    LinearSolution sol;
    sol.consistent = true;
    sol.x.assign(ncols, Scalar(0));
    for (const auto& [col, pr] : e.pivots) {
        if (col >= ncols)
            fail(Errc::DimensionMismatch, "pivot column beyond declared width");
        sol.pivot_cols.push_back(col);
        sol.x[col] = pr.second;
    }
    if (want_nullspace) {
        std::vector<bool> is_pivot(ncols, false);
        for (int c : sol.pivot_cols) is_pivot[c] = true;
        for (int f = 0; f < ncols; ++f) {
            if (is_pivot[f]) continue;
            std::vector<Scalar> v(ncols, Scalar(0));
            v[f] = Scalar(1);
            for (const auto& [col, pr] : e.pivots) {
                auto it = pr.first.find(f);
                if (it != pr.first.end()) v[col] = -it->second;
            }
            sol.nullspace.push_back(std::move(v));
        }
    }
    return sol;
}

int rank_of_rows(const std::vector<SparseRow>& rows) {
    Echelon e;
    for (const auto& r : rows) e.add(r, Scalar(0));
    return (int)e.pivots.size();
}

std::vector<std::vector<Scalar>> matrix_inverse(std::vector<std::vector<Scalar>> M) {
    const size_t n = M.size();
    for (auto& row : M)
        if (row.size() != n) fail(Errc::DimensionMismatch, "matrix is not square");
    std::vector<std::vector<Scalar>> inv(n, std::vector<Scalar>(n, Scalar(0)));
    for (size_t i = 0; i < n; ++i) inv[i][i] = Scalar(1);

    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        while (piv < n && M[piv][col] == Scalar(0)) ++piv;
        if (piv == n) fail(Errc::SingularMatrix, "matrix has no inverse");
        std::swap(M[piv], M[col]);
        std::swap(inv[piv], inv[col]);
        Scalar d = M[col][col].inverse();
        for (size_t j = 0; j < n; ++j) {
            M[col][j] *= d;
            inv[col][j] *= d;
        }
        for (size_t r = 0; r < n; ++r) {
            if (r == col || M[r][col] == Scalar(0)) continue;
            Scalar f = M[r][col];
            for (size_t j = 0; j < n; ++j) {
                M[r][j] -= f * M[col][j];
                inv[r][j] -= f * inv[col][j];
            }
        }
    }
    return inv;
}

} // namespace ssk
