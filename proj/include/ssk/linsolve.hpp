#pragma once

#include <map>
#include <vector>

#include "ssk/scalar.hpp"

namespace ssk {

// Exact linear algebra over Scalar on sparse rows. Columns are dense integer
// indices; use ColIndex to map structured keys to columns.

using SparseRow = std::map<int, Scalar>;

template <class K>
struct ColIndex {
    std::map<K, int> index;
    std::vector<K> keys;
    int of(const K& k) {
        auto it = index.find(k);
        if (it != index.end()) return it->second;
        int id = (int)keys.size();
        index.emplace(k, id);
        keys.push_back(k);
        return id;
    }
    int size() const { return (int)keys.size(); }
};

struct LinearSolution {
    bool consistent = false;
    std::vector<Scalar> x;               // one solution, free variables set to 0
    std::vector<int> pivot_cols;
    std::vector<std::vector<Scalar>> nullspace; // basis, only when requested
};

// Solves A x = b by incremental reduced row echelon form. ncols fixes the
// unknown count (columns mentioned by no row are free).
LinearSolution solve_linear(const std::vector<SparseRow>& rows,
                            const std::vector<Scalar>& rhs,
                            int ncols,
                            bool want_nullspace = false);

// Rank of the row set; consumes nothing, exact.
int rank_of_rows(const std::vector<SparseRow>& rows);

// Dense inverse of a square matrix; throws SingularMatrix.
std::vector<std::vector<Scalar>> matrix_inverse(std::vector<std::vector<Scalar>> M);

} // namespace ssk
