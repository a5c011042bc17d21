#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ssk/scalar.hpp"

namespace ssk {

// Multi-index over the n variables. On the x side all entries are >= 0; on the
// derivative side the last entry may go negative for the pseudodifferential
// kinds. Axis numbering is 0-based throughout the library; the CLI converts
// from the 1-based convention used in the file formats' documentation.
using MIdx = std::vector<int32_t>;

long midx_sum(const MIdx& a);
bool midx_is_zero(const MIdx& a);
MIdx midx_zero(int n);
MIdx midx_unit(int n, int axis, int32_t value = 1);
MIdx midx_add(const MIdx& a, const MIdx& b);
MIdx midx_sub(const MIdx& a, const MIdx& b);
bool midx_leq(const MIdx& a, const MIdx& b); // componentwise
std::string midx_to_string(const MIdx& a);

// -1 / 0 / +1 comparisons.
int lex_cmp(const MIdx& a, const MIdx& b);
// Anti-lexicographic: the last differing entry decides.
int antilex_cmp(const MIdx& a, const MIdx& b);

// (total degree, then lex) ascending; the canonical order for x-indices.
struct DegLexLess {
    bool operator()(const MIdx& a, const MIdx& b) const;
};

Rat factorial(long m);
Rat midx_factorial(const MIdx& a);
// Generalized binomial C(s, t) for integer s of any sign, t >= 0.
Rat binom(long s, long t);

// All x-multi-indices of the given total degree / up to the given total
// degree, in DegLexLess order.
std::vector<MIdx> indices_of_degree(int n, int deg);
std::vector<MIdx> indices_up_to_degree(int n, int deg);

} // namespace ssk
