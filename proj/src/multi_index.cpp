#include "ssk/multi_index.hpp"

#include <functional>

#include "ssk/errors.hpp"

namespace ssk {

long midx_sum(const MIdx& a) {
    long s = 0;
    for (auto v : a) s += v;
    return s;
}

bool midx_is_zero(const MIdx& a) {
    for (auto v : a)
        if (v != 0) return false;
    return true;
}

MIdx midx_zero(int n) { return MIdx(static_cast<size_t>(n), 0); }

MIdx midx_unit(int n, int axis, int32_t value) {
    if (axis < 0 || axis >= n) fail(Errc::DimensionMismatch, "axis out of range");
    MIdx e = midx_zero(n);
    e[static_cast<size_t>(axis)] = value;
    return e;
}

MIdx midx_add(const MIdx& a, const MIdx& b) {
    MIdx r = a;
    for (size_t i = 0; i < r.size(); ++i) r[i] += b[i];
    return r;
}

MIdx midx_sub(const MIdx& a, const MIdx& b) {
    MIdx r = a;
    for (size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
    return r;
}

bool midx_leq(const MIdx& a, const MIdx& b) {
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i] > b[i]) return false;
    return true;
}

std::string midx_to_string(const MIdx& a) {
    std::string s = "(";
    for (size_t i = 0; i < a.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(a[i]);
    }
    return s + ")";
}

int lex_cmp(const MIdx& a, const MIdx& b) {
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
    }
    return 0;
}

int antilex_cmp(const MIdx& a, const MIdx& b) {
    for (size_t i = a.size(); i-- > 0;) {
        if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
    }
    return 0;
}

bool DegLexLess::operator()(const MIdx& a, const MIdx& b) const {
    long sa = midx_sum(a), sb = midx_sum(b);
    if (sa != sb) return sa < sb;
    return lex_cmp(a, b) < 0;
}

Rat factorial(long m) {
    Rat r(1);
    for (long i = 2; i <= m; ++i) r *= i;
    return r;
}

Rat midx_factorial(const MIdx& a) {
    Rat r(1);
    for (auto v : a) r *= factorial(v);
    return r;
}

Rat binom(long s, long t) {
    if (t < 0) return Rat(0);
    Rat num(1);
    for (long j = 0; j < t; ++j) num *= Rat(s - j);
    return num / factorial(t);
}

std::vector<MIdx> indices_of_degree(int n, int deg) {
    std::vector<MIdx> out;
    if (deg < 0) return out;
    MIdx cur = midx_zero(n);
    // Walk all compositions of deg into n parts in lex order.
    std::function<void(int, int)> rec = [&](int axis, int rem) {
        if (axis == n - 1) {
            cur[static_cast<size_t>(axis)] = rem;
            out.push_back(cur);
            return;
        }
        for (int v = 0; v <= rem; ++v) {
            cur[static_cast<size_t>(axis)] = v;
            rec(axis + 1, rem - v);
        }
    };
    if (n == 0) {
        if (deg == 0) out.push_back({});
        return out;
    }
    rec(0, deg);
    return out;
}

std::vector<MIdx> indices_up_to_degree(int n, int deg) {
    std::vector<MIdx> out;
    for (int d = 0; d <= deg; ++d) {
        auto layer = indices_of_degree(n, d);
        out.insert(out.end(), layer.begin(), layer.end());
    }
    return out;
}

} // namespace ssk
