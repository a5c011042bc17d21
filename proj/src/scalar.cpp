#include "ssk/scalar.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>

namespace ssk {

bool Scalar::order_lifting_enabled = true;

const char* errc_name(Errc c) {
    switch (c) {
        case Errc::DivisionByZero: return "DivisionByZero";
        case Errc::IncompatibleCyclotomicOrders: return "IncompatibleCyclotomicOrders";
        case Errc::NotAUnit: return "NotAUnit";
        case Errc::CompositionNotNilpotent: return "CompositionNotNilpotent";
        case Errc::DimensionMismatch: return "DimensionMismatch";
        case Errc::KindIncompatible: return "KindIncompatible";
        case Errc::PrecisionExhausted: return "PrecisionExhausted";
        case Errc::GammaUndefined: return "GammaUndefined";
        case Errc::NotMonic: return "NotMonic";
        case Errc::GammaShapeMismatch: return "GammaShapeMismatch";
        case Errc::NotCommuting: return "NotCommuting";
        case Errc::NotQuasiElliptic: return "NotQuasiElliptic";
        case Errc::SystemInconsistent: return "SystemInconsistent";
        case Errc::NotRegular: return "NotRegular";
        case Errc::OrderMismatch: return "OrderMismatch";
        case Errc::CompatibilityFailure: return "CompatibilityFailure";
        case Errc::NotStabilizing: return "NotStabilizing";
        case Errc::HilbertViolation: return "HilbertViolation";
        case Errc::SupportNotFull: return "SupportNotFull";
        case Errc::NotNilpotentShift: return "NotNilpotentShift";
        case Errc::SingularMatrix: return "SingularMatrix";
        case Errc::JacobianNotOne: return "JacobianNotOne";
        case Errc::ValuationTooLow: return "ValuationTooLow";
        case Errc::BudgetExhausted: return "BudgetExhausted";
        case Errc::ParseError: return "ParseError";
    }
    return "UnknownError";
}

Rat rat(long num, long den) {
    if (den == 0) fail(Errc::DivisionByZero, "rational with zero denominator");
    Rat r(num, den);
    r.canonicalize();
    return r;
}

std::string rat_to_string(const Rat& r) {
    std::ostringstream os;
    os << r.get_num();
    if (r.get_den() != 1) os << "/" << r.get_den();
    return os.str();
}

unsigned euler_phi(unsigned k) {
    unsigned result = k;
    for (unsigned p = 2; p * p <= k; ++p) {
        if (k % p == 0) {
            while (k % p == 0) k /= p;
            result -= result / p;
        }
    }
    if (k > 1) result -= result / k;
    return result;
}

namespace {

using Poly = std::vector<Rat>; // dense, constant term first

void poly_trim(Poly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

Poly poly_mul(const Poly& a, const Poly& b) {
    if (a.empty() || b.empty()) return {};
    Poly r(a.size() + b.size() - 1, Rat(0));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    poly_trim(r);
    return r;
}

// In-place remainder of a modulo monic b.
void poly_mod(Poly& a, const Poly& b) {
    poly_trim(a);
    while (a.size() >= b.size()) {
        Rat lead = a.back(); // b is monic
        size_t shift = a.size() - b.size();
        for (size_t j = 0; j < b.size(); ++j) a[shift + j] -= lead * b[j];
        poly_trim(a);
    }
}

// Quotient of a by monic b, assuming exact division.
Poly poly_div_exact(Poly a, const Poly& b) {
    poly_trim(a);
    if (a.empty()) return {};
    Poly q(a.size() - b.size() + 1, Rat(0));
    while (a.size() >= b.size()) {
        Rat lead = a.back();
        size_t shift = a.size() - b.size();
        q[shift] = lead;
        for (size_t j = 0; j < b.size(); ++j) a[shift + j] -= lead * b[j];
        poly_trim(a);
    }
    return q;
}

} // namespace

const std::vector<Rat>& cyclotomic_poly(unsigned k) {
    static std::map<unsigned, Poly> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(k);
    if (it != cache.end()) return it->second;
    // x^k - 1 = product of Phi_d over d | k; divide out all proper divisors.
    Poly num(k + 1, Rat(0));
    num[0] = -1;
    num[k] = 1;
    for (unsigned d = 1; d < k; ++d) {
        if (k % d != 0) continue;
        auto jt = cache.find(d);
        if (jt == cache.end()) {
            // Recurse without the lock being re-entered: compute iteratively.
            // Divisors are processed in increasing order, so Phi_d for d < k is
            // either cached already or computable the same way.
            Poly nd(d + 1, Rat(0));
            nd[0] = -1;
            nd[d] = 1;
            for (unsigned e = 1; e < d; ++e)
                if (d % e == 0) nd = poly_div_exact(std::move(nd), cache.at(e));
            jt = cache.emplace(d, std::move(nd)).first;
        }
        num = poly_div_exact(std::move(num), jt->second);
    }
    return cache.emplace(k, std::move(num)).first->second;
}

Scalar Scalar::from_raw(unsigned k, std::vector<Rat> raw) {
    Scalar s;
    if (k == 1) {
        Rat sum(0);
        for (auto& c : raw) sum += c;
        s.k_ = 1;
        s.c_ = {sum};
        return s;
    }
    const Poly& phi = cyclotomic_poly(k);
    poly_mod(raw, phi);
    raw.resize(phi.size() - 1, Rat(0));
    s.k_ = k;
    s.c_ = std::move(raw);
    s.collapse();
    return s;
}

void Scalar::collapse() {
    if (k_ == 1) return;
    for (size_t i = 1; i < c_.size(); ++i)
        if (c_[i] != 0) return;
    Rat c0 = c_.empty() ? Rat(0) : c_[0];
    k_ = 1;
    c_ = {c0};
}

Scalar Scalar::zeta(unsigned k) {
    if (k == 0) fail(Errc::ParseError, "zeta order must be positive");
    std::vector<Rat> raw(k == 1 ? 1 : 2, Rat(0));
    if (k == 1)
        raw[0] = 1;
    else
        raw[1] = 1;
    return from_raw(k, std::move(raw));
}

Scalar Scalar::cyclotomic(unsigned k, std::vector<Rat> coeffs) {
    if (k == 0) fail(Errc::ParseError, "cyclotomic order must be positive");
    return from_raw(k, std::move(coeffs));
}

const Rat& Scalar::rational() const {
    if (k_ != 1) fail(Errc::IncompatibleCyclotomicOrders, "scalar is not rational: " + to_string());
    return c_[0];
}

bool Scalar::is_zero() const {
    for (const auto& c : c_)
        if (c != 0) return false;
    return true;
}

bool Scalar::is_one() const { return k_ == 1 && c_[0] == 1; }

Scalar Scalar::lifted_to(unsigned m) const {
    if (m == k_) return *this;
    // zeta_k = zeta_m^(m/k); expand the power basis and re-reduce.
    unsigned step = m / k_;
    std::vector<Rat> raw((c_.size() - 1) * step + 1, Rat(0));
    for (size_t i = 0; i < c_.size(); ++i) raw[i * step] = c_[i];
    return from_raw(m, std::move(raw));
}

namespace {
unsigned common_order(unsigned a, unsigned b) {
    if (a == b) return a;
    if (!Scalar::order_lifting_enabled && a != 1 && b != 1)
        fail(Errc::IncompatibleCyclotomicOrders,
             "orders " + std::to_string(a) + " and " + std::to_string(b) + " with lifting disabled");
    return std::lcm(a, b);
}
} // namespace

Scalar Scalar::operator-() const {
    Scalar r = *this;
    for (auto& c : r.c_) c = -c;
    return r;
}

Scalar& Scalar::operator+=(const Scalar& o) {
    unsigned m = common_order(k_, o.k_);
    Scalar a = lifted_to(m), b = o.lifted_to(m);
    // Lifting re-collapses rational values, so the two coefficient vectors may
    // have different lengths; pad to the longer one before adding.
    std::vector<Rat> raw(std::max(a.c_.size(), b.c_.size()), Rat(0));
    for (size_t i = 0; i < a.c_.size(); ++i) raw[i] = a.c_[i];
    for (size_t i = 0; i < b.c_.size(); ++i) raw[i] += b.c_[i];
    return *this = from_raw(m, std::move(raw));
}

Scalar& Scalar::operator-=(const Scalar& o) { return *this += -o; }

Scalar& Scalar::operator*=(const Scalar& o) {
    unsigned m = common_order(k_, o.k_);
    Scalar a = lifted_to(m), b = o.lifted_to(m);
    if (m == 1) {
        a.c_[0] *= b.c_[0];
        return *this = a;
    }
    std::vector<Rat> raw = poly_mul(a.c_, b.c_);
    return *this = from_raw(m, std::move(raw));
}

Scalar& Scalar::operator/=(const Scalar& o) { return *this *= o.inverse(); }

Scalar Scalar::inverse() const {
    if (is_zero()) fail(Errc::DivisionByZero, "inverse of zero scalar");
    if (k_ == 1) return Scalar(Rat(1) / c_[0]);
    // Extended Euclid in Q[x]: u*f + v*Phi_k = 1, so u is the inverse mod Phi_k.
    Poly r0 = cyclotomic_poly(k_), r1 = c_;
    poly_trim(r1);
    Poly u0 = {}, u1 = {Rat(1)};
    while (true) {
        poly_trim(r1);
        if (r1.size() == 1) break; // nonzero constant: gcd reached
        // Divide r0 by r1 (r1 need not be monic).
        Poly q(r0.size() >= r1.size() ? r0.size() - r1.size() + 1 : 0, Rat(0));
        Poly rem = r0;
        while (rem.size() >= r1.size()) {
            Rat lead = rem.back() / r1.back();
            size_t shift = rem.size() - r1.size();
            q[shift] = lead;
            for (size_t j = 0; j < r1.size(); ++j) rem[shift + j] -= lead * r1[j];
            poly_trim(rem);
        }
        Poly qu1 = poly_mul(q, u1);
        Poly nu(std::max(u0.size(), qu1.size()), Rat(0));
        for (size_t i = 0; i < u0.size(); ++i) nu[i] += u0[i];
        for (size_t i = 0; i < qu1.size(); ++i) nu[i] -= qu1[i];
        poly_trim(nu);
        u0 = std::move(u1);
        u1 = std::move(nu);
        r0 = std::move(r1);
        r1 = std::move(rem);
    }
    Rat c = r1[0];
    for (auto& x : u1) x /= c;
    return from_raw(k_, std::move(u1));
}

bool Scalar::operator==(const Scalar& o) const {
    // Canonical forms: equal values have equal (k, coeffs) thanks to collapse();
    // different surviving orders can still coincide only if both are lifted.
    if (k_ == o.k_) return c_ == o.c_;
    unsigned m = std::lcm(k_, o.k_);
    return lifted_to(m).c_ == o.lifted_to(m).c_;
}

bool Scalar::operator<(const Scalar& o) const {
    if (k_ != o.k_) return k_ < o.k_;
    for (size_t i = 0; i < c_.size(); ++i) {
        int s = cmp(c_[i], o.c_[i]);
        if (s != 0) return s < 0;
    }
    return false;
}

std::string Scalar::to_string() const {
    if (k_ == 1) return rat_to_string(c_[0]);
    std::string s = "cyc(" + std::to_string(k_) + ")[";
    for (size_t i = 0; i < c_.size(); ++i) {
        if (i) s += ",";
        s += rat_to_string(c_[i]);
    }
    return s + "]";
}

Scalar Scalar::parse(const std::string& s) {
    auto parse_rat = [](const std::string& t) -> Rat {
        if (t.empty()) fail(Errc::ParseError, "empty rational");
        for (size_t i = 0; i < t.size(); ++i) {
            char ch = t[i];
            bool ok = (ch >= '0' && ch <= '9') || ch == '/' || (ch == '-' && (i == 0 || t[i - 1] == '/'));
            if (!ok) fail(Errc::ParseError, "bad rational '" + t + "'");
        }
        try {
            Rat r(t);
            if (r.get_den() == 0) fail(Errc::ParseError, "zero denominator in '" + t + "'");
            r.canonicalize();
            return r;
        } catch (const std::invalid_argument&) {
            fail(Errc::ParseError, "bad rational '" + t + "'");
        }
    };
    if (s.rfind("cyc(", 0) == 0) {
        size_t close = s.find(')');
        size_t open_br = s.find('[', close);
        if (close == std::string::npos || open_br == std::string::npos || s.back() != ']')
            fail(Errc::ParseError, "bad cyclotomic scalar '" + s + "'");
        unsigned k = 0;
        try {
            k = static_cast<unsigned>(std::stoul(s.substr(4, close - 4)));
        } catch (const std::exception&) {
            fail(Errc::ParseError, "bad cyclotomic order in '" + s + "'");
        }
        if (k == 0) fail(Errc::ParseError, "cyclotomic order must be positive");
        std::vector<Rat> coeffs;
        std::string body = s.substr(open_br + 1, s.size() - open_br - 2);
        if (!body.empty()) {
            std::stringstream ss(body);
            std::string tok;
            while (std::getline(ss, tok, ',')) coeffs.push_back(parse_rat(tok));
        }
        if (coeffs.size() != euler_phi(k))
            fail(Errc::ParseError, "cyclotomic scalar needs phi(k) coefficients");
        return cyclotomic(k, std::move(coeffs));
    }
    return Scalar(parse_rat(s));
}

} // namespace ssk
