#pragma once

#include <stdexcept>
#include <string>

namespace ssk {

// Every failure the kernel can report. The CLI maps these to exit codes:
// ParseError -> 4, PrecisionExhausted -> 3, everything else -> 2.
enum class Errc {
    DivisionByZero,
    IncompatibleCyclotomicOrders,
    NotAUnit,
    CompositionNotNilpotent,
    DimensionMismatch,
    KindIncompatible,
    PrecisionExhausted,
    GammaUndefined,
    NotMonic,
    GammaShapeMismatch,
    NotCommuting,
    NotQuasiElliptic,
    SystemInconsistent,
    NotRegular,
    OrderMismatch,
    CompatibilityFailure,
    NotStabilizing,
    HilbertViolation,
    SupportNotFull,
    NotNilpotentShift,
    SingularMatrix,
    JacobianNotOne,
    ValuationTooLow,
    BudgetExhausted,
    ParseError,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
public:
    Error(Errc c, const std::string& what)
        : std::runtime_error(std::string(errc_name(c)) + ": " + what), code_(c) {}
    Errc code() const { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc c, const std::string& what) { throw Error(c, what); }

} // namespace ssk
