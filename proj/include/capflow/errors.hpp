#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace capflow {

enum class Errc {
    InvalidParameter,
    ConfigParse,
    BracketEmpty,
    InfeasibleMoments,
    NoNegativeRoot,
    RootCountViolation,
    CoefficientInvalid,
    OutOfUnitInterval,
    ComplexRoots,
    NoSignChange,
    MaxIterationsExceeded,
    NonPositiveFunds,
    FeasibilityFailed,
    EmptySeries,
    LengthMismatch,
    StreamMismatch,
};

inline std::string_view errc_name(Errc c) {
    switch (c) {
    case Errc::InvalidParameter: return "InvalidParameter";
    case Errc::ConfigParse: return "ConfigParse";
    case Errc::BracketEmpty: return "BracketEmpty";
    case Errc::InfeasibleMoments: return "InfeasibleMoments";
    case Errc::NoNegativeRoot: return "NoNegativeRoot";
    case Errc::RootCountViolation: return "RootCountViolation";
    case Errc::CoefficientInvalid: return "CoefficientInvalid";
    case Errc::OutOfUnitInterval: return "OutOfUnitInterval";
    case Errc::ComplexRoots: return "ComplexRoots";
    case Errc::NoSignChange: return "NoSignChange";
    case Errc::MaxIterationsExceeded: return "MaxIterationsExceeded";
    case Errc::NonPositiveFunds: return "NonPositiveFunds";
    case Errc::FeasibilityFailed: return "FeasibilityFailed";
    case Errc::EmptySeries: return "EmptySeries";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::StreamMismatch: return "StreamMismatch";
    }
    return "Unknown";
}

/// Base error for every failure the model raises. Carries a code and, once a
/// simulation driver has seen it, the period index and arm label it came from.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    Errc code() const noexcept { return code_; }
    std::optional<int> period() const noexcept { return period_; }
    const std::string& context() const noexcept { return context_; }

    void set_period(int t) { period_ = t; }
    void add_context(std::string label) {
        context_ = context_.empty() ? std::move(label) : std::move(label) + "/" + context_;
    }

    /// what() plus the attached period/context, for diagnostics.
    std::string describe() const {
        std::string s{errc_name(code_)};
        if (!context_.empty()) s += " [" + context_ + "]";
        if (period_) s += " at period " + std::to_string(*period_);
        s += ": ";
        s += what();
        return s;
    }

    /// Solver failures map to CLI exit code 3; feasibility failures to 2.
    bool is_feasibility() const noexcept {
        return code_ == Errc::FeasibilityFailed || code_ == Errc::BracketEmpty ||
               code_ == Errc::InfeasibleMoments;
    }

private:
    Errc code_;
    std::optional<int> period_;
    std::string context_;
};

/// A policy fraction left the unit interval: a corner solution the interior
/// formulas do not describe.
class OutOfUnitInterval : public Error {
public:
    enum class Side { Lender, Borrower };

    OutOfUnitInterval(Side side, double value)
        : Error(Errc::OutOfUnitInterval,
                std::string(side == Side::Lender ? "mu*" : "lambda*") +
                    " = " + std::to_string(value) + " outside (0,1)"),
          side_(side), value_(value) {}

    Side side() const noexcept { return side_; }
    double value() const noexcept { return value_; }

private:
    Side side_;
    double value_;
};

/// Loan-market excess supply has no sign change over the admissible rate range.
class NoSignChange : public Error {
public:
    NoSignChange(double r_lo, double r_hi, double l1_lo, double l1_hi)
        : Error(Errc::NoSignChange,
                "L1(" + std::to_string(r_lo) + ") = " + std::to_string(l1_lo) +
                    ", L1(" + std::to_string(r_hi) + ") = " + std::to_string(l1_hi)),
          r_lo_(r_lo), r_hi_(r_hi), l1_lo_(l1_lo), l1_hi_(l1_hi) {}

    double rate_lo() const noexcept { return r_lo_; }
    double rate_hi() const noexcept { return r_hi_; }
    double l1_lo() const noexcept { return l1_lo_; }
    double l1_hi() const noexcept { return l1_hi_; }

private:
    double r_lo_, r_hi_, l1_lo_, l1_hi_;
};

} // namespace capflow
