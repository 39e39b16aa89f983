#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kitwpa {

enum class ErrorCode {
    // input / data problems
    InvalidInput,
    NoPlateau,
    NoCrossing,
    NonPositiveTc,
    NonPositiveBeta,
    NonPositiveIStar,
    EmptyGrid,
    GridOutOfRange,
    // computation problems
    NegativeResult,
    IncomparableMethods,
    NoResonance,
    FitDiverged,
    NonlinearityUndetectable,
    NegativeLk,
    DesignInfeasible,
    SingularChi,
    FrequencyInStopband,
    NoStopbandInBand,
    StepFailure,
    BudgetExceeded,
    NotSteady,
};

std::string_view to_string(ErrorCode code);

// True for codes caused by malformed or out-of-contract inputs (CLI exit 2);
// everything else is a computation failure (CLI exit 3).
bool is_input_error(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace kitwpa
