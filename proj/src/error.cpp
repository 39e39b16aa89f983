#include "kitwpa/error.hpp"

namespace kitwpa {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidInput: return "InvalidInput";
        case ErrorCode::NoPlateau: return "NoPlateau";
        case ErrorCode::NoCrossing: return "NoCrossing";
        case ErrorCode::NonPositiveTc: return "NonPositiveTc";
        case ErrorCode::NonPositiveBeta: return "NonPositiveBeta";
        case ErrorCode::NonPositiveIStar: return "NonPositiveIStar";
        case ErrorCode::EmptyGrid: return "EmptyGrid";
        case ErrorCode::GridOutOfRange: return "GridOutOfRange";
        case ErrorCode::NegativeResult: return "NegativeResult";
        case ErrorCode::IncomparableMethods: return "IncomparableMethods";
        case ErrorCode::NoResonance: return "NoResonance";
        case ErrorCode::FitDiverged: return "FitDiverged";
        case ErrorCode::NonlinearityUndetectable: return "NonlinearityUndetectable";
        case ErrorCode::NegativeLk: return "NegativeLk";
        case ErrorCode::DesignInfeasible: return "DesignInfeasible";
        case ErrorCode::SingularChi: return "SingularChi";
        case ErrorCode::FrequencyInStopband: return "FrequencyInStopband";
        case ErrorCode::NoStopbandInBand: return "NoStopbandInBand";
        case ErrorCode::StepFailure: return "StepFailure";
        case ErrorCode::BudgetExceeded: return "BudgetExceeded";
        case ErrorCode::NotSteady: return "NotSteady";
    }
    return "Unknown";
}

bool is_input_error(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidInput:
        case ErrorCode::NonPositiveTc:
        case ErrorCode::NonPositiveBeta:
        case ErrorCode::NonPositiveIStar:
        case ErrorCode::EmptyGrid:
        case ErrorCode::GridOutOfRange:
            return true;
        default:
            return false;
    }
}

}  // namespace kitwpa
