#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ldl {

enum class ErrorCode {
    // distribution / dataset validation
    NegativeDegree,
    BadSum,
    TooShort,
    IndexOutOfRange,
    EmptySet,
    EmptyDataset,
    DimensionMismatch,
    NonFiniteInput,
    InvalidArgument,
    // evaluation
    EmptyTestSet,
    MissingMeasure,
    // optimisation
    NoSolution,
    NotDescentDirection,
    LineSearchFailed,
    CurvatureViolation,
    Diverged,
    // learners
    BadK,
    ZeroTotalWeight,
    EmptyClass,
    NotPositiveDefinite,
    // datagen
    DegenerateZero,
    WrongCellCount,
    WrongLabelCount,
    // io
    ParseError,
    InvariantViolation,
    TooFewExamples,
    UnknownAlgorithmTag,
    VersionMismatch,
    IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Broad failure class, used by the CLI to pick an exit code.
enum class ErrorCategory { Data, Convergence, Usage };

ErrorCategory category(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message),
          code_(code),
          detail_(message) {}

    ErrorCode code() const noexcept { return code_; }
    /// Message without the code prefix.
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    std::string detail_;
};

}  // namespace ldl
