#pragma once

#include <stdexcept>

namespace weakmeas {

// Hilbert-space dimensions disagree between objects that must share one.
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A vector required to have unit norm does not.
struct NormalizationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NotHermitianError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NotUnitaryError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NotProjectorError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A projector pair expected to satisfy P Q = 0 does not.
struct NotOrthogonalError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct IndexError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

// Transition amplitude <f|U|in> below the construction threshold, so
// postselected quantities are undefined.
struct VanishingAmplitudeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Scenario document parse or validation failure; the message names the field.
struct DocumentError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Base for failures of a statistical procedure on otherwise valid input.
struct StatisticalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Postselection succeeds with probability too small to condition on.
struct ZeroPostselectionError : StatisticalError {
    using StatisticalError::StatisticalError;
};

struct ZeroNormError : StatisticalError {
    using StatisticalError::StatisticalError;
};

// Fewer than two trials were accepted; no standard error can be formed.
struct TooFewAcceptedError : StatisticalError {
    using StatisticalError::StatisticalError;
};

}  // namespace weakmeas
