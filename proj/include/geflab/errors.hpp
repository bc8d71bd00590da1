#pragma once

#include <stdexcept>
#include <string>

namespace geflab {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Covariance could not be factored even with the maximal jitter; the input is
// an invalid (or degenerate) covariance matrix.
struct NotPositiveSemidefinite : Error { using Error::Error; };

// The given-block of a conditioning problem is numerically singular, e.g.
// conditioning a pair of field values at coinciding points.
struct SingularConditioning : Error { using Error::Error; };

// A Monte Carlo functional returned a non-finite value.
struct NonFiniteSample : Error { using Error::Error; };

// Requested working radius exceeds the range where stable evaluation of the
// truncated series is guaranteed.
struct RadiusTooLarge : Error { using Error::Error; };

// Evaluation point outside the stable disk of a sample/evaluator.
struct OutsideStableDisk : Error { using Error::Error; };

// Real-derivative order beyond the configured cap.
struct OrderTooHigh : Error { using Error::Error; };

// A landmark search exceeded its global iteration budget.
struct SearchBudgetExceeded : Error { using Error::Error; };

// A counting disk is not contained in the landmark-set disk.
struct DiskOutOfBounds : Error { using Error::Error; };

// Two-point denominator requested on the degenerate diagonal z == w.
struct DegenerateDiagonal : Error { using Error::Error; };

// A pair-count experiment observed no events at any radius.
struct BudgetTooSmall : Error { using Error::Error; };

// Too few usable rows for an exponent fit.
struct InsufficientSignal : Error { using Error::Error; };

// Spectrogram grid extends outside the (edge-guarded) signal span.
struct GridOutsideSignal : Error { using Error::Error; };

// Config file parse/validation failure; message carries file:line context.
struct ConfigError : Error { using Error::Error; };

} // namespace geflab
