#pragma once

#include <stdexcept>
#include <string>

namespace evtwalk {

// Base for every error thrown by this library. The CLI maps subtypes to
// exit codes: ConfigError -> 1, IoError -> 3, everything else -> 2.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

// Generic precondition violation without a more specific name below.
struct InvalidArgument : Error { using Error::Error; };

// generator measures
struct EmptySupport : Error { using Error::Error; };
struct NonUnimodular : Error { using Error::Error; };
struct NonIntegerEntries : Error { using Error::Error; };
struct BadWeights : Error { using Error::Error; };

// torus
struct InfiniteDelta : Error { using Error::Error; };
struct WordLimitExceeded : Error { using Error::Error; };
struct BallTooLarge : Error { using Error::Error; };
struct EntryOverflow : Error { using Error::Error; };

// lattices
struct IllConditioned : Error { using Error::Error; };
struct BudgetExceeded : Error { using Error::Error; };
struct RejectionBudgetExceeded : Error { using Error::Error; };
struct DetCollapsed : Error { using Error::Error; };
struct DetDrifted : Error { using Error::Error; };
struct ReductionDiverged : Error { using Error::Error; };

// extreme-value bookkeeping
struct StreamExhausted : Error { using Error::Error; };
struct EmptySample : Error { using Error::Error; };
struct MissingFit : Error { using Error::Error; };

// diagnostics
struct InsufficientExceedances : Error { using Error::Error; };
struct InsufficientTrajectories : Error { using Error::Error; };

} // namespace evtwalk
