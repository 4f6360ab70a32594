#pragma once

#include <stdexcept>
#include <string>

namespace causent {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad user input: dimensions, unknown ids, malformed arguments.
struct InvalidArgumentError : Error {
    using Error::Error;
};

// An operation referenced an edge that is not in the graph.
struct MissingEdgeError : Error {
    using Error::Error;
};

// A graph invariant would be violated (e.g. an arrowhead at a past node).
struct InvariantViolationError : Error {
    using Error::Error;
};

// Not enough samples for the requested estimate (T <= gamma, n <= k, ...).
struct InsufficientDataError : Error {
    using Error::Error;
};

// A block column carries no information (zero variance).
struct DegenerateDataError : Error {
    using Error::Error;
};

// A conditioning set overlaps the tested blocks.
struct InvalidConditionerError : Error {
    using Error::Error;
};

// CSV ingestion failure; message carries the offending line number.
struct CsvParseError : Error {
    using Error::Error;
};

}  // namespace causent
