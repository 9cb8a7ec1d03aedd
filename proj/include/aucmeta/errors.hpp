#pragma once

#include <stdexcept>
#include <string>

namespace aucmeta {

// Thrown when an operation needs more studies than the series provides.
struct InsufficientData : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when the data are valid but an estimator is undefined on them
// (e.g. Sidik-Jonkman with zero crude variance).
struct DegenerateData : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when an iterative routine fails to converge or produces
// non-finite intermediates; the message carries diagnostics.
struct NumericFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown by ingestion on unreadable files, malformed headers, or inputs
// with no surviving rows.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace aucmeta
