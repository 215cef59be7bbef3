#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fpsel {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid caller arguments (bad sizes, out-of-range parameters).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent input data (files, manifests, hashes).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Parse failure that can be pinned to a row/column of a text file.
class LoadError : public DataError {
 public:
  LoadError(const std::string& message, std::size_t row, std::string column)
      : DataError(message + " (row " + std::to_string(row) +
                  (column.empty() ? "" : ", column '" + column + "'") + ")"),
        row_(row),
        column_(std::move(column)) {}

  std::size_t row() const { return row_; }
  const std::string& column() const { return column_; }

 private:
  std::size_t row_;
  std::string column_;
};

}  // namespace fpsel
