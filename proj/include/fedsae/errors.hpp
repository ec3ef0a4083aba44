#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fedsae {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

class PathNotFound : public DataError {
 public:
  explicit PathNotFound(const std::string& path)
      : DataError("path not found: " + path), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

class EmptyDataset : public DataError {
 public:
  using DataError::DataError;
};

class ParseError : public DataError {
 public:
  ParseError(std::size_t row, const std::string& what)
      : DataError("row " + std::to_string(row) + ": " + what), row_(row) {}
  // 1-based line number in the source file (header is line 1).
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

class InfeasiblePartition : public DataError {
 public:
  InfeasiblePartition(int label, const std::string& what)
      : DataError("infeasible partition at class " + std::to_string(label) + ": " + what),
        label_(label) {}
  int offending_class() const { return label_; }

 private:
  int label_;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace fedsae
