#pragma once

#include <stdexcept>
#include <string>

namespace zspace {

// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class ZeroVectorError : public Error {
 public:
  ZeroVectorError() : Error("vector has (near-)zero norm") {}
  explicit ZeroVectorError(const std::string& msg) : Error(msg) {}
};

class DimMismatchError : public Error {
 public:
  DimMismatchError(size_t a, size_t b)
      : Error("dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b)) {}
  explicit DimMismatchError(const std::string& msg) : Error(msg) {}
};

class EmptyTextError : public Error {
 public:
  EmptyTextError() : Error("text is empty after trimming") {}
};

class ServiceError : public Error {
 public:
  explicit ServiceError(const std::string& msg) : Error("embedding service: " + msg) {}
};

class NotPositiveDefiniteError : public Error {
 public:
  NotPositiveDefiniteError() : Error("matrix is not positive definite") {}
};

class NoEffectiveKeywordsError : public Error {
 public:
  NoEffectiveKeywordsError() : Error("all keyword weights are below the effective floor") {}
};

class DegenerateDifferentialError : public Error {
 public:
  DegenerateDifferentialError() : Error("weighted differential sum has (near-)zero norm") {}
};

class DegenerateFusionError : public Error {
 public:
  DegenerateFusionError() : Error("fusion sum has (near-)zero norm") {}
};

class ParseError : public Error {
 public:
  ParseError(int line, const std::string& msg)
      : Error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& msg) : Error(msg) {}
};

class EmptyQueryError : public Error {
 public:
  EmptyQueryError() : Error("query is empty") {}
};

class CyclicPlanError : public Error {
 public:
  explicit CyclicPlanError(const std::string& msg) : Error("invalid plan: " + msg) {}
};

class ProviderError : public Error {
 public:
  explicit ProviderError(const std::string& msg) : Error("intent provider: " + msg) {}
};

class EmptyRegistryError : public Error {
 public:
  EmptyRegistryError() : Error("tool registry is empty") {}
};

class UnassignedStepError : public Error {
 public:
  explicit UnassignedStepError(const std::string& step_id)
      : Error("no tool assigned to step '" + step_id + "'") {}
};

}  // namespace zspace
