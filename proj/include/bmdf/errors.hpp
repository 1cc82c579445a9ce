// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace bmdf {

/// An argument lies outside the mathematical domain of the called function.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// A correlation pair outside the valid covariance cone.
class InfeasibleCorrelation : public DomainError {
 public:
  explicit InfeasibleCorrelation(const std::string& what) : DomainError(what) {}
};

/// A rate the source-relay link cannot support.
class InfeasibleRate : public DomainError {
 public:
  explicit InfeasibleRate(const std::string& what) : DomainError(what) {}
};

/// Malformed sweep or run configuration.
class InvalidSpec : public std::invalid_argument {
 public:
  explicit InvalidSpec(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace bmdf
