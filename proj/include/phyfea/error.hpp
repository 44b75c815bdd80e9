// Copyright 2026 The PhyFea Engine Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace phyfea {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input the caller can fix: wrong shapes, bad files, bad configuration.
// The CLI maps every subclass of ValidationError to exit code 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class FormatError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class CatalogError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// A precondition on values (not shapes) was violated, e.g. negative input
// to an operator that requires nonnegative data.
class ContractError : public Error {
 public:
  using Error::Error;
};

}  // namespace phyfea
