#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace esdv {

/// Base of every error raised by the engine.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed unit expression. Carries the offending token and its byte offset.
class ParseError : public Error {
public:
  ParseError(std::string token, std::size_t offset, const std::string &what)
      : Error(what), m_token(std::move(token)), m_offset(offset) {}
  const std::string &token() const noexcept { return m_token; }
  std::size_t offset() const noexcept { return m_offset; }

private:
  std::string m_token;
  std::size_t m_offset;
};

/// A quantity carried the wrong dimension for the slot it was bound to.
class DimensionError : public Error {
public:
  DimensionError(std::string slot, std::string expected, std::string actual)
      : Error("dimension mismatch for '" + slot + "': expected " + expected +
              ", got " + actual),
        m_slot(std::move(slot)), m_expected(std::move(expected)),
        m_actual(std::move(actual)) {}
  const std::string &slot() const noexcept { return m_slot; }
  const std::string &expected() const noexcept { return m_expected; }
  const std::string &actual() const noexcept { return m_actual; }

private:
  std::string m_slot, m_expected, m_actual;
};

/// A kernel input lies outside the range where the formula is meaningful.
class DomainError : public Error {
public:
  DomainError(std::string slot, const std::string &what)
      : Error(what), m_slot(std::move(slot)) {}
  const std::string &slot() const noexcept { return m_slot; }

private:
  std::string m_slot;
};

class ArithmeticError : public Error {
public:
  using Error::Error;
};

/// Zero or negative divisor in a kernel formula (N_R, rho_S).
class SingularityError : public DomainError {
public:
  using DomainError::DomainError;
};

/// Inconsistent object structure: duplicate ids, dangling references,
/// empty inputs where at least one element is required.
class StructuralError : public Error {
public:
  using Error::Error;
};

/// Input file could not be loaded. The message names the row or JSON path.
class LoadError : public Error {
public:
  using Error::Error;
};

class ConfigurationError : public Error {
public:
  using Error::Error;
};

class UndefinedElasticityError : public Error {
public:
  using Error::Error;
};

/// A kernel rejected its inputs during evaluation of a bound line item.
class EvaluationError : public Error {
public:
  EvaluationError(std::string item, std::string parameter,
                  const std::string &what)
      : Error(what), m_item(std::move(item)),
        m_parameter(std::move(parameter)) {}
  const std::string &item() const noexcept { return m_item; }
  const std::string &parameter() const noexcept { return m_parameter; }

private:
  std::string m_item, m_parameter;
};

} // namespace esdv
