#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace veccontract {

enum class ErrorCode {
  // expression front end
  syntax_error,
  unknown_identifier,
  non_constant_exponent,
  unbound_variable,
  domain_error,
  // shared
  dimension_mismatch,
  invalid_argument,
  // vector norm
  negative_entry,
  zero_matrix,
  // dynamics
  non_finite_state,
  step_overflow,
  negative_u0,
  // cones
  zero_row,
  empty_interior,
  not_pointed,
  // comparison
  initial_condition_not_dominated,
  missing_channel,
  not_an_equilibrium,
  non_positive_series,
  // configuration / io
  invalid_config,
  io_error,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

/// Lexer/parser failure; offset is the byte position in the source text.
class ParseError : public Error {
 public:
  ParseError(ErrorCode code, std::size_t offset, const std::string& message)
      : Error(code, message + " (at offset " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Config-file validation failure; path is the JSON pointer of the bad field.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& json_path, const std::string& message)
      : Error(ErrorCode::invalid_config, json_path + ": " + message),
        json_path_(json_path) {}

  const std::string& json_path() const { return json_path_; }

 private:
  std::string json_path_;
};

}  // namespace veccontract
