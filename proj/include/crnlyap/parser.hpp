#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "crnlyap/model.hpp"

namespace crnlyap {

struct ParseDiagnostic {
  enum class Severity { error, warning };

  int line = 0;    // 1-based
  int column = 0;  // 1-based
  std::string message;
  Severity severity = Severity::error;

  std::string to_string() const;
};

/// Either a validated network or at least one diagnostic, never both.
class ParseResult {
 public:
  explicit ParseResult(ReactionNetwork net) : value_(std::move(net)) {}
  explicit ParseResult(std::vector<ParseDiagnostic> diagnostics);

  bool ok() const { return std::holds_alternative<ReactionNetwork>(value_); }
  const ReactionNetwork& network() const { return std::get<ReactionNetwork>(value_); }
  const std::vector<ParseDiagnostic>& diagnostics() const;

 private:
  std::variant<ReactionNetwork, std::vector<ParseDiagnostic>> value_;
};

/// Parses the reaction DSL:
///
///   network  := (reaction | comment | blank | "species" ident*)*
///   reaction := complex "->" complex "@" rate
///             | complex "<->" complex "@" rate "," rate
///   complex  := "0" | term ("+" term)*
///   term     := [uint] ident
///   rate     := decimal | uint "/" uint
///
/// Species are numbered by the optional `species` header, then by first use.
/// `line_offset` is added to reported line numbers.
ParseResult parse_network(std::string_view text, int line_offset = 0);

/// Throws NetworkError carrying the first diagnostic on failure.
ReactionNetwork parse_network_or_throw(std::string_view text);

/// Canonical text: a `species` header, then one reaction per line with
/// complexes in species-index order and exact rates.
std::string serialize_network(const ReactionNetwork& net);

std::string format_complex(const ReactionNetwork& net, const Complex& complex);

}  // namespace crnlyap
