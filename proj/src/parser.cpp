#include "crnlyap/parser.hpp"

#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace crnlyap {

namespace {

struct RawTerm {
  std::string species;
  int coefficient = 1;
};

struct RawReaction {
  std::vector<RawTerm> reactant;
  std::vector<RawTerm> product;
  Rational rate;
  int line = 0;
};

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_space(char c) { return c == ' ' || c == '\t'; }

class LineParser {
 public:
  LineParser(std::string_view line, int line_no, std::vector<ParseDiagnostic>& diags)
      : line_(line), line_no_(line_no), diags_(diags) {}

  void skip_ws() {
    while (pos_ < line_.size() && is_space(line_[pos_])) ++pos_;
  }
  bool at_end() {
    skip_ws();
    return pos_ >= line_.size();
  }
  std::size_t pos() const { return pos_; }

  bool consume(std::string_view token) {
    skip_ws();
    if (line_.substr(pos_, token.size()) == token) {
      pos_ += token.size();
      return true;
    }
    return false;
  }

  void error(std::string message) { error_at(pos_, std::move(message)); }
  void error_at(std::size_t pos, std::string message) {
    diags_.push_back(ParseDiagnostic{line_no_, static_cast<int>(pos) + 1, std::move(message),
                                     ParseDiagnostic::Severity::error});
  }

  std::optional<std::string> ident() {
    skip_ws();
    if (pos_ >= line_.size() || !is_ident_start(line_[pos_])) return std::nullopt;
    const std::size_t start = pos_;
    while (pos_ < line_.size() && is_ident_char(line_[pos_])) ++pos_;
    return std::string(line_.substr(start, pos_ - start));
  }

  // Parses a complex up to (not including) one of the stop tokens.
  std::optional<std::vector<RawTerm>> complex() {
    skip_ws();
    const std::size_t start = pos_;
    if (pos_ < line_.size() && line_[pos_] == '0') {
      std::size_t look = pos_ + 1;
      while (look < line_.size() && is_space(line_[look])) ++look;
      const bool lone_zero = look >= line_.size() || line_[look] == '-' || line_[look] == '<' ||
                             line_[look] == '@';
      if (lone_zero && (pos_ + 1 >= line_.size() || !std::isdigit(static_cast<unsigned char>(line_[pos_ + 1])))) {
        pos_ = pos_ + 1;
        return std::vector<RawTerm>{};
      }
    }
    std::vector<RawTerm> terms;
    std::set<std::string> seen;
    while (true) {
      skip_ws();
      const std::size_t term_start = pos_;
      int coefficient = 1;
      if (pos_ < line_.size() && std::isdigit(static_cast<unsigned char>(line_[pos_]))) {
        std::size_t end = pos_;
        while (end < line_.size() && std::isdigit(static_cast<unsigned char>(line_[end]))) ++end;
        const auto digits = line_.substr(pos_, end - pos_);
        if (digits.size() > 6) {
          error("stoichiometric coefficient too large");
          return std::nullopt;
        }
        coefficient = std::stoi(std::string(digits));
        pos_ = end;
        if (coefficient == 0) {
          error_at(term_start, "zero stoichiometric coefficient");
          return std::nullopt;
        }
      }
      auto name = ident();
      if (!name) {
        error(pos_ >= line_.size() ? "expected species name at end of line" : "expected species name");
        return std::nullopt;
      }
      if (!seen.insert(*name).second) {
        error_at(term_start, "species '" + *name + "' repeated in complex");
        return std::nullopt;
      }
      terms.push_back(RawTerm{*name, coefficient});
      skip_ws();
      if (!consume("+")) break;
    }
    if (terms.empty()) {
      error_at(start, "expected complex");
      return std::nullopt;
    }
    return terms;
  }

  std::optional<Rational> rate() {
    skip_ws();
    const std::size_t start = pos_;
    if (pos_ < line_.size() && line_[pos_] == '-') {
      error("negative rate constant");
      return std::nullopt;
    }
    std::size_t end = pos_;
    while (end < line_.size() && !is_space(line_[end]) && line_[end] != ',') ++end;
    const auto token = line_.substr(start, end - start);
    if (token.empty()) {
      error("expected rate constant");
      return std::nullopt;
    }
    auto value = parse_rational(token);
    if (!value) {
      error_at(start, "malformed rate constant '" + std::string(token) + "'");
      return std::nullopt;
    }
    if (*value <= 0) {
      error_at(start, "rate constant must be positive");
      return std::nullopt;
    }
    pos_ = end;
    return value;
  }

 private:
  std::string_view line_;
  int line_no_;
  std::vector<ParseDiagnostic>& diags_;
  std::size_t pos_ = 0;
};

std::string strip_comment(std::string_view line) {
  const auto hash = line.find('#');
  std::string out(line.substr(0, hash));
  while (!out.empty() && (out.back() == '\r' || is_space(out.back()))) out.pop_back();
  return out;
}

bool same_terms(const std::vector<RawTerm>& a, const std::vector<RawTerm>& b) {
  std::map<std::string, int> ma, mb;
  for (const auto& t : a) ma[t.species] = t.coefficient;
  for (const auto& t : b) mb[t.species] = t.coefficient;
  return ma == mb;
}

}  // namespace

std::string ParseDiagnostic::to_string() const {
  std::ostringstream os;
  os << "line " << line << ", column " << column << ": "
     << (severity == Severity::error ? "error: " : "warning: ") << message;
  return os.str();
}

ParseResult::ParseResult(std::vector<ParseDiagnostic> diagnostics) : value_(std::move(diagnostics)) {
  if (std::get<std::vector<ParseDiagnostic>>(value_).empty()) {
    throw std::logic_error("a failed parse must carry at least one diagnostic");
  }
}

const std::vector<ParseDiagnostic>& ParseResult::diagnostics() const {
  static const std::vector<ParseDiagnostic> kNone;
  if (ok()) return kNone;
  return std::get<std::vector<ParseDiagnostic>>(value_);
}

ParseResult parse_network(std::string_view text, int line_offset) {
  std::vector<ParseDiagnostic> diags;
  std::vector<std::string> declared;
  std::vector<RawReaction> raw;

  int line_no = line_offset;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    const auto line_view = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    const std::string line = strip_comment(line_view);
    LineParser p(line, line_no, diags);
    if (p.at_end()) continue;

    const bool has_arrow = line.find("->") != std::string::npos;
    if (!has_arrow && p.consume("species")) {
      if (!raw.empty()) {
        p.error_at(0, "species header must precede all reactions");
        continue;
      }
      while (!p.at_end()) {
        const std::size_t at = p.pos();
        auto name = p.ident();
        if (!name) {
          p.error("expected species name in header");
          break;
        }
        if (*name == "species") {
          p.error_at(at, "'species' is reserved");
          break;
        }
        bool dup = false;
        for (const auto& d : declared) dup = dup || d == *name;
        if (dup) {
          p.error_at(at, "species '" + *name + "' declared twice");
          break;
        }
        declared.push_back(*name);
      }
      continue;
    }

    RawReaction forward;
    forward.line = line_no;
    auto lhs = p.complex();
    if (!lhs) continue;
    bool reversible = false;
    if (p.consume("<->")) {
      reversible = true;
    } else if (!p.consume("->")) {
      p.error("expected '->' or '<->'");
      continue;
    }
    auto rhs = p.complex();
    if (!rhs) continue;
    if (!p.consume("@")) {
      p.error("expected '@' followed by a rate constant");
      continue;
    }
    auto k1 = p.rate();
    if (!k1) continue;
    std::optional<Rational> k2;
    if (reversible) {
      if (!p.consume(",")) {
        p.error("a reversible reaction needs two rate constants separated by ','");
        continue;
      }
      k2 = p.rate();
      if (!k2) continue;
    }
    if (!p.at_end()) {
      p.error("unexpected trailing text");
      continue;
    }
    if (same_terms(*lhs, *rhs)) {
      p.error_at(0, "self-loop reaction (reactant equals product)");
      continue;
    }
    forward.reactant = *lhs;
    forward.product = *rhs;
    forward.rate = *k1;
    raw.push_back(forward);
    if (reversible) {
      RawReaction backward{*rhs, *lhs, *k2, line_no};
      raw.push_back(backward);
    }
  }

  if (diags.empty() && raw.empty()) {
    diags.push_back(ParseDiagnostic{line_offset + 1, 1, "no reactions found", ParseDiagnostic::Severity::error});
  }
  if (!diags.empty()) return ParseResult(std::move(diags));

  std::vector<std::string> species = declared;
  std::map<std::string, std::size_t> index;
  for (std::size_t j = 0; j < species.size(); ++j) index[species[j]] = j;
  auto intern = [&](const std::string& name) {
    auto [it, inserted] = index.emplace(name, species.size());
    if (inserted) species.push_back(name);
    return it->second;
  };
  auto to_complex = [&](const std::vector<RawTerm>& terms) {
    std::map<std::size_t, int> coeffs;
    for (const auto& t : terms) coeffs[intern(t.species)] = t.coefficient;
    return Complex(std::move(coeffs));
  };

  std::vector<Reaction> reactions;
  std::set<std::pair<Complex, Complex>> seen;
  for (const auto& r : raw) {
    Reaction reaction{to_complex(r.reactant), to_complex(r.product), r.rate};
    if (!seen.emplace(reaction.reactant, reaction.product).second) {
      diags.push_back(ParseDiagnostic{r.line, 1, "duplicate reaction", ParseDiagnostic::Severity::error});
      continue;
    }
    reactions.push_back(std::move(reaction));
  }
  if (!diags.empty()) return ParseResult(std::move(diags));
  return ParseResult(ReactionNetwork(std::move(species), std::move(reactions)));
}

ReactionNetwork parse_network_or_throw(std::string_view text) {
  auto result = parse_network(text);
  if (!result.ok()) throw NetworkError(result.diagnostics().front().to_string());
  return result.network();
}

std::string format_complex(const ReactionNetwork& net, const Complex& complex) {
  if (complex.is_zero()) return "0";
  std::string out;
  for (const auto& [j, c] : complex.terms()) {
    if (!out.empty()) out += " + ";
    if (c != 1) out += std::to_string(c);
    out += net.species()[j];
  }
  return out;
}

std::string serialize_network(const ReactionNetwork& net) {
  std::string out = "species";
  for (const auto& name : net.species()) out += " " + name;
  out += "\n";
  for (const auto& r : net.reactions()) {
    out += format_complex(net, r.reactant) + " -> " + format_complex(net, r.product) + " @ " +
           to_string(r.rate) + "\n";
  }
  return out;
}

}  // namespace crnlyap
