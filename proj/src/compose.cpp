#include "crnlyap/compose.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>

#include "crnlyap/structure.hpp"

namespace crnlyap {

namespace {

std::string describe(const ReactionNetwork& net, std::size_t i) {
  const auto& r = net.reaction(i);
  return "'" + format_complex(net, r.reactant) + " -> " + format_complex(net, r.product) + "'";
}

// Returns an error message, or nullopt with `shape` filled in.
std::optional<std::string> try_shape(const ReactionNetwork& net, std::size_t i, std::size_t j, AutocaShape& shape) {
  shape = AutocaShape{};
  shape.source_species = i;
  shape.autocatalytic_species = j;
  bool have_back = false;
  for (std::size_t r = 0; r < net.num_reactions(); ++r) {
    const auto& reaction = net.reaction(r);
    const auto& in = reaction.reactant;
    const auto& out = reaction.product;
    if (in.terms().size() == 1 && in.coefficient(j) == 1 && out.terms().size() == 1 && out.coefficient(i) == 1) {
      have_back = true;
      shape.back_reaction = r;
      shape.rate_k2 = reaction.rate;
      continue;
    }
    const int m = out.coefficient(j);
    const bool product_ok = out.terms().size() == 1 && m >= 1;
    const bool reactant_ok = product_ok && in.coefficient(i) == 1 && in.coefficient(j) == m - 1 &&
                             in.molecularity() == m;
    if (!reactant_ok) {
      return "reaction " + describe(net, r) + " is neither " + net.species()[i] + " + (m-1)" +
             net.species()[j] + " -> m" + net.species()[j] + " nor the back-reaction " + net.species()[j] +
             " -> " + net.species()[i];
    }
    shape.forward_reaction[m] = r;
    shape.rates_k_m1[m] = reaction.rate;
  }
  if (!have_back || shape.rates_k_m1.count(1) == 0) {
    return "missing monomolecular pair: both " + net.species()[i] + " -> " + net.species()[j] + " and " +
           net.species()[j] + " -> " + net.species()[i] + " are required";
  }
  for (const auto& [m, _] : shape.rates_k_m1) shape.index_set.push_back(m);
  shape.tau = shape.index_set.back();
  // (1,1)^T applied to every reaction vector.
  shape.mass_conserved = true;
  for (std::size_t r = 0; r < net.num_reactions(); ++r) {
    if (net.reaction_vector(r).sum() != 0) shape.mass_conserved = false;
  }
  return std::nullopt;
}

std::vector<std::size_t> reaction_range(std::size_t start, std::size_t count) {
  std::vector<std::size_t> out(count);
  for (std::size_t k = 0; k < count; ++k) out[k] = start + k;
  return out;
}

Complex remap(const Complex& c, const std::vector<std::size_t>& layout) {
  std::map<std::size_t, int> terms;
  for (const auto& [j, coeff] : c.terms()) terms.emplace(layout[j], coeff);
  return Complex(std::move(terms));
}

void append_reactions(std::vector<Reaction>& out, const ReactionNetwork& net, const std::vector<std::size_t>& layout) {
  for (const auto& r : net.reactions()) out.push_back(Reaction{remap(r.reactant, layout), remap(r.product, layout), r.rate});
}

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

}  // namespace

const char* to_string(PartKind kind) { return kind == PartKind::sub1 ? "sub1" : "autoca"; }

AutocaShape validate_autoca(const ReactionNetwork& net, std::optional<std::size_t> source) {
  if (net.num_species() != 2) {
    throw NetworkError("an autocatalytic part needs exactly 2 species, got " + std::to_string(net.num_species()));
  }
  AutocaShape shape;
  if (source) {
    if (*source > 1) throw NetworkError("source species index out of range");
    if (auto err = try_shape(net, *source, 1 - *source, shape)) throw NetworkError(*err);
    return shape;
  }
  auto first = try_shape(net, 0, 1, shape);
  if (!first) return shape;
  if (!try_shape(net, 1, 0, shape)) return shape;
  throw NetworkError(*first);
}

CompoundSpec compose_sub1(const ReactionNetwork& cbp, const std::vector<ReactionNetwork>& parts, bool rename) {
  std::vector<std::string> names = cbp.species();
  std::set<std::string> used(names.begin(), names.end());
  std::vector<Reaction> reactions;
  std::vector<std::size_t> cbp_layout(cbp.num_species());
  for (std::size_t j = 0; j < cbp_layout.size(); ++j) cbp_layout[j] = j;
  append_reactions(reactions, cbp, cbp_layout);

  std::vector<CompoundPart> out_parts;
  for (std::size_t p = 0; p < parts.size(); ++p) {
    const auto& part = parts[p];
    const auto dim = analyze(part).dim_s;
    if (dim != 1) {
      throw NetworkError("part " + std::to_string(p + 1) + " has a " + std::to_string(dim) +
                         "-dimensional stoichiometric subspace, expected 1");
    }
    std::vector<std::size_t> layout;
    for (const auto& name : part.species()) {
      const std::string global = rename ? "p" + std::to_string(p + 1) + "_" + name : name;
      if (!used.insert(global).second) {
        throw NetworkError("species collision: '" + global + "' appears in more than one part");
      }
      layout.push_back(names.size());
      names.push_back(global);
    }
    const auto first_reaction = reactions.size();
    append_reactions(reactions, part, layout);
    out_parts.push_back(CompoundPart{PartKind::sub1, part, layout,
                                     reaction_range(first_reaction, part.num_reactions()), std::nullopt,
                                     std::nullopt});
  }
  return CompoundSpec{PartKind::sub1,
                      cbp,
                      cbp_layout,
                      reaction_range(0, cbp.num_reactions()),
                      std::nullopt,
                      std::move(out_parts),
                      ReactionNetwork(std::move(names), std::move(reactions))};
}

CompoundSpec compose_autoca(const ReactionNetwork& cbp, const std::vector<AutocaBinding>& bindings) {
  const std::size_t n0 = cbp.num_species();
  if (bindings.size() > n0) {
    throw NetworkError("more autocatalytic parts (" + std::to_string(bindings.size()) + ") than CBP species (" +
                       std::to_string(n0) + ")");
  }
  std::vector<std::size_t> shared_cbp;
  for (const auto& b : bindings) {
    const auto idx = cbp.find_species(b.shared);
    if (!idx) throw NetworkError("shared species '" + b.shared + "' is not a CBP species");
    if (std::find(shared_cbp.begin(), shared_cbp.end(), *idx) != shared_cbp.end()) {
      throw NetworkError("species '" + b.shared + "' is shared by more than one autocatalytic part");
    }
    shared_cbp.push_back(*idx);
  }

  // Global order: shared species, remaining CBP species, private species.
  std::vector<std::size_t> cbp_layout(n0);
  std::vector<std::string> names;
  for (auto j : shared_cbp) {
    cbp_layout[j] = names.size();
    names.push_back(cbp.species()[j]);
  }
  for (std::size_t j = 0; j < n0; ++j) {
    if (std::find(shared_cbp.begin(), shared_cbp.end(), j) != shared_cbp.end()) continue;
    cbp_layout[j] = names.size();
    names.push_back(cbp.species()[j]);
  }
  std::set<std::string> used(names.begin(), names.end());

  std::vector<Reaction> reactions;
  append_reactions(reactions, cbp, cbp_layout);
  std::vector<CompoundPart> parts;
  for (std::size_t p = 0; p < bindings.size(); ++p) {
    const auto& part = bindings[p].autoca;
    if (part.num_species() != 2) {
      throw NetworkError("autocatalytic part " + std::to_string(p + 1) + " needs exactly 2 species");
    }
    const std::size_t local_shared = part.find_species(bindings[p].shared).value_or(0);
    AutocaShape shape;
    try {
      shape = validate_autoca(part, local_shared);
    } catch (const NetworkError& e) {
      throw NetworkError("autocatalytic part " + std::to_string(p + 1) + ": " + e.what());
    }
    const std::size_t local_private = 1 - local_shared;
    std::string private_name = part.species()[local_private];
    if (used.count(private_name)) private_name = "p" + std::to_string(p + 1) + "_" + private_name;
    if (!used.insert(private_name).second) throw NetworkError("species collision: '" + private_name + "'");

    std::vector<std::size_t> layout(2);
    layout[local_shared] = cbp_layout[shared_cbp[p]];
    layout[local_private] = names.size();
    names.push_back(private_name);
    const auto first_reaction = reactions.size();
    append_reactions(reactions, part, layout);
    parts.push_back(CompoundPart{PartKind::autoca, part, layout, reaction_range(first_reaction, part.num_reactions()),
                                 cbp_layout[shared_cbp[p]], shape});
  }
  return CompoundSpec{PartKind::autoca,
                      cbp,
                      cbp_layout,
                      reaction_range(0, cbp.num_reactions()),
                      std::nullopt,
                      std::move(parts),
                      ReactionNetwork(std::move(names), std::move(reactions))};
}

double autoca_stability_sum(const AutocaShape& shape, double s) {
  double sum = 0.0;
  for (const auto& [m, k] : shape.rates_k_m1) sum += (2 - m) * to_double(k) * std::pow(s, m - 1);
  return sum;
}

UniquenessReport check_uniqueness_conditions(const CompoundSpec& spec, const std::optional<State>& equilibrium) {
  if (spec.kind != PartKind::autoca) throw NetworkError("uniqueness conditions apply to autocatalytic compounds only");
  if (equilibrium && static_cast<std::size_t>(equilibrium->size()) != spec.network.num_species()) {
    throw NetworkError("equilibrium has the wrong dimension");
  }
  UniquenessReport report;
  report.all_tau_at_most_two = true;
  report.high_order_parts_conserved = true;
  bool stable = true;
  bool decomposition = true;
  for (std::size_t p = 0; p < spec.parts.size(); ++p) {
    const auto& part = spec.parts[p];
    const auto& shape = *part.shape;
    PartCondition cond;
    cond.part = p + 1;
    cond.tau = shape.tau;
    cond.mass_conserved = shape.mass_conserved;
    cond.has_index_above_two = shape.tau > 2;
    report.all_tau_at_most_two = report.all_tau_at_most_two && shape.tau <= 2;
    if (cond.has_index_above_two && !shape.mass_conserved) report.high_order_parts_conserved = false;

    const std::size_t shared_local = shape.source_species;
    cond.shared_stoichiometry_ok = true;
    for (const auto& r : part.network.reactions()) {
      if (r.reactant.coefficient(shared_local) > 1 || r.product.coefficient(shared_local) > 1) {
        cond.shared_stoichiometry_ok = false;
      }
    }
    const auto shared_cbp = static_cast<std::size_t>(
        std::find(spec.cbp_layout.begin(), spec.cbp_layout.end(), *part.shared_global) - spec.cbp_layout.begin());
    for (const auto& r : spec.cbp_part.reactions()) {
      if (r.reactant.coefficient(shared_cbp) == 1 && r.product.coefficient(shared_cbp) == 0) {
        cond.cbp_consumes_shared = true;
      }
    }

    if (equilibrium) {
      const double s = (*equilibrium)(static_cast<Eigen::Index>(part.species_layout[shape.autocatalytic_species]));
      cond.stability_sum = autoca_stability_sum(shape, s);
      cond.stability_sum_positive = *cond.stability_sum > 0.0;
      if (cond.has_index_above_two && !(shape.mass_conserved && *cond.stability_sum_positive)) stable = false;
      decomposition = decomposition && *cond.stability_sum_positive;
    }
    decomposition = decomposition && cond.shared_stoichiometry_ok && cond.cbp_consumes_shared;
    report.parts.push_back(cond);
  }
  report.uniqueness_guaranteed = report.all_tau_at_most_two || report.high_order_parts_conserved;
  if (equilibrium) report.stability_guaranteed = report.all_tau_at_most_two || stable;
  report.decomposition_conditions_hold = equilibrium.has_value() && decomposition;
  return report;
}

State restrict_state(const State& x, const std::vector<std::size_t>& layout) {
  State out(static_cast<Eigen::Index>(layout.size()));
  for (std::size_t k = 0; k < layout.size(); ++k) {
    const auto g = static_cast<Eigen::Index>(layout[k]);
    if (g >= x.size()) throw NetworkError("state too short for the species layout");
    out(static_cast<Eigen::Index>(k)) = x(g);
  }
  return out;
}

std::variant<CompoundSpec, std::vector<ParseDiagnostic>> parse_compound(std::string_view text) {
  struct Section {
    std::string kind;
    int header_line = 0;
    std::map<std::string, std::string> attrs;
    std::string body;
  };
  std::vector<ParseDiagnostic> diags;
  std::vector<Section> sections;
  auto error = [&](int line, int col, std::string msg) {
    diags.push_back(ParseDiagnostic{line, col, std::move(msg), ParseDiagnostic::Severity::error});
  };

  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    const auto raw = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const std::string content = trim(raw.substr(0, raw.find('#')));
    if (!content.empty() && content.front() == '[') {
      if (content.back() != ']') {
        error(line_no, 1, "unterminated section header");
        continue;
      }
      std::istringstream is(content.substr(1, content.size() - 2));
      Section s;
      s.header_line = line_no;
      is >> s.kind;
      std::string token;
      bool bad = false;
      while (is >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos || eq == 0) {
          error(line_no, 1, "malformed section attribute '" + token + "'");
          bad = true;
          break;
        }
        s.attrs[token.substr(0, eq)] = token.substr(eq + 1);
      }
      if (s.kind != "cbp" && s.kind != "sub1" && s.kind != "autoca") {
        error(line_no, 2, "unknown section '" + s.kind + "'");
        bad = true;
      }
      if (!bad) sections.push_back(std::move(s));
      continue;
    }
    if (sections.empty()) {
      if (!content.empty()) error(line_no, 1, "reaction outside of a section");
      continue;
    }
    sections.back().body += std::string(raw) + "\n";
  }
  if (!diags.empty()) return diags;

  const Section* cbp_section = nullptr;
  std::map<int, const Section*> part_sections;
  std::optional<std::string> part_kind;
  for (const auto& s : sections) {
    if (s.kind == "cbp") {
      if (cbp_section) error(s.header_line, 1, "more than one [cbp] section");
      cbp_section = &s;
      continue;
    }
    if (part_kind && *part_kind != s.kind) error(s.header_line, 1, "sub1 and autoca parts cannot be mixed");
    part_kind = s.kind;
    const auto it = s.attrs.find("p");
    int p = 0;
    if (it != s.attrs.end()) {
      try {
        p = std::stoi(it->second);
      } catch (const std::exception&) {
        p = 0;
      }
    }
    if (p < 1) {
      error(s.header_line, 1, "part section needs an attribute p=N with N >= 1");
      continue;
    }
    if (!part_sections.emplace(p, &s).second) error(s.header_line, 1, "duplicate part index " + std::to_string(p));
    if (s.kind == "autoca" && !s.attrs.count("shared")) error(s.header_line, 1, "autoca section needs shared=NAME");
  }
  if (!cbp_section) error(1, 1, "missing [cbp] section");
  if (!diags.empty()) return diags;

  auto parse_body = [&](const Section& s) -> std::optional<ReactionNetwork> {
    auto result = parse_network(s.body, s.header_line);
    if (!result.ok()) {
      for (const auto& d : result.diagnostics()) diags.push_back(d);
      return std::nullopt;
    }
    return result.network();
  };
  auto cbp = parse_body(*cbp_section);
  std::vector<ReactionNetwork> part_nets;
  std::vector<std::string> shared_names;
  for (const auto& [p, s] : part_sections) {
    if (auto net = parse_body(*s)) {
      part_nets.push_back(*net);
      shared_names.push_back(s->attrs.count("shared") ? s->attrs.at("shared") : "");
    }
  }
  if (!diags.empty()) return diags;

  std::optional<std::vector<Rational>> weights;
  if (auto it = cbp_section->attrs.find("d"); it != cbp_section->attrs.end()) {
    std::vector<Rational> w;
    std::string item;
    std::istringstream is(it->second);
    while (std::getline(is, item, ',')) {
      auto v = parse_rational(item);
      if (!v || *v <= 0) {
        error(cbp_section->header_line, 1, "weight '" + item + "' is not a positive rational");
        return diags;
      }
      w.push_back(*v);
    }
    if (w.size() != cbp->num_species()) {
      error(cbp_section->header_line, 1, "expected " + std::to_string(cbp->num_species()) + " weights, got " +
                                             std::to_string(w.size()));
      return diags;
    }
    weights = std::move(w);
  }

  try {
    CompoundSpec spec = [&] {
      if (part_kind.value_or("sub1") == "sub1") return compose_sub1(*cbp, part_nets);
      std::vector<AutocaBinding> bindings;
      for (std::size_t k = 0; k < part_nets.size(); ++k) bindings.push_back(AutocaBinding{shared_names[k], part_nets[k]});
      return compose_autoca(*cbp, bindings);
    }();
    spec.cbp_weights = std::move(weights);
    return spec;
  } catch (const NetworkError& e) {
    error(cbp_section->header_line, 1, e.what());
    return diags;
  }
}

CompoundSpec parse_compound_or_throw(std::string_view text) {
  auto result = parse_compound(text);
  if (auto* diags = std::get_if<std::vector<ParseDiagnostic>>(&result)) {
    throw NetworkError(diags->front().to_string());
  }
  return std::get<CompoundSpec>(std::move(result));
}

}  // namespace crnlyap
