#include "json_io.hpp"

#include <cmath>
#include <cstdio>

#include "crnlyap/parser.hpp"

namespace crnlyap::cli {

namespace {

void write(std::string& out, const Json& v, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (v.type()) {
    case Json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, item] : v.items()) {
        if (!first) out += ",\n";
        first = false;
        out += inner + Json(key).dump() + ": ";
        write(out, item, indent + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      bool flat = true;
      for (const auto& item : v) flat = flat && !item.is_structured();
      if (flat) {
        out += "[";
        for (std::size_t i = 0; i < v.size(); ++i) {
          if (i) out += ", ";
          write(out, v[i], indent + 1);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",\n";
        out += inner;
        write(out, v[i], indent + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case Json::value_t::number_float: {
      const double d = v.get<double>();
      if (!std::isfinite(d)) {
        out += "null";
        return;
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", d);
      std::string s = buf;
      // Keep floats recognizable as such.
      if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
      out += s;
      return;
    }
    default:
      out += v.dump();
  }
}

}  // namespace

std::string dump_json(const Json& value) {
  std::string out;
  write(out, value, 0);
  out += "\n";
  return out;
}

Json vector_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json matrix_json(const IntMatrix& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

Json rational_json(const Rational& r) { return crnlyap::to_string(r); }

Json rationals_json(const std::vector<Rational>& values) {
  Json out = Json::array();
  for (const auto& r : values) out.push_back(rational_json(r));
  return out;
}

Json network_json(const ReactionNetwork& net) {
  Json reactions = Json::array();
  for (const auto& r : net.reactions()) {
    reactions.push_back(Json{{"reactant", format_complex(net, r.reactant)},
                             {"product", format_complex(net, r.product)},
                             {"rate", rational_json(r.rate)},
                             {"rate_value", r.rate_value()}});
  }
  return Json{{"species", net.species()}, {"reactions", std::move(reactions)}, {"canonical", serialize_network(net)}};
}

}  // namespace crnlyap::cli
