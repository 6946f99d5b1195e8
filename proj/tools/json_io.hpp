#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "crnlyap/model.hpp"

namespace crnlyap::cli {

using Json = nlohmann::ordered_json;

/// Two-space indented JSON with every floating number printed with 17
/// significant digits; NaN and infinities become null. Ends with a newline.
std::string dump_json(const Json& value);

Json vector_json(const Eigen::VectorXd& v);
Json matrix_json(const IntMatrix& m);
Json rational_json(const Rational& r);
Json rationals_json(const std::vector<Rational>& values);

/// Species names, reactions with exact and decimal rates, canonical text.
Json network_json(const ReactionNetwork& net);

}  // namespace crnlyap::cli
