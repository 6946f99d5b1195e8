#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "crnlyap/balance.hpp"
#include "crnlyap/cbp.hpp"
#include "crnlyap/compose.hpp"
#include "crnlyap/lyapunov.hpp"
#include "crnlyap/parser.hpp"
#include "crnlyap/sim.hpp"
#include "crnlyap/structure.hpp"

namespace py = pybind11;
using namespace crnlyap;

namespace {

std::vector<std::string> rationals(const std::vector<Rational>& values) {
  std::vector<std::string> out;
  for (const auto& v : values) out.push_back(to_string(v));
  return out;
}

std::vector<Rational> parse_rationals(const std::vector<std::string>& values) {
  std::vector<Rational> out;
  for (const auto& s : values) {
    const auto r = parse_rational(s);
    if (!r) throw NetworkError("not a rational number: '" + s + "'");
    out.push_back(*r);
  }
  return out;
}

py::dict structure_dict(const ReactionNetwork& net) {
  const auto s = analyze(net);
  py::dict d;
  d["num_species"] = net.num_species();
  d["num_reactions"] = net.num_reactions();
  d["num_complexes"] = s.num_complexes;
  d["num_linkage_classes"] = s.num_linkage_classes;
  d["dim_s"] = s.dim_s;
  d["deficiency"] = s.deficiency;
  d["weakly_reversible"] = s.weakly_reversible;
  d["stoichiometric_matrix"] = Eigen::MatrixXd(s.stoich_matrix.cast<double>());
  d["conservation_laws"] = Eigen::MatrixXd(s.conservation_basis.transpose().cast<double>());
  return d;
}

py::dict certificate_dict(const CertificateReport& c) {
  py::list conditions;
  for (const auto& k : c.conditions) {
    py::dict item;
    item["name"] = k.name;
    item["value"] = k.value;
    item["pass"] = k.pass;
    item["informational"] = k.informational;
    item["detail"] = k.detail;
    conditions.append(item);
  }
  py::dict d;
  d["equilibrium_residual"] = c.equilibrium_residual;
  d["equilibrium_ok"] = c.equilibrium_ok;
  d["projected_hessian_min_eigenvalue"] = c.projected_hessian_min_eigenvalue;
  d["hessian_pass"] = c.hessian_pass;
  d["conditions"] = conditions;
  d["pass"] = c.pass;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Mass-action network analysis and Lyapunov function construction";

  py::register_exception<NetworkError>(m, "NetworkError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);

  py::class_<ReactionNetwork>(m, "Network")
      .def_property_readonly("species", &ReactionNetwork::species)
      .def_property_readonly("num_species", &ReactionNetwork::num_species)
      .def_property_readonly("num_reactions", &ReactionNetwork::num_reactions)
      .def("reactions",
           [](const ReactionNetwork& n) {
             std::vector<std::tuple<std::string, std::string, std::string>> out;
             for (const auto& r : n.reactions()) {
               out.emplace_back(format_complex(n, r.reactant), format_complex(n, r.product), to_string(r.rate));
             }
             return out;
           },
           "List of (reactant, product, exact rate) tuples.")
      .def("canonical", &serialize_network)
      .def("__eq__", [](const ReactionNetwork& a, const ReactionNetwork& b) { return a == b; })
      .def("__repr__", [](const ReactionNetwork& n) {
        return "<Network with " + std::to_string(n.num_species()) + " species and " +
               std::to_string(n.num_reactions()) + " reactions>";
      });

  py::class_<CompoundSpec>(m, "Compound")
      .def_readonly("network", &CompoundSpec::network)
      .def_property_readonly("kind", [](const CompoundSpec& s) { return std::string(to_string(s.kind)); })
      .def_property_readonly("num_parts", &CompoundSpec::num_parts);

  m.def("parse_network", &parse_network_or_throw, py::arg("text"), "Parse the reaction DSL.");
  m.def("parse_compound", &parse_compound_or_throw, py::arg("text"), "Parse a sectioned compound description.");
  m.def("analyze", &structure_dict, py::arg("network"), "Stoichiometric and graph invariants.");
  m.def("vector_field", &vector_field, py::arg("network"), py::arg("x"));

  m.def(
      "find_equilibrium",
      [](const ReactionNetwork& net, const State& x0, double tol) {
        const auto eq = find_equilibrium(net, x0, tol);
        py::dict d;
        d["point"] = eq.point;
        d["residual"] = eq.residual;
        d["is_complex_balanced"] = eq.is_complex_balanced;
        d["is_reaction_vector_balanced"] = eq.is_reaction_vector_balanced;
        d["has_unpaired_reaction_vector"] = eq.has_unpaired_reaction_vector;
        return d;
      },
      py::arg("network"), py::arg("x0"), py::arg("tol") = 1e-10);

  py::class_<CbpResult>(m, "CbpResult")
      .def_property_readonly("scaling", [](const CbpResult& r) { return rationals(r.scaling.diag); })
      .def_readonly("network", &CbpResult::network)
      .def_readonly("source", &CbpResult::source);

  m.def(
      "feasible_scalings",
      [](const ReactionNetwork& net, int max_denominator) {
        std::vector<std::vector<std::string>> out;
        for (const auto& s : feasible_scalings(net, max_denominator)) out.push_back(rationals(s.values));
        return out;
      },
      py::arg("network"), py::arg("max_denominator") = 64);
  m.def(
      "enumerate_cbp",
      [](const ReactionNetwork& net, int max_denominator, std::size_t limit) {
        return enumerate_cbp(net, max_denominator, limit);
      },
      py::arg("network"), py::arg("max_denominator") = 64, py::arg("limit") = 1000);
  m.def(
      "apply_scaling",
      [](const ReactionNetwork& net, const std::vector<std::string>& d) {
        return apply_scaling(net, ScalingMatrix{parse_rationals(d)});
      },
      py::arg("network"), py::arg("scaling"), "Scaling entries are given as strings such as '5/4'.");
  m.def(
      "verify_conjugacy",
      [](const ReactionNetwork& source, const CbpResult& cbp, const State& x0, double t_end) {
        return verify_conjugacy(source, cbp, x0, t_end);
      },
      py::arg("source"), py::arg("cbp"), py::arg("x0"), py::arg("t_end"));

  py::class_<LyapunovFunction>(m, "LyapunovFunction")
      .def_property_readonly("kind", [](const LyapunovFunction& f) { return std::string(to_string(f.kind())); })
      .def_property_readonly("dimension", &LyapunovFunction::dimension)
      .def("value", &LyapunovFunction::value, py::arg("x"))
      .def("gradient", &LyapunovFunction::gradient, py::arg("x"))
      .def("hessian", &LyapunovFunction::hessian, py::arg("x"));

  m.def(
      "build_lyapunov",
      [](const ReactionNetwork& net, const State& x_star, const std::string& kind) {
        FamilyChoice choice = FamilyChoice::automatic;
        if (kind == "helmholtz") {
          choice = FamilyChoice::helmholtz;
        } else if (kind == "onedim") {
          choice = FamilyChoice::onedim;
        } else if (kind != "auto") {
          throw NetworkError("kind must be 'auto', 'helmholtz', or 'onedim'");
        }
        return build_for_network(net, x_star, choice);
      },
      py::arg("network"), py::arg("x_star"), py::arg("kind") = "auto");
  m.def(
      "build_pseudo_helmholtz",
      [](const State& x_star, const std::vector<std::string>& weights) {
        return build_pseudo_helmholtz(x_star, parse_rationals(weights));
      },
      py::arg("x_star"), py::arg("weights") = std::vector<std::string>{});
  m.def("build_compound", &build_compound, py::arg("compound"), py::arg("equilibrium"));
  m.def("pde_residual", &pde_residual, py::arg("network"), py::arg("f"), py::arg("x"));
  m.def(
      "stability_conditions",
      [](const ReactionNetwork& net, const LyapunovFunction& f, const State& x_star,
         const std::optional<CompoundSpec>& spec) {
        return certificate_dict(stability_conditions(net, f, x_star, spec ? &*spec : nullptr));
      },
      py::arg("network"), py::arg("f"), py::arg("x_star"), py::arg("compound") = py::none());

  m.def(
      "integrate",
      [](const ReactionNetwork& net, const State& x0, double t_end, double rel_tol, double abs_tol, int grid_points,
         const LyapunovFunction* f) {
        IntegrateOptions opts;
        opts.rel_tol = rel_tol;
        opts.abs_tol = abs_tol;
        opts.grid_points = grid_points;
        Trajectory t;
        {
          py::gil_scoped_release release;
          t = integrate(net, x0, t_end, opts, f);
        }
        Eigen::MatrixXd states(static_cast<Eigen::Index>(t.states.size()), x0.size());
        for (std::size_t k = 0; k < t.states.size(); ++k) states.row(static_cast<Eigen::Index>(k)) = t.states[k];
        py::dict d;
        auto column = [](const std::vector<double>& v) {
          return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
        };
        d["times"] = column(t.times);
        d["states"] = states;
        d["status"] = std::string(to_string(t.status));
        d["message"] = t.message;
        if (t.has_lyapunov()) {
          d["f_values"] = column(t.f_values);
          d["dissipation"] = column(t.dissipation);
        }
        return d;
      },
      py::arg("network"), py::arg("x0"), py::arg("t_end"), py::arg("rel_tol") = 1e-8, py::arg("abs_tol") = 1e-10,
      py::arg("grid_points") = 0, py::arg("lyapunov") = nullptr);
}
