#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "modunif/decision.hpp"
#include "modunif/encoding.hpp"
#include "modunif/eqtheory.hpp"
#include "modunif/error.hpp"
#include "modunif/witness.hpp"
#include "modunif/workbench.hpp"

namespace py = pybind11;
using namespace modunif;

namespace {

Language language(const std::string& s) {
  if (s == "L") return Language::L;
  if (s == "H2") return Language::H2;
  throw Error("language must be L or H2");
}

DecisionOptions budgeted(std::size_t budget) {
  DecisionOptions d;
  d.label_budget = budget;
  return d;
}

py::dict pointed(const PointedModel& pm) {
  py::dict d;
  d["frame"] = to_text(pm.model.frame());
  d["valuation"] = to_text(pm.model.frame(), pm.model.valuation());
  d["point"] = pm.model.frame().name(pm.point);
  return d;
}

}  // namespace

PYBIND11_MODULE(_modunif, m) {
  m.doc() = "Minsky machine to modal unification reduction workbench";

  static py::exception<Error> base(m, "ModunifError", PyExc_ValueError);
  static py::exception<ResourceLimit> resource(m, "ResourceLimit", base.ptr());
  static py::exception<InvariantViolation> invariant(m, "InvariantViolation", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ResourceLimit& e) {
      resource(e.what());
    } catch (const InvariantViolation& e) {
      invariant(e.what());
    } catch (const Error& e) {
      base(e.what());
    }
  });

  py::class_<Formula>(m, "Formula")
      .def("__str__", [](const Formula& f) { return to_string(f); })
      .def("__repr__", [](const Formula& f) { return "Formula('" + to_string(f) + "')"; })
      .def("__eq__", [](const Formula& a, const Formula& b) { return a == b; })
      .def("__hash__", &Formula::hash)
      .def_property_readonly("dag_size", [](const Formula& f) { return dag_size(f); })
      .def_property_readonly("modal_depth", [](const Formula& f) { return modal_depth(f); })
      .def_property_readonly("variables", [](const Formula& f) { return variables(f); })
      .def_property_readonly("nominals", [](const Formula& f) { return nominals(f); });

  m.def("parse_formula", [](const std::string& text, const std::string& lang) { return parse_formula(text, language(lang)); },
        py::arg("text"), py::arg("language") = "L");
  m.def("substitute",
        [](const std::map<int, Formula>& s, const Formula& f) {
          Substitution sub;
          for (const auto& [v, g] : s) sub.set(v, g);
          return apply_subst(sub, f);
        },
        py::arg("substitution"), py::arg("formula"));

  m.def("model_check",
        [](const std::string& frame, const std::string& valuation, const std::string& point, const std::string& formula) {
          const Frame f = parse_frame(frame);
          const Valuation v = valuation.empty() ? Valuation{} : parse_valuation(valuation, f);
          return model_check(Model(f, v), point, parse_formula(formula, f.language()));
        },
        py::arg("frame"), py::arg("valuation"), py::arg("point"), py::arg("formula"));
  m.def("frame_valid", [](const std::string& frame, const std::string& formula) {
    const Frame f = parse_frame(frame);
    return frame_valid(f, parse_formula(formula, f.language())).valid();
  });

  m.def("valid",
        [](const Formula& f, const std::string& logic, std::size_t budget) {
          const ValidVerdict v = valid(f, parse_logic(logic), budgeted(budget));
          py::dict d;
          d["valid"] = v.valid();
          d["work"] = v.work;
          d["counter"] = v.counter ? py::object(pointed(*v.counter)) : py::none();
          return d;
        },
        py::arg("formula"), py::arg("logic") = "ku", py::arg("budget") = 50'000);
  m.def("satisfiable",
        [](const Formula& f, const std::string& logic, std::size_t budget) {
          const SatVerdict v = satisfiable(f, parse_logic(logic), budgeted(budget));
          py::dict d;
          d["sat"] = v.sat();
          d["work"] = v.work;
          d["model"] = v.witness ? py::object(pointed(*v.witness)) : py::none();
          return d;
        },
        py::arg("formula"), py::arg("logic") = "ku", py::arg("budget") = 50'000);
  m.def("ground_unify",
        [](const Formula& f, const std::string& logic) -> std::optional<std::map<int, std::string>> {
          const auto s = ground_unifiable(f, parse_logic(logic));
          if (!s) return std::nullopt;
          std::map<int, std::string> out;
          for (const auto& [v, g] : s->entries()) out[v] = to_string(g);
          return out;
        },
        py::arg("formula"), py::arg("logic") = "ku");

  m.def("reaches", [](const std::string& program, const std::string& a, const std::string& b, long bound) {
    switch (reaches(parse_program(program), parse_config(a), parse_config(b), bound).verdict) {
      case Reach::Yes:
        return "yes";
      case Reach::No:
        return "no";
      default:
        return "unknown";
    }
  });
  m.def("psi",
        [](const std::string& program, const std::string& a, const std::string& b, const std::string& mode) {
          return psi(parse_program(program), parse_config(a), parse_config(b), parse_mode(mode));
        },
        py::arg("program"), py::arg("start"), py::arg("target"), py::arg("mode") = "universal");
  m.def("ax_program",
        [](const std::string& program, const std::string& mode) { return ax_program(parse_program(program), parse_mode(mode)); },
        py::arg("program"), py::arg("mode") = "universal");
  m.def("witness",
        [](const std::string& program, const std::string& a, const std::string& b, long bound, const std::string& mode) {
          const Substitution s =
              witness_substitution(parse_program(program), parse_config(a), parse_config(b), bound, parse_mode(mode));
          return s.entries();
        },
        py::arg("program"), py::arg("start"), py::arg("target"), py::arg("bound") = 1000,
        py::arg("mode") = "universal");
  m.def("canonical_frame",
        [](const std::string& program, const std::string& a, long bound, const std::string& mode) {
          return canonical_frame(parse_program(program), parse_config(a), bound, parse_mode(mode)).to_text();
        },
        py::arg("program"), py::arg("start"), py::arg("bound") = 1000, py::arg("mode") = "universal");
  m.def("nom_conjunct_count", [](int max_len) { return nom_conjuncts(max_len).size(); }, py::arg("max_len") = kNomLength);

  m.def("verify_json",
        [](const std::string& program, const std::string& a, const std::string& b, long bound, const std::string& mode,
           std::uint64_t seed, std::size_t trials, std::size_t budget) {
          PipelineOptions po;
          po.label_budget = budget;
          po.suite.seed = seed;
          po.suite.trials = trials;
          Report r{parse_program(program), parse_config(a), parse_config(b), bound, {}};
          {
            py::gil_scoped_release release;
            r.verdict = check_unifiable_via_reduction(r.program, r.start, r.target, bound, parse_mode(mode), po);
          }
          return to_json(r);
        },
        py::arg("program"), py::arg("start"), py::arg("target"), py::arg("bound") = 1000,
        py::arg("mode") = "universal", py::arg("seed") = 1, py::arg("trials") = 1000, py::arg("budget") = 50'000);
  m.def("replay_json",
        [](const std::string& json, std::size_t budget) {
          PipelineOptions po;
          po.label_budget = budget;
          const ReplayResult rr = replay(parse_report(json), po);
          return py::make_tuple(rr.ok, rr.detail);
        },
        py::arg("report"), py::arg("budget") = 50'000);

  m.def("term_to_formula", [](const std::string& term) { return term_to_formula(parse_term(term)); });
  m.def("formula_to_term", [](const Formula& f) { return to_string(formula_to_term(f)); });
  m.def("unification_instance", [](const std::string& eq) { return unification_instance(parse_equation(eq)); });
  m.def("theory_t", [] {
    std::vector<std::pair<std::string, std::string>> out;
    for (const Inequality& q : theory_t()) out.emplace_back(to_string(q.lo), to_string(q.hi));
    return out;
  });
}
