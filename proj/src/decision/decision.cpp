#include "modunif/decision.hpp"

#include "engines.hpp"
#include "modunif/error.hpp"

namespace modunif {

std::string to_string(Logic l) { return l == Logic::Ku ? "ku" : "kh2"; }

Logic parse_logic(std::string_view text) {
  if (text == "ku") return Logic::Ku;
  if (text == "kh2") return Logic::KH2;
  throw Error("logic must be 'ku' or 'kh2', got '" + std::string(text) + "'");
}

Language language_of(Logic l) { return l == Logic::Ku ? Language::L : Language::H2; }

SatVerdict satisfiable(const Formula& f, Logic logic, const DecisionOptions& opts) {
  if (!in_language(f, language_of(logic)))
    throw LanguageMismatch("formula is not in the language of " + to_string(logic));
  SatVerdict v = (logic == Logic::Ku && opts.engine == Engine::Auto)
                     ? dec::ku_satisfiable(f, opts.label_budget)
                     : dec::tableau_satisfiable(f, logic, opts.label_budget);
  if (v.witness && !model_check(v.witness->model, v.witness->point, f))
    throw InvariantViolation("decision procedure returned a model that does not satisfy the formula");
  return v;
}

ValidVerdict valid(const Formula& f, Logic logic, const DecisionOptions& opts) {
  SatVerdict v = satisfiable(neg(f), logic, opts);
  return ValidVerdict{std::move(v.witness), v.work};
}

}  // namespace modunif
