#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "modunif/formula.hpp"
#include "modunif/kripke.hpp"

namespace modunif {

enum class Logic { Ku, KH2 };

std::string to_string(Logic l);  // "ku" / "kh2"
Logic parse_logic(std::string_view text);
Language language_of(Logic l);

enum class Engine {
  // Ku: global-atom search over a K-with-TBox prover. KH2: completion tableau.
  Auto,
  // Completion tableau for both logics; slower, used for cross-checking.
  Tableau,
};

struct DecisionOptions {
  // Distinct labels (Auto) or worlds (Tableau) before ResourceLimit.
  std::size_t label_budget = 50'000;
  Engine engine = Engine::Auto;
};

struct PointedModel {
  Model model;
  int point = 0;
};

struct SatVerdict {
  std::optional<PointedModel> witness;  // checked with model_check before return
  std::size_t work = 0;                 // labels or worlds used
  bool sat() const noexcept { return witness.has_value(); }
};

struct ValidVerdict {
  std::optional<PointedModel> counter;  // a point where the formula fails
  std::size_t work = 0;
  bool valid() const noexcept { return !counter.has_value(); }
};

// Throws LanguageMismatch if f is not in the logic's language, ResourceLimit on budget.
SatVerdict satisfiable(const Formula& f, Logic logic, const DecisionOptions& opts = {});
ValidVerdict valid(const Formula& f, Logic logic, const DecisionOptions& opts = {});

}  // namespace modunif
