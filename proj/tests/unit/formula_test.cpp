#include "doctest.h"
#include "modunif/error.hpp"
#include "modunif/formula.hpp"
#include "oracles.hpp"

using namespace modunif;

namespace {
const Formula p1 = Formula::var(1), p2 = Formula::var(2), n1 = Formula::nominal(1);
const Formula T = Formula::top(), F = Formula::bot();
}  // namespace

TEST_CASE("parse builds the expected trees") {
  CHECK(parse_formula("<>true & []<>true", Language::L) ==
        conj(diamond(Modality::Rel, T), box(Modality::Rel, diamond(Modality::Rel, T))));
  CHECK(parse_formula("p1", Language::L) == p1);
  CHECK_THROWS_AS(parse_formula("n1 & <h>p2", Language::L), LanguageError);
  CHECK_THROWS_AS(parse_formula("p1 &", Language::L), SyntaxError);
  CHECK_THROWS_AS(parse_formula("[u]p1", Language::H2), LanguageError);
  // & binds tighter than |, -> associates to the right
  CHECK(parse_formula("p1 & p2 | p1", Language::L) == disj(conj(p1, p2), p1));
  CHECK(parse_formula("p1 -> p2 -> p1", Language::L) == implies(p1, implies(p2, p1)));
}

TEST_CASE("printing") {
  CHECK(to_string(box(Modality::Rel, F)) == "[]false");
  CHECK(to_string(conj(p1, neg(p1))) == "p1 & ~p1");
  CHECK(to_string(implies(implies(p1, p2), p1)) == "(p1 -> p2) -> p1");
}

TEST_CASE("print then parse is the identity on random formulas") {
  oracle::Rng rng(1);
  for (Language lang : {Language::L, Language::H2}) {
    for (int i = 0; i < 300; ++i) {
      const Formula f = oracle::random_formula(rng, {lang, 5, 3, 2});
      CHECK(parse_formula(to_string(f), lang) == f);
    }
  }
}

TEST_CASE("substitution") {
  const Formula all_p1 = box(Modality::Univ, p1);
  CHECK(apply_subst({{1, T}}, all_p1) == box(Modality::Univ, T));
  CHECK(apply_subst({}, all_p1) == all_p1);
  CHECK(apply_subst({{1, diamond(Modality::Rel, p2)}}, conj(box(Modality::Rel, p1), n1)) ==
        conj(box(Modality::Rel, diamond(Modality::Rel, p2)), n1));

  oracle::Rng rng(2);
  for (int i = 0; i < 200; ++i) {
    const Formula f = oracle::random_formula(rng, {Language::H2, 4, 2, 2});
    const Formula g = apply_subst({{1, diamond(Modality::Hyb, conj(Formula::var(3), Formula::nominal(2)))}}, f);
    CHECK(nominals(g).size() >= nominals(f).size());
    CHECK(!variables(g).count(1));
  }
}

TEST_CASE("compose agrees with sequential application") {
  oracle::Rng rng(3);
  const oracle::GenOptions small{Language::L, 2, 2, 0};
  for (int i = 0; i < 100; ++i) {
    const Substitution inner{{1, oracle::random_formula(rng, small)}, {2, oracle::random_formula(rng, small)}};
    const Substitution outer{{1, oracle::random_formula(rng, small)}};
    const Formula f = oracle::random_formula(rng, {Language::L, 3, 2, 0});
    CHECK(apply_subst(compose(outer, inner), f) == apply_subst(outer, apply_subst(inner, f)));
  }
}

TEST_CASE("ground substitutions") {
  CHECK(ground_substitutions({}).size() == 1);
  const auto one = ground_substitutions({1});
  REQUIRE(one.size() == 2);
  CHECK(one[0] == Substitution{{1, F}});
  CHECK(one[1] == Substitution{{1, T}});
  const auto two = ground_substitutions({1, 2});
  REQUIRE(two.size() == 4);
  CHECK(two[0] == Substitution{{1, F}, {2, F}});
  CHECK(two[1] == Substitution{{1, F}, {2, T}});
  CHECK(two[2] == Substitution{{1, T}, {2, F}});
  CHECK(two[3] == Substitution{{1, T}, {2, T}});
}

TEST_CASE("surrogate existential") {
  CHECK(surrogate_exists(T, 1) == diamond(Modality::Hyb, conj(n1, diamond(Modality::Hyb, T))));
  const Formula beta = box(Modality::Rel, F);
  CHECK(surrogate_exists(beta, 1) == diamond(Modality::Hyb, conj(n1, diamond(Modality::Hyb, beta))));
  CHECK_THROWS_AS(surrogate_exists(box(Modality::Univ, p1), 1), LanguageError);
}

TEST_CASE("sharing keeps dag size small while tree size grows") {
  Formula f = p1;
  for (int i = 0; i < 80; ++i) f = conj(f, f);
  CHECK(dag_size(f) == 81);
  CHECK(tree_size(f) == UINT64_MAX);
  CHECK(modal_depth(diamond(Modality::Rel, box(Modality::Univ, p1))) == 2);
}

TEST_CASE("substitution text round trip") {
  const Substitution s{{1, diamond(Modality::Rel, p2)}, {2, F}};
  CHECK(parse_substitution(to_string(s), Language::L) == s);
}
