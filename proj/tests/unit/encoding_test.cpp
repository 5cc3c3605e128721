#include "doctest.h"
#include "modunif/encoding.hpp"
#include "modunif/error.hpp"
#include "modunif/workbench.hpp"

using namespace modunif;

namespace {
const Formula T = Formula::top(), F = Formula::bot();
Formula dia(const Formula& f) { return diamond(Modality::Rel, f); }
Formula dia2(const Formula& f) { return dia(dia(f)); }
using T_ = CharName::Tag;
}  // namespace

TEST_CASE("characteristic formulas as defined") {
  CHECK(char_formula({T_::Alpha}) == conj(dia(T), box(Modality::Rel, dia(T))));
  CHECK(char_formula({T_::Beta}) == box(Modality::Rel, F));
  const Formula a = char_formula({T_::Alpha}), b = char_formula({T_::Beta});
  const Formula g = char_formula({T_::Gamma});
  CHECK(g == conj({dia(a), dia(b), neg(dia2(b))}));
  for (int x : {0, 1, 2}) {
    CHECK(is_ground(tower(x, 3)));
    CHECK_FALSE(uses_modality(tower(x, 3), Modality::Univ));
  }
  CHECK(char_formula(CharName::tower(1, 2)) == tower(1, 2));
  CHECK(tower(2, 1) == conj({dia(tower(2, 0)), dia(tower(2, 0)), neg(dia2(tower(2, 0))), neg(dia(tower(0, 0))),
                             neg(dia(tower(1, 0)))}));
}

TEST_CASE("epsilon and pi") {
  const Formula p = Formula::var(1), q = Formula::var(2);
  CHECK(epsilon(3, p, q) ==
        conj({dia(tower(0, 3)), neg(dia(tower(0, 4))), dia(p), neg(dia2(p)), dia(q), neg(dia2(q))}));
  const Formula p1 = Formula::var(1);
  CHECK(pi_tau(PiTau::Pi1) == conj({disj(dia(tower(1, 0)), tower(1, 0)), neg(dia(tower(0, 0))),
                                    neg(dia(tower(2, 0))), p1, neg(dia(p1))}));
}

TEST_CASE("instruction axioms") {
  const Mode u = Mode::universal();
  const Formula pi1 = pi_tau(PiTau::Pi1), pi2 = pi_tau(PiTau::Pi2), tau1 = pi_tau(PiTau::Tau1);
  CHECK(ax_instruction({Op::Inc1, 1, 2, 0}, u) ==
        implies(exists(epsilon(1, pi1, tau1), u), exists(epsilon(2, pi2, tau1), u)));
  const Formula dec = ax_instruction({Op::Dec1, 1, 2, 3}, u);
  REQUIRE(dec.kind() == Kind::And);
  CHECK(dec.rhs() == implies(exists(epsilon(1, tower(1, 0), tau1), u), exists(epsilon(3, tower(1, 0), tau1), u)));
  CHECK(exists(T, u) == diamond(Modality::Univ, T));
  CHECK(exists(T, Mode::hybrid(1)) == surrogate_exists(T, 1));
}

TEST_CASE("mode coherence") {
  const Program p = parse_program("1 -> 2,+1,0; 2 -> 3,0,-1 | 1,0,0; 3 -> 1,-1,0 | 2,0,0");
  const Formula u = psi(p, {1, 1, 0}, {2, 0, 0}, Mode::universal());
  CHECK(nominals(u).empty());
  CHECK_FALSE(uses_modality(u, Modality::Hyb));
  CHECK(in_language(u, Language::L));
  const Formula h = psi(p, {1, 1, 0}, {2, 0, 0}, Mode::hybrid(1));
  CHECK_FALSE(uses_modality(h, Modality::Univ));
  CHECK(in_language(h, Language::H2));
  CHECK(nominals(h) == std::set<int>{1});
}

TEST_CASE("Nom") {
  CHECK(nom_conjuncts(1).size() == 4);
  CHECK(nom_conjuncts(6).size() == 252);
  CHECK(ax_program(Program{}, Mode::universal()) == T);
  CHECK(ax_program(Program{}, Mode::hybrid(1)) == nom_formula(6));
  CHECK(ax_conjuncts(parse_program("1 -> 2,+1,0"), Mode::hybrid(1)).size() == 2);
}

TEST_CASE("psi with a = b is valid under every ground substitution") {
  const Program p = parse_program("1 -> 2,+1,0");
  const Formula f = psi(p, {2, 1, 0}, {2, 1, 0}, Mode::universal());
  for (const Substitution& s : ground_substitutions({1, 2}))
    for (int i = 0; i < 30; ++i) CHECK(frame_valid(random_frame(i, 5, Language::L, i % 2), apply_subst(s, f)).valid());
}

TEST_CASE("canonical frame") {
  const CanonicalFrame cf = canonical_frame(Program{}, {1, 0, 0}, 10, Mode::universal());
  CHECK(cf.frame.size() == 18);
  CHECK(cf.depth == 2);
  CHECK(cf.frame.index_of("a") == cf.point_of(CharName{T_::Alpha}));
  CHECK(cf.point_of(Config{1, 0, 0}) >= 0);
  CHECK(cf.frame.r().count({cf.point_of(CharName{T_::Alpha}), cf.point_of(CharName{T_::Alpha})}));
  CHECK_FALSE(cf.frame.hybrid());

  const CanonicalFrame h = canonical_frame(Program{}, {1, 0, 0}, 10, Mode::hybrid(1));
  REQUIRE(h.frame.hybrid());
  CHECK(h.frame.s()->size() == 18u * 18u);

  CHECK_THROWS_AS(canonical_frame(parse_program("1 -> 1,+1,0"), {1, 0, 0}, 20, Mode::universal()),
                  TruncationUnsound);

  const CanonicalFrame back = parse_canonical_frame(cf.to_text());
  CHECK(back.frame == cf.frame);
  CHECK(back.labels == cf.labels);
}

TEST_CASE("canonical frames validate AxP and the ground antecedent") {
  const Program p = parse_program("1 -> 2,-1,0 | 3,0,0; 2 -> 1,0,+1");
  for (const Mode& mode : {Mode::universal(), Mode::hybrid(1)}) {
    const CanonicalFrame cf = canonical_frame(p, {1, 2, 1}, 50, mode);
    CHECK(frame_valid(cf.frame, ax_program(p, mode)).valid());
    // every configuration of the run has its e-point
    for (const Config& c : cf.run.configs) CHECK(cf.point_of(c) >= 0);
  }
}
