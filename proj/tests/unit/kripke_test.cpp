#include "doctest.h"
#include "modunif/error.hpp"
#include "modunif/kripke.hpp"
#include "oracles.hpp"

using namespace modunif;

namespace {
const Formula p1 = Formula::var(1);
const Formula alpha = conj(diamond(Modality::Rel, Formula::top()), box(Modality::Rel, diamond(Modality::Rel, Formula::top())));
}  // namespace

TEST_CASE("model checking on one point") {
  const Model lone(Frame({"x"}, {}), {});
  CHECK(model_check(lone, "x", box(Modality::Rel, Formula::bot())));
  CHECK_FALSE(model_check(lone, "x", alpha));
  const Model loop(Frame({"x"}, {{0, 0}}), {});
  CHECK(model_check(loop, "x", alpha));
  CHECK_THROWS_AS(model_check(lone, "y", p1), UnknownPoint);
  CHECK_THROWS_AS(model_check(lone, "x", Formula::nominal(1)), LanguageMismatch);
}

TEST_CASE("frame validity") {
  const Frame chain = Frame::from_names({"x", "y"}, {{"x", "y"}});
  CHECK(frame_valid(chain, disj(p1, neg(p1))).valid());
  const FrameValidity v = frame_valid(chain, implies(p1, diamond(Modality::Rel, p1)));
  REQUIRE_FALSE(v.valid());
  const Model m(chain, v.counter->valuation);
  CHECK_FALSE(model_check(m, v.counter->point, implies(p1, diamond(Modality::Rel, p1))));
  Valuation at_x;
  at_x.vars[1] = {0};
  CHECK_FALSE(model_check(Model(chain, at_x), "x", implies(p1, diamond(Modality::Rel, p1))));
}

TEST_CASE("frame validity agrees with brute force on random frames") {
  oracle::Rng rng(4);
  for (int i = 0; i < 300; ++i) {
    const Language lang = i % 2 ? Language::H2 : Language::L;
    const Frame fr = random_frame(static_cast<std::uint64_t>(i), 4, lang, i % 3 == 0);
    const Formula f = oracle::random_formula(rng, {lang, 3, 2, 1});
    CHECK(frame_valid(fr, f).valid() == oracle::brute_frame_valid(fr, f));
  }
}

TEST_CASE("extension matches the reference evaluator") {
  oracle::Rng rng(5);
  for (int i = 0; i < 300; ++i) {
    const Language lang = i % 2 ? Language::H2 : Language::L;
    const Frame fr = random_frame(1000 + i, 6, lang, false);
    Valuation v;
    for (int p : {1, 2}) {
      v.vars[p];
      for (int x = 0; x < fr.size(); ++x)
        if (rng() % 2) v.vars[p].insert(x);
    }
    if (lang == Language::H2) v.noms[1] = static_cast<int>(rng() % fr.size());
    const Model m(fr, v);
    const Formula f = oracle::random_formula(rng, {lang, 5, 2, 1});
    const auto ext = extension(m, f);
    for (int x = 0; x < fr.size(); ++x) CHECK(ext[x] == oracle::naive_truth(m, x, f));
  }
}

TEST_CASE("random frames") {
  CHECK(random_frame(0, 1, Language::L, false).size() == 1);
  CHECK(random_frame(7, 8, Language::H2, true) == random_frame(7, 8, Language::H2, true));
  for (int s = 0; s < 50; ++s) {
    const Frame f = random_frame(s, 8, Language::L, true);
    CHECK(is_transitive(f.r()));
    CHECK_FALSE(f.hybrid());
    CHECK(random_frame(s, 8, Language::H2, false, {true}).s()->size() ==
          static_cast<std::size_t>(random_frame(s, 8, Language::H2, false, {true}).size() *
                                   random_frame(s, 8, Language::H2, false, {true}).size()));
  }
}

TEST_CASE("transitive closure") {
  using P = std::set<std::pair<char, char>>;
  CHECK(transitive_closure(P{}).empty());
  CHECK(transitive_closure(P{{'a', 'b'}, {'b', 'c'}}) == P{{'a', 'b'}, {'b', 'c'}, {'a', 'c'}});
}

TEST_CASE("frame and valuation text") {
  const Frame f = Frame::from_names({"a", "b"}, {{"a", "b"}}, std::vector<std::pair<std::string, std::string>>{{"b", "a"}});
  CHECK(parse_frame(to_text(f)) == f);
  Valuation v;
  v.vars[1] = {0, 1};
  v.noms[1] = 1;
  CHECK(parse_valuation(to_text(f, v), f) == v);
  CHECK(parse_frame("points: a\nkind: H2\n").hybrid());
  CHECK_THROWS_AS(parse_frame("points: a\nR: a c\n"), UnknownPoint);
}
