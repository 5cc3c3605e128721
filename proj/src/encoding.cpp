#include "modunif/encoding.hpp"

#include <algorithm>
#include <mutex>
#include <set>

#include "modunif/error.hpp"

namespace modunif {

std::string to_string(const Mode& m) { return m.is_hybrid() ? "hybrid" : "universal"; }

Mode parse_mode(std::string_view text, int nominal) {
  if (text == "universal") return Mode::universal();
  if (text == "hybrid") return Mode::hybrid(nominal);
  throw Error("mode must be 'universal' or 'hybrid', got '" + std::string(text) + "'");
}

std::string to_string(const CharName& c) {
  switch (c.tag) {
    case CharName::Tag::Alpha:
      return "Alpha";
    case CharName::Tag::Beta:
      return "Beta";
    case CharName::Tag::Gamma:
      return "Gamma";
    case CharName::Tag::Delta:
      return "Delta";
    case CharName::Tag::Delta1:
      return "Delta1";
    case CharName::Tag::Delta2:
      return "Delta2";
    case CharName::Tag::Gamma1:
      return "Gamma1";
    case CharName::Tag::Gamma2:
      return "Gamma2";
    case CharName::Tag::A:
      return "A(" + std::to_string(c.i) + ',' + std::to_string(c.j) + ')';
  }
  return "?";
}

namespace {

Formula dia(const Formula& f) { return diamond(Modality::Rel, f); }
Formula dia2(const Formula& f) { return diamond_power(Modality::Rel, 2, f); }

struct CharCache {
  std::mutex mu;
  std::map<CharName, Formula> formulas;
};

CharCache& cache() {
  static CharCache c;
  return c;
}

Formula build(const CharName& c);

Formula get(const CharName& c) {
  auto& cc = cache();
  {
    std::lock_guard<std::mutex> lock(cc.mu);
    auto it = cc.formulas.find(c);
    if (it != cc.formulas.end()) return it->second;
  }
  Formula f = build(c);
  std::lock_guard<std::mutex> lock(cc.mu);
  // A concurrent builder may have won; keep the first so nodes stay shared.
  return cc.formulas.emplace(c, f).first->second;
}

Formula named(CharName::Tag t) { return get(CharName{t}); }

Formula build(const CharName& c) {
  using T = CharName::Tag;
  switch (c.tag) {
    case T::Alpha:
      return conj(dia(Formula::top()), box(Modality::Rel, dia(Formula::top())));
    case T::Beta:
      return box(Modality::Rel, Formula::bot());
    case T::Gamma: {
      Formula b = named(T::Beta);
      return conj({dia(named(T::Alpha)), dia(b), neg(dia2(b))});
    }
    case T::Delta: {
      Formula b = named(T::Beta);
      return conj({neg(named(T::Gamma)), dia(b), neg(dia2(b))});
    }
    case T::Delta1: {
      Formula d = named(T::Delta);
      return conj(dia(d), neg(dia2(d)));
    }
    case T::Delta2: {
      Formula d = named(T::Delta1);
      return conj(dia(d), neg(dia2(d)));
    }
    case T::Gamma1: {
      Formula g = named(T::Gamma);
      return conj({dia(g), neg(dia2(g)), neg(dia(named(T::Delta)))});
    }
    case T::Gamma2: {
      Formula g = named(T::Gamma1);
      return conj({dia(g), neg(dia2(g)), neg(dia(named(T::Delta)))});
    }
    case T::A: {
      if (c.i < 0 || c.i > 2) throw Error("tower index must be 0, 1 or 2");
      if (c.j < 0) throw Error("tower level must be >= 0");
      if (c.j == 0) {
        static const T gammas[] = {T::Gamma, T::Gamma1, T::Gamma2};
        static const T deltas[] = {T::Delta, T::Delta1, T::Delta2};
        Formula g = named(gammas[c.i]);
        Formula d = named(deltas[c.i]);
        return conj({dia(g), dia(d), neg(dia2(g)), neg(dia2(d))});
      }
      // Build bottom-up so deep towers do not recurse through the cache.
      for (long j = 1; j < c.j; ++j) get(CharName::tower(c.i, j));
      Formula prev = get(CharName::tower(c.i, c.j - 1));
      std::vector<Formula> parts{dia(get(CharName::tower(c.i, 0))), dia(prev), neg(dia2(prev))};
      for (int k = 0; k < 3; ++k)
        if (k != c.i) parts.push_back(neg(dia(get(CharName::tower(k, 0)))));
      return conj(parts);
    }
  }
  throw Error("unknown characteristic formula");
}

}  // namespace

Formula char_formula(const CharName& c) { return get(c); }

Formula tower(int i, long j) { return get(CharName::tower(i, j)); }

Formula exists(const Formula& f, const Mode& mode) {
  if (mode.is_hybrid()) return surrogate_exists(f, mode.nominal);
  return diamond(Modality::Univ, f);
}

Formula epsilon(long t, const Formula& phi, const Formula& psi) {
  return conj({dia(tower(0, t)), neg(dia(tower(0, t + 1))), dia(phi), neg(dia2(phi)), dia(psi), neg(dia2(psi))});
}

Formula config_exists(const Config& c, const Mode& mode) {
  return exists(epsilon(c.state, tower(1, c.c1), tower(2, c.c2)), mode);
}

Formula pi_tau(PiTau which) {
  const bool first = which == PiTau::Pi1 || which == PiTau::Pi2;
  const int own = first ? 1 : 2;
  const int other = first ? 2 : 1;
  Formula p = Formula::var(own);
  Formula base = tower(own, 0);
  Formula not0 = neg(dia(tower(0, 0)));
  Formula not_other = neg(dia(tower(other, 0)));
  if (which == PiTau::Pi1 || which == PiTau::Tau1)
    return conj({disj(dia(base), base), not0, not_other, p, neg(dia(p))});
  return conj({dia(base), not0, not_other, dia(p), neg(dia2(p))});
}

Formula ax_instruction(const Instruction& ins, const Mode& mode) {
  const Formula pi1 = pi_tau(PiTau::Pi1), pi2 = pi_tau(PiTau::Pi2);
  const Formula tau1 = pi_tau(PiTau::Tau1), tau2 = pi_tau(PiTau::Tau2);
  auto ex = [&](long t, const Formula& a, const Formula& b) { return exists(epsilon(t, a, b), mode); };
  switch (ins.op) {
    case Op::Inc1:
      return implies(ex(ins.from, pi1, tau1), ex(ins.to, pi2, tau1));
    case Op::Inc2:
      return implies(ex(ins.from, pi1, tau1), ex(ins.to, pi1, tau2));
    case Op::Dec1: {
      Formula z = tower(1, 0);
      return conj(implies(ex(ins.from, pi2, tau1), ex(ins.to, pi1, tau1)),
                  implies(ex(ins.from, z, tau1), ex(ins.zero_to, z, tau1)));
    }
    case Op::Dec2: {
      Formula z = tower(2, 0);
      return conj(implies(ex(ins.from, pi1, tau2), ex(ins.to, pi1, tau1)),
                  implies(ex(ins.from, pi1, z), ex(ins.zero_to, pi1, z)));
    }
  }
  throw Error("unknown instruction");
}

std::vector<Formula> nom_conjuncts(int max_len, int nominal) {
  if (max_len < 1) throw Error("Nom needs max_len >= 1");
  const Formula seen = diamond(Modality::Hyb, Formula::nominal(nominal));
  std::vector<Formula> boxes, diamonds;
  // Words of length L, built by extending every word of length L-1 on the left.
  std::vector<Formula> box_words{seen}, dia_words{seen};
  for (int len = 1; len <= max_len; ++len) {
    std::vector<Formula> nb, nd;
    for (Modality m : {Modality::Rel, Modality::Hyb}) {
      for (const auto& w : box_words) nb.push_back(box(m, w));
      for (const auto& w : dia_words) nd.push_back(diamond(m, w));
    }
    for (const auto& w : nb) boxes.push_back(implies(seen, w));
    for (const auto& w : nd) diamonds.push_back(implies(w, seen));
    box_words = std::move(nb);
    dia_words = std::move(nd);
  }
  boxes.insert(boxes.end(), diamonds.begin(), diamonds.end());
  return boxes;
}

Formula nom_formula(int max_len, int nominal) { return conj(nom_conjuncts(max_len, nominal)); }

std::vector<Formula> ax_conjuncts(const Program& p, const Mode& mode) {
  std::vector<Formula> out;
  for (const auto& ins : p.instructions()) out.push_back(ax_instruction(ins, mode));
  if (mode.is_hybrid()) out.push_back(nom_formula(kNomLength, mode.nominal));
  return out;
}

Formula ax_program(const Program& p, const Mode& mode) { return conj(ax_conjuncts(p, mode)); }

Formula psi(const Program& p, const Config& a, const Config& b, const Mode& mode) {
  return implies(conj(ax_program(p, mode), config_exists(a, mode)), config_exists(b, mode));
}

// ---------------------------------------------------------------------------
// Canonical frame

std::string to_string(const PointLabel& l) {
  if (const auto* c = std::get_if<CharName>(&l)) return to_string(*c);
  const Config& cfg = std::get<Config>(l);
  return "e(" + to_string(cfg) + ')';
}

std::string point_name(const PointLabel& l) {
  if (const auto* c = std::get_if<CharName>(&l)) {
    using T = CharName::Tag;
    switch (c->tag) {
      case T::Alpha:
        return "a";
      case T::Beta:
        return "b";
      case T::Gamma:
        return "g";
      case T::Gamma1:
        return "g1";
      case T::Gamma2:
        return "g2";
      case T::Delta:
        return "d";
      case T::Delta1:
        return "d1";
      case T::Delta2:
        return "d2";
      case T::A:
        return 'a' + std::to_string(c->i) + '_' + std::to_string(c->j);
    }
  }
  const Config& cfg = std::get<Config>(l);
  return "e_" + std::to_string(cfg.state) + '_' + std::to_string(cfg.c1) + '_' + std::to_string(cfg.c2);
}

int CanonicalFrame::point_of(const PointLabel& l) const { return frame.index_of(point_name(l)); }

std::map<std::string, std::string> CanonicalFrame::label_map() const {
  std::map<std::string, std::string> out;
  for (int x = 0; x < frame.size(); ++x) out[frame.name(x)] = to_string(labels[x]);
  return out;
}

std::string CanonicalFrame::to_text() const { return modunif::to_text(frame, label_map()); }

CanonicalFrame canonical_frame(const Program& p, const Config& a, long bound, const Mode& mode) {
  CanonicalFrame cf;
  cf.run = run_trace(p, a, bound);
  if (cf.run.end == RunEnd::Bounded)
    throw TruncationUnsound("the run from " + to_string(a) + " neither halts nor loops within " +
                            std::to_string(bound) + " steps");
  long top = p.max_state();
  for (const Config& c : cf.run.configs) top = std::max({top, c.state, c.c1, c.c2});
  cf.depth = top + 1;

  using T = CharName::Tag;
  for (T t : {T::Alpha, T::Beta, T::Gamma, T::Gamma1, T::Gamma2, T::Delta, T::Delta1, T::Delta2})
    cf.labels.push_back(CharName{t});
  for (int i = 0; i < 3; ++i)
    for (long j = 0; j <= cf.depth; ++j) cf.labels.push_back(CharName::tower(i, j));
  std::set<Config> configs(cf.run.configs.begin(), cf.run.configs.end());
  for (const Config& c : configs) cf.labels.push_back(c);

  std::vector<std::string> names;
  for (const auto& l : cf.labels) names.push_back(point_name(l));
  std::vector<std::pair<std::string, std::string>> base = {
      {"a", "a"},     {"g", "a"},     {"g", "b"},     {"d", "b"},     {"g1", "g"},    {"g2", "g1"},  {"d1", "d"},
      {"d2", "d1"},   {"a0_0", "g"},  {"a0_0", "d"},  {"a1_0", "g1"}, {"a1_0", "d1"}, {"a2_0", "g2"}, {"a2_0", "d2"},
  };
  auto tname = [](int i, long j) { return point_name(CharName::tower(i, j)); };
  for (int i = 0; i < 3; ++i)
    for (long j = 0; j < cf.depth; ++j) base.emplace_back(tname(i, j + 1), tname(i, j));
  for (const Config& c : configs) {
    std::string e = point_name(c);
    base.emplace_back(e, tname(0, c.state));
    base.emplace_back(e, tname(1, c.c1));
    base.emplace_back(e, tname(2, c.c2));
  }
  Frame raw = Frame::from_names(names, base);
  std::set<Edge> r = transitive_closure(raw.r());
  std::optional<std::set<Edge>> s;
  if (mode.is_hybrid()) {
    s.emplace();
    const int n = static_cast<int>(names.size());
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y) s->insert({x, y});
  }
  cf.frame = Frame(std::move(names), std::move(r), std::move(s));
  return cf;
}

namespace {

PointLabel parse_label(const std::string& text) {
  using T = CharName::Tag;
  static const std::map<std::string, T> simple = {
      {"Alpha", T::Alpha},   {"Beta", T::Beta},     {"Gamma", T::Gamma},   {"Delta", T::Delta},
      {"Delta1", T::Delta1}, {"Delta2", T::Delta2}, {"Gamma1", T::Gamma1}, {"Gamma2", T::Gamma2},
  };
  if (auto it = simple.find(text); it != simple.end()) return CharName{it->second};
  if (text.size() > 3 && text.back() == ')') {
    std::string inner = text.substr(2, text.size() - 3);
    if (text.starts_with("A(")) {
      auto comma = inner.find(',');
      if (comma != std::string::npos) {
        int i = std::stoi(inner.substr(0, comma));
        long j = std::stol(inner.substr(comma + 1));
        if (i >= 0 && i <= 2 && j >= 0) return CharName::tower(i, j);
      }
    } else if (text.starts_with("e(")) {
      return parse_config(inner);
    }
  }
  throw SyntaxError(0, "a point label, got '" + text + "'");
}

}  // namespace

CanonicalFrame parse_canonical_frame(std::string_view text) {
  FrameDocument doc = parse_frame_document(text);
  CanonicalFrame cf;
  cf.frame = doc.frame;
  for (int x = 0; x < cf.frame.size(); ++x) {
    auto it = doc.labels.find(cf.frame.name(x));
    if (it == doc.labels.end()) throw SyntaxError(0, "a label for point " + cf.frame.name(x));
    cf.labels.push_back(parse_label(it->second));
    if (const auto* c = std::get_if<CharName>(&cf.labels.back()); c && c->tag == CharName::Tag::A)
      cf.depth = std::max(cf.depth, c->j);
  }
  return cf;
}

}  // namespace modunif
