// Completion tableau over a graph of worlds. Handles [] and [h] edges, the
// universal modality through a global set, and nominals by merging every
// world that contains n_k into the world reserved for n_k. Or is split
// semantically (later branches carry the negations of earlier disjuncts).
// Non-nominal worlds are blocked by an earlier world with the same label.

#include <algorithm>
#include <map>
#include <optional>
#include <set>

#include "engines.hpp"
#include "modunif/error.hpp"
#include "nnf.hpp"

namespace modunif::dec {

namespace {

struct World {
  std::set<int> label;
  std::set<int> r, s;
  bool alive = true;
  int merged_into = -1;
};

struct State {
  std::vector<World> worlds;
  std::set<int> global;
  std::map<int, int> nom_world;
};

class Tableau {
 public:
  Tableau(Store& st, std::size_t budget) : st_(st), budget_(budget) {}

  std::optional<State> run(State s) {
    while (true) {
      if (!saturate(s)) return std::nullopt;
      if (auto choice = find_open_or(s)) {
        auto [w, n] = *choice;
        const auto kids = st_.node(n).kids;
        for (std::size_t i = 0; i < kids.size(); ++i) {
          charge();
          State t = s;
          add(t, w, kids[i]);
          for (std::size_t j = 0; j < i; ++j) add(t, w, st_.negate(kids[j]));
          if (auto done = run(std::move(t))) return done;
        }
        return std::nullopt;
      }
      if (!generate(s)) return s;
    }
  }

  std::size_t used() const { return used_; }

  static int resolve(const State& s, int w) {
    while (s.worlds[w].merged_into >= 0) w = s.worlds[w].merged_into;
    return w;
  }

  // Blocker of each live world (itself when unblocked).
  std::vector<int> blockers(const State& s) const {
    std::vector<int> out(s.worlds.size(), -1);
    std::set<int> nominal_worlds;
    for (const auto& [k, w] : s.nom_world) nominal_worlds.insert(w);
    std::map<std::set<int>, int> first;
    for (std::size_t w = 0; w < s.worlds.size(); ++w) {
      if (!s.worlds[w].alive) continue;
      if (nominal_worlds.count(static_cast<int>(w))) {
        out[w] = static_cast<int>(w);
        continue;
      }
      auto [it, fresh] = first.emplace(s.worlds[w].label, static_cast<int>(w));
      out[w] = fresh ? static_cast<int>(w) : it->second;
    }
    return out;
  }

 private:
  void charge() {
    if (++used_ > budget_) throw ResourceLimit("tableau budget of " + std::to_string(budget_) + " exhausted");
  }

  void add(State& s, int w, int n) { s.worlds[w].label.insert(n); }

  int new_world(State& s, std::set<int> label) {
    charge();
    World w;
    w.label = std::move(label);
    s.worlds.push_back(std::move(w));
    return static_cast<int>(s.worlds.size()) - 1;
  }

  void merge(State& s, int from, int into) {
    World& a = s.worlds[from];
    World& b = s.worlds[into];
    b.label.insert(a.label.begin(), a.label.end());
    auto redirect = [&](std::set<int>& rel) {
      if (rel.erase(from)) rel.insert(into);
    };
    for (int x : a.r) b.r.insert(x == from ? into : x);
    for (int x : a.s) b.s.insert(x == from ? into : x);
    a.alive = false;
    a.merged_into = into;
    a.label.clear();
    a.r.clear();
    a.s.clear();
    for (auto& w : s.worlds) {
      redirect(w.r);
      redirect(w.s);
    }
    for (auto& [k, owner] : s.nom_world)
      if (owner == from) owner = into;
  }

  bool clash(const World& w) const {
    for (int n : w.label) {
      NK k = st_.kind(n);
      if (k == NK::False) return true;
      if (k != NK::Or && k != NK::Dia && k != NK::NVar && k != NK::NNom && w.label.count(st_.negate(n))) return true;
    }
    return false;
  }

  // Deterministic rules to fixpoint. False on clash.
  bool saturate(State& s) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t wi = 0; wi < s.worlds.size(); ++wi) {
        if (!s.worlds[wi].alive) continue;
        const int w = static_cast<int>(wi);
        for (int g : s.global)
          if (s.worlds[w].label.insert(g).second) changed = true;
        const std::vector<int> label(s.worlds[w].label.begin(), s.worlds[w].label.end());
        for (int n : label) {
          const NNode node = st_.node(n);
          switch (node.kind) {
            case NK::Nom: {
              int owner = s.nom_world.at(node.index);
              if (owner != w) {
                merge(s, w, owner);
                changed = true;
              }
              break;
            }
            case NK::And:
              for (int c : node.kids)
                if (s.worlds[w].label.insert(c).second) changed = true;
              break;
            case NK::Box: {
              const int c = node.kids[0];
              if (node.m == Modality::Univ) {
                if (s.global.insert(c).second) changed = true;
                break;
              }
              const auto succ = node.m == Modality::Rel ? s.worlds[w].r : s.worlds[w].s;
              for (int v : succ)
                if (s.worlds[v].label.insert(c).second) changed = true;
              break;
            }
            default:
              break;
          }
          if (!s.worlds[w].alive) break;
        }
        if (s.worlds[w].alive && clash(s.worlds[w])) return false;
      }
    }
    return true;
  }

  std::optional<std::pair<int, int>> find_open_or(const State& s) const {
    for (std::size_t w = 0; w < s.worlds.size(); ++w) {
      if (!s.worlds[w].alive) continue;
      const auto& label = s.worlds[w].label;
      for (int n : label) {
        if (st_.kind(n) != NK::Or) continue;
        const auto& kids = st_.node(n).kids;
        if (std::none_of(kids.begin(), kids.end(), [&](int c) { return label.count(c) != 0; }))
          return std::make_pair(static_cast<int>(w), n);
      }
    }
    return std::nullopt;
  }

  // One generating step. False when nothing is left to generate.
  bool generate(State& s) {
    const std::vector<int> block = blockers(s);
    for (std::size_t wi = 0; wi < s.worlds.size(); ++wi) {
      if (!s.worlds[wi].alive || block[wi] != static_cast<int>(wi)) continue;
      const int w = static_cast<int>(wi);
      for (int n : s.worlds[w].label) {
        const NNode& node = st_.node(n);
        if (node.kind != NK::Dia) continue;
        const int c = node.kids[0];
        if (node.m == Modality::Univ) {
          bool found = std::any_of(s.worlds.begin(), s.worlds.end(),
                                   [&](const World& v) { return v.alive && v.label.count(c); });
          if (found) continue;
          new_world(s, {c});
          return true;
        }
        const auto& succ = node.m == Modality::Rel ? s.worlds[w].r : s.worlds[w].s;
        bool found = std::any_of(succ.begin(), succ.end(), [&](int v) { return s.worlds[v].label.count(c) != 0; });
        if (found) continue;
        int v = new_world(s, {c});
        (node.m == Modality::Rel ? s.worlds[w].r : s.worlds[w].s).insert(v);
        return true;
      }
    }
    return false;
  }

  Store& st_;
  std::size_t budget_;
  std::size_t used_ = 0;
};

}  // namespace

SatVerdict tableau_satisfiable(const Formula& f, Logic logic, std::size_t budget) {
  Store st;
  const int root = st.from_formula(f);
  Tableau tab(st, budget);
  State init;
  for (int k : nominals(f)) {
    World w;
    w.label.insert(st.letter(NK::Nom, k));
    init.nom_world[k] = static_cast<int>(init.worlds.size());
    init.worlds.push_back(std::move(w));
  }
  const int root_world = static_cast<int>(init.worlds.size());
  World rw;
  rw.label.insert(root);
  init.worlds.push_back(std::move(rw));

  std::optional<State> done = tab.run(std::move(init));
  if (!done) return SatVerdict{std::nullopt, tab.used()};

  const State& s = *done;
  const std::vector<int> block = tab.blockers(s);
  std::map<int, int> point;
  std::vector<std::string> names;
  for (std::size_t w = 0; w < s.worlds.size(); ++w) {
    if (!s.worlds[w].alive || block[w] != static_cast<int>(w)) continue;
    point[static_cast<int>(w)] = static_cast<int>(names.size());
    names.push_back("t" + std::to_string(names.size()));
  }
  auto target = [&](int v) { return point.at(block[Tableau::resolve(s, v)]); };
  std::set<Edge> r, sr;
  Valuation val;
  for (int v : variables(f)) val.vars[v];
  for (const auto& [w, x] : point) {
    for (int v : s.worlds[w].r) r.insert({x, target(v)});
    for (int v : s.worlds[w].s) sr.insert({x, target(v)});
    for (int n : s.worlds[w].label)
      if (st.kind(n) == NK::Var) val.vars[st.node(n).index].insert(x);
  }
  for (const auto& [k, w] : s.nom_world) val.noms[k] = point.at(Tableau::resolve(s, w));
  std::optional<std::set<Edge>> s_rel;
  if (logic == Logic::KH2) s_rel = std::move(sr);
  Frame frame(std::move(names), std::move(r), std::move(s_rel));
  const int x = point.at(block[Tableau::resolve(s, root_world)]);
  return SatVerdict{PointedModel{Model(std::move(frame), std::move(val)), x}, tab.used()};
}

}  // namespace modunif::dec
