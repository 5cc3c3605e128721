#include "oracles.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>

namespace oracle {

Formula random_formula(Rng& rng, const GenOptions& g) {
  const bool h2 = g.lang == Language::H2;
  auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); };
  auto atom = [&]() -> Formula {
    int r = pick(h2 && g.noms > 0 ? 5 : 4);
    if (r == 0) return Formula::top();
    if (r == 1) return Formula::bot();
    if (r == 4) return Formula::nominal(1 + pick(g.noms));
    return Formula::var(1 + pick(std::max(g.vars, 1)));
  };
  auto rec = [&](auto& self, int depth) -> Formula {
    if (depth <= 0 || pick(6) == 0) return atom();
    const Modality second = h2 ? Modality::Hyb : Modality::Univ;
    switch (pick(10)) {
      case 0:
      case 1:
        return neg(self(self, depth - 1));
      case 2:
        return conj(self(self, depth - 1), self(self, depth - 1));
      case 3:
        return disj(self(self, depth - 1), self(self, depth - 1));
      case 4:
        return implies(self(self, depth - 1), self(self, depth - 1));
      case 5:
        return box(Modality::Rel, self(self, depth - 1));
      case 6:
        return diamond(Modality::Rel, self(self, depth - 1));
      case 7:
        return box(second, self(self, depth - 1));
      case 8:
        return diamond(second, self(self, depth - 1));
      default:
        return iff(self(self, depth - 1), self(self, depth - 1));
    }
  };
  return rec(rec, g.depth);
}

Term random_term(Rng& rng, int depth, int vars) {
  const int r = depth <= 0 ? static_cast<int>(rng() % 2) : static_cast<int>(rng() % 6);
  switch (r) {
    case 0:
      return Term::ind_var(1 + static_cast<int>(rng() % static_cast<std::uint64_t>(vars)));
    case 1:
      return Term::one();
    case 2:
      return Term::meet(random_term(rng, depth - 1, vars), random_term(rng, depth - 1, vars));
    case 3:
      return Term::complement(random_term(rng, depth - 1, vars));
    default:
      return Term::box_op(r == 4 ? 1 : 2, random_term(rng, depth - 1, vars));
  }
}

sat::Cnf random_cnf(Rng& rng, int atoms, int clauses) {
  sat::Cnf f;
  f.num_atoms = atoms;
  for (int c = 0; c < clauses; ++c) {
    std::vector<sat::Lit> cl;
    const int width = 1 + static_cast<int>(rng() % 3);
    for (int k = 0; k < width; ++k) {
      const int v = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(atoms));
      cl.push_back(rng() % 2 ? v : -v);
    }
    f.add(std::move(cl));
  }
  return f;
}

std::optional<std::vector<bool>> truth_table_sat(const sat::Cnf& f) {
  const int n = f.num_atoms;
  // Atoms 1..6 vary inside a word; the rest are fixed per block.
  static const std::uint64_t pattern[6] = {0xAAAAAAAAAAAAAAAAULL, 0xCCCCCCCCCCCCCCCCULL, 0xF0F0F0F0F0F0F0F0ULL,
                                           0xFF00FF00FF00FF00ULL, 0xFFFF0000FFFF0000ULL, 0xFFFFFFFF00000000ULL};
  const int inner = std::min(n, 6);
  const std::uint64_t blocks = n > 6 ? (1ULL << (n - 6)) : 1;
  const std::uint64_t valid_mask = n >= 6 ? ~0ULL : ((1ULL << (1ULL << n)) - 1);
  for (std::uint64_t block = 0; block < blocks; ++block) {
    auto word_of = [&](int atom) -> std::uint64_t {
      if (atom <= inner) return pattern[atom - 1];
      return (block >> (atom - 7)) & 1 ? ~0ULL : 0ULL;
    };
    std::uint64_t all = valid_mask;
    for (const auto& cl : f.clauses) {
      std::uint64_t any = 0;
      for (sat::Lit l : cl) any |= l > 0 ? word_of(l) : ~word_of(-l);
      all &= any;
      if (!all) break;
    }
    if (all) {
      const int bit = __builtin_ctzll(all);
      std::vector<bool> model(static_cast<std::size_t>(n) + 1, false);
      for (int a = 1; a <= n; ++a) model[a] = (word_of(a) >> bit) & 1;
      return model;
    }
  }
  return std::nullopt;
}

bool naive_truth(const Model& m, int x, const Formula& f) {
  const Frame& fr = m.frame();
  const Valuation& v = m.valuation();
  switch (f.kind()) {
    case Kind::Var: {
      auto it = v.vars.find(f.index());
      return it != v.vars.end() && it->second.count(x);
    }
    case Kind::Nominal:
      return v.noms.at(f.index()) == x;
    case Kind::Top:
      return true;
    case Kind::Bot:
      return false;
    case Kind::Not:
      return !naive_truth(m, x, f.child());
    case Kind::And:
      return naive_truth(m, x, f.lhs()) && naive_truth(m, x, f.rhs());
    case Kind::Or:
      return naive_truth(m, x, f.lhs()) || naive_truth(m, x, f.rhs());
    case Kind::Implies:
      return !naive_truth(m, x, f.lhs()) || naive_truth(m, x, f.rhs());
    case Kind::Iff:
      return naive_truth(m, x, f.lhs()) == naive_truth(m, x, f.rhs());
    case Kind::Box:
    case Kind::Diamond: {
      const bool is_box = f.kind() == Kind::Box;
      for (int y = 0; y < fr.size(); ++y) {
        bool linked = false;
        if (f.modality() == Modality::Univ)
          linked = true;
        else if (f.modality() == Modality::Rel)
          linked = fr.r().count({x, y}) != 0;
        else
          linked = fr.s()->count({x, y}) != 0;
        if (!linked) continue;
        const bool t = naive_truth(m, y, f.child());
        if (is_box && !t) return false;
        if (!is_box && t) return true;
      }
      return is_box;
    }
  }
  return false;
}

bool brute_frame_valid(const Frame& frame, const Formula& f) {
  const std::set<int> var_set = variables(f), nom_set = nominals(f);
  const std::vector<int> vars(var_set.begin(), var_set.end());
  const std::vector<int> noms(nom_set.begin(), nom_set.end());
  const int n = frame.size();
  const std::uint64_t var_cases = 1ULL << (vars.size() * static_cast<std::size_t>(n));
  std::uint64_t nom_cases = 1;
  for (std::size_t k = 0; k < noms.size(); ++k) nom_cases *= static_cast<std::uint64_t>(n);
  for (std::uint64_t vc = 0; vc < var_cases; ++vc) {
    for (std::uint64_t nc = 0; nc < nom_cases; ++nc) {
      Valuation v;
      for (std::size_t i = 0; i < vars.size(); ++i)
        for (int x = 0; x < n; ++x)
          if ((vc >> (i * static_cast<std::size_t>(n) + static_cast<std::size_t>(x))) & 1) v.vars[vars[i]].insert(x);
      std::uint64_t rest = nc;
      for (int k : noms) {
        v.noms[k] = static_cast<int>(rest % static_cast<std::uint64_t>(n));
        rest /= static_cast<std::uint64_t>(n);
      }
      const Model m(frame, v);
      for (int x = 0; x < n; ++x)
        if (!naive_truth(m, x, f)) return false;
    }
  }
  return true;
}

std::vector<Frame> all_frames(int n, Language kind) {
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back("w" + std::to_string(i));
  std::vector<Edge> pairs;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) pairs.push_back({x, y});
  const std::size_t np = pairs.size();
  const bool h2 = kind == Language::H2;
  const std::uint64_t total = 1ULL << (np * (h2 ? 2 : 1));
  std::vector<Frame> out;
  for (std::uint64_t code = 0; code < total; ++code) {
    std::set<Edge> r, s;
    for (std::size_t i = 0; i < np; ++i) {
      if ((code >> i) & 1) r.insert(pairs[i]);
      if (h2 && ((code >> (np + i)) & 1)) s.insert(pairs[i]);
    }
    out.emplace_back(names, std::move(r), h2 ? std::optional<std::set<Edge>>(std::move(s)) : std::nullopt);
  }
  return out;
}

bool zero_free(const Trace& t) {
  for (std::size_t i = 0; i < t.length(); ++i)
    if (shifted_index(t, i, 1) == 0 || shifted_index(t, i, 2) == 0) return false;
  return true;
}

Model perturbed_canonical(const CanonicalFrame& cf, Rng& rng, const Mode& mode, const PerturbOptions& opts) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::string> names;
  std::map<int, int> keep;  // old index -> new index
  for (int x = 0; x < cf.frame.size(); ++x) {
    const bool e_point = std::holds_alternative<Config>(cf.labels[x]);
    if (e_point && unit(rng) < opts.drop_e_point) continue;
    keep[x] = static_cast<int>(names.size());
    names.push_back(cf.frame.name(x));
  }
  std::set<Edge> r;
  for (const auto& [x, y] : cf.frame.r())
    if (keep.count(x) && keep.count(y)) r.insert({keep[x], keep[y]});
  const int extra = static_cast<int>(rng() % static_cast<std::uint64_t>(opts.max_extra_points + 1));
  for (int i = 0; i < extra; ++i) names.push_back("x" + std::to_string(i));
  const int n = static_cast<int>(names.size());
  auto any_point = [&] { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); };
  for (int i = 0; i < extra; ++i) {
    const int fresh = n - extra + i;
    for (int k = 0; k < 3; ++k) {
      if (rng() % 2) r.insert({fresh, any_point()});
      if (rng() % 2) r.insert({any_point(), fresh});
    }
  }
  const int flips = static_cast<int>(rng() % static_cast<std::uint64_t>(opts.max_edge_flips + 1));
  for (int i = 0; i < flips; ++i) {
    const Edge e{any_point(), any_point()};
    if (!r.erase(e)) r.insert(e);
  }
  std::optional<std::set<Edge>> s;
  if (mode.is_hybrid()) {
    s.emplace();
    const bool full = rng() % 2 == 0;
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y)
        if (full || unit(rng) < 0.7) s->insert({x, y});
  }
  Frame frame(names, std::move(r), std::move(s));
  Valuation v;
  for (int p : {1, 2})
    for (int x = 0; x < n; ++x)
      if (rng() % 2) v.vars[p].insert(x);
  if (mode.is_hybrid()) v.noms[mode.nominal] = any_point();
  return Model(std::move(frame), std::move(v));
}

}  // namespace oracle
