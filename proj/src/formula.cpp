#include "modunif/formula.hpp"

#include <algorithm>
#include <limits>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include "modunif/error.hpp"

namespace modunif {

namespace detail {

struct Node {
  Kind kind;
  Modality modality;
  int index;
  Formula a;
  Formula b;
  std::size_t hash;
};

}  // namespace detail

namespace {

std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

bool has_operands(Kind k) { return k != Kind::Var && k != Kind::Nominal && k != Kind::Top && k != Kind::Bot; }

bool binary_kind(Kind k) {
  return k == Kind::And || k == Kind::Or || k == Kind::Implies || k == Kind::Iff;
}

const Formula& top_singleton() {
  static const Formula t = Formula::top();
  return t;
}

}  // namespace

Formula make_node(Kind kind, Modality m, int index, Formula a, Formula b) {
  std::size_t h = mix(static_cast<std::size_t>(kind) * 31 + 7, static_cast<std::size_t>(m));
  h = mix(h, static_cast<std::size_t>(index));
  if (has_operands(kind)) h = mix(h, a.hash());
  if (binary_kind(kind)) h = mix(h, b.hash());
  return Formula(std::make_shared<const detail::Node>(detail::Node{kind, m, index, std::move(a), std::move(b), h}));
}

Formula::Formula() : node_(top_singleton().node_) {}

Formula Formula::var(int index) {
  if (index < 1) throw Error("variable index must be >= 1, got " + std::to_string(index));
  return make_node(Kind::Var, Modality::Rel, index, top_singleton(), top_singleton());
}

Formula Formula::nominal(int index) {
  if (index < 1) throw Error("nominal index must be >= 1, got " + std::to_string(index));
  return make_node(Kind::Nominal, Modality::Rel, index, top_singleton(), top_singleton());
}

Formula Formula::top() {
  // Top's operand slots point at nothing; construct the node directly.
  static const Formula t(std::make_shared<const detail::Node>(
      detail::Node{Kind::Top, Modality::Rel, 0, Formula(nullptr), Formula(nullptr), 0x5151}));
  return t;
}

Formula Formula::bot() {
  static const Formula f = make_node(Kind::Bot, Modality::Rel, 0, top_singleton(), top_singleton());
  return f;
}

Kind Formula::kind() const noexcept { return node_->kind; }
Modality Formula::modality() const noexcept { return node_->modality; }
int Formula::index() const noexcept { return node_->index; }
const Formula& Formula::lhs() const { return node_->a; }
const Formula& Formula::rhs() const { return node_->b; }
std::size_t Formula::hash() const noexcept { return node_->hash; }

bool Formula::is_atom() const noexcept { return !has_operands(kind()); }
bool Formula::is_unary() const noexcept {
  Kind k = kind();
  return k == Kind::Not || k == Kind::Box || k == Kind::Diamond;
}
bool Formula::is_binary() const noexcept { return binary_kind(kind()); }

namespace {

struct PairHash {
  std::size_t operator()(const std::pair<const void*, const void*>& p) const noexcept {
    return mix(std::hash<const void*>{}(p.first), std::hash<const void*>{}(p.second));
  }
};

using EqMemo = std::unordered_set<std::pair<const void*, const void*>, PairHash>;

bool equal_rec(const Formula& a, const Formula& b, EqMemo& memo) {
  if (a.id() == b.id()) return true;
  if (a.hash() != b.hash() || a.kind() != b.kind() || a.index() != b.index()) return false;
  if (a.is_atom()) return true;
  if ((a.kind() == Kind::Box || a.kind() == Kind::Diamond) && a.modality() != b.modality()) return false;
  if (memo.count({a.id(), b.id()})) return true;
  bool eq = equal_rec(a.lhs(), b.lhs(), memo) && (!a.is_binary() || equal_rec(a.rhs(), b.rhs(), memo));
  if (eq) memo.insert({a.id(), b.id()});
  return eq;
}

}  // namespace

bool operator==(const Formula& a, const Formula& b) {
  if (a.id() == b.id()) return true;
  if (a.hash() != b.hash()) return false;
  EqMemo memo;
  return equal_rec(a, b, memo);
}

Formula neg(Formula f) { return make_node(Kind::Not, Modality::Rel, 0, std::move(f), top_singleton()); }
Formula conj(Formula a, Formula b) { return make_node(Kind::And, Modality::Rel, 0, std::move(a), std::move(b)); }
Formula disj(Formula a, Formula b) { return make_node(Kind::Or, Modality::Rel, 0, std::move(a), std::move(b)); }
Formula implies(Formula a, Formula b) {
  return make_node(Kind::Implies, Modality::Rel, 0, std::move(a), std::move(b));
}
Formula iff(Formula a, Formula b) { return make_node(Kind::Iff, Modality::Rel, 0, std::move(a), std::move(b)); }
Formula box(Modality m, Formula f) { return make_node(Kind::Box, m, 0, std::move(f), top_singleton()); }
Formula diamond(Modality m, Formula f) { return make_node(Kind::Diamond, m, 0, std::move(f), top_singleton()); }

Formula conj(std::span<const Formula> fs) {
  if (fs.empty()) return Formula::top();
  Formula acc = fs[0];
  for (std::size_t i = 1; i < fs.size(); ++i) acc = conj(acc, fs[i]);
  return acc;
}

Formula disj(std::span<const Formula> fs) {
  if (fs.empty()) return Formula::bot();
  Formula acc = fs[0];
  for (std::size_t i = 1; i < fs.size(); ++i) acc = disj(acc, fs[i]);
  return acc;
}

Formula conj(std::initializer_list<Formula> fs) { return conj(std::span<const Formula>(fs.begin(), fs.size())); }
Formula disj(std::initializer_list<Formula> fs) { return disj(std::span<const Formula>(fs.begin(), fs.size())); }

Formula diamond_power(Modality m, int times, Formula f) {
  for (int i = 0; i < times; ++i) f = diamond(m, std::move(f));
  return f;
}

Formula surrogate_exists(const Formula& f, int nominal_index) {
  require_language(f, Language::H2);
  return diamond(Modality::Hyb, conj(Formula::nominal(nominal_index), diamond(Modality::Hyb, f)));
}

namespace {

// Post-order visit of every distinct node.
template <class Fn>
void visit_dag(const Formula& root, Fn&& fn) {
  std::unordered_set<const void*> seen;
  std::vector<std::pair<Formula, bool>> stack{{root, false}};
  while (!stack.empty()) {
    auto [f, expanded] = stack.back();
    stack.pop_back();
    if (expanded) {
      fn(f);
      continue;
    }
    if (!seen.insert(f.id()).second) continue;
    stack.push_back({f, true});
    if (f.is_binary()) stack.push_back({f.rhs(), false});
    if (!f.is_atom()) stack.push_back({f.lhs(), false});
  }
}

}  // namespace

Formula desugar(const Formula& root) {
  std::unordered_map<const void*, Formula> memo;
  visit_dag(root, [&](const Formula& f) {
    auto get = [&](const Formula& g) { return memo.at(g.id()); };
    Formula out;
    switch (f.kind()) {
      case Kind::Var:
      case Kind::Nominal:
      case Kind::Top:
      case Kind::Bot:
        out = f;
        break;
      case Kind::Not: {
        const Formula& c = get(f.child());
        out = c.id() == f.child().id() ? f : neg(c);
        break;
      }
      case Kind::And: {
        const Formula& l = get(f.lhs());
        const Formula& r = get(f.rhs());
        out = (l.id() == f.lhs().id() && r.id() == f.rhs().id()) ? f : conj(l, r);
        break;
      }
      case Kind::Or:
        out = neg(conj(neg(get(f.lhs())), neg(get(f.rhs()))));
        break;
      case Kind::Implies:
        out = neg(conj(get(f.lhs()), neg(get(f.rhs()))));
        break;
      case Kind::Iff: {
        const Formula& l = get(f.lhs());
        const Formula& r = get(f.rhs());
        out = conj(neg(conj(l, neg(r))), neg(conj(r, neg(l))));
        break;
      }
      case Kind::Box: {
        const Formula& c = get(f.child());
        out = c.id() == f.child().id() ? f : box(f.modality(), c);
        break;
      }
      case Kind::Diamond:
        out = neg(box(f.modality(), neg(get(f.child()))));
        break;
    }
    memo.emplace(f.id(), std::move(out));
  });
  return memo.at(root.id());
}

namespace {

// Returns a description of the first symbol outside `lang`, if any.
std::optional<std::string> language_violation(const Formula& root, Language lang) {
  std::optional<std::string> bad;
  visit_dag(root, [&](const Formula& f) {
    if (bad) return;
    if (lang == Language::L) {
      if (f.kind() == Kind::Nominal) bad = "nominal n" + std::to_string(f.index()) + " is not in L";
      if ((f.kind() == Kind::Box || f.kind() == Kind::Diamond) && f.modality() == Modality::Hyb)
        bad = "[h]/<h> is not in L";
    } else {
      if ((f.kind() == Kind::Box || f.kind() == Kind::Diamond) && f.modality() == Modality::Univ)
        bad = "[u]/<u> is not in H2";
    }
  });
  return bad;
}

}  // namespace

bool in_language(const Formula& f, Language lang) { return !language_violation(f, lang); }

void require_language(const Formula& f, Language lang) {
  if (auto bad = language_violation(f, lang)) throw LanguageError(*bad);
}

std::set<int> variables(const Formula& root) {
  std::set<int> out;
  visit_dag(root, [&](const Formula& f) {
    if (f.kind() == Kind::Var) out.insert(f.index());
  });
  return out;
}

std::set<int> nominals(const Formula& root) {
  std::set<int> out;
  visit_dag(root, [&](const Formula& f) {
    if (f.kind() == Kind::Nominal) out.insert(f.index());
  });
  return out;
}

bool is_ground(const Formula& f) { return variables(f).empty(); }

bool uses_modality(const Formula& root, Modality m) {
  bool found = false;
  visit_dag(root, [&](const Formula& f) {
    if ((f.kind() == Kind::Box || f.kind() == Kind::Diamond) && f.modality() == m) found = true;
  });
  return found;
}

int modal_depth(const Formula& root) {
  std::unordered_map<const void*, int> depth;
  visit_dag(root, [&](const Formula& f) {
    int d = 0;
    if (!f.is_atom()) d = depth.at(f.lhs().id());
    if (f.is_binary()) d = std::max(d, depth.at(f.rhs().id()));
    if (f.kind() == Kind::Box || f.kind() == Kind::Diamond) ++d;
    depth[f.id()] = d;
  });
  return depth.at(root.id());
}

std::size_t dag_size(const Formula& root) {
  std::size_t n = 0;
  visit_dag(root, [&](const Formula&) { ++n; });
  return n;
}

std::uint64_t tree_size(const Formula& root) {
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  auto add = [](std::uint64_t a, std::uint64_t b) { return a > kMax - b ? kMax : a + b; };
  std::unordered_map<const void*, std::uint64_t> size;
  visit_dag(root, [&](const Formula& f) {
    std::uint64_t s = 1;
    if (!f.is_atom()) s = add(s, size.at(f.lhs().id()));
    if (f.is_binary()) s = add(s, size.at(f.rhs().id()));
    size[f.id()] = s;
  });
  return size.at(root.id());
}

std::vector<Formula> postorder(const Formula& root) {
  std::vector<Formula> out;
  visit_dag(root, [&](const Formula& f) { out.push_back(f); });
  return out;
}

std::vector<Formula> conjuncts(const Formula& f) {
  std::vector<Formula> out;
  std::vector<Formula> stack{f};
  while (!stack.empty()) {
    Formula g = stack.back();
    stack.pop_back();
    if (g.kind() == Kind::And) {
      stack.push_back(g.rhs());
      stack.push_back(g.lhs());
    } else {
      out.push_back(g);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

void Substitution::set(int var, Formula f) {
  if (var < 1) throw Error("variable index must be >= 1, got " + std::to_string(var));
  map_.insert_or_assign(var, std::move(f));
}

std::optional<Formula> Substitution::get(int var) const {
  auto it = map_.find(var);
  if (it == map_.end()) return std::nullopt;
  return it->second;
}

Formula apply_subst(const Substitution& s, const Formula& root) {
  if (s.empty()) return root;
  std::unordered_map<const void*, Formula> memo;
  visit_dag(root, [&](const Formula& f) {
    Formula out = f;
    if (f.kind() == Kind::Var) {
      if (auto img = s.get(f.index())) out = *img;
    } else if (!f.is_atom()) {
      const Formula& l = memo.at(f.lhs().id());
      bool same = l.id() == f.lhs().id();
      Formula r = f.is_binary() ? memo.at(f.rhs().id()) : Formula();
      if (f.is_binary()) same = same && r.id() == f.rhs().id();
      if (!same) out = make_node(f.kind(), f.modality(), f.index(), l, f.is_binary() ? r : Formula());
    }
    memo.emplace(f.id(), std::move(out));
  });
  return memo.at(root.id());
}

Substitution compose(const Substitution& outer, const Substitution& inner) {
  Substitution out;
  for (const auto& [v, f] : outer.entries()) out.set(v, f);
  for (const auto& [v, f] : inner.entries()) out.set(v, apply_subst(outer, f));
  return out;
}

std::vector<Substitution> ground_substitutions(const std::set<int>& vars) {
  std::vector<int> vs(vars.begin(), vars.end());
  if (vs.size() >= 63) throw ResourceLimit("too many variables for ground enumeration");
  const std::uint64_t count = std::uint64_t{1} << vs.size();
  std::vector<Substitution> out;
  out.reserve(count);
  for (std::uint64_t code = 0; code < count; ++code) {
    Substitution s;
    for (std::size_t i = 0; i < vs.size(); ++i) {
      // First variable is the most significant digit.
      bool bit = (code >> (vs.size() - 1 - i)) & 1U;
      s.set(vs[i], bit ? Formula::top() : Formula::bot());
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace modunif
