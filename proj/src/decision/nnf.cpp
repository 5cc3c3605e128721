#include "nnf.hpp"

#include <algorithm>

#include "modunif/error.hpp"

namespace modunif::dec {

Store::Store() {
  intern({NK::True, Modality::Rel, 0, {}});
  intern({NK::False, Modality::Rel, 0, {}});
}

int Store::intern(NNode n) {
  Key k{n.kind, n.m, n.index, n.kids};
  auto it = table_.find(k);
  if (it != table_.end()) return it->second;
  int id = static_cast<int>(nodes_.size());
  nodes_.push_back(std::move(n));
  neg_.push_back(-1);
  table_.emplace(std::move(k), id);
  return id;
}

int Store::letter(NK kind, int index) { return intern({kind, Modality::Rel, index, {}}); }

int Store::make_and(std::vector<int> kids) {
  std::vector<int> flat;
  for (int k : kids) {
    if (k == bot()) return bot();
    if (k == top()) continue;
    if (kind(k) == NK::And) {
      const auto& inner = nodes_[k].kids;
      flat.insert(flat.end(), inner.begin(), inner.end());
    } else {
      flat.push_back(k);
    }
  }
  std::sort(flat.begin(), flat.end());
  flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
  if (flat.empty()) return top();
  if (flat.size() == 1) return flat[0];
  return junction(NK::And, std::move(flat), bot());
}

int Store::make_or(std::vector<int> kids) {
  std::vector<int> flat;
  for (int k : kids) {
    if (k == top()) return top();
    if (k == bot()) continue;
    if (kind(k) == NK::Or) {
      const auto& inner = nodes_[k].kids;
      flat.insert(flat.end(), inner.begin(), inner.end());
    } else {
      flat.push_back(k);
    }
  }
  std::sort(flat.begin(), flat.end());
  flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
  if (flat.empty()) return bot();
  if (flat.size() == 1) return flat[0];
  return junction(NK::Or, std::move(flat), top());
}

// Complement detection depends on which negations are known, so an existing
// node wins; otherwise the same operands could fold later but not earlier.
int Store::junction(NK kind, std::vector<int> flat, int absorbing) {
  if (auto it = table_.find(Key{kind, Modality::Rel, 0, flat}); it != table_.end()) return it->second;
  for (int k : flat)
    if (neg_[k] >= 0 && std::binary_search(flat.begin(), flat.end(), neg_[k])) return absorbing;
  return intern({kind, Modality::Rel, 0, std::move(flat)});
}

int Store::box(Modality m, int c) {
  // []true is true; <u>false and <>false are false.
  if (c == top()) return top();
  return intern({NK::Box, m, 0, {c}});
}

int Store::dia(Modality m, int c) {
  if (c == bot()) return bot();
  return intern({NK::Dia, m, 0, {c}});
}

int Store::negate(int id) {
  if (neg_[id] >= 0) return neg_[id];
  // Iterative over the not-yet-negated cone to avoid deep recursion.
  std::vector<std::pair<int, bool>> stack{{id, false}};
  while (!stack.empty()) {
    auto [x, ready] = stack.back();
    stack.pop_back();
    if (neg_[x] >= 0) continue;
    const NNode n = nodes_[x];
    if (!ready) {
      stack.push_back({x, true});
      for (int k : n.kids)
        if (neg_[k] < 0) stack.push_back({k, false});
      continue;
    }
    int r = -1;
    switch (n.kind) {
      case NK::True:
        r = bot();
        break;
      case NK::False:
        r = top();
        break;
      case NK::Var:
        r = letter(NK::NVar, n.index);
        break;
      case NK::NVar:
        r = letter(NK::Var, n.index);
        break;
      case NK::Nom:
        r = letter(NK::NNom, n.index);
        break;
      case NK::NNom:
        r = letter(NK::Nom, n.index);
        break;
      case NK::And:
      case NK::Or: {
        std::vector<int> ks;
        for (int k : n.kids) ks.push_back(neg_[k]);
        r = n.kind == NK::And ? make_or(std::move(ks)) : make_and(std::move(ks));
        break;
      }
      case NK::Box:
        r = dia(n.m, neg_[n.kids[0]]);
        break;
      case NK::Dia:
        r = box(n.m, neg_[n.kids[0]]);
        break;
    }
    neg_[x] = r;
    // Folding can make r coarser than x (e.g. a tautology became true); keep r's own entry then.
    if (neg_[r] < 0) neg_[r] = x;
  }
  return neg_[id];
}

int Store::from_formula(const Formula& root, bool negated) {
  auto& memo_root = negated ? neg_memo_ : pos_memo_;
  if (auto it = memo_root.find(root.id()); it != memo_root.end()) return it->second;
  // Compute the positive form of every node once, then negate.
  for (const Formula& f : postorder(root)) {
    if (pos_memo_.count(f.id())) continue;
    auto get = [&](const Formula& g) { return pos_memo_.at(g.id()); };
    int r = -1;
    switch (f.kind()) {
      case Kind::Var:
        r = letter(NK::Var, f.index());
        break;
      case Kind::Nominal:
        r = letter(NK::Nom, f.index());
        break;
      case Kind::Top:
        r = top();
        break;
      case Kind::Bot:
        r = bot();
        break;
      case Kind::Not:
        r = negate(get(f.child()));
        break;
      case Kind::And:
        r = make_and({get(f.lhs()), get(f.rhs())});
        break;
      case Kind::Or:
        r = make_or({get(f.lhs()), get(f.rhs())});
        break;
      case Kind::Implies:
        r = make_or({negate(get(f.lhs())), get(f.rhs())});
        break;
      case Kind::Iff: {
        int a = get(f.lhs()), b = get(f.rhs());
        r = make_and({make_or({negate(a), b}), make_or({a, negate(b)})});
        break;
      }
      case Kind::Box:
        r = box(f.modality(), get(f.child()));
        break;
      case Kind::Diamond:
        r = dia(f.modality(), get(f.child()));
        break;
    }
    pinned_.push_back(f);
    pos_memo_.emplace(f.id(), r);
  }
  int pos = pos_memo_.at(root.id());
  int out = negated ? negate(pos) : pos;
  memo_root.emplace(root.id(), out);
  return out;
}

Formula Store::to_formula(int id) const {
  const NNode& n = nodes_[id];
  switch (n.kind) {
    case NK::True:
      return Formula::top();
    case NK::False:
      return Formula::bot();
    case NK::Var:
      return Formula::var(n.index);
    case NK::NVar:
      return neg(Formula::var(n.index));
    case NK::Nom:
      return Formula::nominal(n.index);
    case NK::NNom:
      return neg(Formula::nominal(n.index));
    case NK::And:
    case NK::Or: {
      std::vector<Formula> ks;
      for (int k : n.kids) ks.push_back(to_formula(k));
      return n.kind == NK::And ? conj(ks) : disj(ks);
    }
    case NK::Box:
      return modunif::box(n.m, to_formula(n.kids[0]));
    case NK::Dia:
      return diamond(n.m, to_formula(n.kids[0]));
  }
  throw Error("bad NNF node");
}

}  // namespace modunif::dec
