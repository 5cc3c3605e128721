#pragma once

// Hash-consed negation normal form shared by the decision engines.

#include <cstdint>
#include <map>
#include <unordered_map>
#include <vector>

#include "modunif/formula.hpp"

namespace modunif::dec {

enum class NK : std::uint8_t { True, False, Var, NVar, Nom, NNom, And, Or, Box, Dia };

struct NNode {
  NK kind;
  Modality m = Modality::Rel;
  int index = 0;
  std::vector<int> kids;  // sorted, for And/Or; one child for Box/Dia
};

class Store {
 public:
  Store();

  int top() const { return 0; }
  int bot() const { return 1; }

  const NNode& node(int id) const { return nodes_[id]; }
  NK kind(int id) const { return nodes_[id].kind; }
  int child(int id) const { return nodes_[id].kids[0]; }
  std::size_t size() const { return nodes_.size(); }

  int letter(NK kind, int index);
  int make_and(std::vector<int> kids);
  int make_or(std::vector<int> kids);
  int box(Modality m, int c);
  int dia(Modality m, int c);
  int negate(int id);

  // NNF of f, or of ~f when `negated`.
  int from_formula(const Formula& f, bool negated = false);
  Formula to_formula(int id) const;

  bool is_letter(int id) const {
    NK k = kind(id);
    return k == NK::Var || k == NK::NVar || k == NK::Nom || k == NK::NNom;
  }
  bool is_modal(int id) const { return kind(id) == NK::Box || kind(id) == NK::Dia; }

 private:
  int intern(NNode n);
  int junction(NK kind, std::vector<int> flat, int absorbing);

  struct Key {
    NK kind;
    Modality m;
    int index;
    std::vector<int> kids;
    bool operator<(const Key& o) const {
      if (kind != o.kind) return kind < o.kind;
      if (m != o.m) return m < o.m;
      if (index != o.index) return index < o.index;
      return kids < o.kids;
    }
  };

  std::vector<NNode> nodes_;
  std::vector<int> neg_;
  std::map<Key, int> table_;
  std::unordered_map<const void*, int> pos_memo_, neg_memo_;
  std::vector<Formula> pinned_;  // keeps memo keys alive
};

}  // namespace modunif::dec
