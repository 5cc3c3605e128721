#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace modunif {

// The three box operators: [] over R, [u] over all points, [h] over S.
enum class Modality : std::uint8_t { Rel, Univ, Hyb };

enum class Kind : std::uint8_t {
  Var,
  Nominal,
  Top,
  Bot,
  Not,
  And,
  // sugar, kept as written so printing is faithful
  Or,
  Implies,
  Iff,
  Box,
  Diamond,
};

// L has [] and [u]; H2 has [], [h] and nominals.
enum class Language : std::uint8_t { L, H2 };

namespace detail {
struct Node;
}

// Immutable formula handle. Copies share structure, so building a formula
// from repeated subformulas yields a DAG rather than a tree.
class Formula {
 public:
  Formula();  // Top

  static Formula var(int index);
  static Formula nominal(int index);
  static Formula top();
  static Formula bot();

  Kind kind() const noexcept;
  // Only meaningful for Box and Diamond.
  Modality modality() const noexcept;
  // Variable or nominal index; 0 for other kinds.
  int index() const noexcept;
  // First operand of unary and binary connectives.
  const Formula& lhs() const;
  // Second operand of binary connectives.
  const Formula& rhs() const;
  // Alias of lhs() for unary connectives.
  const Formula& child() const { return lhs(); }

  std::size_t hash() const noexcept;
  // Identity of the shared node; stable while any copy is alive.
  const void* id() const noexcept { return node_.get(); }

  bool is_atom() const noexcept;
  bool is_unary() const noexcept;
  bool is_binary() const noexcept;

  friend bool operator==(const Formula& a, const Formula& b);
  friend bool operator!=(const Formula& a, const Formula& b) { return !(a == b); }

 private:
  explicit Formula(std::shared_ptr<const detail::Node> node) : node_(std::move(node)) {}
  friend Formula make_node(Kind, Modality, int, Formula, Formula);

  std::shared_ptr<const detail::Node> node_;
};

struct FormulaHash {
  std::size_t operator()(const Formula& f) const noexcept { return f.hash(); }
};

// Constructors. Or/Implies/Iff/Diamond build sugar nodes.
Formula neg(Formula f);
Formula conj(Formula a, Formula b);
Formula disj(Formula a, Formula b);
Formula implies(Formula a, Formula b);
Formula iff(Formula a, Formula b);
Formula box(Modality m, Formula f);
Formula diamond(Modality m, Formula f);

// Left-nested conjunction/disjunction; Top resp. Bot when empty.
Formula conj(std::span<const Formula> fs);
Formula disj(std::span<const Formula> fs);
Formula conj(std::initializer_list<Formula> fs);
Formula disj(std::initializer_list<Formula> fs);

// diamond(m, diamond(m, ... f)) with `times` diamonds.
Formula diamond_power(Modality m, int times, Formula f);

// ~<h>~(n & <h>f), i.e. <h>(n & <h>f): the stand-in for the universal diamond in H2.
// Throws LanguageError if f is not an H2 formula.
Formula surrogate_exists(const Formula& f, int nominal_index);

// Rewrites Or, Implies, Iff and Diamond into Not/And/Box. Preserves sharing.
Formula desugar(const Formula& f);

bool in_language(const Formula& f, Language lang);
// Throws LanguageError naming the offending symbol.
void require_language(const Formula& f, Language lang);

std::set<int> variables(const Formula& f);
std::set<int> nominals(const Formula& f);
bool is_ground(const Formula& f);
bool uses_modality(const Formula& f, Modality m);
int modal_depth(const Formula& f);
// Distinct shared nodes.
std::size_t dag_size(const Formula& f);
// Size when fully unfolded; saturates at UINT64_MAX.
std::uint64_t tree_size(const Formula& f);

// Every distinct node, children before parents.
std::vector<Formula> postorder(const Formula& f);

// Flattens nested And nodes (sugar nodes are left alone).
std::vector<Formula> conjuncts(const Formula& f);

// ---------------------------------------------------------------------------
// Substitutions

class Substitution {
 public:
  Substitution() = default;
  Substitution(std::initializer_list<std::pair<const int, Formula>> init) : map_(init) {}

  void set(int var, Formula f);
  std::optional<Formula> get(int var) const;
  bool contains(int var) const { return map_.count(var) != 0; }
  bool empty() const noexcept { return map_.empty(); }
  std::size_t size() const noexcept { return map_.size(); }
  const std::map<int, Formula>& entries() const noexcept { return map_; }

  friend bool operator==(const Substitution& a, const Substitution& b) { return a.map_ == b.map_; }

 private:
  std::map<int, Formula> map_;
};

// Replaces variables homomorphically; nominals are never touched.
Formula apply_subst(const Substitution& s, const Formula& f);

// (outer . inner)(p) = apply_subst(outer, inner(p)); variables only in outer keep outer's image.
Substitution compose(const Substitution& outer, const Substitution& inner);

// All 2^|vars| maps into {false, true}, ordered lexicographically over the
// ascending variable list with false before true.
std::vector<Substitution> ground_substitutions(const std::set<int>& vars);

// ---------------------------------------------------------------------------
// Concrete syntax
//
//   formula := iff ; iff := imp ("<->" imp)* ; imp := or ("->" or)* ;
//   or := and ("|" and)* ; and := unary ("&" unary)* ;
//   unary := ("~" | "[]" | "<>" | "[u]" | "<u>" | "[h]" | "<h>") unary | atom ;
//   atom := "true" | "false" | "p" INT | "n" INT | "(" formula ")"
//
// & and | associate to the left, -> and <-> to the right.

Formula parse_formula(std::string_view text, Language lang);
// Parses without enforcing a language; used for mixed internal formulas.
Formula parse_formula_any(std::string_view text);

std::string to_string(const Formula& f);
std::ostream& operator<<(std::ostream& os, const Formula& f);

// `p<k> := <formula>` per line, ascending k.
std::string to_string(const Substitution& s);
Substitution parse_substitution(std::string_view text, Language lang);

}  // namespace modunif
