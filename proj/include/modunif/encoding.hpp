#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "modunif/formula.hpp"
#include "modunif/kripke.hpp"
#include "modunif/minsky.hpp"

namespace modunif {

// Universal: the existential is <u>. Hybrid: the existential is the surrogate
// <h>(n & <h>.) for one designated nominal.
struct Mode {
  enum class Kind { Universal, Hybrid } kind = Kind::Universal;
  int nominal = 1;

  static Mode universal() { return {}; }
  static Mode hybrid(int nominal = 1) { return {Kind::Hybrid, nominal}; }
  bool is_hybrid() const noexcept { return kind == Kind::Hybrid; }
  Language language() const noexcept { return is_hybrid() ? Language::H2 : Language::L; }
  friend bool operator==(const Mode&, const Mode&) = default;
};

std::string to_string(const Mode& m);  // "universal" or "hybrid"
Mode parse_mode(std::string_view text, int nominal = 1);

struct CharName {
  enum class Tag { Alpha, Beta, Gamma, Delta, Delta1, Delta2, Gamma1, Gamma2, A } tag = Tag::Alpha;
  int i = 0;   // A only, 0..2
  long j = 0;  // A only

  static CharName tower(int i, long j) { return {Tag::A, i, j}; }
  friend auto operator<=>(const CharName&, const CharName&) = default;
};

// "Alpha", ..., "Gamma2", "A(i,j)".
std::string to_string(const CharName& c);

// Variable-free; repeated calls return shared nodes.
Formula char_formula(const CharName& c);
// alpha^i_j
Formula tower(int i, long j);

// <u>f in Universal mode, the surrogate in Hybrid mode.
Formula exists(const Formula& f, const Mode& mode);

Formula epsilon(long t, const Formula& phi, const Formula& psi);
// exists epsilon(t, alpha^1_k, alpha^2_l)
Formula config_exists(const Config& c, const Mode& mode);

enum class PiTau { Pi1, Pi2, Tau1, Tau2 };
Formula pi_tau(PiTau which);

Formula ax_instruction(const Instruction& ins, const Mode& mode);

// Both families of conjuncts for words of length 1..max_len; box words first.
std::vector<Formula> nom_conjuncts(int max_len, int nominal = 1);
Formula nom_formula(int max_len, int nominal = 1);
constexpr int kNomLength = 6;

// One formula per instruction, followed by Nom in Hybrid mode.
std::vector<Formula> ax_conjuncts(const Program& p, const Mode& mode);
Formula ax_program(const Program& p, const Mode& mode);

// (AxP & exists eps(a)) -> exists eps(b)
Formula psi(const Program& p, const Config& a, const Config& b, const Mode& mode);

using PointLabel = std::variant<CharName, Config>;
std::string to_string(const PointLabel& l);  // CharName text or "e(s,m,n)"

struct CanonicalFrame {
  Frame frame;
  std::vector<PointLabel> labels;  // by point index
  long depth = 0;                  // N: towers a^i_0 .. a^i_N
  Run run;

  int point_of(const PointLabel& l) const;  // throws UnknownPoint
  std::map<std::string, std::string> label_map() const;
  std::string to_text() const;
};

std::string point_name(const PointLabel& l);

// Throws TruncationUnsound unless the run from `a` halts or loops within `bound`.
CanonicalFrame canonical_frame(const Program& p, const Config& a, long bound, const Mode& mode);

// Inverse of CanonicalFrame::to_text: recovers labels from the label block.
CanonicalFrame parse_canonical_frame(std::string_view text);

}  // namespace modunif
