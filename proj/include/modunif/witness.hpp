#pragma once

#include "modunif/encoding.hpp"
#include "modunif/formula.hpp"
#include "modunif/minsky.hpp"

namespace modunif {

// A computation a = configs[0] -> ... -> configs[l] = b; instrs[j] is I_{j+1}.
struct Trace {
  std::vector<Config> configs;
  std::vector<Instruction> instrs;

  std::size_t length() const noexcept { return instrs.size(); }
  static Trace from_run(const Run& r) { return {r.configs, r.instrs}; }
};

// E_0 & ... & E_i & ~E_{i+1}, E_j = exists eps(t_j, alpha^1_{k_j}, alpha^2_{l_j}).
// Throws IndexOutOfRange unless 0 <= i < length.
Formula defect(long i, const Trace& trace, const Mode& mode);

// The shifted tower index used for counter `which` (1 or 2) at step i:
// k_i - 1 when k_i != 0 and I_{i+1} decrements that counter, else k_i.
long shifted_index(const Trace& trace, std::size_t i, int which);

// p1 := OR_i defect_i & alpha^1_{bar k_i}, p2 likewise; both false when the trace is empty.
Substitution witness_substitution(const Trace& trace, const Mode& mode);
// Throws NotReachable unless reaches(p, a, b, bound) is Yes.
Substitution witness_substitution(const Program& p, const Config& a, const Config& b, long bound, const Mode& mode);

}  // namespace modunif
