#include "modunif/witness.hpp"

#include "modunif/error.hpp"

namespace modunif {

namespace {

Formula defect_from(const std::vector<Formula>& exists_at, long i) {
  std::vector<Formula> parts(exists_at.begin(), exists_at.begin() + i + 1);
  parts.push_back(neg(exists_at[i + 1]));
  return conj(parts);
}

}  // namespace

Formula defect(long i, const Trace& trace, const Mode& mode) {
  if (i < 0 || i >= static_cast<long>(trace.length()))
    throw IndexOutOfRange("defect index " + std::to_string(i) + " outside [0, " + std::to_string(trace.length()) +
                          ")");
  std::vector<Formula> exists_at;
  for (long j = 0; j <= i + 1; ++j) exists_at.push_back(config_exists(trace.configs[j], mode));
  return defect_from(exists_at, i);
}

long shifted_index(const Trace& trace, std::size_t i, int which) {
  const Config& c = trace.configs.at(i);
  const long k = which == 1 ? c.c1 : c.c2;
  const Op dec = which == 1 ? Op::Dec1 : Op::Dec2;
  if (k != 0 && i < trace.length() && trace.instrs[i].op == dec) return k - 1;
  return k;
}

Substitution witness_substitution(const Trace& trace, const Mode& mode) {
  if (trace.configs.size() != trace.length() + 1) throw Error("trace needs one more config than instructions");
  // The E_j are shared between all defects, so sigma stays small.
  std::vector<Formula> exists_at;
  for (const Config& c : trace.configs) exists_at.push_back(config_exists(c, mode));
  std::vector<Formula> p1, p2;
  for (std::size_t i = 0; i < trace.length(); ++i) {
    Formula d = defect_from(exists_at, static_cast<long>(i));
    p1.push_back(conj(d, tower(1, shifted_index(trace, i, 1))));
    p2.push_back(conj(d, tower(2, shifted_index(trace, i, 2))));
  }
  Substitution s;
  s.set(1, disj(p1));
  s.set(2, disj(p2));
  return s;
}

Substitution witness_substitution(const Program& p, const Config& a, const Config& b, long bound, const Mode& mode) {
  ReachResult r = reaches(p, a, b, bound);
  if (r.verdict != Reach::Yes)
    throw NotReachable(to_string(b) + " is not reached from " + to_string(a) + " within " + std::to_string(bound) +
                       " steps");
  return witness_substitution(Trace::from_run(r.trace), mode);
}

}  // namespace modunif
