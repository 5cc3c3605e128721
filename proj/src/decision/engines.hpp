#pragma once

#include "modunif/decision.hpp"

namespace modunif::dec {

// Returned witnesses are not yet re-checked; decision.cpp does that.
SatVerdict ku_satisfiable(const Formula& f, std::size_t budget);
SatVerdict tableau_satisfiable(const Formula& f, Logic logic, std::size_t budget);

}  // namespace modunif::dec
