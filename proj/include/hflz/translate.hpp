#pragma once

#include "hflz/formula.hpp"
#include "hflz/program.hpp"

#include <map>
#include <string>
#include <vector>

namespace hflz {

// Program-to-HES reductions. Inputs are normalized, typechecked programs;
// lambda abstractions may be lifted or left in place. The main definition
// becomes the main formula unless some definition refers to it.

// Every equation is mu; only `event` counts, other events are erased.
Hes translate_may(const Program& p, const std::string& event);
Hes translate_must(const Program& p, const std::string& event);
// Every equation is nu; events become diamonds.
Hes translate_path(const Program& p);

using PriorityAssignment = std::map<std::string, int>;

PriorityAssignment parse_priorities(const std::string& text);
std::string print_priorities(const PriorityAssignment& omega);
// order lists the domain of omega by non-increasing priority.
PriorityAssignment normalize_priorities(const PriorityAssignment& omega, const std::vector<std::string>& order);
// Modal-free; equations sorted by non-increasing priority, nu for even.
Hes translate_csa(const Program& p, const PriorityAssignment& omega);

// Whether main is kept as an equation by the translations above.
bool main_is_referenced(const Program& p);

}  // namespace hflz
