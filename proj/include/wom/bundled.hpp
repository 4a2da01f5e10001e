#pragma once

#include <string>
#include <vector>

#include "wom/sysmodel.hpp"

namespace wom::bundled {

/// Three agents, one static decision, nested memories {Y1,Y2,Y3} ⊇ {Y2,Y3} ⊇ {Y3}.
/// X is a fair bit, each Y^k is X flipped with probability 0.2, and the cost
/// charges wrong guesses plus disagreement between neighbouring agents.
Instance static3();
/// The same problem with the agent order reversed.
Instance static3_reindexed();

/// Two agents, a binary state observed without noise, unit delays both ways.
Instance d2(int horizon = 1);

/// Three binary subsystems on the star network 2 - 1 - 3 with unit links;
/// each agent observes its own bit and may reset it at a price.
Instance wom3(int horizon = 1);

std::vector<std::string> names();
/// "static3", "static3-reindexed", "d2", "d2-t2", "wom3", "wom3-t2".
Instance by_name(const std::string& name);

}  // namespace wom::bundled
