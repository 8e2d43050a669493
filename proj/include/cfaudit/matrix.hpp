#pragma once

#include <vector>

namespace cfaudit {

using Vector = std::vector<double>;
using Matrix = std::vector<Vector>;

}  // namespace cfaudit
