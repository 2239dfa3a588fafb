#pragma once

#include <vector>

#include "uf/harness.hpp"

namespace uf {

std::vector<TargetProgram> make_bundled_targets();

}  // namespace uf
