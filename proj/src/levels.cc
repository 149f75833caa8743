// Copyright 2026 The fluxshot Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fluxshot/levels.h"

#include <algorithm>
#include <array>
#include <string>

#include "fluxshot/errors.h"

namespace fluxshot {

namespace {
constexpr std::array<std::string_view, kMaxLevels> kNames = {"g", "e", "f", "h", "i"};
}

Level level_from_index(std::size_t index) {
    if (index >= kMaxLevels) {
        throw LookupError("level index out of range: " + std::to_string(index));
    }
    return static_cast<Level>(index);
}

std::string_view level_name(Level level) { return kNames.at(index_of(level)); }

Level parse_level(std::string_view name) {
    for (std::size_t k = 0; k < kNames.size(); ++k) {
        if (kNames[k] == name) {
            return static_cast<Level>(k);
        }
    }
    throw LookupError("unknown level label '" + std::string(name) + "'");
}

Level LevelTrajectory::level_at(double t) const {
    auto it = std::upper_bound(jump_times.begin(), jump_times.end(), t);
    if (it == jump_times.begin()) {
        return initial;
    }
    return levels[static_cast<std::size_t>(it - jump_times.begin()) - 1];
}

}  // namespace fluxshot
