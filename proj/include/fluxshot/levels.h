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

#ifndef FLUXSHOT_LEVELS_H
#define FLUXSHOT_LEVELS_H

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace fluxshot {

/// Fluxonium eigenstates by energy ordinal. g and e span the computational subspace.
enum class Level : std::uint8_t { g = 0, e = 1, f = 2, h = 3, i = 4 };

inline constexpr std::size_t kMaxLevels = 5;

constexpr std::size_t index_of(Level level) { return static_cast<std::size_t>(level); }
Level level_from_index(std::size_t index);

std::string_view level_name(Level level);
/// Throws LookupError for anything other than g, e, f, h, i.
Level parse_level(std::string_view name);

/// Piecewise-constant level occupation of a single trajectory.
struct LevelTrajectory {
    Level initial = Level::g;
    std::vector<double> jump_times;  // seconds, strictly increasing
    std::vector<Level> levels;       // level entered at each jump

    Level level_at(double t) const;
    Level final_level() const { return levels.empty() ? initial : levels.back(); }
    std::size_t num_jumps() const { return jump_times.size(); }
};

}  // namespace fluxshot

#endif
