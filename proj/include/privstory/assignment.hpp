#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace privstory {

/// Maximum-weight one-to-one assignment on a rows x cols matrix of non-negative
/// integer weights (Hungarian method, O(n^3)). Result[r] is the column paired with
/// row r, or nullopt when r is left unpaired.
[[nodiscard]] std::vector<std::optional<std::size_t>> max_weight_assignment(
    const std::vector<std::vector<std::int64_t>> &weights);

}  // namespace privstory
