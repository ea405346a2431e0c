#include "privstory/assignment.hpp"

#include <algorithm>
#include <limits>

namespace privstory {

std::vector<std::optional<std::size_t>> max_weight_assignment(const std::vector<std::vector<std::int64_t>> &weights) {
    const std::size_t rows = weights.size();
    const std::size_t cols = rows == 0 ? 0 : weights.front().size();
    std::vector<std::optional<std::size_t>> result(rows);
    if (rows == 0 || cols == 0) {
        return result;
    }
    // Square cost matrix; padding cells cost 0 against max weight.
    const std::size_t n = std::max(rows, cols);
    std::int64_t top = 0;
    for (const auto &row : weights) {
        for (auto w : row) {
            top = std::max(top, w);
        }
    }
    auto cost = [&](std::size_t r, std::size_t c) -> std::int64_t {
        const std::int64_t w = (r < rows && c < cols) ? weights[r][c] : 0;
        return top - w;
    };

    // 1-indexed potentials formulation (e-maxx).
    constexpr std::int64_t inf = std::numeric_limits<std::int64_t>::max() / 4;
    std::vector<std::int64_t> u(n + 1, 0), v(n + 1, 0);
    std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::vector<std::int64_t> minv(n + 1, inf);
        std::vector<bool> used(n + 1, false);
        do {
            used[j0] = true;
            const std::size_t i0 = p[j0];
            std::int64_t delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) {
                    continue;
                }
                const std::int64_t cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    for (std::size_t j = 1; j <= n; ++j) {
        const std::size_t r = p[j] - 1;
        const std::size_t c = j - 1;
        if (r < rows && c < cols && weights[r][c] > 0) {
            result[r] = c;
        }
    }
    return result;
}

}  // namespace privstory
