#pragma once

#include "spherecurve/core.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

namespace spherecurve::detail {

// Uniform grid over points of the unit sphere for radius queries.
class SpatialHash {
public:
    SpatialHash(const std::vector<Vec3>& points, double cell) : points_(points), cell_(cell) {
        cells_.reserve(points.size());
        for (int i = 0; i < static_cast<int>(points.size()); ++i) cells_[key(coord(points[i]))].push_back(i);
    }

    // Nearest point within `radius` of x; returns -1 and leaves dist untouched if none.
    int nearest(const Vec3& x, double radius, double& dist) const {
        const int reach = static_cast<int>(std::ceil(radius / cell_));
        auto c = coord(x);
        int best = -1;
        double bd = radius;
        for (int dx = -reach; dx <= reach; ++dx)
            for (int dy = -reach; dy <= reach; ++dy)
                for (int dz = -reach; dz <= reach; ++dz) {
                    auto it = cells_.find(key({c[0] + dx, c[1] + dy, c[2] + dz}));
                    if (it == cells_.end()) continue;
                    for (int i : it->second) {
                        double d = (points_[i] - x).norm();
                        if (d <= bd) {
                            bd = d;
                            best = i;
                        }
                    }
                }
        if (best >= 0) dist = bd;
        return best;
    }

    bool any_within(const Vec3& x, double radius) const {
        double d;
        return nearest(x, radius, d) >= 0;
    }

private:
    std::array<int, 3> coord(const Vec3& x) const {
        return {static_cast<int>(std::floor((x.x() + 2.0) / cell_)), static_cast<int>(std::floor((x.y() + 2.0) / cell_)),
                static_cast<int>(std::floor((x.z() + 2.0) / cell_))};
    }
    static std::uint64_t key(const std::array<int, 3>& c) {
        return (static_cast<std::uint64_t>(c[0] & 0x1FFFFF) << 42) | (static_cast<std::uint64_t>(c[1] & 0x1FFFFF) << 21) |
               static_cast<std::uint64_t>(c[2] & 0x1FFFFF);
    }

    const std::vector<Vec3>& points_;
    double cell_;
    std::unordered_map<std::uint64_t, std::vector<int>> cells_;
};

}  // namespace spherecurve::detail
