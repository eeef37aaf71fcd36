#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "edl/error.hpp"

namespace edl {

using Vec2 = std::array<double, 2>;

// Half-open dyadic cube at a given level: side 2^-level, corner at
// coords * 2^-level. Cubes in dimension 1 keep coords[1] == 0.
struct DyadicCube {
    int level = 0;
    int dim = 2;
    std::array<std::uint64_t, 2> coords{0, 0};

    double side() const { return 1.0 / static_cast<double>(std::uint64_t(1) << level); }

    Vec2 corner() const {
        const double s = side();
        return {static_cast<double>(coords[0]) * s,
                dim == 2 ? static_cast<double>(coords[1]) * s : 0.0};
    }

    Vec2 center() const {
        const double s = side();
        return {(static_cast<double>(coords[0]) + 0.5) * s,
                dim == 2 ? (static_cast<double>(coords[1]) + 0.5) * s : 0.0};
    }

    // coords of the level-k ancestor cube, k <= level
    std::array<std::uint64_t, 2> ancestor_coords(int k) const {
        const int shift = level - k;
        return {coords[0] >> shift, dim == 2 ? (coords[1] >> shift) : 0};
    }

    // does this cube contain the cube/atom given by finer coords at finer_level
    bool contains(const std::array<std::uint64_t, 2>& fine, int fine_level) const {
        if (fine_level < level) return false;
        const int shift = fine_level - level;
        if ((fine[0] >> shift) != coords[0]) return false;
        if (dim == 2 && (fine[1] >> shift) != coords[1]) return false;
        return true;
    }

    std::string describe() const {
        std::string s = "D" + std::to_string(level) + "[" + std::to_string(coords[0]);
        if (dim == 2) s += "," + std::to_string(coords[1]);
        return s + "]";
    }
};

inline DyadicCube unit_cube(int dim) {
    DyadicCube q;
    q.level = 0;
    q.dim = dim;
    return q;
}

inline void check_cube(const DyadicCube& q) {
    if (q.dim != 1 && q.dim != 2)
        throw config_error("dyadic cube: dim must be 1 or 2");
    if (q.level < 0 || q.level > 62)
        throw config_error("dyadic cube: level out of range");
    const std::uint64_t n = std::uint64_t(1) << q.level;
    if (q.coords[0] >= n || (q.dim == 2 && q.coords[1] >= n))
        throw config_error("dyadic cube: coords outside [0,2^level)");
    if (q.dim == 1 && q.coords[1] != 0)
        throw config_error("dyadic cube: 1-d cube must keep coords[1] == 0");
}

} // namespace edl
