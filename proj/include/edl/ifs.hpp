#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "edl/dyadic.hpp"
#include "edl/grid_measure.hpp"

namespace edl {

// Homogeneous iterated function system on [0,1)^d: every map is
// x -> ratio * x + t with one shared contraction ratio. Only dyadic ratios
// 2^-j with translations on the ratio grid are accepted, so that every
// cylinder of every generation is exactly a dyadic cube.
struct IFSSystem {
    int dim = 2;
    double ratio = 0.25;
    std::vector<Vec2> translations;  // 1-d systems keep t[1] == 0
    std::string label;

    int ratio_bits() const;            // j where ratio == 2^-j
    double similarity_dimension() const;  // log(#maps) / log(1/ratio)
};

// built-in models: "four-corner", "middle-half", "garnett-8", "full-square"
IFSSystem catalogue_model(const std::string& name);
std::vector<std::string> catalogue_names();

// parse {"d":..,"ratio":..,"maps":[[..],..],"label":".."} from a JSON file
IFSSystem load_ifs_file(const std::string& path);

// checks dyadic ratio, grid-aligned translations and pairwise-disjoint map
// images (open set condition on the unit cube); throws on violation
void validate_ifs(const IFSSystem& ifs);

// Generation-`depth` cylinder model: the natural measure (equal mass per
// cylinder) and the cylinder center cloud, in matching lexicographic order.
struct ADRegularModel {
    IFSSystem system;
    int depth = 0;
    double s = 0.0;            // similarity dimension
    GridMeasure measure;       // level = depth * ratio_bits
    std::vector<Vec2> points;  // cylinder centers
    double A = 0.0;            // empirical regularity constant, 0 until verified
};

// expands all map words of the given length; guarded at 2^26 cylinders
ADRegularModel generate_cylinders(const IFSSystem& ifs, int depth);

// Empirical check of mass(B(x,r)) ~ r^s: samples random support points and
// sweeps dyadic radii from the cylinder side up to 1, returning the largest
// of mass/r^s and r^s/mass over all samples (open balls over the point
// cloud). The result is recorded into model.A.
double verify_ad_regularity(ADRegularModel& model, int samples, std::uint64_t seed);

// Deepest dyadic square Q inside `region` with level <= max_level and
// mass(Q) >= side(Q)^s / (10 A). When base is given only squares containing
// it are considered; otherwise candidates are scanned in lexicographic
// order per level. Throws a search-exhausted error when nothing qualifies.
DyadicCube dense_square_search(const ADRegularModel& model, const DyadicCube& region,
                               int max_level, const Vec2* base = nullptr);

} // namespace edl
