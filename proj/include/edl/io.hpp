#pragma once

#include <string>
#include <vector>

#include "edl/dimension.hpp"
#include "edl/grid_measure.hpp"
#include "edl/maps.hpp"

namespace edl {

// Text formats. Every formatter returns the complete file body, so outputs
// can be golden-tested as strings and written with one call; none of them
// embeds timestamps or machine state, which keeps reruns byte-identical.

// shortest decimal form of v that parses back to the same double
std::string format_double(double v);

// measure <-> "#gridmeasure v1" header plus one "level d coord0 [coord1] mass"
// record per atom, masses in full precision
std::string measure_text(const GridMeasure& mu);
GridMeasure parse_measure(const std::string& text);

// point cloud <-> "#cloud v1 d=<1|2>" header plus one "x [y]" line per point
std::string cloud_text(const std::vector<Vec2>& points, int dim);
struct Cloud {
    int dim = 2;
    std::vector<Vec2> points;
};
Cloud parse_cloud(const std::string& text);

// occupied bins as "level,bin_index" CSV rows, ascending
std::string bins_csv(const BinCounts& bins);

// level sweep as "n,count,log2count" CSV rows
std::string counts_csv(const std::vector<LevelCount>& counts);

// chain report as "stage,k,level,value,bound,margin" CSV rows
std::string chain_csv(const ChainReport& report);

// one-line JSON {"residual":..,"slope":..,"window":[a,b]}
std::string dimension_summary_json(const DimensionEstimate& est);

// whole-file helpers; failures raise config errors naming the path
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

void save_measure(const std::string& path, const GridMeasure& mu);
GridMeasure load_measure(const std::string& path);
void save_cloud(const std::string& path, const std::vector<Vec2>& points, int dim);
Cloud load_cloud(const std::string& path);

} // namespace edl
