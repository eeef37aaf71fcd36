#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "edl/grid_measure.hpp"
#include "edl/maps.hpp"

namespace edl {

// ---- box-counting fits ----------------------------------------------------

struct LevelCount {
    int level = 0;
    std::uint64_t count = 0;
};

struct DimensionEstimate {
    std::vector<int> levels;            // levels that entered the fit
    std::vector<std::uint64_t> counts;  // their occupied-cell counts
    double slope = 0.0;                 // least-squares slope of log2 count vs level
    double residual = 0.0;              // max |fit - log2 count| over the window
    std::array<int, 2> window{0, 0};    // [first, last] level used
};

// Fit log2 N against the level. Levels where the count floors (<= 2) are
// dropped, as are levels where it saturates (== the supplied ceiling, e.g.
// the number of distinct values feeding the bins); pass saturation = 0 to
// keep everything. Fewer than 3 surviving levels is an error.
DimensionEstimate box_count(const std::vector<LevelCount>& counts,
                            std::uint64_t saturation = 0);

// ---- entropy lower bound on covering numbers ------------------------------

struct SupportBound {
    double entropy = 0.0;      // normalized entropy of nu at level n
    double t = 0.0;            // admissible exponent (may be negative)
    double guaranteed = 0.0;   // 2^{nt}
    std::uint64_t count = 0;   // positive-mass cells at level n
};

// Entropy pins down the covering number: with t just below the normalized
// entropy, the support must occupy more than 2^{nt} cells. The returned
// data always satisfies count > guaranteed; violation would mean the
// entropy routine itself is broken, and raises an assertion error.
SupportBound entropy_support_bound(const GridMeasure& nu, int n);

// ---- weighted covering bound over a direction net ----------------------

struct CoveringBound {
    double weighted_count = 0.0;  // sum_e p_e N_e
    double margin = 0.0;          // log2(weighted_count) - n t
    bool pass = false;            // margin > 0
};

CoveringBound weighted_covering_bound(const DirectionNet& net,
                                      const std::vector<std::uint64_t>& counts_per_direction,
                                      int n, double t);

// ---- projection entropy averages ----------------------------------------

struct GrowthOptions {
    int samples = 64;       // atoms probed as ball centers
    std::uint64_t seed = 7;
    double cap = 64.0;      // largest accepted mass(B(x,r))/r ratio
};

struct GrowthCheck {
    double constant = 0.0;  // worst measured mass(B(x,r))/r
    bool linear = false;    // constant <= cap
};

// Sampled check of the linear growth condition mu(B(x,r)) <= A r.
GrowthCheck linear_growth_constant(const GridMeasure& mu, const GrowthOptions& opts = {});

struct ProjectionAverage {
    double average = 0.0;   // sum_e p_e H_m(projection along e); normalized
    bool applicable = false;  // the linear-growth check passed
    double growth = 0.0;      // measured growth constant
};

// Net-weighted average of projection entropies at scale m. Measures failing
// the growth check still get their average computed, but flagged
// inapplicable (a point mass is the degenerate example: average 0).
ProjectionAverage average_projection_entropy(const GridMeasure& mu, const DirectionNet& net,
                                             int m, const GrowthOptions& growth = {});

// ---- multiscale entropy machinery ---------------------------------------

// Scale-block decomposition bound for an arbitrary map: the normalized
// entropy of the image dominates the mass-weighted average of per-square
// conditional entropies across scale blocks of height m. Returns both
// sides (normalized); lhs >= rhs up to rounding for every input.
struct MultiscaleBound {
    double lhs = 0.0;  // H_n of the image measure
    double rhs = 0.0;  // block average
};

MultiscaleBound multiscale_bound(const GridMeasure& mu, const PointMap& f, int m, int n);

// ---- the full chain ---------------------------------------------------

struct ChainRow {
    std::string stage;
    int k = 0;           // scale block, or -1 for whole-run rows
    int level = 0;       // grid level the row refers to
    double value = 0.0;
    double bound = 0.0;
    double margin = 0.0;  // value - bound for lower bounds, bound - value for caps
};

struct ChainOptions {
    double tol = 1e-9;               // slack for the exact inequalities
    double transfer_constant = 8.0;  // cap on the |curved - straight| entropy gap per square
    bool enforce_gradient_gate = false;  // throw instead of recording when the
                                         // 2^-m gradient check fails on q0
};

struct ChainReport {
    int m = 0;
    int n = 0;
    double target = 0.0;
    double final_average = 0.0;  // weighted H_n over the pinned images
    double worst_gradient_deviation = 0.0;
    bool vacuous = false;  // single-cell support, every stage trivially zero
    std::vector<ChainRow> rows;

    bool target_met() const { return final_average >= target; }
};

// Runs the full lower-bound chain for the pinned maps of a direction net
// over the measure restricted to q0: per-block conditional entropies, the
// curved-to-straight transfer, the shift to blown-up projection entropies,
// and the direction-averaged final bound against the target t. Stages with
// guaranteed inequalities are asserted within opts.tol; the transfer gap is
// asserted against opts.transfer_constant.
ChainReport multiscale_chain(const GridMeasure& mu, const DirectionNet& net, int m, int n,
                             const DyadicCube& q0, double t, const ChainOptions& opts = {});

} // namespace edl
