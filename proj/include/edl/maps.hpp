#pragma once

#include <cstdint>
#include <vector>

#include "edl/dyadic.hpp"
#include "edl/grid_measure.hpp"

namespace edl {

// ---- orthogonal projections -------------------------------------------

// y -> y . e for a unit direction e (|e| = 1 within 1e-9)
PointMap projection(const Vec2& e);

// range of y . e over the closed unit square; the canonical rescale shared
// by every projection pushforward, so image grids of different measures
// under the same direction line up
ValueRange projection_range(const Vec2& e);

// pushforward of mu under the projection, binned with the canonical range
Pushforward project_measure(const GridMeasure& mu, const Vec2& e, int out_level);

// ---- direction nets ------------------------------------------------------

// A covering family of directions realized by a point cloud as seen from a
// pin: the circle is cut into 2^m equal angular slots, each non-empty slot
// contributes the realized direction whose witness lies farthest from the
// pin (far witnesses keep the pinned-map gradient constraint mild).
struct DirectionNet {
    Vec2 pin{0.0, 0.0};
    int m = 0;
    std::vector<Vec2> vectors;    // unit directions, sorted by angle
    std::vector<Vec2> witnesses;  // cloud points realizing them
    std::vector<double> weights;  // half-gap (Voronoi) arc fractions, sum 1
    double max_gap = 0.0;         // largest angular gap between neighbors
    double c_net = 0.0;           // every unit vector is within c_net * 2^-m of the net
};

// max_cnet bounds the accepted covering constant; a larger measured gap
// raises an insufficient-density error (the cloud is too shallow for m)
DirectionNet build_direction_net(const std::vector<Vec2>& cloud, const Vec2& pin, int m,
                                 double max_cnet = 8.0);

// ---- pinned quadratic maps --------------------------------------------

// f(y) = |y - witness|^2 / (2 |witness - pin|). Near the pin its gradient
// is close to -e for e = (witness - pin)/|witness - pin|, which is what
// ties these maps to orthogonal projections.
struct PinnedMap {
    Vec2 witness{0.0, 0.0};
    Vec2 pin{0.0, 0.0};
    Vec2 e{1.0, 0.0};   // unit direction from pin to witness
    double dist = 1.0;  // |witness - pin|

    double eval(const Vec2& y) const;
    Vec2 gradient(const Vec2& y) const;
    PointMap as_map() const;

    // max over the corners of q of |gradient(y) + e| (= |y - pin| / dist,
    // so corner evaluation is exact for squares)
    double gradient_deviation(const DyadicCube& q) const;
};

PinnedMap pinned_map(const DirectionNet& net, std::size_t index);

// enforce gradient deviation <= 2^-m on q; throws square-too-large with the
// admissible side length otherwise
void check_pinned_square(const PinnedMap& f, const DyadicCube& q, int m);

// ---- pair value sets --------------------------------------------------

// Occupied dyadic bins of a family of scalar values rescaled onto [0,1),
// stored as a bitset over 2^level slots.
struct BinCounts {
    int level = 0;
    std::vector<std::uint64_t> words;
    ValueRange range;
    bool lower_bound_only = false;  // subsampling was applied; counts are lower bounds

    std::size_t count() const;
    bool test(std::uint64_t bin) const;
    void set(std::uint64_t bin);
    std::vector<std::uint64_t> occupied() const;  // sorted bin indices
    BinCounts coarsened(int coarser_level) const;  // OR-fold bits upward
};

struct PairSetOptions {
    std::uint64_t pair_guard = std::uint64_t(1) << 34;  // max ordered pairs before guard
    bool allow_subsample = false;  // subsample the cloud instead of failing the guard
    std::uint64_t seed = 1;        // subsampling seed
    int threads = 0;               // 0: EDL_THREADS / hardware
};

// all pairwise distances |x - y| (the zero distance included), rescaled by
// [0, diameter]
BinCounts distance_set(const std::vector<Vec2>& cloud, int level,
                       const PairSetOptions& opts = {});

// x1 . (x2 - pin) over all ordered pairs, rescaled by [min, max]
BinCounts dot_product_set(const std::vector<Vec2>& cloud, const Vec2& pin, int level,
                          const PairSetOptions& opts = {});

// x(y - a1) + z(w - a2) over all quadruples from a 1-d point set,
// rescaled by [min, max]
BinCounts sum_product_set(const std::vector<double>& points, double a1, double a2, int level,
                          const PairSetOptions& opts = {});

} // namespace edl
