#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "edl/dyadic.hpp"
#include "edl/error.hpp"

namespace edl {

// One positive-mass cube of the measure. Coordinates index the dyadic
// grid at the measure's level; dimension 1 keeps c[1] == 0.
struct Atom {
    std::array<std::uint64_t, 2> c{0, 0};
    double mass = 0.0;
};

// A probability measure resolved on the dyadic grid of [0,1)^d at a fixed
// level. Invariants kept by construction:
//   - atoms sorted lexicographically by coords, no duplicates
//   - every stored mass is > 0 (zero-mass cubes are dropped)
//   - total mass 1 within 1e-9
class GridMeasure {
public:
    GridMeasure() = default;

    // sorts, merges duplicate coords, drops zero masses, checks invariants
    static GridMeasure from_atoms(int level, int dim, std::vector<Atom> atoms);

    int level() const { return level_; }
    int dim() const { return dim_; }
    const std::vector<Atom>& atoms() const { return atoms_; }
    std::size_t atom_count() const { return atoms_.size(); }

    double total_mass() const;
    double mass_of(const DyadicCube& q) const;

    // center of the atom's cube, as a point of [0,1)^d
    Vec2 atom_center(const Atom& a) const;

private:
    int level_ = 0;
    int dim_ = 2;
    std::vector<Atom> atoms_;
};

// ---- grid operations -------------------------------------------------

// Reindex the measure on the coarser grid at target_level, summing masses
// over ancestors. target_level > mu.level is refused: mass placement below
// the stored resolution would be invented, not derived.
GridMeasure coarsen(const GridMeasure& mu, int target_level);

// Conditional measure mu_Q = mu restricted to Q, renormalized to mass 1.
// Q must carry positive mass.
GridMeasure restrict_normalize(const GridMeasure& mu, const DyadicCube& q);

// Blow-up mu^Q: restrict to Q, renormalize, then map Q onto [0,1)^d by the
// homothety that identifies Q with the unit cube. Atom addresses keep only
// their low bits; the result lives at level mu.level - q.level.
GridMeasure blow_up(const GridMeasure& mu, const DyadicCube& q);

// Convex combination t*a + (1-t)*b of two measures on the same grid.
GridMeasure mix(const GridMeasure& a, const GridMeasure& b, double t);

// ---- entropy ---------------------------------------------------------

// Shannon entropy of mu against the level-k dyadic partition, in bits,
// with 0 log 0 = 0. Requires k <= mu.level.
double entropy(const GridMeasure& mu, int k);

// entropy(mu, k) / k, the per-level (normalized) entropy; k >= 1
double normalized_entropy(const GridMeasure& mu, int k);

// Conditional entropy sum_F mu(F) H(mu_F, D_fine) over positive-mass cubes
// F of D_coarse. Computed from that defining sum, not from the difference
// of plain entropies, so the two routes can be checked against each other.
double conditional_entropy(const GridMeasure& mu, int fine, int coarse);

// Entropy against the level-k grid shifted by half a cell in every
// coordinate. Used by the interleaved-partition checks.
double entropy_shifted(const GridMeasure& mu, int k);

// number of positive-mass cubes at level k
std::size_t support_count(const GridMeasure& mu, int k);

struct EntropyProfile {
    std::vector<double> bits;  // bits[k] = entropy at level k, k = 0..level
    double normalized(int k) const { return bits.at(static_cast<std::size_t>(k)) / k; }
};

EntropyProfile entropy_profile(const GridMeasure& mu);

// ---- pushforward -----------------------------------------------------

// Affine rescale of real values onto [0,1): v -> (v - lo) / (hi - lo).
// Recorded next to every 1-d pushforward so grid levels of the image stay
// comparable across measures pushed through the same map.
struct ValueRange {
    double lo = 0.0;
    double hi = 1.0;
    bool degenerate() const { return !(hi > lo); }
};

// dyadic bin of a value under a range rescale, clamped into [0, 2^level)
std::uint64_t value_bin(double v, const ValueRange& r, int level);

using PointMap = std::function<double(const Vec2&)>;

struct Pushforward {
    GridMeasure measure;  // d = 1, at the requested output level
    ValueRange range;     // rescale that was applied
};

// Image measure f_# mu on the line, binned at out_level after rescaling the
// value range onto [0,1). f is evaluated at atom cube centers. If range is
// not supplied it is computed as [min f, max f] over the atoms; passing the
// same explicit range across several measures keeps their image grids
// aligned, which the multi-scale inequalities rely on.
Pushforward pushforward(const GridMeasure& mu, const PointMap& f, int out_level,
                        std::optional<ValueRange> range = std::nullopt);

// ---- random test measures ---------------------------------------------

// Deterministic random measure for self-checks: natoms cubes drawn at the
// given level with uniform masses, normalized. Same seed, same measure.
GridMeasure random_measure(std::uint64_t seed, int dim, int level, std::size_t natoms);

} // namespace edl
