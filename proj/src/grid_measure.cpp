#include "edl/grid_measure.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "edl/rng.hpp"

namespace edl {

namespace {

constexpr std::size_t kAtomBudget = std::size_t(1) << 26;

using Coords = std::array<std::uint64_t, 2>;

void check_level_dim(int level, int dim) {
    if (dim != 1 && dim != 2) throw config_error("grid measure: dim must be 1 or 2");
    if (level < 0 || level > 62) throw config_error("grid measure: level out of range");
}

// group atom masses by their level-k ancestor; ordered map restores the
// lexicographic atom order for the result
std::map<Coords, double> group_to_level(const GridMeasure& mu, int k) {
    const int shift = mu.level() - k;
    std::map<Coords, double> grouped;
    for (const auto& a : mu.atoms()) {
        Coords c{a.c[0] >> shift, mu.dim() == 2 ? (a.c[1] >> shift) : 0};
        grouped[c] += a.mass;
    }
    return grouped;
}

double entropy_of_grouped(const std::map<Coords, double>& grouped) {
    // treat the grouped masses as a probability vector; dividing by the
    // exact total keeps H == 0 for a single cube even after rounding drift
    long double total = 0.0L;
    for (const auto& [c, m] : grouped) total += m;
    const double t = static_cast<double>(total);
    long double h = 0.0L;
    for (const auto& [c, m] : grouped)
        if (m > 0.0) h -= static_cast<long double>(m / t) * std::log2(m / t);
    return static_cast<double>(h);
}

} // namespace

GridMeasure GridMeasure::from_atoms(int level, int dim, std::vector<Atom> atoms) {
    check_level_dim(level, dim);
    const std::uint64_t grid = (level == 62) ? ~std::uint64_t(0) : ((std::uint64_t(1) << level) - 1);
    std::sort(atoms.begin(), atoms.end(),
              [](const Atom& a, const Atom& b) { return a.c < b.c; });

    GridMeasure mu;
    mu.level_ = level;
    mu.dim_ = dim;
    mu.atoms_.reserve(atoms.size());
    long double total = 0.0L;
    for (const auto& a : atoms) {
        if (a.mass < 0.0) throw config_error("grid measure: negative mass");
        if (a.c[0] > grid || (dim == 2 && a.c[1] > grid))
            throw config_error("grid measure: atom coords outside the level grid");
        if (dim == 1 && a.c[1] != 0)
            throw config_error("grid measure: 1-d atom must keep c[1] == 0");
        total += a.mass;
        if (a.mass == 0.0) continue;  // zero-mass cubes are never stored
        if (!mu.atoms_.empty() && mu.atoms_.back().c == a.c)
            mu.atoms_.back().mass += a.mass;
        else
            mu.atoms_.push_back(a);
    }
    if (mu.atoms_.size() > kAtomBudget)
        throw guard_error("grid measure: atom budget 2^26 exceeded");
    if (std::abs(static_cast<double>(total) - 1.0) > 1e-9)
        throw config_error("grid measure: total mass must be 1 within 1e-9");
    return mu;
}

double GridMeasure::total_mass() const {
    long double total = 0.0L;
    for (const auto& a : atoms_) total += a.mass;
    return static_cast<double>(total);
}

double GridMeasure::mass_of(const DyadicCube& q) const {
    if (q.dim != dim_) throw config_error("mass_of: cube dimension mismatch");
    if (q.level > level_) throw config_error("mass_of: cube finer than the measure grid");
    long double total = 0.0L;
    for (const auto& a : atoms_)
        if (q.contains(a.c, level_)) total += a.mass;
    return static_cast<double>(total);
}

Vec2 GridMeasure::atom_center(const Atom& a) const {
    const double s = std::ldexp(1.0, -level_);
    return {(static_cast<double>(a.c[0]) + 0.5) * s,
            dim_ == 2 ? (static_cast<double>(a.c[1]) + 0.5) * s : 0.0};
}

GridMeasure coarsen(const GridMeasure& mu, int target_level) {
    if (target_level < 0) throw config_error("coarsen: negative level");
    if (target_level > mu.level())
        throw config_error("coarsen: refinement beyond the stored resolution is refused");
    auto grouped = group_to_level(mu, target_level);
    GridMeasure out;
    std::vector<Atom> atoms;
    atoms.reserve(grouped.size());
    for (const auto& [c, m] : grouped) atoms.push_back({c, m});
    return GridMeasure::from_atoms(target_level, mu.dim(), std::move(atoms));
}

GridMeasure restrict_normalize(const GridMeasure& mu, const DyadicCube& q) {
    check_cube(q);
    if (q.dim != mu.dim()) throw config_error("restrict: cube dimension mismatch");
    if (q.level > mu.level()) throw config_error("restrict: cube finer than the measure grid");
    std::vector<Atom> kept;
    long double total = 0.0L;
    for (const auto& a : mu.atoms())
        if (q.contains(a.c, mu.level())) {
            kept.push_back(a);
            total += a.mass;
        }
    if (kept.empty() || !(static_cast<double>(total) > 0.0))
        throw config_error("restrict: cube " + q.describe() + " carries zero mass");
    const double inv = 1.0 / static_cast<double>(total);
    for (auto& a : kept) a.mass *= inv;
    return GridMeasure::from_atoms(mu.level(), mu.dim(), std::move(kept));
}

GridMeasure blow_up(const GridMeasure& mu, const DyadicCube& q) {
    auto local = restrict_normalize(mu, q);
    const int out_level = mu.level() - q.level;
    const std::uint64_t mask = (out_level == 0) ? 0 : ((std::uint64_t(1) << out_level) - 1);
    std::vector<Atom> atoms = local.atoms();
    for (auto& a : atoms) {
        a.c[0] &= mask;
        if (mu.dim() == 2) a.c[1] &= mask;
    }
    return GridMeasure::from_atoms(out_level, mu.dim(), std::move(atoms));
}

GridMeasure mix(const GridMeasure& a, const GridMeasure& b, double t) {
    if (a.level() != b.level() || a.dim() != b.dim())
        throw config_error("mix: measures live on different grids");
    if (!(t >= 0.0 && t <= 1.0)) throw config_error("mix: weight must lie in [0,1]");
    std::vector<Atom> atoms;
    atoms.reserve(a.atom_count() + b.atom_count());
    for (const auto& x : a.atoms()) atoms.push_back({x.c, t * x.mass});
    for (const auto& x : b.atoms()) atoms.push_back({x.c, (1.0 - t) * x.mass});
    return GridMeasure::from_atoms(a.level(), a.dim(), std::move(atoms));
}

double entropy(const GridMeasure& mu, int k) {
    if (k < 0) throw config_error("entropy: negative level");
    if (k > mu.level())
        throw config_error("entropy: refinement beyond the stored resolution is refused");
    return entropy_of_grouped(group_to_level(mu, k));
}

double normalized_entropy(const GridMeasure& mu, int k) {
    if (k < 1) throw config_error("normalized entropy needs level >= 1");
    return entropy(mu, k) / static_cast<double>(k);
}

double conditional_entropy(const GridMeasure& mu, int fine, int coarse) {
    if (coarse < 0 || fine < coarse) throw config_error("conditional entropy: need 0 <= coarse <= fine");
    if (fine > mu.level())
        throw config_error("conditional entropy: refinement beyond the stored resolution is refused");

    // sum over coarse cubes F of mu(F) * H(mu_F at the fine level); computed
    // straight from the definition so the entropy-difference route stays an
    // independent cross-check
    auto fine_masses = group_to_level(mu, fine);
    const int shift = fine - coarse;
    std::map<Coords, std::vector<double>> groups;
    for (const auto& [c, m] : fine_masses) {
        Coords anc{c[0] >> shift, mu.dim() == 2 ? (c[1] >> shift) : 0};
        groups[anc].push_back(m);
    }
    long double h = 0.0L;
    for (const auto& [anc, masses] : groups) {
        long double group_mass = 0.0L;
        for (double m : masses) group_mass += m;
        const double gm = static_cast<double>(group_mass);
        if (!(gm > 0.0)) continue;
        for (double m : masses)
            if (m > 0.0) h -= static_cast<long double>(m) * std::log2(m / gm);
    }
    return static_cast<double>(h);
}

double entropy_shifted(const GridMeasure& mu, int k) {
    if (k < 0 || k > mu.level())
        throw config_error("shifted entropy: level outside the stored resolution");
    // bin atom centers against the level-k grid moved by half a cell; exact
    // integer arithmetic, bin = floor(x * 2^k + 1/2) per coordinate
    const int shift = mu.level() - k;
    std::map<Coords, double> grouped;
    for (const auto& a : mu.atoms()) {
        const std::uint64_t den = std::uint64_t(1) << (shift + 1);
        const std::uint64_t off = std::uint64_t(1) << shift;
        Coords c{(2 * a.c[0] + 1 + off) / den, 0};
        if (mu.dim() == 2) c[1] = (2 * a.c[1] + 1 + off) / den;
        grouped[c] += a.mass;
    }
    return entropy_of_grouped(grouped);
}

std::size_t support_count(const GridMeasure& mu, int k) {
    if (k < 0 || k > mu.level())
        throw config_error("support count: level outside the stored resolution");
    return group_to_level(mu, k).size();
}

EntropyProfile entropy_profile(const GridMeasure& mu) {
    EntropyProfile prof;
    prof.bits.resize(static_cast<std::size_t>(mu.level()) + 1);
    for (int k = 0; k <= mu.level(); ++k)
        prof.bits[static_cast<std::size_t>(k)] = entropy(mu, k);
    return prof;
}

std::uint64_t value_bin(double v, const ValueRange& r, int level) {
    if (r.degenerate()) return 0;
    double u = (v - r.lo) / (r.hi - r.lo);
    if (u < 0.0) u = 0.0;
    if (u > 1.0) u = 1.0;
    const std::uint64_t top = (std::uint64_t(1) << level) - 1;
    auto b = static_cast<std::uint64_t>(std::floor(std::ldexp(u, level)));
    return b > top ? top : b;
}

Pushforward pushforward(const GridMeasure& mu, const PointMap& f, int out_level,
                        std::optional<ValueRange> range) {
    if (out_level < 0 || out_level > 52) throw config_error("pushforward: output level out of range");
    std::vector<double> values;
    values.reserve(mu.atom_count());
    for (const auto& a : mu.atoms()) {
        const double v = f(mu.atom_center(a));
        if (!std::isfinite(v))
            throw config_error("pushforward: map evaluates non-finite on an atom");
        values.push_back(v);
    }
    ValueRange r;
    if (range) {
        r = *range;
    } else if (!values.empty()) {
        r.lo = *std::min_element(values.begin(), values.end());
        r.hi = *std::max_element(values.begin(), values.end());
    }
    std::map<Coords, double> grouped;
    for (std::size_t i = 0; i < values.size(); ++i)
        grouped[{value_bin(values[i], r, out_level), 0}] += mu.atoms()[i].mass;
    std::vector<Atom> atoms;
    atoms.reserve(grouped.size());
    for (const auto& [c, m] : grouped) atoms.push_back({c, m});
    return {GridMeasure::from_atoms(out_level, 1, std::move(atoms)), r};
}

GridMeasure random_measure(std::uint64_t seed, int dim, int level, std::size_t natoms) {
    check_level_dim(level, dim);
    if (natoms == 0) throw config_error("random measure: need at least one atom");
    Rng rng(seed);
    const std::uint64_t grid = std::uint64_t(1) << level;
    std::map<Coords, double> grouped;
    for (std::size_t i = 0; i < natoms; ++i) {
        Coords c{rng.next_below(grid), dim == 2 ? rng.next_below(grid) : 0};
        grouped[c] += 0.05 + rng.next_double();  // bounded away from zero
    }
    long double total = 0.0L;
    for (const auto& [c, m] : grouped) total += m;
    std::vector<Atom> atoms;
    atoms.reserve(grouped.size());
    for (const auto& [c, m] : grouped)
        atoms.push_back({c, static_cast<double>(m / total)});
    return GridMeasure::from_atoms(level, dim, std::move(atoms));
}

} // namespace edl
