#include "edl/ifs.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "edl/rng.hpp"
#include "json.hpp"

namespace edl {

namespace {

constexpr std::size_t kCylinderBudget = std::size_t(1) << 26;

// translation offsets in units of the ratio cell, exact or refused
std::array<std::uint64_t, 2> cell_of(const IFSSystem& ifs, const Vec2& t) {
    const double inv = std::ldexp(1.0, ifs.ratio_bits());
    std::array<std::uint64_t, 2> cell{0, 0};
    for (int axis = 0; axis < ifs.dim; ++axis) {
        const double k = t[static_cast<std::size_t>(axis)] * inv;
        if (k < 0.0 || k != std::floor(k) || k > inv - 1.0)
            throw config_error("ifs: translation " + std::to_string(t[0]) + "," +
                               std::to_string(t[1]) + " is not aligned to the ratio grid");
        cell[static_cast<std::size_t>(axis)] = static_cast<std::uint64_t>(k);
    }
    return cell;
}

} // namespace

int IFSSystem::ratio_bits() const {
    if (!(ratio > 0.0) || !(ratio < 1.0)) throw config_error("ifs: ratio must lie in (0,1)");
    const int j = static_cast<int>(std::lround(-std::log2(ratio)));
    if (j < 1 || j > 26 || std::ldexp(1.0, -j) != ratio)
        throw config_error("ifs: ratio must be a dyadic 2^-j; got " + std::to_string(ratio));
    return j;
}

double IFSSystem::similarity_dimension() const {
    return std::log2(static_cast<double>(translations.size())) / ratio_bits();
}

void validate_ifs(const IFSSystem& ifs) {
    if (ifs.dim != 1 && ifs.dim != 2) throw config_error("ifs: dim must be 1 or 2");
    if (ifs.translations.size() < 2) throw config_error("ifs: need at least two maps");
    (void)ifs.ratio_bits();
    std::set<std::array<std::uint64_t, 2>> cells;
    for (const auto& t : ifs.translations) {
        if (ifs.dim == 1 && t[1] != 0.0)
            throw config_error("ifs: 1-d translations must keep t[1] == 0");
        if (!cells.insert(cell_of(ifs, t)).second)
            throw config_error("ifs: two maps share a cell; open set condition fails");
    }
}

IFSSystem catalogue_model(const std::string& name) {
    if (name == "four-corner")
        return {2, 0.25, {{0.0, 0.0}, {0.75, 0.0}, {0.0, 0.75}, {0.75, 0.75}}, "four-corner"};
    if (name == "middle-half")
        return {1, 0.25, {{0.0, 0.0}, {0.75, 0.0}}, "middle-half"};
    if (name == "garnett-8")
        // the eight non-corner cells of the 4x4 grid ring
        return {2,
                0.25,
                {{0.25, 0.0},
                 {0.5, 0.0},
                 {0.0, 0.25},
                 {0.75, 0.25},
                 {0.0, 0.5},
                 {0.75, 0.5},
                 {0.25, 0.75},
                 {0.5, 0.75}},
                "garnett-8"};
    if (name == "full-square")
        return {2, 0.5, {{0.0, 0.0}, {0.5, 0.0}, {0.0, 0.5}, {0.5, 0.5}}, "full-square"};
    throw config_error("unknown catalogue model '" + name + "'");
}

std::vector<std::string> catalogue_names() {
    return {"four-corner", "middle-half", "garnett-8", "full-square"};
}

IFSSystem load_ifs_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open ifs file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw config_error("ifs file " + path + ": " + e.what());
    }
    IFSSystem ifs;
    try {
        ifs.dim = j.at("d").get<int>();
        ifs.ratio = j.at("ratio").get<double>();
        for (const auto& m : j.at("maps")) {
            Vec2 t{0.0, 0.0};
            if (m.is_number()) {
                t[0] = m.get<double>();
            } else {
                t[0] = m.at(0).get<double>();
                if (m.size() > 1) t[1] = m.at(1).get<double>();
            }
            ifs.translations.push_back(t);
        }
        ifs.label = j.value("label", std::string("custom"));
    } catch (const std::exception& e) {
        throw config_error("ifs file " + path + ": " + e.what());
    }
    validate_ifs(ifs);
    return ifs;
}

ADRegularModel generate_cylinders(const IFSSystem& ifs, int depth) {
    validate_ifs(ifs);
    if (depth < 1) throw config_error("generate_cylinders: depth must be >= 1");
    const int j = ifs.ratio_bits();
    const std::size_t nmaps = ifs.translations.size();

    std::size_t count = 1;
    for (int g = 0; g < depth; ++g) {
        if (count > kCylinderBudget / nmaps)
            throw guard_error("generate_cylinders: " + std::to_string(nmaps) + "^" +
                              std::to_string(depth) + " cylinders exceed the 2^26 budget");
        count *= nmaps;
    }
    const int level = depth * j;
    if (level > 26) throw guard_error("generate_cylinders: grid level beyond 26");

    std::vector<std::array<std::uint64_t, 2>> cells;
    cells.reserve(nmaps);
    for (const auto& t : ifs.translations) cells.push_back(cell_of(ifs, t));

    // expand addresses one generation at a time: child = parent * 2^j + cell
    std::vector<std::array<std::uint64_t, 2>> addr{{0, 0}};
    for (int g = 0; g < depth; ++g) {
        std::vector<std::array<std::uint64_t, 2>> next;
        next.reserve(addr.size() * nmaps);
        for (const auto& a : addr)
            for (const auto& c : cells)
                next.push_back({(a[0] << j) + c[0], (a[1] << j) + c[1]});
        addr = std::move(next);
    }

    const double mass = std::pow(1.0 / static_cast<double>(nmaps), depth);
    std::vector<Atom> atoms;
    atoms.reserve(addr.size());
    for (const auto& a : addr) atoms.push_back({a, mass});

    ADRegularModel model;
    model.system = ifs;
    model.depth = depth;
    model.s = ifs.similarity_dimension();
    model.measure = GridMeasure::from_atoms(level, ifs.dim, std::move(atoms));
    model.points.reserve(model.measure.atom_count());
    for (const auto& a : model.measure.atoms())
        model.points.push_back(model.measure.atom_center(a));
    return model;
}

double verify_ad_regularity(ADRegularModel& model, int samples, std::uint64_t seed) {
    if (model.depth < 3)
        throw config_error("verify_ad_regularity: need depth >= 3 for a meaningful radius sweep");
    if (samples < 1) throw config_error("verify_ad_regularity: need at least one sample");

    const auto& pts = model.points;
    const auto& atoms = model.measure.atoms();
    const int max_bits = model.depth * model.system.ratio_bits();
    Rng rng(seed);

    double worst = 1.0;
    for (int i = 0; i < samples; ++i) {
        const Vec2 x = pts[rng.next_below(pts.size())];
        for (int t = 0; t <= max_bits; ++t) {
            const double r = std::ldexp(1.0, -t);
            const double r2 = r * r;
            long double inside = 0.0L;
            for (std::size_t p = 0; p < pts.size(); ++p) {
                const double dx = pts[p][0] - x[0];
                const double dy = pts[p][1] - x[1];
                if (dx * dx + dy * dy < r2) inside += atoms[p].mass;  // open ball
            }
            const double mass = static_cast<double>(inside);
            const double rs = std::pow(r, model.s);
            if (mass > 0.0) {
                worst = std::max(worst, mass / rs);
                worst = std::max(worst, rs / mass);
            }
        }
    }
    model.A = worst;
    return worst;
}

DyadicCube dense_square_search(const ADRegularModel& model, const DyadicCube& region,
                               int max_level, const Vec2* base) {
    check_cube(region);
    if (region.dim != model.measure.dim())
        throw config_error("dense_square_search: region dimension mismatch");
    if (!(model.A > 0.0))
        throw config_error("dense_square_search: regularity constant not set; verify the model first");
    if (max_level < region.level)
        throw config_error("dense_square_search: max_level above the region level");
    const int deepest = std::min(max_level, model.measure.level());

    for (int lev = deepest; lev >= region.level; --lev) {
        const double threshold = std::pow(std::ldexp(1.0, -lev), model.s) / (10.0 * model.A);
        if (base) {
            DyadicCube q;
            q.level = lev;
            q.dim = region.dim;
            q.coords = {static_cast<std::uint64_t>(std::ldexp((*base)[0], lev)),
                        region.dim == 2 ? static_cast<std::uint64_t>(std::ldexp((*base)[1], lev)) : 0};
            if (!region.contains(q.coords, lev)) continue;
            if (model.measure.mass_of(q) >= threshold) return q;
        } else {
            auto coarse = coarsen(model.measure, lev);
            for (const auto& a : coarse.atoms()) {
                if (!region.contains(a.c, lev)) continue;
                if (a.mass >= threshold) {
                    DyadicCube q;
                    q.level = lev;
                    q.dim = region.dim;
                    q.coords = a.c;
                    return q;
                }
            }
        }
    }
    throw config_error("dense_square_search: no square down to level " + std::to_string(deepest) +
                       " meets the density threshold");
}

} // namespace edl
