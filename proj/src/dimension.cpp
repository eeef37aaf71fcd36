#include "edl/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "edl/error.hpp"
#include "edl/rng.hpp"

namespace edl {

DimensionEstimate box_count(const std::vector<LevelCount>& counts, std::uint64_t saturation) {
    std::vector<LevelCount> kept;
    for (const auto& lc : counts) {
        if (lc.level < 0 || lc.level > 62) throw config_error("box count: level out of range");
        if (lc.count == 0) throw config_error("box count: zero count");
        if (lc.count <= 2) continue;                        // floored, resolution not binding
        if (saturation && lc.count >= saturation) continue; // saturated, ditto
        kept.push_back(lc);
    }
    std::sort(kept.begin(), kept.end(),
              [](const LevelCount& a, const LevelCount& b) { return a.level < b.level; });
    for (std::size_t i = 1; i < kept.size(); ++i)
        if (kept[i].level == kept[i - 1].level)
            throw config_error("box count: duplicate level " + std::to_string(kept[i].level));
    if (kept.size() < 3)
        throw guard_error("box count: need at least 3 usable levels, have " +
                          std::to_string(kept.size()));

    DimensionEstimate est;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& lc : kept) {
        const double x = lc.level;
        const double y = std::log2(static_cast<double>(lc.count));
        est.levels.push_back(lc.level);
        est.counts.push_back(lc.count);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double np = static_cast<double>(kept.size());
    est.slope = (np * sxy - sx * sy) / (np * sxx - sx * sx);
    const double intercept = (sy - est.slope * sx) / np;
    for (std::size_t i = 0; i < kept.size(); ++i) {
        const double fit = est.slope * kept[i].level + intercept;
        est.residual = std::max(
            est.residual, std::abs(fit - std::log2(static_cast<double>(kept[i].count))));
    }
    est.window = {kept.front().level, kept.back().level};
    return est;
}

SupportBound entropy_support_bound(const GridMeasure& nu, int n) {
    if (n < 1 || n > nu.level())
        throw config_error("support bound: level must lie in [1, measure level]");
    SupportBound sb;
    sb.entropy = normalized_entropy(nu, n);
    sb.t = sb.entropy - 1.0 / (n * std::log(2.0)) - 1e-6;
    sb.guaranteed = std::exp2(n * sb.t);
    sb.count = support_count(nu, n);
    if (!(static_cast<double>(sb.count) > sb.guaranteed))
        throw assertion_error("support bound violated: " + std::to_string(sb.count) +
                              " cells vs guaranteed " + std::to_string(sb.guaranteed));
    return sb;
}

CoveringBound weighted_covering_bound(const DirectionNet& net,
                                      const std::vector<std::uint64_t>& counts_per_direction,
                                      int n, double t) {
    if (counts_per_direction.size() != net.vectors.size())
        throw config_error("covering bound: one count per net direction required");
    if (n < 1 || n > 52) throw config_error("covering bound: level out of range");
    CoveringBound cb;
    for (std::size_t i = 0; i < counts_per_direction.size(); ++i) {
        if (counts_per_direction[i] == 0)
            throw config_error("covering bound: empty image for a net direction");
        cb.weighted_count +=
            net.weights[i] * static_cast<double>(counts_per_direction[i]);
    }
    cb.margin = std::log2(cb.weighted_count) - n * t;
    cb.pass = cb.margin > 0.0;
    return cb;
}

GrowthCheck linear_growth_constant(const GridMeasure& mu, const GrowthOptions& opts) {
    if (opts.samples < 1) throw config_error("growth check: need at least one sample");
    GrowthCheck g;
    Rng rng(opts.seed);
    const auto& atoms = mu.atoms();
    for (int s = 0; s < opts.samples; ++s) {
        const auto& probe = atoms[static_cast<std::size_t>(rng.next_below(atoms.size()))];
        const Vec2 x = mu.atom_center(probe);
        for (int j = 0; j <= mu.level(); ++j) {
            const double r = std::ldexp(1.0, -j);
            double mass = 0.0;
            for (const auto& a : atoms) {
                const Vec2 y = mu.atom_center(a);
                const double dx = y[0] - x[0];
                const double dy = y[1] - x[1];
                if (dx * dx + dy * dy <= r * r) mass += a.mass;
            }
            g.constant = std::max(g.constant, mass / r);
        }
    }
    g.linear = g.constant <= opts.cap;
    return g;
}

ProjectionAverage average_projection_entropy(const GridMeasure& mu, const DirectionNet& net,
                                             int m, const GrowthOptions& growth) {
    if (mu.dim() != 2) throw config_error("projection average: planar measure required");
    if (m < 1 || m > 52) throw config_error("projection average: m out of range");
    ProjectionAverage avg;
    const auto g = linear_growth_constant(mu, growth);
    avg.applicable = g.linear;
    avg.growth = g.constant;
    for (std::size_t i = 0; i < net.vectors.size(); ++i)
        avg.average += net.weights[i] *
                       normalized_entropy(project_measure(mu, net.vectors[i], m).measure, m);
    return avg;
}

namespace {

// squares of positive mass at the given level, with their masses
struct MassedSquare {
    DyadicCube q;
    double mass;
};

std::vector<MassedSquare> positive_squares(const GridMeasure& mu, int level) {
    auto coarse = coarsen(mu, level);
    std::vector<MassedSquare> out;
    out.reserve(coarse.atom_count());
    for (const auto& a : coarse.atoms()) {
        DyadicCube q;
        q.level = level;
        q.dim = mu.dim();
        q.coords = a.c;
        out.push_back({q, a.mass});
    }
    return out;
}

} // namespace

MultiscaleBound multiscale_bound(const GridMeasure& mu, const PointMap& f, int m, int n) {
    if (m < 1 || m >= n) throw config_error("scale blocks: need 1 <= m < n");
    const int blocks = n / m;
    if ((blocks - 1) * m > mu.level())
        throw config_error("scale blocks: resolution too shallow for these block scales");

    auto full = pushforward(mu, f, n, std::nullopt);
    MultiscaleBound b;
    b.lhs = normalized_entropy(full.measure, n);
    double sum = 0.0;
    for (int k = 0; k < blocks; ++k) {
        for (const auto& sq : positive_squares(mu, k * m)) {
            auto part = pushforward(restrict_normalize(mu, sq.q), f, n, full.range);
            sum += sq.mass * conditional_entropy(part.measure, (k + 1) * m, k * m);
        }
    }
    b.rhs = sum / n;
    return b;
}

ChainReport multiscale_chain(const GridMeasure& mu, const DirectionNet& net, int m, int n,
                             const DyadicCube& q0, double t, const ChainOptions& opts) {
    if (mu.dim() != 2) throw config_error("chain: planar measure required");
    check_cube(q0);
    if (q0.dim != 2) throw config_error("chain: q0 must be a square");
    if (m < 1 || m >= n || n > 52) throw config_error("chain: need 1 <= m < n <= 52");
    if (net.vectors.empty()) throw config_error("chain: empty direction net");
    const int blocks = n / m;
    if ((blocks - 1) * m > mu.level())
        throw config_error("chain: resolution too shallow for these block scales");

    const GridMeasure mu0 = q0.level == 0 ? mu : restrict_normalize(mu, q0);

    ChainReport rep;
    rep.m = m;
    rep.n = n;
    rep.target = t;
    rep.vacuous = mu0.atom_count() == 1;

    // gradient behavior of every pinned map over q0
    std::vector<PinnedMap> maps;
    std::vector<ValueRange> map_ranges;
    std::vector<PointMap> straight;       // the matched projections
    std::vector<ValueRange> straight_ranges;
    for (std::size_t i = 0; i < net.vectors.size(); ++i) {
        auto f = pinned_map(net, i);
        rep.worst_gradient_deviation =
            std::max(rep.worst_gradient_deviation, f.gradient_deviation(q0));
        if (opts.enforce_gradient_gate) check_pinned_square(f, q0, m);
        // tight value range over the unit square: the map is convex, so the
        // max sits at a corner and the min at the witness clamped to the square
        const double hi = std::max({f.eval({0.0, 0.0}), f.eval({1.0, 0.0}),
                                    f.eval({0.0, 1.0}), f.eval({1.0, 1.0})});
        const double lo = f.eval(
            {std::clamp(f.witness[0], 0.0, 1.0), std::clamp(f.witness[1], 0.0, 1.0)});
        maps.push_back(f);
        map_ranges.push_back({lo, hi});
        const Vec2 neg{-f.e[0], -f.e[1]};
        straight.push_back(projection(neg));
        straight_ranges.push_back(projection_range(neg));
    }
    const double gate = std::ldexp(1.0, -m);
    rep.rows.push_back({"gradient", -1, q0.level, rep.worst_gradient_deviation, gate,
                        gate - rep.worst_gradient_deviation});

    // weighted image entropy at full depth, the chain's left-hand side
    for (std::size_t i = 0; i < maps.size(); ++i) {
        auto pf = pushforward(mu0, maps[i].as_map(), n, map_ranges[i]);
        rep.final_average += net.weights[i] * normalized_entropy(pf.measure, n);
    }

    double blocks_total = 0.0;   // sum over blocks of the weighted conditional entropies
    double bracket_total = 0.0;  // same with blown-up projection entropies instead
    for (int k = 0; k < blocks; ++k) {
        const int km = k * m;
        const int fine = (k + 1) * m;
        double v_blocks = 0.0;
        double transfer_worst = 0.0;
        double dir_avg = 0.0;
        double shift_margin = std::numeric_limits<double>::infinity();
        double shift_value = 0.0, shift_bound = 0.0;
        for (const auto& sq : positive_squares(mu0, km)) {
            const auto part = restrict_normalize(mu0, sq.q);
            const auto blown = blow_up(mu0, sq.q);
            for (std::size_t i = 0; i < maps.size(); ++i) {
                const auto pf_curved = pushforward(part, maps[i].as_map(), n, map_ranges[i]);
                const double curved = conditional_entropy(pf_curved.measure, fine, km);
                const auto pf_straight = pushforward(part, straight[i], n, straight_ranges[i]);
                const double straight_e = conditional_entropy(pf_straight.measure, fine, km);
                const auto pf_blown = pushforward(blown, straight[i], m, straight_ranges[i]);
                const double raw_m = entropy(pf_blown.measure, m);

                v_blocks += sq.mass * net.weights[i] * curved;
                transfer_worst = std::max(transfer_worst, std::abs(curved - straight_e));
                const double margin = straight_e - (raw_m - 3.0);
                if (margin < shift_margin) {
                    shift_margin = margin;
                    shift_value = straight_e;
                    shift_bound = raw_m - 3.0;
                }
                dir_avg += sq.mass * net.weights[i] * (raw_m / m);
            }
        }
        blocks_total += v_blocks;
        bracket_total += dir_avg;
        rep.rows.push_back({"blocks", k, km, v_blocks, 0.0, v_blocks});
        rep.rows.push_back({"transfer", k, fine, transfer_worst, opts.transfer_constant,
                            opts.transfer_constant - transfer_worst});
        if (transfer_worst > opts.transfer_constant + opts.tol)
            throw assertion_error("chain: entropy transfer gap " +
                                  std::to_string(transfer_worst) + " exceeds " +
                                  std::to_string(opts.transfer_constant) + " at block " +
                                  std::to_string(k));
        rep.rows.push_back({"shift", k, fine, shift_value, shift_bound, shift_margin});
        if (shift_margin < -opts.tol)
            throw assertion_error("chain: block-to-blow-up shift violated at block " +
                                  std::to_string(k) + " by " + std::to_string(-shift_margin));
        rep.rows.push_back({"directions", k, km, dir_avg, 0.0, dir_avg});
    }

    const double ms_bound = blocks_total / n;
    rep.rows.push_back(
        {"multiscale_total", -1, n, rep.final_average, ms_bound, rep.final_average - ms_bound});
    if (rep.final_average - ms_bound < -opts.tol)
        throw assertion_error("chain: scale-block decomposition bound violated by " +
                              std::to_string(ms_bound - rep.final_average));

    const double chain_bound =
        (m * bracket_total - (3.0 + opts.transfer_constant) * blocks) / n;
    rep.rows.push_back({"chain_total", -1, n, rep.final_average, chain_bound,
                        rep.final_average - chain_bound});
    if (rep.final_average - chain_bound < -opts.tol)
        throw assertion_error("chain: combined lower bound violated by " +
                              std::to_string(chain_bound - rep.final_average));

    rep.rows.push_back({"final", -1, n, rep.final_average, t, rep.final_average - t});
    return rep;
}

} // namespace edl
