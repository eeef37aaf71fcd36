#include "edl/maps.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>

#include "edl/error.hpp"
#include "edl/parallel.hpp"
#include "edl/rng.hpp"

namespace edl {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

void require_unit(const Vec2& e) {
    const double n2 = e[0] * e[0] + e[1] * e[1];
    if (!std::isfinite(n2) || std::abs(n2 - 1.0) > 2e-9)
        throw config_error("direction must be a unit vector");
}

void require_finite_cloud(const std::vector<Vec2>& cloud) {
    for (const auto& p : cloud)
        if (!std::isfinite(p[0]) || !std::isfinite(p[1]))
            throw config_error("cloud contains a non-finite coordinate");
}

// angle of (dx, dy) mapped onto [0, 2pi)
double full_angle(double dx, double dy) {
    double a = std::atan2(dy, dx);
    if (a < 0.0) a += kTwoPi;
    if (a >= kTwoPi) a = 0.0;
    return a;
}

} // namespace

// ---- orthogonal projections -------------------------------------------

PointMap projection(const Vec2& e) {
    require_unit(e);
    const Vec2 d = e;
    return [d](const Vec2& y) { return y[0] * d[0] + y[1] * d[1]; };
}

ValueRange projection_range(const Vec2& e) {
    require_unit(e);
    ValueRange r;
    r.lo = std::min(0.0, e[0]) + std::min(0.0, e[1]);
    r.hi = std::max(0.0, e[0]) + std::max(0.0, e[1]);
    return r;
}

Pushforward project_measure(const GridMeasure& mu, const Vec2& e, int out_level) {
    if (mu.dim() != 2) throw config_error("projection needs a planar measure");
    return pushforward(mu, projection(e), out_level, projection_range(e));
}

// ---- direction nets ------------------------------------------------------

DirectionNet build_direction_net(const std::vector<Vec2>& cloud, const Vec2& pin, int m,
                                 double max_cnet) {
    if (m < 1 || m > 24) throw config_error("direction net: m out of range");
    if (!std::isfinite(pin[0]) || !std::isfinite(pin[1]))
        throw config_error("direction net: non-finite pin");
    require_finite_cloud(cloud);
    const std::size_t slots = std::size_t(1) << m;
    if (cloud.size() < slots)
        throw config_error("direction net: cloud smaller than the number of angular slots");

    const double width = kTwoPi / static_cast<double>(slots);
    // best witness per slot: the point farthest from the pin, so the
    // associated pinned map has the flattest gradient
    std::vector<std::size_t> best(slots, std::size_t(-1));
    std::vector<double> best_d2(slots, -1.0);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const double dx = cloud[i][0] - pin[0];
        const double dy = cloud[i][1] - pin[1];
        const double d2 = dx * dx + dy * dy;
        if (d2 <= 0.0) continue;  // the pin itself realizes no direction
        std::size_t s = static_cast<std::size_t>(full_angle(dx, dy) / width);
        if (s >= slots) s = slots - 1;
        if (d2 > best_d2[s]) {
            best_d2[s] = d2;
            best[s] = i;
        }
    }

    DirectionNet net;
    net.pin = pin;
    net.m = m;
    std::vector<double> angles;
    for (std::size_t s = 0; s < slots; ++s) {
        if (best[s] == std::size_t(-1)) continue;
        const Vec2& w = cloud[best[s]];
        const double dx = w[0] - pin[0];
        const double dy = w[1] - pin[1];
        const double d = std::sqrt(dx * dx + dy * dy);
        net.witnesses.push_back(w);
        net.vectors.push_back({dx / d, dy / d});
        angles.push_back(full_angle(dx, dy));
    }
    if (net.vectors.size() < std::max<std::size_t>(1, slots / 4))
        throw guard_error("direction net: cloud realizes too few directions for m=" +
                          std::to_string(m));

    // half-gap (Voronoi) weights on the circle and the worst angular gap
    const std::size_t n = angles.size();
    net.weights.resize(n);
    double wsum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double next = (i + 1 < n) ? angles[i + 1] - angles[i]
                                        : angles[0] + kTwoPi - angles[n - 1];
        const double prev = (i > 0) ? angles[i] - angles[i - 1]
                                    : angles[0] + kTwoPi - angles[n - 1];
        net.max_gap = std::max(net.max_gap, next);
        net.weights[i] = 0.5 * (prev + next);
        wsum += net.weights[i];
    }
    for (auto& w : net.weights) w /= wsum;

    net.c_net = std::ldexp(net.max_gap / 2.0, m);
    if (net.c_net > max_cnet)
        throw guard_error("direction net: covering constant " + std::to_string(net.c_net) +
                          " exceeds " + std::to_string(max_cnet) +
                          " (cloud too sparse around the pin for m=" + std::to_string(m) + ")");
    return net;
}

// ---- pinned quadratic maps --------------------------------------------

double PinnedMap::eval(const Vec2& y) const {
    const double dx = y[0] - witness[0];
    const double dy = y[1] - witness[1];
    return (dx * dx + dy * dy) / (2.0 * dist);
}

Vec2 PinnedMap::gradient(const Vec2& y) const {
    return {(y[0] - witness[0]) / dist, (y[1] - witness[1]) / dist};
}

PointMap PinnedMap::as_map() const {
    const PinnedMap f = *this;
    return [f](const Vec2& y) { return f.eval(y); };
}

double PinnedMap::gradient_deviation(const DyadicCube& q) const {
    check_cube(q);
    if (q.dim != 2) throw config_error("gradient deviation needs a planar square");
    // |gradient(y) + e| collapses to |y - pin| / dist, which is convex in y,
    // so the maximum over the square sits at one of its corners
    const double side = q.side();
    const Vec2 lo = q.corner();
    double worst = 0.0;
    for (int cx = 0; cx <= 1; ++cx)
        for (int cy = 0; cy <= 1; ++cy) {
            const double dx = (lo[0] + cx * side) - pin[0];
            const double dy = (lo[1] + cy * side) - pin[1];
            worst = std::max(worst, std::sqrt(dx * dx + dy * dy) / dist);
        }
    return worst;
}

PinnedMap pinned_map(const DirectionNet& net, std::size_t index) {
    if (index >= net.vectors.size()) throw config_error("pinned map: index out of range");
    PinnedMap f;
    f.witness = net.witnesses[index];
    f.pin = net.pin;
    f.e = net.vectors[index];
    const double dx = f.witness[0] - f.pin[0];
    const double dy = f.witness[1] - f.pin[1];
    f.dist = std::sqrt(dx * dx + dy * dy);
    return f;
}

void check_pinned_square(const PinnedMap& f, const DyadicCube& q, int m) {
    if (m < 0 || m > 52) throw config_error("pinned square check: m out of range");
    const double dev = f.gradient_deviation(q);
    const double limit = std::ldexp(1.0, -m);
    if (dev > limit) {
        std::ostringstream msg;
        msg << "square " << q.describe() << " too large for the pinned map: gradient deviation "
            << dev << " > " << limit << " (side up to about " << q.side() * (limit / dev)
            << " would do)";
        throw assertion_error(msg.str());
    }
}

// ---- pair value sets --------------------------------------------------

std::size_t BinCounts::count() const {
    std::size_t c = 0;
    for (auto w : words) c += static_cast<std::size_t>(std::popcount(w));
    return c;
}

bool BinCounts::test(std::uint64_t bin) const {
    const std::size_t w = static_cast<std::size_t>(bin >> 6);
    if (w >= words.size()) return false;
    return (words[w] >> (bin & 63)) & 1;
}

void BinCounts::set(std::uint64_t bin) {
    const std::size_t w = static_cast<std::size_t>(bin >> 6);
    if (w >= words.size()) throw config_error("bin index out of range");
    words[w] |= std::uint64_t(1) << (bin & 63);
}

std::vector<std::uint64_t> BinCounts::occupied() const {
    std::vector<std::uint64_t> out;
    for (std::size_t w = 0; w < words.size(); ++w) {
        std::uint64_t v = words[w];
        while (v) {
            const int b = std::countr_zero(v);
            out.push_back((std::uint64_t(w) << 6) + static_cast<std::uint64_t>(b));
            v &= v - 1;
        }
    }
    return out;
}

BinCounts BinCounts::coarsened(int coarser_level) const {
    if (coarser_level < 0 || coarser_level > level)
        throw config_error("coarsened: level must lie between 0 and the stored level");
    BinCounts out;
    out.level = coarser_level;
    out.range = range;
    out.lower_bound_only = lower_bound_only;
    out.words.assign(std::size_t(1) << (coarser_level > 6 ? coarser_level - 6 : 0), 0);
    const int fold = level - coarser_level;
    for (std::size_t w = 0; w < words.size(); ++w) {
        std::uint64_t v = words[w];
        while (v) {
            const int b = std::countr_zero(v);
            const std::uint64_t bin = ((std::uint64_t(w) << 6) + static_cast<std::uint64_t>(b));
            out.set(bin >> fold);
            v &= v - 1;
        }
    }
    return out;
}

namespace {

BinCounts make_bins(int level) {
    if (level < 0 || level > 28) throw config_error("bin level out of range (0..28)");
    BinCounts b;
    b.level = level;
    b.words.assign(std::size_t(1) << (level > 6 ? level - 6 : 0), 0);
    return b;
}

// Deterministically pick k of n indices (partial Fisher-Yates, sorted), so
// subsampled sweeps do not depend on the thread count.
std::vector<std::size_t> pick_indices(std::size_t n, std::size_t k, std::uint64_t seed) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    Rng rng(seed);
    for (std::size_t i = 0; i < k; ++i)
        std::swap(idx[i], idx[i + static_cast<std::size_t>(rng.next_below(n - i))]);
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    return idx;
}

// Enforce the ordered-pair budget; returns the (possibly subsampled) cloud
// and whether counts became lower bounds.
template <typename T>
std::pair<std::vector<T>, bool> budgeted(const std::vector<T>& pts, int pairs_power,
                                         const PairSetOptions& opts) {
    const double total = std::pow(static_cast<double>(pts.size()), pairs_power);
    if (total <= static_cast<double>(opts.pair_guard)) return {pts, false};
    if (!opts.allow_subsample)
        throw guard_error("pair sweep would visit about " + std::to_string(total) +
                          " tuples, over the guard of " + std::to_string(opts.pair_guard) +
                          " (enable subsampling or coarsen the input)");
    std::size_t k = static_cast<std::size_t>(std::floor(
        std::pow(static_cast<double>(opts.pair_guard), 1.0 / pairs_power)));
    k = std::max<std::size_t>(2, std::min(k, pts.size()));
    std::vector<T> sub;
    sub.reserve(k);
    for (auto i : pick_indices(pts.size(), k, opts.seed)) sub.push_back(pts[i]);
    return {std::move(sub), true};
}

// Two-pass sweep over tuples indexed by an outer row 0..rows-1: pass one
// finds the exact value range, pass two marks occupied bins. Each thread
// owns a private bitset; OR-merging makes the result order-independent.
template <typename RowValues>
BinCounts sweep(std::size_t rows, int level, int threads, bool lower_bound,
                RowValues&& row_values) {
    const int nt = effective_threads(threads);
    std::vector<double> lo(static_cast<std::size_t>(nt), std::numeric_limits<double>::infinity());
    std::vector<double> hi(static_cast<std::size_t>(nt), -std::numeric_limits<double>::infinity());
    parallel_blocks(rows, nt, [&](int tid, std::size_t begin, std::size_t end) {
        double l = lo[static_cast<std::size_t>(tid)], h = hi[static_cast<std::size_t>(tid)];
        for (std::size_t r = begin; r < end; ++r)
            row_values(r, [&](double v) {
                if (v < l) l = v;
                if (v > h) h = v;
            });
        lo[static_cast<std::size_t>(tid)] = l;
        hi[static_cast<std::size_t>(tid)] = h;
    });
    ValueRange range;
    range.lo = *std::min_element(lo.begin(), lo.end());
    range.hi = *std::max_element(hi.begin(), hi.end());
    if (!std::isfinite(range.lo) || !std::isfinite(range.hi))
        throw assertion_error("pair sweep produced a non-finite value");

    BinCounts bins = make_bins(level);
    bins.range = range;
    bins.lower_bound_only = lower_bound;
    std::vector<std::vector<std::uint64_t>> local(
        static_cast<std::size_t>(nt), std::vector<std::uint64_t>(bins.words.size(), 0));
    parallel_blocks(rows, nt, [&](int tid, std::size_t begin, std::size_t end) {
        auto& words = local[static_cast<std::size_t>(tid)];
        for (std::size_t r = begin; r < end; ++r)
            row_values(r, [&](double v) {
                const std::uint64_t b = value_bin(v, range, level);
                words[static_cast<std::size_t>(b >> 6)] |= std::uint64_t(1) << (b & 63);
            });
    });
    for (const auto& words : local)
        for (std::size_t w = 0; w < words.size(); ++w) bins.words[w] |= words[w];
    return bins;
}

} // namespace

BinCounts distance_set(const std::vector<Vec2>& cloud, int level, const PairSetOptions& opts) {
    if (cloud.empty()) throw config_error("distance set: empty cloud");
    require_finite_cloud(cloud);
    auto [pts, lower] = budgeted(cloud, 2, opts);
    const auto& p = pts;
    return sweep(p.size(), level, opts.threads, lower, [&p](std::size_t i, auto&& emit) {
        for (std::size_t j = i; j < p.size(); ++j) {
            const double dx = p[i][0] - p[j][0];
            const double dy = p[i][1] - p[j][1];
            emit(std::sqrt(dx * dx + dy * dy));
        }
    });
}

BinCounts dot_product_set(const std::vector<Vec2>& cloud, const Vec2& pin, int level,
                          const PairSetOptions& opts) {
    if (cloud.empty()) throw config_error("dot product set: empty cloud");
    require_finite_cloud(cloud);
    if (!std::isfinite(pin[0]) || !std::isfinite(pin[1]))
        throw config_error("dot product set: non-finite pin");
    auto [pts, lower] = budgeted(cloud, 2, opts);
    const auto& p = pts;
    return sweep(p.size(), level, opts.threads, lower, [&p, pin](std::size_t i, auto&& emit) {
        for (std::size_t j = 0; j < p.size(); ++j)
            emit(p[i][0] * (p[j][0] - pin[0]) + p[i][1] * (p[j][1] - pin[1]));
    });
}

BinCounts sum_product_set(const std::vector<double>& points, double a1, double a2, int level,
                          const PairSetOptions& opts) {
    if (points.empty()) throw config_error("sum product set: empty point set");
    for (double x : points)
        if (!std::isfinite(x)) throw config_error("sum product set: non-finite point");
    if (!std::isfinite(a1) || !std::isfinite(a2))
        throw config_error("sum product set: non-finite anchors");
    auto [pts, lower] = budgeted(points, 4, opts);
    const auto& a = pts;
    // outer row (x, z), inner loop (y, w); the value expression matches the
    // dot products of the product cloud term for term
    const std::size_t n = a.size();
    return sweep(n * n, level, opts.threads, lower, [&a, a1, a2, n](std::size_t r, auto&& emit) {
        const double x = a[r / n];
        const double z = a[r % n];
        for (std::size_t yi = 0; yi < n; ++yi)
            for (std::size_t wi = 0; wi < n; ++wi)
                emit(x * (a[yi] - a1) + z * (a[wi] - a2));
    });
}

} // namespace edl
