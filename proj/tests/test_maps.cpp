#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "edl/ifs.hpp"
#include "edl/maps.hpp"
#include "edl/rng.hpp"

using namespace edl;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<Vec2> random_cloud(std::uint64_t seed, std::size_t n) {
    Rng rng(seed);
    std::vector<Vec2> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) pts.push_back({rng.next_double(), rng.next_double()});
    return pts;
}

// cloud on the 2^-10 lattice, so shifting by whole integers is exact
std::vector<Vec2> lattice_cloud(std::uint64_t seed, std::size_t n) {
    Rng rng(seed);
    std::vector<Vec2> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        pts.push_back({static_cast<double>(rng.next_below(1024)) / 1024.0,
                       static_cast<double>(rng.next_below(1024)) / 1024.0});
    return pts;
}

// independent rebinning used by the pair-set oracles
std::uint64_t bin_of(double v, double lo, double hi, int level) {
    if (!(hi > lo)) return 0;
    double u = (v - lo) / (hi - lo);
    if (u < 0) u = 0;
    if (u > 1) u = 1;
    auto b = static_cast<std::uint64_t>(std::floor(u * std::pow(2.0, level)));
    const std::uint64_t top = (std::uint64_t(1) << level) - 1;
    return b > top ? top : b;
}

std::set<std::uint64_t> distance_bins_oracle(const std::vector<Vec2>& cloud, int level) {
    double diam2 = 0.0;
    for (std::size_t i = 0; i < cloud.size(); ++i)
        for (std::size_t j = i; j < cloud.size(); ++j) {
            const double dx = cloud[i][0] - cloud[j][0];
            const double dy = cloud[i][1] - cloud[j][1];
            diam2 = std::max(diam2, dx * dx + dy * dy);
        }
    const double diam = std::sqrt(diam2);
    std::set<std::uint64_t> bins;
    for (std::size_t i = 0; i < cloud.size(); ++i)
        for (std::size_t j = i; j < cloud.size(); ++j) {
            const double dx = cloud[i][0] - cloud[j][0];
            const double dy = cloud[i][1] - cloud[j][1];
            bins.insert(bin_of(std::sqrt(dx * dx + dy * dy), 0.0, diam, level));
        }
    return bins;
}

} // namespace

// ---- projections ---------------------------------------------------------

TEST_CASE("axis projection of the full square is uniform on the line") {
    auto model = generate_cylinders(catalogue_model("full-square"), 4);
    auto pf = project_measure(model.measure, {1.0, 0.0}, 4);
    CHECK(entropy(pf.measure, 4) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(pf.range.lo == 0.0);
    CHECK(pf.range.hi == 1.0);
}

TEST_CASE("projection requires a unit direction") {
    auto model = generate_cylinders(catalogue_model("four-corner"), 2);
    CHECK_THROWS_AS((void)project_measure(model.measure, {0.5, 0.5}, 3), Error);
}

TEST_CASE("projection pushforwards keep mass and dimension") {
    auto model = generate_cylinders(catalogue_model("four-corner"), 4);
    const double inv = 1.0 / std::sqrt(2.0);
    auto pf = project_measure(model.measure, {inv, inv}, 6);
    CHECK(pf.measure.dim() == 1);
    CHECK(pf.measure.level() == 6);
    CHECK(pf.measure.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("the diagonal direction is entropy-deficient for the four-corner model") {
    auto model = generate_cylinders(catalogue_model("four-corner"), 4);
    const int m = 6;
    const double inv = 1.0 / std::sqrt(2.0);
    double diag = normalized_entropy(project_measure(model.measure, {inv, inv}, m).measure, m);

    double sum = 0.0;
    const int dirs = 64;
    for (int k = 0; k < dirs; ++k) {
        const double a = 2.0 * kPi * (k + 0.5) / dirs;
        sum += normalized_entropy(
            project_measure(model.measure, {std::cos(a), std::sin(a)}, m).measure, m);
    }
    CHECK(diag < sum / dirs);
}

// ---- direction nets ----------------------------------------------------

TEST_CASE("equiangular cloud around the origin gives the full net with equal weights") {
    for (int m : {3, 5}) {
        const std::size_t n = std::size_t(1) << m;
        std::vector<Vec2> cloud;
        for (std::size_t k = 0; k < n; ++k) {
            const double a = 2.0 * kPi * (static_cast<double>(k) + 0.25) / static_cast<double>(n);
            cloud.push_back({std::cos(a), std::sin(a)});
        }
        auto net = build_direction_net(cloud, {0.0, 0.0}, m);
        REQUIRE(net.vectors.size() == n);
        double wsum = 0.0;
        for (double w : net.weights) {
            CHECK(w == doctest::Approx(1.0 / static_cast<double>(n)).epsilon(1e-9));
            wsum += w;
        }
        CHECK(wsum == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(net.max_gap == doctest::Approx(2.0 * kPi / static_cast<double>(n)).epsilon(1e-9));
    }
}

TEST_CASE("witnesses realize their directions exactly") {
    auto model = generate_cylinders(catalogue_model("four-corner"), 5);
    Vec2 pin = model.points[555];
    auto net = build_direction_net(model.points, pin, 4);
    REQUIRE(net.vectors.size() == net.witnesses.size());
    for (std::size_t i = 0; i < net.vectors.size(); ++i) {
        const double dx = net.witnesses[i][0] - pin[0];
        const double dy = net.witnesses[i][1] - pin[1];
        const double d = std::sqrt(dx * dx + dy * dy);
        CHECK(net.vectors[i][0] == doctest::Approx(dx / d).epsilon(1e-12));
        CHECK(net.vectors[i][1] == doctest::Approx(dy / d).epsilon(1e-12));
    }
    // angles sorted on [0, 2pi), weights normalized
    auto full_angle = [](const Vec2& v) {
        double a = std::atan2(v[1], v[0]);
        return a < 0 ? a + 2.0 * kPi : a;
    };
    double prev = full_angle(net.vectors[0]);
    double wsum = net.weights[0];
    for (std::size_t i = 1; i < net.vectors.size(); ++i) {
        const double a = full_angle(net.vectors[i]);
        CHECK(a > prev);
        prev = a;
        wsum += net.weights[i];
    }
    CHECK(wsum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("every unit vector is covered within the recorded net constant") {
    auto model = generate_cylinders(catalogue_model("four-corner"), 6);
    Vec2 pin = model.points[1234];
    auto net = build_direction_net(model.points, pin, 4);
    CHECK(net.vectors.size() >= (std::size_t(1) << 4) / 4);
    CHECK(net.vectors.size() <= (std::size_t(1) << 4));
    Rng rng(99);
    const double radius = net.c_net * std::ldexp(1.0, -net.m);
    for (int trial = 0; trial < 10000; ++trial) {
        const double a = 2.0 * kPi * rng.next_double();
        const Vec2 xi{std::cos(a), std::sin(a)};
        double best = 2.0;
        for (const auto& e : net.vectors) {
            const double dx = xi[0] - e[0];
            const double dy = xi[1] - e[1];
            best = std::min(best, std::sqrt(dx * dx + dy * dy));
        }
        CHECK(best <= radius + 1e-12);
    }
}

TEST_CASE("a collinear cloud cannot cover the circle") {
    std::vector<Vec2> cloud;
    for (int i = 1; i <= 32; ++i) {
        cloud.push_back({0.5 + i * 0.01, 0.5 + i * 0.01});
        cloud.push_back({0.5 - i * 0.01, 0.5 - i * 0.01});
    }
    // the angular gap between the two realized directions is pi, so the
    // recorded covering constant (pi/2) * 2^m exceeds 8 once m >= 3
    for (int m : {3, 4, 5})
        CHECK_THROWS_AS((void)build_direction_net(cloud, {0.5, 0.5}, m), Error);
}

TEST_CASE("direction net needs enough points") {
    std::vector<Vec2> tiny = {{0.1, 0.1}, {0.9, 0.2}, {0.3, 0.8}};
    CHECK_THROWS_AS((void)build_direction_net(tiny, {0.5, 0.5}, 4), Error);
}

// ---- pinned maps ------------------------------------------------------------

TEST_CASE("pinned map gradient matches finite differences and is -e at the pin") {
    auto model = generate_cylinders(catalogue_model("four-corner"), 5);
    Vec2 pin = model.points[555];
    auto net = build_direction_net(model.points, pin, 4);
    Rng rng(5);
    for (std::size_t i = 0; i < net.vectors.size(); ++i) {
        auto f = pinned_map(net, i);
        // exact at the pin
        auto g0 = f.gradient(pin);
        CHECK(g0[0] == -f.e[0]);
        CHECK(g0[1] == -f.e[1]);
        // central differences on random points (the map is quadratic, so
        // the difference quotient is exact up to rounding)
        for (int t = 0; t < 5; ++t) {
            const Vec2 y{rng.next_double(), rng.next_double()};
            const double h = 1e-6;
            auto g = f.gradient(y);
            const double fdx =
                (f.eval({y[0] + h, y[1]}) - f.eval({y[0] - h, y[1]})) / (2.0 * h);
            const double fdy =
                (f.eval({y[0], y[1] + h}) - f.eval({y[0], y[1] - h})) / (2.0 * h);
            CHECK(std::abs(fdx - g[0]) <= 1e-6 / f.dist);
            CHECK(std::abs(fdy - g[1]) <= 1e-6 / f.dist);
        }
    }
}

TEST_CASE("gradient gate: far witnesses pass small squares, near ones fail big squares") {
    DirectionNet net;
    net.pin = {0.0, 0.0};
    net.m = 3;
    net.vectors = {{1.0, 0.0}};
    net.witnesses = {{0.9, 0.0}};
    net.weights = {1.0};
    auto f = pinned_map(net, 0);

    DyadicCube small;
    small.level = 7;  // side 1/128, deviation sqrt(2)/128/0.9 ~ 0.012 < 2^-3
    small.dim = 2;
    small.coords = {0, 0};
    CHECK_NOTHROW(check_pinned_square(f, small, 3));
    CHECK(f.gradient_deviation(small) <= std::ldexp(1.0, -3));

    DyadicCube big;
    big.level = 1;  // side 1/2, deviation ~ 0.79 > 2^-3
    big.dim = 2;
    big.coords = {0, 0};
    CHECK_THROWS_AS(check_pinned_square(f, big, 3), Error);
    // deviation shrinks along nested squares
    CHECK(f.gradient_deviation(small) < f.gradient_deviation(big));
}

// ---- distance sets -----------------------------------------------------------

TEST_CASE("two points give two occupied distance bins at any level") {
    std::vector<Vec2> cloud = {{0.0, 0.0}, {0.6, 0.8}};
    for (int level : {1, 4, 9}) {
        auto bins = distance_set(cloud, level);
        CHECK(bins.count() == 2);
        CHECK(bins.test(0));
        CHECK(bins.test((std::uint64_t(1) << level) - 1));
    }
}

TEST_CASE("collinear equispaced points produce one bin per distinct distance") {
    // dyadic spacing keeps every distance and every rescaled ratio exact,
    // so the five distinct values land in bins 0, 4, 8, 12 and the top bin
    std::vector<Vec2> cloud;
    for (int i = 0; i < 5; ++i) cloud.push_back({0.125 * i, 0.0});
    auto bins = distance_set(cloud, 4);
    CHECK(bins.count() == 5);
    CHECK(bins.occupied() == std::vector<std::uint64_t>{0, 4, 8, 12, 15});
}

TEST_CASE("distance bins match the quadratic oracle exactly") {
    auto cloud = random_cloud(314, 100);
    for (int level : {3, 6, 10}) {
        auto got = distance_set(cloud, level);
        auto want = distance_bins_oracle(cloud, level);
        REQUIRE(got.count() == want.size());
        for (auto b : want) CHECK(got.test(b));
    }
}

TEST_CASE("integer translations change no distance counts") {
    auto cloud = lattice_cloud(2718, 80);
    auto moved = cloud;
    for (auto& p : moved) {
        p[0] += 2.0;
        p[1] += 3.0;
    }
    for (int level : {4, 8}) {
        auto a = distance_set(cloud, level);
        auto b = distance_set(moved, level);
        CHECK(a.occupied() == b.occupied());
    }
}

TEST_CASE("coarsened bins agree with directly computed coarse bins") {
    auto cloud = random_cloud(11, 120);
    auto fine = distance_set(cloud, 12);
    for (int level : {10, 7, 3}) {
        auto direct = distance_set(cloud, level);
        auto folded = fine.coarsened(level);
        CHECK(direct.occupied() == folded.occupied());
    }
}

TEST_CASE("distance sweep is thread-count independent") {
    auto cloud = random_cloud(5150, 400);
    PairSetOptions one;
    one.threads = 1;
    PairSetOptions four;
    four.threads = 4;
    auto a = distance_set(cloud, 11, one);
    auto b = distance_set(cloud, 11, four);
    CHECK(a.occupied() == b.occupied());
}

TEST_CASE("pair guard trips or subsamples deterministically") {
    auto cloud = random_cloud(99, 200);
    PairSetOptions strict;
    strict.pair_guard = 1000;  // 200^2 = 40000 ordered pairs > 1000
    CHECK_THROWS_AS((void)distance_set(cloud, 8, strict), Error);

    PairSetOptions sub = strict;
    sub.allow_subsample = true;
    sub.seed = 31337;
    auto a = distance_set(cloud, 8, sub);
    CHECK(a.lower_bound_only);
    auto full = distance_set(cloud, 8);
    CHECK(a.count() <= full.count());
    sub.threads = 3;
    auto b = distance_set(cloud, 8, sub);
    CHECK(a.occupied() == b.occupied());
}

// ---- dot-product and sum-product sets --------------------------------------

TEST_CASE("dot product bins match a quadruple-free oracle") {
    auto cloud = random_cloud(77, 60);
    const Vec2 pin = cloud[7];
    auto got = dot_product_set(cloud, pin, 9);
    // oracle
    double lo = 1e300, hi = -1e300;
    std::vector<double> values;
    for (const auto& p : cloud)
        for (const auto& q : cloud) {
            const double v = p[0] * (q[0] - pin[0]) + p[1] * (q[1] - pin[1]);
            values.push_back(v);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    std::set<std::uint64_t> want;
    for (double v : values) want.insert(bin_of(v, lo, hi, 9));
    REQUIRE(got.count() == want.size());
    for (auto b : want) CHECK(got.test(b));
    CHECK(got.range.lo == lo);
    CHECK(got.range.hi == hi);
}

TEST_CASE("sum-product set equals the dot-product set of the product cloud") {
    auto line = generate_cylinders(catalogue_model("middle-half"), 2);
    std::vector<double> a;
    for (const auto& p : line.points) a.push_back(p[0]);
    const double a1 = a[1], a2 = a[2];

    std::vector<Vec2> product;
    for (double x : a)
        for (double z : a) product.push_back({x, z});

    for (int level = 1; level <= 12; ++level) {
        auto sp = sum_product_set(a, a1, a2, level);
        auto dp = dot_product_set(product, {a1, a2}, level);
        CHECK(sp.occupied() == dp.occupied());  // exact, bin for bin
        CHECK(sp.range.lo == dp.range.lo);
        CHECK(sp.range.hi == dp.range.hi);
    }
}

TEST_CASE("sum-product bins match the plain quadruple oracle") {
    std::vector<double> a = {0.0, 0.1875, 0.75, 0.9375, 0.5};
    const double a1 = 0.75, a2 = 0.1875;
    auto got = sum_product_set(a, a1, a2, 7);
    double lo = 1e300, hi = -1e300;
    std::vector<double> values;
    for (double x : a)
        for (double y : a)
            for (double z : a)
                for (double w : a) {
                    const double v = x * (y - a1) + z * (w - a2);
                    values.push_back(v);
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
    std::set<std::uint64_t> want;
    for (double v : values) want.insert(bin_of(v, lo, hi, 7));
    REQUIRE(got.count() == want.size());
    for (auto b : want) CHECK(got.test(b));
}
