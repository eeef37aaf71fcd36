// Acceptance gate: eleven behavior checks, one pass/fail line each.
// Trend thresholds that are not forced by an identity are locked in
// docs/baselines.md; rounding tolerances live in the constants below.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "edl/dimension.hpp"
#include "edl/dyadic.hpp"
#include "edl/error.hpp"
#include "edl/grid_measure.hpp"
#include "edl/ifs.hpp"
#include "edl/io.hpp"
#include "edl/maps.hpp"
#include "edl/rng.hpp"

using namespace edl;
namespace fs = std::filesystem;

namespace {

constexpr double kRoundoff = 1e-9;       // slack for exact identities and bounds
constexpr double kTransferCap = 8.0;     // pinned-map vs projection budget, in bits
constexpr double kSlopeFloor = 0.90;     // distance-set slope floor (docs/baselines.md)
constexpr double kAverageFloor = 0.85;   // m=8 projection average floor (docs/baselines.md)
constexpr double kSlopeWobble = 0.01;    // allowed deviation of the box-count slope from 1

struct Outcome {
    bool pass = false;
    std::string detail;
};

int g_failed = 0;

template <typename Fn>
void run_check(int id, const char* name, double budget_secs, Fn&& fn) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
        out = fn();
    } catch (const std::exception& e) {
        out = {false, std::string("unexpected error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool pass = out.pass;
    char timing[64];
    if (budget_secs > 0.0) {
        pass = pass && secs < budget_secs;
        std::snprintf(timing, sizeof timing, "%.2f s of %.0f s", secs, budget_secs);
    } else {
        std::snprintf(timing, sizeof timing, "%.2f s", secs);
    }
    std::printf("[%s] %02d %s: %s (%s)\n", pass ? "PASS" : "FAIL", id, name,
                out.detail.c_str(), timing);
    std::fflush(stdout);
    if (!pass) ++g_failed;
}

PointMap random_quadratic(Rng& rng) {
    std::array<double, 6> c{};
    for (auto& v : c) v = 4.0 * rng.next_double() - 2.0;
    return [c](const Vec2& y) {
        return c[0] + c[1] * y[0] + c[2] * y[1] + c[3] * y[0] * y[0] + c[4] * y[0] * y[1] +
               c[5] * y[1] * y[1];
    };
}

// seeded pin scan, same scheme as the command-line tool: first support point
// that admits a net at scale m under the given covering cap
std::pair<std::size_t, DirectionNet> scan_pin(const std::vector<Vec2>& pts, int m,
                                              std::uint64_t seed, double cap) {
    Rng rng(seed ^ 0x9e3779b97f4a7c15ull);
    std::string last = "no attempts";
    for (int attempt = 0; attempt < 64; ++attempt) {
        const auto idx = static_cast<std::size_t>(rng.next_below(pts.size()));
        try {
            return {idx, build_direction_net(pts, pts[idx], m, cap)};
        } catch (const Error& e) {
            last = e.what();
        }
    }
    throw guard_error("no pin admits a direction net: " + last);
}

std::string read_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return in ? buf.str() : std::string("<unreadable:" + p.string() + ">");
}

Outcome check_conditional_identity() {
    double worst = 0.0;
    Rng rng(101);
    for (int trial = 0; trial < 500; ++trial) {
        const int dim = 1 + trial % 2;
        const int level = 2 + static_cast<int>(rng.next_below(9));
        const auto mu =
            random_measure(rng.next_u64(), dim, level, 1 + rng.next_below(180));
        const int fine = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(level)));
        const int coarse = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(fine) + 1));
        const double split = conditional_entropy(mu, fine, coarse);
        const double diff = entropy(mu, fine) - entropy(mu, coarse);
        worst = std::max(worst, std::abs(split - diff));
    }
    return {worst <= kRoundoff,
            "max |split - difference| = " + format_double(worst) + " over 500 measures"};
}

Outcome check_scale_block_bound() {
    double slack = std::numeric_limits<double>::infinity();
    Rng rng(202);
    for (int trial = 0; trial < 200; ++trial) {
        // level 11 keeps every block decomposition within the grid
        const auto mu = random_measure(rng.next_u64(), 2, 11, 5 + rng.next_below(200));
        auto f = random_quadratic(rng);
        const int m = 1 + trial % 3;
        const int n = m + 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(12 - m)));
        const auto b = multiscale_bound(mu, f, m, n);
        slack = std::min(slack, b.lhs - b.rhs);
    }
    return {slack >= -kRoundoff,
            "min image-minus-blocks slack = " + format_double(slack) + " over 200 maps"};
}

Outcome check_block_shift_bound() {
    double margin = std::numeric_limits<double>::infinity();
    Rng rng(303);
    int done = 0;
    while (done < 200) {
        const int level = 6 + static_cast<int>(rng.next_below(5));
        const auto mu = random_measure(rng.next_u64(), 2, level, 3 + rng.next_below(150));
        const int m = 1 + static_cast<int>(rng.next_below(3));
        const int km = static_cast<int>(rng.next_below(3)) * m;
        if (km + m > mu.level()) continue;
        const auto& probe =
            mu.atoms()[static_cast<std::size_t>(rng.next_below(mu.atom_count()))];
        DyadicCube q;
        q.level = km;
        q.dim = 2;
        q.coords = {probe.c[0] >> (mu.level() - km), probe.c[1] >> (mu.level() - km)};
        const double angle = 6.283185307179586 * rng.next_double();
        const Vec2 e{std::cos(angle), std::sin(angle)};
        const auto range = projection_range(e);
        const auto part =
            pushforward(restrict_normalize(mu, q), projection(e), km + m, range);
        const double cond = conditional_entropy(part.measure, km + m, km);
        const auto blown = pushforward(blow_up(mu, q), projection(e), m, range);
        const double raw = entropy(blown.measure, m);
        margin = std::min(margin, cond - (raw - 3.0));
        ++done;
    }
    return {margin >= -kRoundoff,
            "min margin over the 3-bit allowance = " + format_double(margin) +
                " across 200 projected blocks"};
}

Outcome check_support_floor() {
    double ratio = std::numeric_limits<double>::infinity();
    Rng rng(404);
    for (int trial = 0; trial < 500; ++trial) {
        const int dim = 1 + trial % 2;
        const int level = 2 + static_cast<int>(rng.next_below(9));
        const auto mu =
            random_measure(rng.next_u64(), dim, level, 1 + rng.next_below(200));
        const int n = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(level)));
        const auto b = entropy_support_bound(mu, n);  // throws when the floor breaks
        if (b.guaranteed > 0.0)
            ratio = std::min(ratio, static_cast<double>(b.count) / b.guaranteed);
    }
    return {ratio > 1.0, "min count/guaranteed = " + format_double(ratio) +
                             " over 500 measures, every floor held"};
}

Outcome check_transfer_budget() {
    const auto model = generate_cylinders(catalogue_model("four-corner"), 7);
    const auto [idx, net] = scan_pin(model.points, 4, 1, 8.0);
    const auto rep = multiscale_chain(model.measure, net, 4, 16, unit_cube(2), 0.8);
    double worst = 0.0;
    for (const auto& row : rep.rows)
        if (row.stage == "transfer") worst = std::max(worst, row.value);
    return {worst <= kTransferCap + kRoundoff,
            "max per-square map/projection gap = " + format_double(worst) + " bits of " +
                format_double(kTransferCap) + " allowed (pin " + std::to_string(idx) + ")"};
}

Outcome check_box_slope() {
    const auto model = generate_cylinders(catalogue_model("four-corner"), 7);
    std::vector<LevelCount> counts;
    bool exact = true;
    for (int k = 2; k <= 7; ++k) {
        const auto c = support_count(model.measure, 2 * k);
        counts.push_back({2 * k, c});
        exact = exact && c == (std::uint64_t(1) << (2 * k));
    }
    const auto est = box_count(counts);
    const bool pass = exact && std::abs(est.slope - 1.0) <= kSlopeWobble;
    return {pass, "cylinder counts exact, fitted slope " + format_double(est.slope)};
}

Outcome check_distance_slope() {
    const auto model = generate_cylinders(catalogue_model("four-corner"), 7);
    PairSetOptions opts;
    opts.threads = 1;  // the budget is a single-threaded budget
    std::vector<LevelCount> counts;
    for (int lvl = 6; lvl <= 14; ++lvl)
        counts.push_back({lvl, distance_set(model.points, lvl, opts).count()});
    const auto n = model.points.size();
    const auto est = box_count(counts, n * (n + 1) / 2);
    return {est.slope >= kSlopeFloor,
            "slope " + format_double(est.slope) + " over levels 6..14, floor " +
                format_double(kSlopeFloor)};
}

Outcome check_projection_average() {
    const auto four = generate_cylinders(catalogue_model("four-corner"), 7);
    // the four-corner direction cloud needs the wider covering cap, see
    // docs/baselines.md
    const auto [i1, net1] = scan_pin(four.points, 8, 1, 64.0);
    const auto a1 = average_projection_entropy(four.measure, net1, 8);
    const auto square = generate_cylinders(catalogue_model("full-square"), 8);
    const auto [i2, net2] = scan_pin(square.points, 8, 1, 8.0);
    const auto a2 = average_projection_entropy(square.measure, net2, 8);
    const double floor2 = 1.0 - 2.0 / 8.0;
    const bool pass = a1.applicable && a1.average >= kAverageFloor && a2.applicable &&
                      a2.average >= floor2;
    return {pass, "four-corner " + format_double(a1.average) + " (floor " +
                      format_double(kAverageFloor) + "), uniform square " +
                      format_double(a2.average) + " (floor " + format_double(floor2) + ")"};
}

Outcome check_chain_target() {
    // depth 8 lifts the image-entropy cap that a level-14 measure imposes at
    // n = 16, see docs/baselines.md
    const auto model = generate_cylinders(catalogue_model("four-corner"), 8);
    const auto [idx, net] = scan_pin(model.points, 4, 1, 8.0);
    const auto rep = multiscale_chain(model.measure, net, 4, 16, unit_cube(2), 0.8);
    double stage_margin = std::numeric_limits<double>::infinity();
    double final_margin = -std::numeric_limits<double>::infinity();
    for (const auto& row : rep.rows) {
        if (row.stage == "transfer" || row.stage == "shift" ||
            row.stage == "multiscale_total" || row.stage == "chain_total")
            stage_margin = std::min(stage_margin, row.margin);
        if (row.stage == "final") final_margin = row.margin;
    }
    const bool pass =
        rep.target_met() && final_margin > 0.0 && stage_margin >= -kRoundoff;
    return {pass, "final average " + format_double(rep.final_average) + " vs target 0.8, min stage margin " +
                      format_double(stage_margin) + " (pin " + std::to_string(idx) + ")"};
}

Outcome check_sum_product_identity() {
    const auto model = generate_cylinders(catalogue_model("middle-half"), 4);
    std::vector<double> a;
    a.reserve(model.points.size());
    for (const auto& p : model.points) a.push_back(p[0]);
    const double a1 = a[1], a2 = a[2];
    std::vector<Vec2> product;
    product.reserve(a.size() * a.size());
    for (const auto x : a)
        for (const auto y : a) product.push_back({x, y});
    PairSetOptions opts;
    int matched = 0;
    for (int lvl = 1; lvl <= 12; ++lvl) {
        const auto direct = sum_product_set(a, a1, a2, lvl, opts);
        const auto paired = dot_product_set(product, {a1, a2}, lvl, opts);
        if (direct.occupied() == paired.occupied()) ++matched;
    }
    return {matched == 12,
            std::to_string(matched) + "/12 levels match bin for bin at depth 4"};
}

Outcome check_determinism(const std::string& cli) {
    if (cli.empty()) return {false, "experiment binary path not passed as argv[1]"};
    const fs::path work = "acceptance_runs";
    std::error_code ec;
    fs::remove_all(work, ec);
    fs::create_directories(work);
    const std::string args =
        "\" distance --model four-corner --depth 5 --m 2 --n 8 --t 0.3"
        " --levels 4:10 --seed 9 --out ";
    const auto run = [&](const char* env, const fs::path& dir) {
        const std::string cmd = std::string(env) + " \"" + cli + args + dir.string() +
                                " >/dev/null 2>&1";
        return std::system(cmd.c_str());
    };
    const auto a = work / "threads1";
    const auto b = work / "threads3";
    if (run("EDL_THREADS=1", a) != 0 || run("EDL_THREADS=3", b) != 0)
        return {false, "experiment run exited nonzero"};
    int same = 0;
    const char* files[] = {"config.json", "counts.csv", "chain.csv", "summary.json"};
    for (const auto* f : files)
        if (read_bytes(a / f) == read_bytes(b / f)) ++same;
    return {same == 4, std::to_string(same) + "/4 output files byte-identical across"
                       " 1-thread and 3-thread runs"};
}

}  // namespace

int main(int argc, char** argv) {
    const std::string cli = argc > 1 ? argv[1] : "";
    run_check(1, "conditional entropy splits exactly across nested grids", 10.0,
              check_conditional_identity);
    run_check(2, "image entropy dominates the scale-block average", 60.0,
              check_scale_block_bound);
    run_check(3, "projected blocks dominate blown-up entropy minus 3 bits", 0.0,
              check_block_shift_bound);
    run_check(4, "support counts clear the entropy floor", 0.0, check_support_floor);
    run_check(5, "pinned maps track projections within 8 bits", 0.0,
              check_transfer_budget);
    run_check(6, "four-corner box-count slope is 1 within 0.01", 5.0, check_box_slope);
    run_check(7, "four-corner distance-set slope clears 0.90", 300.0,
              check_distance_slope);
    run_check(8, "net-averaged projection entropy clears its floors", 0.0,
              check_projection_average);
    run_check(9, "full chain clears the 0.8 target, stages inside constants", 0.0,
              check_chain_target);
    run_check(10, "sum-product bins equal pinned dot-product bins", 0.0,
              check_sum_product_identity);
    run_check(11, "same seed gives byte-identical outputs across threads", 0.0,
              [&] { return check_determinism(cli); });
    std::printf("%d/11 checks passed\n", 11 - g_failed);
    return g_failed == 0 ? 0 : 1;
}
