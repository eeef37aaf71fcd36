// Experiment driver: generates cylinder models, runs the distance / dot
// product / sum-product sweeps with their dimension fits and chain reports,
// and exposes the randomized self-check suite. Every run writes its inputs
// and results into a fresh run directory; file contents carry no timestamps
// so identical configs reproduce identical bytes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "edl/dimension.hpp"
#include "edl/error.hpp"
#include "edl/ifs.hpp"
#include "edl/io.hpp"
#include "edl/rng.hpp"

using json = nlohmann::json;
using namespace edl;

namespace {

struct RunConfig {
    std::string model = "four-corner";
    std::string ifs_path;
    int depth = 5;
    int m = 4;
    int n = 12;
    double t = 0.5;
    long long pin = -1;  // support point index; -1 picks deterministically
    std::uint64_t seed = 1;
    std::string out;     // run directory; empty derives run-<label>-<timestamp>
    std::string levels;  // "a:b" sweep override
    bool subsample = false;
    std::uint64_t pair_guard = std::uint64_t(1) << 34;
    int trials = 100;       // verify only
    std::string mutate;     // verify only: named fault injection
};

void add_common_flags(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--model", cfg.model, "catalogue model name");
    cmd->add_option("--ifs", cfg.ifs_path, "IFS config JSON file (overrides --model)");
    cmd->add_option("--depth", cfg.depth, "cylinder generation depth");
    cmd->add_option("--m", cfg.m, "direction net scale");
    cmd->add_option("--n", cfg.n, "entropy depth");
    cmd->add_option("--t", cfg.t, "target exponent");
    cmd->add_option("--pin", cfg.pin, "pin as a support point index (-1: automatic)");
    cmd->add_option("--seed", cfg.seed, "run seed");
    cmd->add_option("--out", cfg.out, "output directory (default run-<label>-<timestamp>)");
    cmd->add_option("--levels", cfg.levels, "sweep levels as a:b");
    cmd->add_flag("--subsample", cfg.subsample,
                  "subsample the cloud when the pair guard trips (counts become lower bounds)");
    cmd->add_option("--pair-guard", cfg.pair_guard, "max enumerated pairs before the guard");
}

std::string timestamp_utc() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y%m%d-%H%M%S", &tm);
    return buf;
}

std::filesystem::path make_run_dir(const RunConfig& cfg, const std::string& label) {
    std::filesystem::path dir =
        cfg.out.empty() ? std::filesystem::path("run-" + label + "-" + timestamp_utc())
                        : std::filesystem::path(cfg.out);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw config_error("cannot create run directory " + dir.string());
    return dir;
}

IFSSystem resolve_system(const RunConfig& cfg) {
    return cfg.ifs_path.empty() ? catalogue_model(cfg.model) : load_ifs_file(cfg.ifs_path);
}

std::array<int, 2> parse_levels(const std::string& text, std::array<int, 2> fallback) {
    if (text.empty()) return fallback;
    const auto colon = text.find(':');
    if (colon == std::string::npos)
        throw config_error("--levels must be a:b, got '" + text + "'");
    int a = 0, b = 0;
    try {
        a = std::stoi(text.substr(0, colon));
        b = std::stoi(text.substr(colon + 1));
    } catch (const std::exception&) {
        throw config_error("--levels must be a:b with integers, got '" + text + "'");
    }
    if (a < 1 || b > 28 || a + 2 > b)
        throw config_error("--levels needs 1 <= a, a+2 <= b <= 28 for a three-point fit");
    return {a, b};
}

json config_json(const RunConfig& cfg, const std::string& command,
                 const std::array<int, 2>& levels) {
    json j;
    j["command"] = command;
    j["model"] = cfg.ifs_path.empty() ? cfg.model : cfg.ifs_path;
    j["depth"] = cfg.depth;
    j["m"] = cfg.m;
    j["n"] = cfg.n;
    j["t"] = cfg.t;
    j["pin"] = cfg.pin;
    j["seed"] = cfg.seed;
    j["levels"] = {levels[0], levels[1]};
    j["subsample"] = cfg.subsample;
    j["pair_guard"] = cfg.pair_guard;
    return j;
}

void write_json(const std::filesystem::path& path, const json& j) {
    write_text_file(path.string(), j.dump(2) + "\n");
}

PairSetOptions pair_options(const RunConfig& cfg) {
    PairSetOptions opts;
    opts.pair_guard = cfg.pair_guard;
    opts.allow_subsample = cfg.subsample;
    opts.seed = cfg.seed;
    return opts;
}

// Deterministic pin choice: the requested index, or a seeded scan of support
// points until one admits a net at scale m. Returns the index and the net.
std::pair<std::size_t, DirectionNet> pick_pin(const ADRegularModel& model, long long requested,
                                              int m, std::uint64_t seed) {
    const auto& pts = model.points;
    if (requested >= 0) {
        if (static_cast<std::size_t>(requested) >= pts.size())
            throw config_error("--pin index " + std::to_string(requested) +
                               " is not a support point (cloud has " +
                               std::to_string(pts.size()) + ")");
        return {static_cast<std::size_t>(requested),
                build_direction_net(pts, pts[static_cast<std::size_t>(requested)], m)};
    }
    Rng rng(seed ^ 0x9e3779b97f4a7c15ull);
    std::string last;
    for (int attempt = 0; attempt < 64; ++attempt) {
        const auto idx = static_cast<std::size_t>(rng.next_below(pts.size()));
        try {
            return {idx, build_direction_net(pts, pts[idx], m)};
        } catch (const Error& e) {
            last = e.what();
        }
    }
    throw guard_error("no pin admits a direction net at m=" + std::to_string(m) +
                      " after 64 seeded attempts; last error: " + last);
}

// level sweep of a pair-value set; returns counts and whether any sweep
// subsampled (counts then undercount, which still one-sides the fits)
template <typename SweepFn>
std::pair<std::vector<LevelCount>, bool> sweep_counts(const std::array<int, 2>& levels,
                                                      SweepFn&& fn) {
    std::vector<LevelCount> counts;
    bool lower_bound = false;
    for (int lvl = levels[0]; lvl <= levels[1]; ++lvl) {
        BinCounts bins = fn(lvl);
        counts.push_back({lvl, bins.count()});
        lower_bound = lower_bound || bins.lower_bound_only;
    }
    return {counts, lower_bound};
}

// chain + covering report shared by the experiment commands
json run_chain_block(const ADRegularModel& model, const DirectionNet& net,
                     const RunConfig& cfg, const std::filesystem::path& dir) {
    const auto report =
        multiscale_chain(model.measure, net, cfg.m, cfg.n, unit_cube(2), cfg.t);
    write_text_file((dir / "chain.csv").string(), chain_csv(report));

    std::vector<std::uint64_t> image_counts;
    for (const auto& e : net.vectors)
        image_counts.push_back(
            support_count(project_measure(model.measure, e, cfg.n).measure, cfg.n));
    const auto covering = weighted_covering_bound(net, image_counts, cfg.n, cfg.t);

    json j;
    j["chain_final"] = report.final_average;
    j["chain_target"] = report.target;
    j["chain_target_met"] = report.target_met();
    j["chain_vacuous"] = report.vacuous;
    j["covering_margin"] = covering.margin;
    j["covering_pass"] = covering.pass;
    j["worst_gradient_deviation"] = report.worst_gradient_deviation;
    return j;
}

int cmd_generate(const RunConfig& cfg) {
    auto model = generate_cylinders(resolve_system(cfg), cfg.depth);
    if (cfg.depth >= 3) verify_ad_regularity(model, 64, cfg.seed);  // else A stays 0
    const auto dir = make_run_dir(cfg, "generate-" + model.system.label);
    write_json(dir / "config.json", config_json(cfg, "generate", {0, 0}));
    save_measure((dir / "model.gridmeasure").string(), model.measure);
    save_cloud((dir / "model.cloud").string(), model.points, model.system.dim);

    json summary;
    summary["atoms"] = model.measure.atom_count();
    summary["depth"] = model.depth;
    summary["label"] = model.system.label;
    summary["level"] = model.measure.level();
    summary["points"] = model.points.size();
    summary["regularity_constant"] = model.A;
    summary["similarity_dimension"] = model.s;
    write_json(dir / "summary.json", summary);
    std::cout << "generated " << model.points.size() << " cylinders into " << dir.string()
              << "\n";
    return 0;
}

int cmd_distance(const RunConfig& cfg) {
    auto model = generate_cylinders(resolve_system(cfg), cfg.depth);
    if (model.system.dim != 2)
        throw config_error("distance experiment requires a planar model (d=2)");
    const auto levels = parse_levels(cfg.levels, {6, 14});
    const auto dir = make_run_dir(cfg, "distance-" + model.system.label);
    write_json(dir / "config.json", config_json(cfg, "distance", levels));

    const auto opts = pair_options(cfg);
    auto [counts, lower_bound] = sweep_counts(
        levels, [&](int lvl) { return distance_set(model.points, lvl, opts); });
    write_text_file((dir / "counts.csv").string(), counts_csv(counts));
    const auto est = box_count(counts, model.points.size() * (model.points.size() + 1) / 2);

    auto [pin_idx, net] = pick_pin(model, cfg.pin, cfg.m, cfg.seed);
    json summary = run_chain_block(model, net, cfg, dir);
    summary["lower_bound_only"] = lower_bound;
    summary["pin_index"] = pin_idx;
    summary["residual"] = est.residual;
    summary["slope"] = est.slope;
    summary["window"] = {est.window[0], est.window[1]};
    write_json(dir / "summary.json", summary);
    std::cout << "distance-set slope " << format_double(est.slope) << " over levels "
              << est.window[0] << ".." << est.window[1] << ", chain final "
              << format_double(summary["chain_final"].get<double>()) << " vs target "
              << format_double(cfg.t) << " -> " << dir.string() << "\n";
    return 0;
}

int cmd_dotproduct(const RunConfig& cfg) {
    auto model = generate_cylinders(resolve_system(cfg), cfg.depth);
    if (model.system.dim != 2)
        throw config_error("dot-product experiment requires a planar model (d=2)");
    const auto levels = parse_levels(cfg.levels, {4, 12});
    const auto dir = make_run_dir(cfg, "dotproduct-" + model.system.label);
    write_json(dir / "config.json", config_json(cfg, "dotproduct", levels));

    // candidate pins: the requested one, or a seeded sample of support points
    std::vector<std::size_t> candidates;
    if (cfg.pin >= 0) {
        if (static_cast<std::size_t>(cfg.pin) >= model.points.size())
            throw config_error("--pin index " + std::to_string(cfg.pin) +
                               " is not a support point (cloud has " +
                               std::to_string(model.points.size()) + ")");
        candidates.push_back(static_cast<std::size_t>(cfg.pin));
    } else {
        Rng rng(cfg.seed);
        const auto want = std::min<std::size_t>(8, model.points.size());
        for (int draw = 0; draw < 1000 && candidates.size() < want; ++draw) {
            const auto idx = static_cast<std::size_t>(rng.next_below(model.points.size()));
            if (std::find(candidates.begin(), candidates.end(), idx) == candidates.end())
                candidates.push_back(idx);
        }
        for (std::size_t idx = 0; candidates.size() < want; ++idx)
            if (std::find(candidates.begin(), candidates.end(), idx) == candidates.end())
                candidates.push_back(idx);
    }

    const auto opts = pair_options(cfg);
    json per_pin = json::array();
    std::optional<std::size_t> best_idx;
    double best_slope = -1.0;
    std::vector<LevelCount> best_counts;
    bool best_lower = false;
    std::string last_error;
    for (const auto idx : candidates) {
        try {
            auto [counts, lower_bound] = sweep_counts(levels, [&](int lvl) {
                return dot_product_set(model.points, model.points[idx], lvl, opts);
            });
            const auto est = box_count(counts);
            per_pin.push_back({{"pin_index", idx}, {"slope", est.slope}});
            if (est.slope > best_slope) {
                best_slope = est.slope;
                best_idx = idx;
                best_counts = counts;
                best_lower = lower_bound;
            }
        } catch (const Error& e) {
            per_pin.push_back({{"error", e.what()}, {"pin_index", idx}});
            last_error = e.what();
        }
    }
    if (!best_idx)
        throw guard_error("no candidate pin produced a usable sweep; last error: " +
                          last_error);

    write_text_file((dir / "counts.csv").string(), counts_csv(best_counts));
    const auto est = box_count(best_counts);
    // chain over the best pin's net, or any admissible pin; tiny clouds
    // (a two-point set has a slope but no net) just skip the chain
    json summary;
    try {
        DirectionNet net;
        try {
            net = build_direction_net(model.points, model.points[*best_idx], cfg.m);
        } catch (const Error&) {
            net = pick_pin(model, -1, cfg.m, cfg.seed).second;
        }
        summary = run_chain_block(model, net, cfg, dir);
    } catch (const Error& e) {
        summary["chain_skipped"] = e.what();
    }
    summary["lower_bound_only"] = best_lower;
    summary["pin_index"] = *best_idx;
    summary["pins"] = per_pin;
    summary["residual"] = est.residual;
    summary["slope"] = est.slope;
    summary["window"] = {est.window[0], est.window[1]};
    write_json(dir / "summary.json", summary);
    std::cout << "best dot-product slope " << format_double(est.slope) << " at pin "
              << *best_idx << " of " << candidates.size() << " candidates -> " << dir.string()
              << "\n";
    return 0;
}

int cmd_sumproduct(const RunConfig& cfg) {
    auto model = generate_cylinders(resolve_system(cfg), cfg.depth);
    if (model.system.dim != 1)
        throw config_error("sum-product experiment requires a line model (d=1)");
    const auto levels = parse_levels(cfg.levels, {4, 12});
    const auto dir = make_run_dir(cfg, "sumproduct-" + model.system.label);
    write_json(dir / "config.json", config_json(cfg, "sumproduct", levels));
    if (model.points.size() < 3)
        throw config_error("sum-product experiment needs at least 3 points");

    std::vector<double> a;
    a.reserve(model.points.size());
    for (const auto& p : model.points) a.push_back(p[0]);
    const double a1 = a[1], a2 = a[2];

    const auto opts = pair_options(cfg);
    auto [counts, lower_bound] =
        sweep_counts(levels, [&](int lvl) { return sum_product_set(a, a1, a2, lvl, opts); });
    write_text_file((dir / "counts.csv").string(), counts_csv(counts));
    const auto est = box_count(counts);

    // cross-check: the quadruple sweep must match the dot-product sweep of
    // the product cloud with pin (a1, a2), bin for bin. Subsampled sweeps
    // draw different subsets on the two routes, so the check only applies
    // to exhaustive runs.
    bool identity = !lower_bound;
    if (!lower_bound) {
        std::vector<Vec2> product;
        product.reserve(a.size() * a.size());
        for (const auto x : a)
            for (const auto y : a) product.push_back({x, y});
        for (int lvl = levels[0]; lvl <= levels[1] && identity; ++lvl) {
            const auto direct = sum_product_set(a, a1, a2, lvl, opts);
            const auto paired = dot_product_set(product, {a1, a2}, lvl, opts);
            identity = direct.occupied() == paired.occupied();
        }
        if (!identity)
            throw assertion_error(
                "sum-product bins disagree with the product-cloud dot products");
    }

    json summary;
    summary["a1"] = a1;
    summary["a2"] = a2;
    summary["hypothesis_met"] = model.s >= 0.5;
    summary["identity_checked"] = !lower_bound;
    summary["identity_holds"] = identity;
    summary["lower_bound_only"] = lower_bound;
    summary["residual"] = est.residual;
    summary["slope"] = est.slope;
    summary["window"] = {est.window[0], est.window[1]};
    write_json(dir / "summary.json", summary);
    if (model.s < 0.5)
        std::cout << "warning: similarity dimension " << format_double(model.s)
                  << " is below 1/2; the sum-product hypothesis is unmet\n";
    std::cout << "sum-product slope " << format_double(est.slope) << ", identity holds -> "
              << dir.string() << "\n";
    return 0;
}

// ---- randomized self-checks ---------------------------------------------

struct VerifyFailure {
    std::string check;
    std::string detail;
    GridMeasure instance;
    json params;
};

PointMap verify_quadratic(Rng& rng) {
    std::array<double, 6> c{};
    for (auto& v : c) v = 4.0 * rng.next_double() - 2.0;
    return [c](const Vec2& y) {
        return c[0] + c[1] * y[0] + c[2] * y[1] + c[3] * y[0] * y[0] + c[4] * y[0] * y[1] +
               c[5] * y[1] * y[1];
    };
}

int cmd_verify(const RunConfig& cfg) {
    const auto dir = make_run_dir(cfg, "verify");
    write_json(dir / "config.json", config_json(cfg, "verify", {0, 0}));
    const bool skew = cfg.mutate == "entropy-level-skew";
    if (!cfg.mutate.empty() && !skew)
        throw config_error("unknown --mutate '" + cfg.mutate +
                           "' (known: entropy-level-skew)");

    std::optional<VerifyFailure> failure;
    auto fail = [&](const std::string& check, const std::string& detail,
                    const GridMeasure& mu, json params) {
        if (!failure) failure = {check, detail, mu, std::move(params)};
    };

    int executed = 0;
    for (int trial = 0; trial < cfg.trials && !failure; ++trial) {
        Rng rng(cfg.seed + 1000003ull * static_cast<std::uint64_t>(trial));
        const int dim = 1 + static_cast<int>(rng.next_below(2));
        const int level = 4 + static_cast<int>(rng.next_below(7));  // 4..10
        auto mu = random_measure(rng.next_u64(), dim, level,
                                 3 + static_cast<std::size_t>(rng.next_below(120)));
        ++executed;

        // conditional entropy must equal the entropy difference
        const int fine = 1 + static_cast<int>(rng.next_below(level));
        const int coarse = static_cast<int>(rng.next_below(fine));
        const double lhs = conditional_entropy(mu, fine, coarse);
        const double rhs =
            entropy(mu, skew ? std::max(fine - 1, coarse) : fine) - entropy(mu, coarse);
        if (std::abs(lhs - rhs) > 1e-9)
            fail("conditional-entropy-identity",
                 "conditional " + format_double(lhs) + " vs difference " + format_double(rhs),
                 mu, {{"fine", fine}, {"coarse", coarse}});

        // entropy is concave in the measure
        auto nu = random_measure(rng.next_u64(), dim, level,
                                 3 + static_cast<std::size_t>(rng.next_below(120)));
        const double w = rng.next_double();
        const double mixed = entropy(mix(mu, nu, w), level);
        const double parts = w * entropy(mu, level) + (1.0 - w) * entropy(nu, level);
        if (mixed < parts - 1e-9)
            fail("entropy-concavity",
                 "mix " + format_double(mixed) + " below parts " + format_double(parts), mu,
                 {{"w", w}, {"level", level}});

        // support beats the entropy-derived covering count
        try {
            (void)entropy_support_bound(mu, level);
        } catch (const Error& e) {
            fail("entropy-covering", e.what(), mu, {{"n", level}});
        }

        if (dim != 2) continue;

        // scale-block decomposition for a random smooth map
        {
            auto big = random_measure(rng.next_u64(), 2, 10,
                                      3 + static_cast<std::size_t>(rng.next_below(200)));
            auto f = verify_quadratic(rng);
            const int m = 1 + static_cast<int>(rng.next_below(3));
            const int n = m + 1 + static_cast<int>(rng.next_below(11 - m));
            const auto b = multiscale_bound(big, f, m, n);
            if (b.lhs < b.rhs - 1e-9)
                fail("multiscale-bound",
                     "image entropy " + format_double(b.lhs) + " below block average " +
                         format_double(b.rhs),
                     big, {{"m", m}, {"n", n}});
        }

        // projected blocks against blown-up projection entropy
        {
            const int m = 2 + static_cast<int>(rng.next_below(2));
            const int km = static_cast<int>(rng.next_below(3)) * m;
            if (km + m <= mu.level()) {
                const auto& probe =
                    mu.atoms()[static_cast<std::size_t>(rng.next_below(mu.atom_count()))];
                DyadicCube q;
                q.level = km;
                q.dim = 2;
                q.coords = {probe.c[0] >> (mu.level() - km), probe.c[1] >> (mu.level() - km)};
                const double angle = 6.283185307179586 * rng.next_double();
                const Vec2 e{std::cos(angle), std::sin(angle)};
                const auto range = projection_range(e);
                const auto part = pushforward(restrict_normalize(mu, q), projection(e),
                                              km + m, range);
                const double cond = conditional_entropy(part.measure, km + m, km);
                const auto blown =
                    pushforward(blow_up(mu, q), projection(e), m, range);
                const double raw = entropy(blown.measure, m);
                if (cond < raw - 3.0 - 1e-9)
                    fail("projected-block-shift",
                         "conditional " + format_double(cond) + " below " +
                             format_double(raw) + " - 3",
                         mu, {{"m", m}, {"km", km}});
            }
        }

        // pinned maps track their projections within the transfer constant
        {
            const auto& atoms = mu.atoms();
            const auto i = static_cast<std::size_t>(rng.next_below(atoms.size()));
            const auto j = static_cast<std::size_t>(rng.next_below(atoms.size()));
            const Vec2 pin = mu.atom_center(atoms[i]);
            const Vec2 wit = mu.atom_center(atoms[j]);
            const double d = std::hypot(wit[0] - pin[0], wit[1] - pin[1]);
            const int m = 2 + static_cast<int>(rng.next_below(3));
            if (d > 1e-9 && m <= mu.level()) {
                PinnedMap f;
                f.witness = wit;
                f.pin = pin;
                f.dist = d;
                f.e = {(wit[0] - pin[0]) / d, (wit[1] - pin[1]) / d};
                const double hi = std::max({f.eval({0.0, 0.0}), f.eval({1.0, 0.0}),
                                            f.eval({0.0, 1.0}), f.eval({1.0, 1.0})});
                const auto curved =
                    pushforward(mu, f.as_map(), m, ValueRange{f.eval(wit), hi});
                const Vec2 neg{-f.e[0], -f.e[1]};
                const auto straight =
                    pushforward(mu, projection(neg), m, projection_range(neg));
                const double gap = std::abs(conditional_entropy(curved.measure, m, 0) -
                                            conditional_entropy(straight.measure, m, 0));
                if (gap > 8.0)
                    fail("pinned-transfer",
                         "entropy gap " + format_double(gap) + " exceeds 8 bits", mu,
                         {{"m", m}});
            }
        }
    }

    json summary;
    summary["checks"] = {"conditional-entropy-identity", "entropy-concavity",
                         "entropy-covering", "multiscale-bound", "projected-block-shift",
                         "pinned-transfer"};
    summary["mutate"] = cfg.mutate;
    summary["trials"] = cfg.trials;
    summary["trials_executed"] = executed;

    if (failure) {
        summary["failed_check"] = failure->check;
        summary["detail"] = failure->detail;
        write_json(dir / "summary.json", summary);
        save_measure((dir / "instance.gridmeasure").string(), failure->instance);
        write_json(dir / "instance.json",
                   json{{"check", failure->check},
                        {"detail", failure->detail},
                        {"params", failure->params}});
        std::cerr << "verify: " << failure->check << " failed: " << failure->detail
                  << "\n  instance written to " << (dir / "instance.gridmeasure").string()
                  << "\n";
        return 3;
    }

    summary["passed"] = true;
    if (cfg.trials == 0) {
        summary["warning"] = "0 trials requested; pass is vacuous";
        std::cout << "warning: 0 trials requested, vacuous pass\n";
    }
    write_json(dir / "summary.json", summary);
    std::cout << "verify: all checks passed over " << executed << " trials -> " << dir.string()
              << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"dyadic entropy lab: distance, dot-product and sum-product experiments"};
    app.require_subcommand(1);

    RunConfig cfg;
    auto* generate = app.add_subcommand("generate", "emit a cylinder model and its cloud");
    auto* distance = app.add_subcommand("distance", "distance-set sweep with chain report");
    auto* dotproduct =
        app.add_subcommand("dotproduct", "dot-product sweep over candidate pins");
    auto* sumproduct =
        app.add_subcommand("sumproduct", "sum-product sweep with the product-cloud identity");
    auto* verify = app.add_subcommand("verify", "randomized self-checks of the core bounds");
    for (auto* cmd : {generate, distance, dotproduct, sumproduct, verify})
        add_common_flags(cmd, cfg);
    verify->add_option("--trials", cfg.trials, "random instances per check");
    verify->add_option("--mutate", cfg.mutate,
                       "inject a named fault to demonstrate failure reporting");

    try {
        app.parse(argc, argv);
        if (generate->parsed()) return cmd_generate(cfg);
        if (distance->parsed()) return cmd_distance(cfg);
        if (dotproduct->parsed()) return cmd_dotproduct(cfg);
        if (sumproduct->parsed()) return cmd_sumproduct(cfg);
        if (verify->parsed()) return cmd_verify(cfg);
        return 1;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;  // config problems exit 1, help exits 0
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
