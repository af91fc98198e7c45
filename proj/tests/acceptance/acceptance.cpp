// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails. AC8 and AC10 drive the built `afevo` binary.

#include <afevo/dataset.hpp>
#include <afevo/engine.hpp>
#include <afevo/expr.hpp>
#include <afevo/genome.hpp>
#include <afevo/primitives.hpp>
#include <afevo/trainer.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "support/gradcheck.hpp"
#include "support/oracles.hpp"

#ifndef AFEVO_CLI_PATH
#error "AFEVO_CLI_PATH must point at the afevo executable"
#endif

namespace fs = std::filesystem;
using namespace afevo;

namespace {

struct Verdict {
    bool pass;
    std::string detail;
};

int failures = 0;

void report(const char* id, const char* title, double limit_s, const std::function<Verdict()>& check) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v{false, ""};
    try {
        v = check();
    } catch (const std::exception& e) {
        v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (limit_s > 0 && secs >= limit_s) {
        v.pass = false;
        v.detail += " (over the " + std::to_string(static_cast<int>(limit_s)) + " s limit)";
    }
    if (!v.pass) ++failures;
    std::printf("[%s] %s %s: %s [%.2f s]\n", v.pass ? "PASS" : "FAIL", id, title, v.detail.c_str(), secs);
    std::fflush(stdout);
}

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(6);
    s << v;
    return s.str();
}

bool near_kink(double x) {
    for (double k : {-1.0, 0.0, 1.0}) {
        if (std::fabs(x - k) < 1e-3) return true;
    }
    return false;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<nlohmann::json> runlog_records(const fs::path& p) {
    std::vector<nlohmann::json> out;
    std::istringstream in(slurp(p));
    for (std::string line; std::getline(in, line);) out.push_back(nlohmann::json::parse(line));
    return out;
}

int run_cli(const std::string& args, const fs::path& log) {
    const std::string cmd = std::string("\"") + AFEVO_CLI_PATH + "\" " + args + " > \"" + log.string() + "\" 2>&1";
    return std::system(cmd.c_str());
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("afevo_acceptance_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// ---------------------------------------------------------------------------

Verdict ac1() {
    std::size_t points = 0;
    double worst = 0.0;
    for (Primitive p : kAllPrimitives) {
        for (int i = 0; i < 500; ++i) {
            const double x = -6.0 + 12.0 * (i + 0.5) / 500.0;
            if (near_kink(x)) continue;
            const double d = derivative(p, x);
            const double fd = testing::central_diff([p](double t) { return value(p, t); }, x, 1e-5);
            worst = std::max(worst, std::fabs(d - fd) / (1.0 + std::fabs(d)));
            ++points;
        }
    }
    const bool spots = std::fabs(value(Primitive::Sigmoid, 0.0) - 0.5) <= 1e-12 &&
                       std::fabs(value(Primitive::Softplus, 0.0) - std::log(2.0)) <= 1e-12 &&
                       std::fabs(value(Primitive::SeLU, 1.0) - 1.0507009873554805) <= 1e-12;
    return {worst <= 1e-6 && spots,
            std::to_string(points) + " points, worst rel err " + fmt(worst) + (spots ? ", spot values ok" : ", spot values off")};
}

Verdict ac2() {
    double worst = 0.0;
    for (int i = 0; i <= 20000; ++i) {
        const double x = 20.0 * i / 20000.0;
        worst = std::max(worst, std::fabs(value(Primitive::ELiSH, x) - value(Primitive::Swish, x)));
    }
    return {worst == 0.0, "max |ELiSH - Swish| on [0, 20] = " + fmt(worst)};
}

Verdict ac3() {
    RngStream rng(303);
    int bad = 0;
    for (int i = 0; i < 100; ++i) {
        const double lo = -1.0 - 50.0 * rng.uniform01();
        const double hi = 1.0 + 50.0 * rng.uniform01();
        if (value(Primitive::HardELiSH, lo) != 0.0) ++bad;
        if (value(Primitive::HardELiSH, hi) != hi) ++bad;
    }
    if (value(Primitive::HardELiSH, -1.0) != 0.0 || value(Primitive::HardELiSH, 1.0) != 1.0) ++bad;
    return {bad == 0, std::to_string(bad) + " mismatches over 202 points"};
}

Verdict ac4() {
    RngStream rng(404);
    int bad = 0;
    for (int i = 0; i < 10000; ++i) {
        const Expr e = testing::random_expr(rng, 8);
        if (e.depth() > 8 || !(parse(serialize(e)) == e)) ++bad;
    }
    const std::string example = "(max:(+:(min:ELU:ReLU):Swish):(*:ELU:Linear))";
    const Expr ex = parse(example);
    const bool example_ok = ex.node_count() == 9 && ex.depth() == 4 && serialize(ex) == example;
    return {bad == 0 && example_ok, std::to_string(bad) + " of 10000 round-trips failed; example tree " +
                                        std::to_string(ex.node_count()) + " nodes, depth " + std::to_string(ex.depth())};
}

Verdict ac5() {
    RngStream rng(505);
    double worst = 0.0;
    int short_of_points = 0;
    for (int i = 0; i < 1000; ++i) {
        const Expr e = testing::random_expr(rng, 6, false);
        const auto f = [&e](double t) { return testing::naive_eval(e, t); };
        int safe = 0;
        for (int tries = 0; safe < 20 && tries < 2000; ++tries) {
            const double x = -4.0 + 8.0 * rng.uniform01();
            const DualValue d = eval_dual(e, x);
            if (!d.finite() || std::fabs(d.value) > 1e6) continue;
            // a stencil straddling a kink gives step-size-dependent answers
            const double fd = testing::five_point_diff(f, x, 1e-3);
            const double fd_half = testing::five_point_diff(f, x, 5e-4);
            if (!std::isfinite(fd) || std::fabs(fd - fd_half) > 1e-7 * (1.0 + std::fabs(fd))) continue;
            worst = std::max(worst, std::fabs(d.deriv - fd) / (1.0 + std::fabs(d.deriv)));
            ++safe;
        }
        if (safe < 20) ++short_of_points;
    }
    return {worst <= 1e-5 && short_of_points == 0,
            "worst rel err " + fmt(worst) + ", expressions without 20 safe points: " + std::to_string(short_of_points)};
}

Verdict ac6() {
    RngStream rng(606);
    int bad = 0;
    for (int i = 0; i < 1000; ++i) {
        const Genome mom = testing::random_genome(rng, 5);
        const Genome dad = testing::random_genome(rng, 5);
        const auto [a, b] = inheritance(mom, dad);
        auto before = testing::gene_strings({&mom, &dad});
        auto after = testing::gene_strings({&a, &b});
        std::sort(before.begin(), before.end());
        std::sort(after.begin(), after.end());
        if (before != after) ++bad;
    }
    for (int i = 0; i < 1000; ++i) {
        const Genome mom = testing::random_genome(rng, 4);
        const Genome dad = testing::random_genome(rng, 4);
        const auto [a, b] = hybrid(mom, dad, rng, 8);
        const bool ok = !a.left.is_leaf() && !a.right.is_leaf() && a.left.op() == b.left.op() &&
                        a.right.op() == b.right.op() && a.left.left() == mom.left && a.left.right() == dad.left &&
                        b.left.left() == dad.left && b.left.right() == mom.left && a.right.left() == mom.right &&
                        a.right.right() == dad.right && b.right.left() == dad.right && b.right.right() == mom.right;
        if (!ok) ++bad;
    }
    for (int i = 0; i < 1000; ++i) {
        const Genome src = testing::random_genome(rng, 5);
        const Genome out = mutate(src, rng, 1.0);
        const bool left_same = out.left == src.left;
        const bool right_same = out.right == src.right;
        // one gene kept, the other now a single primitive
        const bool ok = (left_same && out.right.is_leaf()) || (right_same && out.left.is_leaf());
        if (!ok) ++bad;
    }
    return {bad == 0, std::to_string(bad) + " violations in 3000 operator applications"};
}

Verdict ac7() {
    double worst = 0.0;
    std::size_t params = 0;
    for (const auto& text : testing::kGradcheckGenomes) {
        const auto r = testing::gradient_check(text);
        worst = std::isnan(r.worst) ? r.worst : std::max(worst, r.worst);
        params += r.parameters;
    }
    return {worst <= 1e-4, std::to_string(testing::kGradcheckGenomes.size()) + " genomes, " + std::to_string(params) +
                               " parameters, worst rel err " + fmt(worst)};
}

fs::path ac8_dir;

Verdict ac8() {
    ac8_dir = scratch("ac8");
    const std::string base = "evolve --dataset two-moons --pop 16 --gens 6 --seed 1";
    const int rc1 = run_cli(base + " --workers 1 --out \"" + (ac8_dir / "w1").string() + "\"", ac8_dir / "w1.txt");
    const int rc4 = run_cli(base + " --workers 4 --out \"" + (ac8_dir / "w4").string() + "\"", ac8_dir / "w4.txt");
    if (rc1 != 0 || rc4 != 0) return {false, "evolve exited with " + std::to_string(rc1) + "/" + std::to_string(rc4)};
    const std::string log1 = slurp(ac8_dir / "w1" / "runlog.jsonl");
    const bool identical = !log1.empty() && log1 == slurp(ac8_dir / "w4" / "runlog.jsonl");
    const auto recs = runlog_records(ac8_dir / "w1" / "runlog.jsonl");
    bool monotone = recs.size() == 8;
    std::string trace;
    for (std::size_t i = 1; i < recs.size(); ++i) {
        const double best = recs[i]["best_fitness"];
        trace += (i > 1 ? " " : "") + fmt(best);
        if (i > 1 && best < recs[i - 1]["best_fitness"].get<double>()) monotone = false;
    }
    return {identical && monotone, std::string(identical ? "runlogs byte-identical" : "runlogs differ") +
                                       ", best per generation: " + trace};
}

Verdict ac9() {
    const Dataset data = make_synthetic(SyntheticKind::TwoMoons, 400, 0.2, 7);
    // the CLI's defaults: run seed 1 feeds the shuffle seed
    const FitnessReport r = GenomeTrainer(data, MlpConfig{}, 1)(parse_genome("ReLU|ReLU"), "ReLU|ReLU");
    constexpr double kPinned = 0.9625;
    const bool baseline = r.valid && r.test_accuracy >= 0.95 && r.test_accuracy == kPinned;

    const auto recs = runlog_records(ac8_dir / "w1" / "runlog.jsonl");
    if (recs.size() != 8) return {false, "AC8 run log missing"};
    const double initial = recs[1]["best_fitness"];
    const double evolved = recs.back()["best_fitness"];
    return {baseline && evolved >= initial, "ReLU|ReLU test accuracy " + fmt(r.test_accuracy) + " (pinned " +
                                                fmt(kPinned) + "); best gen 0 " + fmt(initial) + " -> gen 6 " +
                                                fmt(evolved)};
}

Verdict ac10() {
    const fs::path dir = scratch("ac10");
    const std::string genome = "(/:Linear:HardSigmoid)|Linear";
    const int rc = run_cli("evolve --dataset two-moons --pop 16 --gens 6 --seed 1 --workers 4 --init-genome \"" + genome +
                               "\" --out \"" + (dir / "run").string() + "\"",
                           dir / "out.txt");
    if (rc != 0) return {false, "evolve exited with " + std::to_string(rc) + ": " + slurp(dir / "out.txt")};
    const auto recs = runlog_records(dir / "run" / "runlog.jsonl");
    if (recs.size() != 8) return {false, "run log has " + std::to_string(recs.size()) + " lines"};
    bool seen = false, scored_ok = true;
    for (const auto& rec : recs) {
        if (!rec.contains("population")) continue;
        for (const auto& m : rec["population"]) {
            if (m["genome"] != genome) continue;
            seen = true;
            if (m["fitness"].get<double>() != 0.0 || m["valid"].get<bool>()) scored_ok = false;
        }
    }
    fs::remove_all(dir);
    return {seen && scored_ok, std::string(seen ? "seeded member present" : "seeded member missing") +
                                   (scored_ok ? ", fitness 0 and valid=false" : ", scored wrongly") +
                                   ", 7 generation records written"};
}

} // namespace

int main() {
    report("AC1", "primitive values and derivatives", 1, ac1);
    report("AC2", "ELiSH equals Swish on [0, 20]", 1, ac2);
    report("AC3", "HardELiSH saturation", 0, ac3);
    report("AC4", "grammar round-trip", 5, ac4);
    report("AC5", "dual-number derivatives", 10, ac5);
    report("AC6", "genetic operators", 5, ac6);
    report("AC7", "backprop gradient check", 10, ac7);
    report("AC8", "elitism and worker-count determinism", 300, ac8);
    report("AC9", "desk-scale sanity", 600, ac9);
    report("AC10", "invalid genome robustness", 0, ac10);
    if (!ac8_dir.empty()) fs::remove_all(ac8_dir);
    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
