#pragma once

/// @file cli.hpp
/// @brief The `afevo` command line: evolve, eval-af, parse, train.
///
/// Exit codes: 0 ok, 2 usage/config/syntax error, 3 dataset error. An
/// invalid genome in `train` is a result (valid=false), not a failure.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "engine.hpp"
#include "genome.hpp"
#include "manifest.hpp"
#include "runlog.hpp"
#include "trainer.hpp"

namespace afevo::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;

namespace detail {

inline std::string shortest(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

// flags that map 1:1 onto config keys
inline const std::vector<std::string> kNumericKeys = {
    "seed", "pop", "gens", "elite", "p-hybrid", "p-mutate", "p-select-coin", "max-depth",
    "n-samples", "noise", "data-seed", "epochs", "lr", "batch", "init-seed", "workers",
};

struct SettingFlags {
    std::string config_path;
    std::map<std::string, std::string> values;
    std::string dataset;
    std::string hidden;
    std::vector<std::string> init_genomes;

    void attach(CLI::App& cmd, bool with_ga) {
        cmd.add_option("--config", config_path, "JSON config file with flat keys (flags override it)");
        for (const auto& key : kNumericKeys) {
            const bool ga_only = key == "pop" || key == "gens" || key == "elite" || key == "p-hybrid" ||
                                 key == "p-mutate" || key == "p-select-coin" || key == "max-depth" || key == "workers";
            if (ga_only && !with_ga) continue;
            cmd.add_option("--" + key, values[key])->type_name("NUM")->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        }
        cmd.add_option("--dataset", dataset, "two-moons | circles | spirals | csv:PATH");
        cmd.add_option("--hidden", hidden, "hidden layer widths, e.g. 16,16");
        if (with_ga) cmd.add_option("--init-genome", init_genomes, "genome placed in the initial population");
    }

    /// Throws ConfigError.
    RunSettings resolve() const {
        RunSettings s = config_path.empty() ? RunSettings{} : load_config_file(config_path);
        nlohmann::json overrides = nlohmann::json::object();
        for (const auto& [key, text] : values) {
            if (text.empty()) continue;
            nlohmann::json v = nlohmann::json::parse(text, nullptr, false);
            if (v.is_discarded() || !v.is_number()) throw ConfigError("--" + key + " expects a number, got '" + text + "'");
            overrides[key] = v;
        }
        if (!dataset.empty()) overrides["dataset"] = dataset;
        if (!hidden.empty()) overrides["hidden"] = hidden;
        if (!init_genomes.empty()) overrides["initial-genomes"] = init_genomes;
        apply_config(s, overrides);
        validate(s);
        return s;
    }
};

// write via a temporary so a failure never leaves a partial file
inline void write_file(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

inline nlohmann::ordered_json report_json(const FitnessReport& r) {
    nlohmann::ordered_json j;
    j["train_accuracy"] = r.train_accuracy;
    j["test_accuracy"] = r.test_accuracy;
    j["final_loss"] = r.final_loss;
    j["valid"] = r.valid;
    j["failure_reason"] = r.failure_reason ? nlohmann::ordered_json(*r.failure_reason) : nlohmann::ordered_json();
    return j;
}

} // namespace detail

/// Run an evolution experiment and write runlog.jsonl, best.genome and
/// manifest.json into `out_dir`.
inline int cmd_evolve(const RunSettings& s, const std::string& out_dir, std::ostream& out, std::ostream& err) {
    Dataset data;
    try {
        data = load_dataset(s.dataset, s.ga.seed);
    } catch (const DataError& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    const auto manifest = manifest_json(s);
    const RunLog log = run(s.ga, GenomeTrainer(data, s.mlp, s.ga.seed), s.workers);

    std::ostringstream runlog;
    write_runlog(runlog, manifest, log);
    const Population& last = log.snapshots.back();
    try {
        const std::filesystem::path dir(out_dir);
        std::filesystem::create_directories(dir);
        detail::write_file(dir / "runlog.jsonl", runlog.str());
        detail::write_file(dir / "best.genome", last.best().key + "\n");
        detail::write_file(dir / "manifest.json", manifest.dump(2) + "\n");
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    out << "gen  best_fitness  mean_fitness  best_genome\n";
    for (const Population& p : log.snapshots) {
        const auto st = generation_stats(p);
        out << std::setw(3) << p.generation << "  " << std::fixed << std::setprecision(4) << std::setw(12) << st.best
            << "  " << std::setw(12) << st.mean << "  " << p.best().key << '\n';
    }
    out.unsetf(std::ios::floatfield);
    out << "evaluations: " << log.total_evaluations << ", cache hits: " << log.cache_hits << '\n';
    return kExitOk;
}

/// CSV `x,value,derivative` over the inclusive grid xmin, xmin+step, ...
inline int cmd_eval_af(const std::string& genome_text, double xmin, double xmax, double step, std::ostream& out,
                       std::ostream& err) {
    if (!(xmin < xmax) || !(step > 0.0) || !std::isfinite(xmin) || !std::isfinite(xmax) || !std::isfinite(step)) {
        err << "error: need finite xmin < xmax and step > 0\n";
        return kExitUsage;
    }
    Genome g = [&]() -> Genome {
        try {
            return parse_genome(genome_text);
        } catch (const SyntaxError& e) {
            err << "error: " << e.what() << '\n';
            throw;
        }
    }();
    const auto count = static_cast<std::size_t>(std::floor((xmax - xmin) / step + 1e-9)) + 1;
    out << "x,value,derivative\n";
    for (std::size_t i = 0; i < count; ++i) {
        const double x = xmin + static_cast<double>(i) * step;
        const DualValue d = genome_value_dual(g, x);
        out << detail::shortest(x) << ',' << detail::shortest(d.value) << ',' << detail::shortest(d.deriv) << '\n';
    }
    return kExitOk;
}

/// Canonical form and size statistics of a genome (`l|r`) or a single expression.
inline int cmd_parse(const std::string& text, std::ostream& out, std::ostream& err) {
    try {
        if (text.find('|') != std::string::npos) {
            const Genome g = parse_genome(text);
            const std::string canon = serialize(g);
            out << "canonical: " << canon << '\n';
            out << "nodes: " << g.node_count() << " (left " << g.left.node_count() << ", right "
                << g.right.node_count() << ")\n";
            out << "depth: " << g.depth() << " (left " << g.left.depth() << ", right " << g.right.depth() << ")\n";
            return parse_genome(canon) == g ? kExitOk : kExitUsage;
        }
        const Expr e = parse(text);
        const std::string canon = serialize(e);
        out << "canonical: " << canon << '\n';
        out << "nodes: " << e.node_count() << '\n';
        out << "depth: " << e.depth() << '\n';
        return parse(canon) == e ? kExitOk : kExitUsage;
    } catch (const SyntaxError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
}

/// Train one genome and print its FitnessReport (with manifest) as JSON.
inline int cmd_train(const std::string& genome_text, const RunSettings& s, std::ostream& out, std::ostream& err) {
    Genome g = Genome::whole(Expr::leaf(Primitive::Linear));
    try {
        g = parse_genome(genome_text);
    } catch (const SyntaxError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    Dataset data;
    try {
        data = load_dataset(s.dataset, s.ga.seed);
    } catch (const DataError& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    const std::string key = serialize(g);
    const FitnessReport r = GenomeTrainer(data, s.mlp, s.ga.seed)(g, key);
    auto manifest = manifest_json(s);
    manifest.erase("ga");
    nlohmann::ordered_json j;
    j["manifest"] = manifest;
    j["genome"] = key;
    j["report"] = detail::report_json(r);
    out << j.dump(2) << '\n';
    return kExitOk;
}

/// Parse argv-style arguments (without the program name) and dispatch.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Evolve piecewise activation functions with a genetic algorithm", "afevo"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    auto* evolve = app.add_subcommand("evolve", "run the genetic algorithm");
    detail::SettingFlags evolve_flags;
    evolve_flags.attach(*evolve, true);
    std::string out_dir = ".";
    evolve->add_option("--out", out_dir, "output directory");

    auto* eval_af = app.add_subcommand("eval-af", "tabulate a genome's value and derivative as CSV");
    std::string af_text;
    double xmin = -6.0, xmax = 6.0, step = 0.1;
    eval_af->add_option("genome", af_text, "genome, e.g. 'ELiSH|ELiSH'")->required();
    eval_af->add_option("--xmin", xmin);
    eval_af->add_option("--xmax", xmax);
    eval_af->add_option("--step", step);

    auto* parse_cmd = app.add_subcommand("parse", "check and canonicalise a genome or expression");
    std::string parse_text;
    parse_cmd->add_option("text", parse_text, "genome 'l|r' or expression")->required();

    auto* train = app.add_subcommand("train", "train one genome and print its fitness report");
    std::string train_text;
    train->add_option("genome", train_text, "genome, e.g. 'ReLU|ReLU'")->required();
    detail::SettingFlags train_flags;
    train_flags.attach(*train, false);

    std::vector<std::string> argv(args.rbegin(), args.rend());
    try {
        app.parse(argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << kToolVersion << '\n';
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        if (!app.get_subcommands().empty()) err << app.get_subcommands().front()->help();
        return kExitUsage;
    }

    try {
        if (evolve->parsed()) return cmd_evolve(evolve_flags.resolve(), out_dir, out, err);
        if (eval_af->parsed()) return cmd_eval_af(af_text, xmin, xmax, step, out, err);
        if (parse_cmd->parsed()) return cmd_parse(parse_text, out, err);
        if (train->parsed()) return cmd_train(train_text, train_flags.resolve(), out, err);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const SyntaxError&) {
        return kExitUsage;
    }
    return kExitUsage;
}

} // namespace afevo::cli
