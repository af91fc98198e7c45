#pragma once

/// @file manifest.hpp
/// @brief Run settings: flat JSON config keys, validation, and the manifest
///        embedded in every output.
///
/// Config keys match the CLI flag names (`pop`, `p-hybrid`, `hidden`, ...).
/// `workers` is accepted but never written to a manifest: it cannot change
/// results.

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dataset.hpp"
#include "engine.hpp"
#include "trainer.hpp"

namespace afevo {

inline constexpr const char* kToolName = "afevo";
inline constexpr const char* kToolVersion = "1.0.0";

/// Bad configuration value or key.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Dataset could not be produced (unreadable file, malformed CSV).
class DataError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct DatasetSpec {
    std::string source = "two-moons"; // two-moons | circles | spirals | csv:PATH
    std::size_t samples = 400;
    double noise = 0.2;
    std::uint64_t seed = 7;
};

struct RunSettings {
    GaConfig ga;
    MlpConfig mlp;
    DatasetSpec dataset;
    std::size_t workers = 1;
};

/// Build the dataset. CSV splits use the run seed. Throws DataError or
/// ConfigError (unknown source).
inline Dataset load_dataset(const DatasetSpec& spec, std::uint64_t run_seed) {
    if (spec.source.starts_with("csv:")) {
        try {
            return load_csv(spec.source.substr(4), run_seed);
        } catch (const FormatError& e) {
            throw DataError(spec.source.substr(4) + ": " + e.what());
        }
    }
    const auto kind = synthetic_kind_from_name(spec.source);
    if (!kind) throw ConfigError("unknown dataset '" + spec.source + "'");
    if (spec.samples < 8) throw ConfigError("n-samples must be >= 8");
    if (!(spec.noise >= 0.0)) throw ConfigError("noise must be >= 0");
    return make_synthetic(*kind, spec.samples, spec.noise, spec.seed);
}

namespace detail {

inline std::vector<std::size_t> parse_widths(const std::string& text) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        std::size_t used = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(part, &used);
        } catch (const std::exception&) {
            throw ConfigError("bad hidden layer width '" + part + "'");
        }
        if (used != part.size() || part.empty() || part[0] == '-') throw ConfigError("bad hidden layer width '" + part + "'");
        out.push_back(static_cast<std::size_t>(v));
    }
    if (out.empty()) throw ConfigError("hidden needs at least one width");
    return out;
}

inline std::string join_widths(const std::vector<std::size_t>& w) {
    std::string s;
    for (std::size_t i = 0; i < w.size(); ++i) s += (i ? "," : "") + std::to_string(w[i]);
    return s;
}

template <class T>
T get_as(const nlohmann::json& v, const std::string& key) {
    try {
        if constexpr (std::is_unsigned_v<T>) {
            if (v.is_number_integer() && v.get<long long>() < 0) throw ConfigError(key + " must be non-negative");
            if (!v.is_number_integer()) throw ConfigError(key + " must be an integer");
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!v.is_number()) throw ConfigError(key + " must be a number");
        }
        return v.get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(key + ": " + e.what());
    }
}

} // namespace detail

/// Apply flat config keys onto `s`. Unknown keys are an error.
inline void apply_config(RunSettings& s, const nlohmann::json& cfg) {
    using detail::get_as;
    if (!cfg.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, v] : cfg.items()) {
        if (key == "seed") s.ga.seed = get_as<std::uint64_t>(v, key);
        else if (key == "pop") s.ga.population_size = get_as<std::size_t>(v, key);
        else if (key == "gens") s.ga.generations = get_as<std::size_t>(v, key);
        else if (key == "elite") s.ga.elite_fraction = get_as<double>(v, key);
        else if (key == "p-hybrid") s.ga.p_hybrid = get_as<double>(v, key);
        else if (key == "p-mutate") s.ga.p_mutate = get_as<double>(v, key);
        else if (key == "p-select-coin") s.ga.p_select_coin = get_as<double>(v, key);
        else if (key == "max-depth") s.ga.max_depth = get_as<std::size_t>(v, key);
        else if (key == "initial-genomes") {
            if (!v.is_array()) throw ConfigError("initial-genomes must be an array of genome strings");
            s.ga.initial_genomes.clear();
            for (const auto& item : v) {
                if (!item.is_string()) throw ConfigError("initial-genomes must be an array of genome strings");
                try {
                    s.ga.initial_genomes.push_back(parse_genome(item.get<std::string>()));
                } catch (const SyntaxError& e) {
                    throw ConfigError("initial genome '" + item.get<std::string>() + "': " + e.what());
                }
            }
        }
        else if (key == "dataset") {
            if (!v.is_string()) throw ConfigError("dataset must be a string");
            s.dataset.source = v.get<std::string>();
        }
        else if (key == "n-samples") s.dataset.samples = get_as<std::size_t>(v, key);
        else if (key == "noise") s.dataset.noise = get_as<double>(v, key);
        else if (key == "data-seed") s.dataset.seed = get_as<std::uint64_t>(v, key);
        else if (key == "epochs") s.mlp.epochs = get_as<std::size_t>(v, key);
        else if (key == "lr") s.mlp.learning_rate = get_as<double>(v, key);
        else if (key == "batch") s.mlp.batch_size = get_as<std::size_t>(v, key);
        else if (key == "init-seed") s.mlp.init_seed = get_as<std::uint64_t>(v, key);
        else if (key == "hidden") {
            if (v.is_string()) s.mlp.hidden_layers = detail::parse_widths(v.get<std::string>());
            else if (v.is_array()) {
                s.mlp.hidden_layers.clear();
                for (const auto& w : v) s.mlp.hidden_layers.push_back(get_as<std::size_t>(w, key));
            } else throw ConfigError("hidden must be \"a,b,...\" or an array");
        }
        else if (key == "workers") s.workers = get_as<std::size_t>(v, key);
        else throw ConfigError("unknown config key '" + key + "'");
    }
}

/// Throws ConfigError.
inline void validate(const RunSettings& s) {
    try {
        s.ga.validate();
        s.mlp.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (s.workers < 1) throw ConfigError("workers must be >= 1");
}

inline RunSettings load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config '" + path + "'");
    RunSettings s;
    try {
        apply_config(s, nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return s;
}

/// Everything that determines a run's output.
inline nlohmann::ordered_json manifest_json(const RunSettings& s) {
    nlohmann::ordered_json m;
    m["tool"] = kToolName;
    m["version"] = kToolVersion;
    m["seed"] = s.ga.seed;
    nlohmann::ordered_json ga;
    ga["pop"] = s.ga.population_size;
    ga["gens"] = s.ga.generations;
    ga["elite"] = s.ga.elite_fraction;
    ga["p-hybrid"] = s.ga.p_hybrid;
    ga["p-mutate"] = s.ga.p_mutate;
    ga["p-select-coin"] = s.ga.p_select_coin;
    ga["max-depth"] = s.ga.max_depth;
    auto init = nlohmann::ordered_json::array();
    for (const Genome& g : s.ga.initial_genomes) init.push_back(serialize(g));
    ga["initial-genomes"] = init;
    m["ga"] = ga;
    nlohmann::ordered_json mlp;
    mlp["hidden"] = detail::join_widths(s.mlp.hidden_layers);
    mlp["epochs"] = s.mlp.epochs;
    mlp["lr"] = s.mlp.learning_rate;
    mlp["batch"] = s.mlp.batch_size;
    mlp["init-seed"] = s.mlp.init_seed;
    m["mlp"] = mlp;
    nlohmann::ordered_json data;
    data["dataset"] = s.dataset.source;
    data["n-samples"] = s.dataset.samples;
    data["noise"] = s.dataset.noise;
    data["data-seed"] = s.dataset.seed;
    m["dataset"] = data;
    return m;
}

/// Flatten a manifest back into config keys, so a manifest can be replayed.
inline nlohmann::json config_from_manifest(const nlohmann::json& m) {
    nlohmann::json cfg;
    cfg["seed"] = m.at("seed");
    for (const char* section : {"ga", "mlp", "dataset"}) {
        for (const auto& [k, v] : m.at(section).items()) cfg[k] = v;
    }
    return cfg;
}

} // namespace afevo
