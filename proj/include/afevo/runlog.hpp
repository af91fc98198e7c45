#pragma once

/// @file runlog.hpp
/// @brief JSON-lines run log.
///
/// Line 1 is `{"manifest": {...}}`. Then one record per generation:
///
///     {"generation", "best_genome", "best_fitness", "mean_fitness",
///      "median_fitness", "population": [{"genome", "fitness", "valid"}]}
///
/// The last generation record also carries "total_evaluations" and
/// "cache_hits".

#include <algorithm>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "engine.hpp"

namespace afevo {

struct GenerationStats {
    double best = 0.0;
    double mean = 0.0;
    double median = 0.0;
};

inline GenerationStats generation_stats(const Population& pop) {
    GenerationStats s;
    if (pop.members.empty()) return s;
    std::vector<double> f;
    f.reserve(pop.members.size());
    for (const auto& m : pop.members) f.push_back(m.fitness);
    s.best = *std::max_element(f.begin(), f.end());
    double sum = 0.0;
    for (double v : f) sum += v;
    s.mean = sum / static_cast<double>(f.size());
    std::sort(f.begin(), f.end());
    const std::size_t n = f.size();
    s.median = n % 2 ? f[n / 2] : 0.5 * (f[n / 2 - 1] + f[n / 2]);
    return s;
}

inline nlohmann::ordered_json generation_record(const Population& pop) {
    const GenerationStats s = generation_stats(pop);
    nlohmann::ordered_json rec;
    rec["generation"] = pop.generation;
    rec["best_genome"] = pop.members.empty() ? std::string() : pop.best().key;
    rec["best_fitness"] = s.best;
    rec["mean_fitness"] = s.mean;
    rec["median_fitness"] = s.median;
    auto members = nlohmann::ordered_json::array();
    for (const auto& m : pop.members) {
        nlohmann::ordered_json e;
        e["genome"] = m.key;
        e["fitness"] = m.fitness;
        e["valid"] = m.report.valid;
        members.push_back(std::move(e));
    }
    rec["population"] = std::move(members);
    return rec;
}

inline void write_runlog(std::ostream& out, const nlohmann::ordered_json& manifest, const RunLog& log) {
    nlohmann::ordered_json head;
    head["manifest"] = manifest;
    out << head.dump() << '\n';
    for (std::size_t i = 0; i < log.snapshots.size(); ++i) {
        auto rec = generation_record(log.snapshots[i]);
        if (i + 1 == log.snapshots.size()) {
            rec["total_evaluations"] = log.total_evaluations;
            rec["cache_hits"] = log.cache_hits;
        }
        out << rec.dump() << '\n';
    }
}

} // namespace afevo
