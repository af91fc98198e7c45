#pragma once

/// @file engine.hpp
/// @brief Generational GA over piecewise activation functions.
///
/// One generation: rank the population, keep the top elite fraction, add a
/// mutated copy of each remaining member on a coin toss, breed children from
/// random parent pairs (crossover then mutation) until the population is
/// full again, evaluate, rank.
///
/// All random draws happen on one RngStream in a fixed order. Fitness
/// evaluations may run on several threads; results are merged in a
/// pre-assigned order, so the outcome does not depend on the worker count.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "genome.hpp"
#include "rng.hpp"
#include "trainer.hpp"

namespace afevo {

struct GaConfig {
    std::size_t population_size = 40;
    std::size_t generations = 8;
    double elite_fraction = 0.15;
    double p_hybrid = 0.5;
    double p_select_coin = 0.5;
    double p_mutate = 1.0;
    std::size_t max_depth = 8;
    std::uint64_t seed = 1;
    /// Placed at the front of the initial population, replacing random draws.
    std::vector<Genome> initial_genomes;

    OperatorConfig operators() const noexcept { return {p_hybrid, p_mutate, max_depth}; }

    std::size_t elite_count() const noexcept {
        // guard against 0.15 * 40 landing a hair above 6
        return static_cast<std::size_t>(
            std::ceil(elite_fraction * static_cast<double>(population_size) - 1e-9));
    }

    /// Throws std::invalid_argument.
    void validate() const {
        if (population_size < 4 || population_size % 2 != 0)
            throw std::invalid_argument("population size must be even and >= 4");
        if (!(elite_fraction > 0.0 && elite_fraction < 1.0))
            throw std::invalid_argument("elite fraction must be in (0, 1)");
        if (elite_count() < 2) throw std::invalid_argument("elite fraction must keep at least 2 parents");
        for (double p : {p_hybrid, p_select_coin, p_mutate}) {
            if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("probabilities must be in [0, 1]");
        }
        if (max_depth < 1) throw std::invalid_argument("max depth must be >= 1");
        if (initial_genomes.size() > population_size)
            throw std::invalid_argument("more initial genomes than population slots");
        for (const Genome& g : initial_genomes) {
            if (g.depth() > max_depth) throw std::invalid_argument("initial genome exceeds max depth");
        }
    }
};

struct EvaluatedGenome {
    Genome genome;
    double fitness = 0.0;
    FitnessReport report;
    std::string key;
};

struct Population {
    std::vector<EvaluatedGenome> members;
    std::size_t generation = 0;

    const EvaluatedGenome& best() const { return members.front(); }
};

/// Fitness desc, then total node count asc, then key asc.
inline bool ranks_before(const EvaluatedGenome& a, const EvaluatedGenome& b) noexcept {
    if (a.fitness != b.fitness) return a.fitness > b.fitness;
    const auto na = a.genome.node_count();
    const auto nb = b.genome.node_count();
    if (na != nb) return na < nb;
    return a.key < b.key;
}

inline void rank(std::vector<EvaluatedGenome>& members) {
    std::sort(members.begin(), members.end(), ranks_before);
}

class InsufficientParents : public std::invalid_argument {
  public:
    explicit InsufficientParents(std::size_t n)
        : std::invalid_argument("breeding needs at least 2 parents, got " + std::to_string(n)) {}
};

/// Elites in rank order, then a mutated copy (mutation forced) of each other
/// member whose coin comes up heads, in rank order.
inline std::vector<Genome> select_parents(const Population& pop, const GaConfig& cfg, RngStream& rng) {
    const std::size_t elites = std::min(cfg.elite_count(), pop.members.size());
    std::vector<Genome> parents;
    parents.reserve(pop.members.size());
    for (std::size_t i = 0; i < elites; ++i) parents.push_back(pop.members[i].genome);
    for (std::size_t i = elites; i < pop.members.size(); ++i) {
        if (rng.bernoulli(cfg.p_select_coin)) parents.push_back(mutate(pop.members[i].genome, rng, 1.0));
    }
    return parents;
}

/// Children until |parents| + |children| == population_size. Pairs are drawn
/// uniformly without self-pairing; an odd target drops the last offspring.
inline std::vector<Genome> breed(const std::vector<Genome>& parents, const GaConfig& cfg, RngStream& rng) {
    if (parents.size() < 2) throw InsufficientParents(parents.size());
    const std::size_t target = cfg.population_size > parents.size() ? cfg.population_size - parents.size() : 0;
    const OperatorConfig ops = cfg.operators();
    std::vector<Genome> children;
    children.reserve(target + 1);
    while (children.size() < target) {
        const auto mom = rng.uniform_index(parents.size());
        auto dad = rng.uniform_index(parents.size() - 1);
        if (dad >= mom) ++dad;
        auto [first, second] = crossover(parents[mom], parents[dad], rng, ops);
        children.push_back(mutate(first, rng, ops.p_mutate));
        children.push_back(mutate(second, rng, ops.p_mutate));
    }
    children.erase(children.begin() + static_cast<std::ptrdiff_t>(target), children.end());
    return children;
}

/// Anything that scores a genome given its canonical key.
template <class E>
concept GenomeEvaluator = requires(const E& e, const Genome& g, const std::string& key) {
    { e(g, key) } -> std::convertible_to<FitnessReport>;
};

template <class E>
std::uint64_t evaluator_tag(const E& e) {
    if constexpr (requires { { e.config_hash() } -> std::convertible_to<std::uint64_t>; }) {
        return e.config_hash();
    } else {
        return 0;
    }
}

inline double fitness_of(const FitnessReport& r) noexcept { return r.valid ? r.test_accuracy : 0.0; }

struct RunLog {
    std::vector<Population> snapshots; // generation 0 .. generations
    std::size_t total_evaluations = 0;
    std::size_t cache_hits = 0;
};

template <GenomeEvaluator Evaluator>
class GeneticSearch {
  public:
    GeneticSearch(GaConfig cfg, Evaluator evaluator, std::size_t workers = 1)
        : cfg_(std::move(cfg)), evaluator_(std::move(evaluator)), workers_(std::max<std::size_t>(1, workers)),
          rng_(cfg_.seed), tag_("#" + std::to_string(evaluator_tag(evaluator_))) {
        cfg_.validate();
    }

    const GaConfig& config() const noexcept { return cfg_; }
    std::size_t evaluations() const noexcept { return evaluations_; }
    std::size_t cache_hits() const noexcept { return cache_hits_; }

    Population initialize() {
        std::vector<Genome> genomes;
        genomes.reserve(cfg_.population_size);
        for (std::size_t i = 0; i < cfg_.population_size; ++i) {
            genomes.push_back(Genome::whole(Expr::leaf(kAllPrimitives[rng_.uniform_index(kPrimitiveCount)])));
        }
        std::copy(cfg_.initial_genomes.begin(), cfg_.initial_genomes.end(), genomes.begin());
        Population pop{evaluate(genomes), 0};
        rank(pop.members);
        return pop;
    }

    Population step(const Population& pop) {
        std::vector<Genome> next = select_parents(pop, cfg_, rng_);
        std::vector<Genome> children = breed(next, cfg_, rng_);
        next.insert(next.end(), std::make_move_iterator(children.begin()), std::make_move_iterator(children.end()));
        Population out{evaluate(next), pop.generation + 1};
        rank(out.members);
        if (out.members.size() > cfg_.population_size) {
            out.members.erase(out.members.begin() + static_cast<std::ptrdiff_t>(cfg_.population_size), out.members.end());
        }
        return out;
    }

    RunLog run() {
        RunLog log;
        log.snapshots.push_back(initialize());
        for (std::size_t g = 0; g < cfg_.generations; ++g) log.snapshots.push_back(step(log.snapshots.back()));
        log.total_evaluations = evaluations_;
        log.cache_hits = cache_hits_;
        return log;
    }

    /// Score genomes through the cache; uncached keys are trained, possibly
    /// concurrently, and merged in input order.
    std::vector<EvaluatedGenome> evaluate(const std::vector<Genome>& genomes) {
        std::vector<EvaluatedGenome> out;
        out.reserve(genomes.size());
        std::vector<std::size_t> pending; // indices into out needing training
        std::unordered_map<std::string, std::size_t> first_pending;
        for (const Genome& g : genomes) {
            EvaluatedGenome eg{g, 0.0, {}, serialize(g)};
            const std::string cache_key = eg.key + tag_;
            if (cache_.contains(cache_key) || first_pending.contains(cache_key)) {
                ++cache_hits_;
            } else {
                first_pending.emplace(cache_key, out.size());
                pending.push_back(out.size());
            }
            out.push_back(std::move(eg));
        }

        std::vector<FitnessReport> results(pending.size());
        std::vector<std::exception_ptr> errors(pending.size());
        auto work = [&](std::size_t slot) {
            try {
                const auto& eg = out[pending[slot]];
                results[slot] = evaluator_(eg.genome, eg.key);
            } catch (...) {
                errors[slot] = std::current_exception();
            }
        };
        const std::size_t threads = std::min(workers_, pending.size());
        if (threads <= 1) {
            for (std::size_t s = 0; s < pending.size(); ++s) work(s);
        } else {
            std::atomic<std::size_t> next{0};
            std::vector<std::jthread> pool;
            pool.reserve(threads);
            for (std::size_t t = 0; t < threads; ++t) {
                pool.emplace_back([&] {
                    for (std::size_t s = next++; s < pending.size(); s = next++) work(s);
                });
            }
        }
        for (const auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
        for (std::size_t s = 0; s < pending.size(); ++s) {
            cache_.emplace(out[pending[s]].key + tag_, results[s]);
        }
        evaluations_ += pending.size();

        for (auto& eg : out) {
            eg.report = cache_.at(eg.key + tag_);
            eg.fitness = fitness_of(eg.report);
        }
        return out;
    }

  private:
    GaConfig cfg_;
    Evaluator evaluator_;
    std::size_t workers_;
    RngStream rng_;
    std::string tag_;
    std::unordered_map<std::string, FitnessReport> cache_;
    std::size_t evaluations_ = 0;
    std::size_t cache_hits_ = 0;
};

/// Convenience: initialize plus cfg.generations steps.
template <GenomeEvaluator Evaluator>
RunLog run(const GaConfig& cfg, Evaluator evaluator, std::size_t workers = 1) {
    return GeneticSearch<Evaluator>(cfg, std::move(evaluator), workers).run();
}

} // namespace afevo
