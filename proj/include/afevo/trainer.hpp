#pragma once

/// @file trainer.hpp
/// @brief Fitness evaluation: train a small MLP with a genome as its hidden
///        activation and report accuracy.
///
/// The network is fully connected: input -> hidden layers (evolved
/// activation) -> softmax output, trained on mean cross-entropy with plain
/// mini-batch SGD. Weights use He fan-in initialisation from init_seed, which
/// does not depend on the genome, so every candidate starts from the same
/// weights. Any non-finite activation, derivative, loss, gradient or weight
/// aborts training and marks the report invalid.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "genome.hpp"
#include "rng.hpp"

namespace afevo {

struct MlpConfig {
    std::vector<std::size_t> hidden_layers{16, 16};
    std::size_t epochs = 200;
    double learning_rate = 0.05;
    std::size_t batch_size = 32;
    std::uint64_t init_seed = 1;
    std::uint64_t shuffle_seed = 0;

    /// Throws std::invalid_argument.
    void validate() const {
        for (std::size_t w : hidden_layers) {
            if (w < 1) throw std::invalid_argument("hidden layer widths must be >= 1");
        }
        if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
        if (batch_size < 1) throw std::invalid_argument("batch size must be >= 1");
        if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
            throw std::invalid_argument("learning rate must be a positive finite number");
    }

    /// Hash of everything that affects training except shuffle_seed.
    std::uint64_t config_hash() const noexcept {
        std::string s = "h";
        for (std::size_t w : hidden_layers) s += ',' + std::to_string(w);
        s += ";e" + std::to_string(epochs) + ";b" + std::to_string(batch_size);
        s += ";i" + std::to_string(init_seed);
        s += ";l" + std::to_string(std::bit_cast<std::uint64_t>(learning_rate));
        return hash64(0, s);
    }
};

struct FitnessReport {
    double train_accuracy = 0.0;
    double test_accuracy = 0.0;
    double final_loss = 0.0;
    bool valid = true;
    std::optional<std::string> failure_reason;

    friend bool operator==(const FitnessReport&, const FitnessReport&) = default;
};

struct DenseLayer {
    std::size_t inputs = 0;
    std::size_t outputs = 0;
    std::vector<double> weights; // outputs x inputs, row-major
    std::vector<double> biases;
};

struct MlpGradients {
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;
};

class Mlp {
  public:
    Mlp(std::size_t inputs, std::span<const std::size_t> hidden, std::size_t classes, std::uint64_t init_seed) {
        RngStream rng(init_seed);
        std::size_t fan_in = inputs;
        auto add = [&](std::size_t out) {
            DenseLayer layer{fan_in, out, std::vector<double>(out * fan_in), std::vector<double>(out, 0.0)};
            const double scale = std::sqrt(2.0 / static_cast<double>(fan_in));
            for (double& w : layer.weights) w = scale * rng.normal();
            layers_.push_back(std::move(layer));
            fan_in = out;
        };
        for (std::size_t w : hidden) add(w);
        add(classes);
        activations_.resize(layers_.size());
        slopes_.resize(layers_.size());
        deltas_.resize(layers_.size());
        for (std::size_t l = 0; l < layers_.size(); ++l) {
            activations_[l].resize(layers_[l].outputs);
            slopes_[l].resize(layers_[l].outputs);
            deltas_[l].resize(layers_[l].outputs);
        }
    }

    std::vector<DenseLayer>& layers() noexcept { return layers_; }
    const std::vector<DenseLayer>& layers() const noexcept { return layers_; }

    /// Mean cross-entropy over `batch`, accumulating its gradient into `grad`
    /// when non-null. nullopt on any non-finite intermediate.
    template <class Activation>
    std::optional<double> loss_and_gradient(const Dataset& data, std::span<const std::size_t> batch,
                                            const Activation& act, MlpGradients* grad) {
        if (grad) zero_gradients(*grad);
        double total = 0.0;
        for (std::size_t idx : batch) {
            const double* x = data.row(idx);
            if (!forward(x, act)) return std::nullopt;
            const auto& probs = activations_.back();
            const auto label = static_cast<std::size_t>(data.labels[idx]);
            total -= std::log(probs[label]);
            if (grad) backward(x, label, act, *grad);
        }
        const double n = static_cast<double>(batch.size());
        const double loss = total / n;
        if (!std::isfinite(loss)) return std::nullopt;
        if (grad) {
            for (auto& g : grad->weights)
                for (double& v : g) v /= n;
            for (auto& g : grad->biases)
                for (double& v : g) v /= n;
        }
        return loss;
    }

    /// Predicted class of one sample; nullopt if the forward pass is non-finite.
    template <class Activation>
    std::optional<std::size_t> predict(const double* x, const Activation& act) {
        if (!forward(x, act)) return std::nullopt;
        const auto& probs = activations_.back();
        std::size_t best = 0;
        for (std::size_t k = 1; k < probs.size(); ++k) {
            if (probs[k] > probs[best]) best = k;
        }
        return best;
    }

    /// Accuracy over `indices` (0 for an empty set); nullopt if non-finite.
    template <class Activation>
    std::optional<double> accuracy(const Dataset& data, std::span<const std::size_t> indices, const Activation& act) {
        if (indices.empty()) return 0.0;
        std::size_t correct = 0;
        for (std::size_t idx : indices) {
            const auto p = predict(data.row(idx), act);
            if (!p) return std::nullopt;
            if (*p == static_cast<std::size_t>(data.labels[idx])) ++correct;
        }
        return static_cast<double>(correct) / static_cast<double>(indices.size());
    }

    /// w -= lr * g; false if any parameter became non-finite.
    bool apply_gradient(const MlpGradients& grad, double lr) {
        bool ok = true;
        for (std::size_t l = 0; l < layers_.size(); ++l) {
            auto& layer = layers_[l];
            for (std::size_t i = 0; i < layer.weights.size(); ++i) {
                layer.weights[i] -= lr * grad.weights[l][i];
                ok = ok && std::isfinite(layer.weights[i]);
            }
            for (std::size_t i = 0; i < layer.biases.size(); ++i) {
                layer.biases[i] -= lr * grad.biases[l][i];
                ok = ok && std::isfinite(layer.biases[i]);
            }
        }
        return ok;
    }

  private:
    void zero_gradients(MlpGradients& grad) const {
        grad.weights.resize(layers_.size());
        grad.biases.resize(layers_.size());
        for (std::size_t l = 0; l < layers_.size(); ++l) {
            grad.weights[l].assign(layers_[l].weights.size(), 0.0);
            grad.biases[l].assign(layers_[l].biases.size(), 0.0);
        }
    }

    template <class Activation>
    bool forward(const double* x, const Activation& act) {
        const double* in = x;
        const std::size_t last = layers_.size() - 1;
        for (std::size_t l = 0; l < layers_.size(); ++l) {
            const auto& layer = layers_[l];
            auto& out = activations_[l];
            for (std::size_t o = 0; o < layer.outputs; ++o) {
                const double* w = layer.weights.data() + o * layer.inputs;
                double z = layer.biases[o];
                for (std::size_t i = 0; i < layer.inputs; ++i) z += w[i] * in[i];
                if (l == last) {
                    out[o] = z;
                    continue;
                }
                const DualValue a = act(z);
                if (!a.finite()) return false;
                out[o] = a.value;
                slopes_[l][o] = a.deriv;
            }
            in = out.data();
        }
        // softmax in place
        auto& logits = activations_.back();
        double peak = logits[0];
        for (double v : logits) peak = std::fmax(peak, v);
        double sum = 0.0;
        for (double& v : logits) {
            v = std::exp(v - peak);
            sum += v;
        }
        for (double& v : logits) v /= sum;
        for (double v : logits) {
            if (!std::isfinite(v)) return false;
        }
        return true;
    }

    template <class Activation>
    void backward(const double* x, std::size_t label, const Activation&, MlpGradients& grad) {
        const std::size_t last = layers_.size() - 1;
        // d(-log p_label)/dz = p - onehot
        for (std::size_t k = 0; k < layers_[last].outputs; ++k) {
            deltas_[last][k] = activations_[last][k] - (k == label ? 1.0 : 0.0);
        }
        for (std::size_t l = last + 1; l-- > 0;) {
            const auto& layer = layers_[l];
            const double* in = l == 0 ? x : activations_[l - 1].data();
            auto& gw = grad.weights[l];
            auto& gb = grad.biases[l];
            for (std::size_t o = 0; o < layer.outputs; ++o) {
                const double d = deltas_[l][o];
                gb[o] += d;
                double* g = gw.data() + o * layer.inputs;
                for (std::size_t i = 0; i < layer.inputs; ++i) g[i] += d * in[i];
            }
            if (l == 0) break;
            auto& prev = deltas_[l - 1];
            for (std::size_t i = 0; i < layer.inputs; ++i) {
                double s = 0.0;
                for (std::size_t o = 0; o < layer.outputs; ++o) s += layer.weights[o * layer.inputs + i] * deltas_[l][o];
                prev[i] = s * slopes_[l - 1][i];
            }
        }
    }

    std::vector<DenseLayer> layers_;
    std::vector<std::vector<double>> activations_;
    std::vector<std::vector<double>> slopes_;
    std::vector<std::vector<double>> deltas_;
};

namespace detail {

inline bool all_finite(const MlpGradients& g) {
    for (const auto& v : g.weights)
        for (double x : v)
            if (!std::isfinite(x)) return false;
    for (const auto& v : g.biases)
        for (double x : v)
            if (!std::isfinite(x)) return false;
    return true;
}

inline FitnessReport invalid_report(std::string reason) {
    FitnessReport r;
    r.valid = false;
    r.failure_reason = std::move(reason);
    return r;
}

} // namespace detail

/// Train an MLP with `g` as hidden activation and score it.
///
/// Mini-batches follow a per-epoch shuffle of the training split seeded by
/// cfg.shuffle_seed. Reentrant: no state is shared between calls.
inline FitnessReport train_and_score(const Genome& g, const Dataset& data, const MlpConfig& cfg) {
    cfg.validate();
    const auto act = [&g](double z) { return genome_value_dual(g, z); };
    Mlp net(data.dims, cfg.hidden_layers, data.classes, cfg.init_seed);
    RngStream shuffle_rng(cfg.shuffle_seed);
    std::vector<std::size_t> order = data.train;
    MlpGradients grad;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        shuffle(order.begin(), order.end(), shuffle_rng);
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
            const std::span<const std::size_t> batch(order.data() + start, stop - start);
            const auto loss = net.loss_and_gradient(data, batch, act, &grad);
            if (!loss) return detail::invalid_report("non-finite forward pass or loss in epoch " + std::to_string(epoch));
            if (!detail::all_finite(grad))
                return detail::invalid_report("non-finite gradient in epoch " + std::to_string(epoch));
            if (!net.apply_gradient(grad, cfg.learning_rate))
                return detail::invalid_report("non-finite weight in epoch " + std::to_string(epoch));
        }
    }
    FitnessReport report;
    const auto loss = net.loss_and_gradient(data, data.train, act, nullptr);
    const auto train_acc = net.accuracy(data, data.train, act);
    const auto test_acc = net.accuracy(data, data.test, act);
    if (!loss || !train_acc || !test_acc) return detail::invalid_report("non-finite forward pass during scoring");
    report.final_loss = *loss;
    report.train_accuracy = *train_acc;
    report.test_accuracy = *test_acc;
    return report;
}

/// Evaluator for the engine: trains with a per-genome shuffle seed derived
/// from (run seed, genome key), so a cached result equals a fresh one.
class GenomeTrainer {
  public:
    GenomeTrainer(const Dataset& data, MlpConfig cfg, std::uint64_t run_seed)
        : data_(&data), cfg_(std::move(cfg)), run_seed_(run_seed) {
        cfg_.validate();
    }

    FitnessReport operator()(const Genome& g, const std::string& key) const {
        MlpConfig cfg = cfg_;
        cfg.shuffle_seed = hash64(run_seed_, key);
        return train_and_score(g, *data_, cfg);
    }

    std::uint64_t config_hash() const noexcept { return cfg_.config_hash(); }

  private:
    const Dataset* data_;
    MlpConfig cfg_;
    std::uint64_t run_seed_;
};

} // namespace afevo
