#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "arlstm/preprocess.hpp"

namespace arlstm::nn {

enum class Gate : std::size_t { input = 0, forget = 1, output = 2, candidate = 3 };
inline constexpr std::size_t kGateCount = 4;

[[nodiscard]] const char* gate_name(Gate gate) noexcept;

/// Named view over one contiguous block of trainable values.
struct ParamRef {
    std::string name;
    std::span<double> values;
};

/// Weights of one LSTM layer. For every gate: W (H x D), U (H x H) and b (H),
/// stored contiguously gate after gate, matrices row-major.
class LstmParams {
public:
    LstmParams() = default;
    LstmParams(std::size_t input_size, std::size_t hidden_size);  // all zeros

    [[nodiscard]] std::size_t input_size() const noexcept { return input_size_; }
    [[nodiscard]] std::size_t hidden_size() const noexcept { return hidden_size_; }

    [[nodiscard]] std::span<double> w(Gate g) noexcept { return block(g, 0, hidden_size_ * input_size_); }
    [[nodiscard]] std::span<double> u(Gate g) noexcept {
        return block(g, hidden_size_ * input_size_, hidden_size_ * hidden_size_);
    }
    [[nodiscard]] std::span<double> b(Gate g) noexcept {
        return block(g, hidden_size_ * (input_size_ + hidden_size_), hidden_size_);
    }
    [[nodiscard]] std::span<const double> w(Gate g) const noexcept {
        return const_cast<LstmParams*>(this)->w(g);
    }
    [[nodiscard]] std::span<const double> u(Gate g) const noexcept {
        return const_cast<LstmParams*>(this)->u(g);
    }
    [[nodiscard]] std::span<const double> b(Gate g) const noexcept {
        return const_cast<LstmParams*>(this)->b(g);
    }

    [[nodiscard]] std::span<double> values() noexcept { return values_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }

    [[nodiscard]] bool same_shape(const LstmParams& other) const noexcept {
        return input_size_ == other.input_size_ && hidden_size_ == other.hidden_size_;
    }

private:
    [[nodiscard]] std::size_t gate_stride() const noexcept {
        return hidden_size_ * (input_size_ + hidden_size_ + 1);
    }
    [[nodiscard]] std::span<double> block(Gate g, std::size_t offset, std::size_t len) noexcept {
        return {values_.data() + static_cast<std::size_t>(g) * gate_stride() + offset, len};
    }

    std::size_t input_size_ = 0;
    std::size_t hidden_size_ = 0;
    std::vector<double> values_;
};

struct DenseParams {
    std::vector<double> weight;  // 1 x H
    double bias = 0.0;
};

struct LstmState {
    std::vector<double> cell;
    std::vector<double> hidden;
};

/// Per-step activations kept by the forward pass for backpropagation.
/// Reused across calls; buffers only grow.
struct LstmCache {
    std::size_t steps = 0;
    std::size_t input_size = 0;
    std::size_t hidden_size = 0;
    std::vector<double> inputs;  // steps x D
    std::vector<double> gates;   // steps x 4 x H, post-activation
    std::vector<double> cell;    // steps x H
    std::vector<double> tanh_cell;
    std::vector<double> hidden;  // steps x H

    [[nodiscard]] std::span<const double> hidden_at(std::size_t t) const {
        return {hidden.data() + t * hidden_size, hidden_size};
    }
};

/// Runs the LSTM over `sequence` (steps x D, row-major) from a zero state.
LstmState lstm_forward(const LstmParams& params, std::span<const double> sequence, LstmCache& cache);

/// Backpropagation through time for one layer.
///
/// `d_hidden` is the upstream gradient with respect to every hidden output
/// (steps x H). Parameter gradients are accumulated into `grad`; when
/// `d_inputs` is non-empty it receives the gradient with respect to the
/// input sequence (steps x D).
void lstm_backward(const LstmParams& params, const LstmCache& cache, std::span<const double> d_hidden,
                   LstmParams& grad, std::span<double> d_inputs = {});

[[nodiscard]] double dense_forward(const DenseParams& params, std::span<const double> hidden);

[[nodiscard]] double mse_loss(std::span<const double> predictions, std::span<const double> targets);

/// Stacked LSTM layers followed by a linear regression head. The first layer
/// reads the lag window as a length-p sequence of scalars; later layers read
/// the hidden sequence of the layer below.
struct LstmRegressor {
    std::vector<LstmParams> layers;
    DenseParams head;

    [[nodiscard]] std::size_t hidden_size() const noexcept { return head.weight.size(); }
    [[nodiscard]] std::vector<ParamRef> parameters();
    /// Zero-valued copy with identical shapes, used as a gradient buffer.
    [[nodiscard]] LstmRegressor zeros_like() const;
};

struct RegressorCache {
    std::vector<LstmCache> layers;
    std::vector<double> d_hidden;
    std::vector<double> d_inputs;
};

[[nodiscard]] LstmRegressor make_regressor(std::size_t input_size, std::size_t hidden_size,
                                           std::size_t layers);

[[nodiscard]] double regressor_forward(const LstmRegressor& model, std::span<const double> window,
                                       RegressorCache& cache);

/// Accumulates d(loss)/d(params) into `grad` given d(loss)/d(prediction).
/// When `d_window` is non-empty it receives d(loss)/d(window).
void regressor_backward(const LstmRegressor& model, RegressorCache& cache, double d_output,
                        LstmRegressor& grad, std::span<double> d_window = {});

struct AdamConfig {
    double learning_rate = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    void validate() const;
};

struct AdamMoments {
    std::vector<double> first;
    std::vector<double> second;
};

/// One bias-corrected Adam update of a parameter block at step `step` (>= 1).
/// Throws TrainingError naming the block when a gradient is not finite.
void adam_step(std::span<double> params, std::span<const double> grads, AdamMoments& moments,
               const AdamConfig& config, std::size_t step, const std::string& name = "param");

/// Adam over a fixed list of parameter blocks.
class AdamOptimizer {
public:
    explicit AdamOptimizer(AdamConfig config);

    void step(const std::vector<ParamRef>& params, const std::vector<ParamRef>& grads);
    [[nodiscard]] std::size_t steps_taken() const noexcept { return step_; }

private:
    AdamConfig config_;
    std::vector<AdamMoments> moments_;
    std::size_t step_ = 0;
    double power1_ = 1.0;  // beta1^step
    double power2_ = 1.0;
};

struct TrainConfig {
    std::size_t epochs = 100;
    std::size_t batch_size = 1;
    std::uint64_t seed = 0;
    std::size_t layers = 1;
    std::size_t hidden_size = 1;

    void validate(std::size_t rows) const;
};

/// Deterministic 64-bit generator yielding uniforms in [lo, hi). Kept
/// independent of the standard library's distribution implementations so
/// initialisation is identical across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed);
    [[nodiscard]] double uniform(double lo, double hi);

private:
    std::uint64_t state_;
};

/// Uniform in [-0.5, 0.5] / sqrt(fan_in); forget-gate bias +1, other biases 0.
[[nodiscard]] LstmRegressor init_regressor(const TrainConfig& config, Rng& rng);

struct LstmFit {
    LstmRegressor model;
    std::vector<double> loss_history;  // mean per-row loss of each epoch
};

/// Sequential (unshuffled) mini-batch Adam on squared error. Throws
/// TrainingError with the epoch index on a non-finite loss.
[[nodiscard]] LstmFit train_lstm(const preprocess::SupervisedMatrix& data, const TrainConfig& config,
                                 const AdamConfig& adam = {});

[[nodiscard]] std::vector<double> predict(const LstmRegressor& model, const preprocess::SupervisedMatrix& data);

struct GradientCheckDims {
    std::size_t hidden_size = 1;
    std::size_t input_size = 1;
    std::size_t steps = 3;
    std::size_t layers = 1;
};

/// Largest relative discrepancy between analytic and central-difference
/// gradients over every parameter of a random regressor and squared-error loss.
[[nodiscard]] double gradient_check(const GradientCheckDims& dims, std::uint64_t seed, double step = 1e-5);

/// Relative error used by the gradient checkers; the denominator is floored
/// so gradients that are numerically zero compare on an absolute basis.
[[nodiscard]] double relative_error(double analytic, double numeric) noexcept;

}  // namespace arlstm::nn
