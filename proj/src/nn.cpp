#include "arlstm/nn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "arlstm/error.hpp"
#include "training.hpp"

namespace arlstm::nn {

namespace {

constexpr std::size_t kInput = static_cast<std::size_t>(Gate::input);
constexpr std::size_t kForget = static_cast<std::size_t>(Gate::forget);
constexpr std::size_t kOutput = static_cast<std::size_t>(Gate::output);
constexpr std::size_t kCandidate = static_cast<std::size_t>(Gate::candidate);

inline double sigmoid(double x) noexcept { return 1.0 / (1.0 + std::exp(-x)); }

constexpr std::array<Gate, kGateCount> kGates{Gate::input, Gate::forget, Gate::output, Gate::candidate};

}  // namespace

const char* gate_name(Gate gate) noexcept {
    switch (gate) {
        case Gate::input: return "input";
        case Gate::forget: return "forget";
        case Gate::output: return "output";
        case Gate::candidate: return "candidate";
    }
    return "?";
}

LstmParams::LstmParams(std::size_t input_size, std::size_t hidden_size)
    : input_size_(input_size), hidden_size_(hidden_size),
      values_(kGateCount * hidden_size * (input_size + hidden_size + 1), 0.0) {
    if (input_size == 0 || hidden_size == 0) {
        throw DimensionError("LSTM input and hidden sizes must be positive");
    }
}

LstmState lstm_forward(const LstmParams& params, std::span<const double> sequence, LstmCache& cache) {
    const std::size_t D = params.input_size();
    const std::size_t H = params.hidden_size();
    if (D == 0 || sequence.empty() || sequence.size() % D != 0) {
        throw DimensionError("LSTM sequence of " + std::to_string(sequence.size()) +
                             " values is not a whole number of steps of width " + std::to_string(D));
    }
    const std::size_t steps = sequence.size() / D;

    cache.steps = steps;
    cache.input_size = D;
    cache.hidden_size = H;
    cache.inputs.assign(sequence.begin(), sequence.end());
    cache.gates.resize(steps * kGateCount * H);
    cache.cell.resize(steps * H);
    cache.tanh_cell.resize(steps * H);
    cache.hidden.resize(steps * H);

    std::array<std::span<const double>, kGateCount> w, u, b;
    for (Gate g : kGates) {
        const auto gi = static_cast<std::size_t>(g);
        w[gi] = params.w(g);
        u[gi] = params.u(g);
        b[gi] = params.b(g);
    }

    for (std::size_t t = 0; t < steps; ++t) {
        const double* x = cache.inputs.data() + t * D;
        const double* h_prev = t > 0 ? cache.hidden.data() + (t - 1) * H : nullptr;
        const double* c_prev = t > 0 ? cache.cell.data() + (t - 1) * H : nullptr;
        double* act = cache.gates.data() + t * kGateCount * H;

        for (std::size_t gi = 0; gi < kGateCount; ++gi) {
            for (std::size_t k = 0; k < H; ++k) {
                double a = b[gi][k];
                for (std::size_t d = 0; d < D; ++d) {
                    a += w[gi][k * D + d] * x[d];
                }
                if (h_prev != nullptr) {
                    for (std::size_t m = 0; m < H; ++m) {
                        a += u[gi][k * H + m] * h_prev[m];
                    }
                }
                act[gi * H + k] = gi == kCandidate ? std::tanh(a) : sigmoid(a);
            }
        }
        for (std::size_t k = 0; k < H; ++k) {
            const double i = act[kInput * H + k];
            const double f = act[kForget * H + k];
            const double o = act[kOutput * H + k];
            const double g = act[kCandidate * H + k];
            const double c = (c_prev != nullptr ? f * c_prev[k] : 0.0) + i * g;
            const double tc = std::tanh(c);
            cache.cell[t * H + k] = c;
            cache.tanh_cell[t * H + k] = tc;
            cache.hidden[t * H + k] = o * tc;
        }
    }

    LstmState state;
    state.cell.assign(cache.cell.end() - static_cast<std::ptrdiff_t>(H), cache.cell.end());
    state.hidden.assign(cache.hidden.end() - static_cast<std::ptrdiff_t>(H), cache.hidden.end());
    return state;
}

void lstm_backward(const LstmParams& params, const LstmCache& cache, std::span<const double> d_hidden,
                   LstmParams& grad, std::span<double> d_inputs) {
    const std::size_t D = cache.input_size;
    const std::size_t H = cache.hidden_size;
    const std::size_t steps = cache.steps;
    if (D != params.input_size() || H != params.hidden_size() || !grad.same_shape(params)) {
        throw DimensionError("LSTM cache, parameters and gradient buffer disagree in shape");
    }
    if (d_hidden.size() != steps * H) {
        throw DimensionError("upstream hidden gradient has " + std::to_string(d_hidden.size()) +
                             " values, expected " + std::to_string(steps * H));
    }
    if (!d_inputs.empty() && d_inputs.size() != steps * D) {
        throw DimensionError("input gradient buffer has wrong size");
    }

    std::array<std::span<const double>, kGateCount> w, u;
    std::array<std::span<double>, kGateCount> dw, du, db;
    for (Gate g : kGates) {
        const auto gi = static_cast<std::size_t>(g);
        w[gi] = params.w(g);
        u[gi] = params.u(g);
        dw[gi] = grad.w(g);
        du[gi] = grad.u(g);
        db[gi] = grad.b(g);
    }

    // Scratch laid out as [dh_next | dc_next | da (4H)].
    thread_local std::vector<double> scratch;
    scratch.assign(6 * H, 0.0);
    double* dh_next = scratch.data();
    double* dc_next = dh_next + H;
    double* da = dc_next + H;

    for (std::size_t step = steps; step-- > 0;) {
        const double* act = cache.gates.data() + step * kGateCount * H;
        const double* x = cache.inputs.data() + step * D;
        const double* h_prev = step > 0 ? cache.hidden.data() + (step - 1) * H : nullptr;
        const double* c_prev = step > 0 ? cache.cell.data() + (step - 1) * H : nullptr;

        for (std::size_t k = 0; k < H; ++k) {
            const double i = act[kInput * H + k];
            const double f = act[kForget * H + k];
            const double o = act[kOutput * H + k];
            const double g = act[kCandidate * H + k];
            const double tc = cache.tanh_cell[step * H + k];
            const double dh = d_hidden[step * H + k] + dh_next[k];
            const double dc = dc_next[k] + dh * o * (1.0 - tc * tc);
            const double cp = c_prev != nullptr ? c_prev[k] : 0.0;

            da[kInput * H + k] = dc * g * i * (1.0 - i);
            da[kForget * H + k] = dc * cp * f * (1.0 - f);
            da[kOutput * H + k] = dh * tc * o * (1.0 - o);
            da[kCandidate * H + k] = dc * i * (1.0 - g * g);
            dc_next[k] = dc * f;
        }

        std::fill(dh_next, dh_next + H, 0.0);
        if (!d_inputs.empty()) {
            std::fill(d_inputs.begin() + static_cast<std::ptrdiff_t>(step * D),
                      d_inputs.begin() + static_cast<std::ptrdiff_t>((step + 1) * D), 0.0);
        }
        for (std::size_t gi = 0; gi < kGateCount; ++gi) {
            for (std::size_t k = 0; k < H; ++k) {
                const double a = da[gi * H + k];
                db[gi][k] += a;
                for (std::size_t d = 0; d < D; ++d) {
                    dw[gi][k * D + d] += a * x[d];
                }
                if (h_prev != nullptr) {
                    for (std::size_t m = 0; m < H; ++m) {
                        du[gi][k * H + m] += a * h_prev[m];
                        dh_next[m] += u[gi][k * H + m] * a;
                    }
                }
                if (!d_inputs.empty()) {
                    for (std::size_t d = 0; d < D; ++d) {
                        d_inputs[step * D + d] += w[gi][k * D + d] * a;
                    }
                }
            }
        }
    }
}

double dense_forward(const DenseParams& params, std::span<const double> hidden) {
    if (hidden.size() != params.weight.size()) {
        throw DimensionError("dense layer expects " + std::to_string(params.weight.size()) +
                             " inputs, got " + std::to_string(hidden.size()));
    }
    double y = params.bias;
    for (std::size_t k = 0; k < hidden.size(); ++k) {
        y += params.weight[k] * hidden[k];
    }
    return y;
}

double mse_loss(std::span<const double> predictions, std::span<const double> targets) {
    if (predictions.empty() || predictions.size() != targets.size()) {
        throw DimensionError("mse_loss needs equal, non-empty sequences (got " +
                             std::to_string(predictions.size()) + " and " + std::to_string(targets.size()) + ")");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double e = predictions[i] - targets[i];
        sum += e * e;
    }
    return sum / static_cast<double>(predictions.size());
}

std::vector<ParamRef> LstmRegressor::parameters() {
    std::vector<ParamRef> refs;
    refs.reserve(layers.size() + 2);
    for (std::size_t l = 0; l < layers.size(); ++l) {
        refs.push_back({"lstm[" + std::to_string(l) + "]", layers[l].values()});
    }
    refs.push_back({"dense.weight", head.weight});
    refs.push_back({"dense.bias", std::span<double>(&head.bias, 1)});
    return refs;
}

LstmRegressor LstmRegressor::zeros_like() const {
    LstmRegressor out;
    for (const auto& layer : layers) {
        out.layers.emplace_back(layer.input_size(), layer.hidden_size());
    }
    out.head.weight.assign(head.weight.size(), 0.0);
    out.head.bias = 0.0;
    return out;
}

LstmRegressor make_regressor(std::size_t input_size, std::size_t hidden_size, std::size_t layers) {
    if (layers == 0) {
        throw DimensionError("regressor needs at least one LSTM layer");
    }
    LstmRegressor model;
    for (std::size_t l = 0; l < layers; ++l) {
        model.layers.emplace_back(l == 0 ? input_size : hidden_size, hidden_size);
    }
    model.head.weight.assign(hidden_size, 0.0);
    return model;
}

double regressor_forward(const LstmRegressor& model, std::span<const double> window, RegressorCache& cache) {
    if (model.layers.empty()) {
        throw DimensionError("regressor has no LSTM layers");
    }
    cache.layers.resize(model.layers.size());
    std::span<const double> input = window;
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        lstm_forward(model.layers[l], input, cache.layers[l]);
        input = cache.layers[l].hidden;
    }
    const auto& top = cache.layers.back();
    return dense_forward(model.head, top.hidden_at(top.steps - 1));
}

void regressor_backward(const LstmRegressor& model, RegressorCache& cache, double d_output,
                        LstmRegressor& grad, std::span<double> d_window) {
    if (cache.layers.size() != model.layers.size() || grad.layers.size() != model.layers.size()) {
        throw DimensionError("regressor cache does not match the model");
    }
    const auto& top = cache.layers.back();
    const std::size_t H = model.hidden_size();
    const std::size_t steps = top.steps;

    const auto h_last = top.hidden_at(steps - 1);
    for (std::size_t k = 0; k < H; ++k) {
        grad.head.weight[k] += d_output * h_last[k];
    }
    grad.head.bias += d_output;

    cache.d_hidden.assign(steps * H, 0.0);
    for (std::size_t k = 0; k < H; ++k) {
        cache.d_hidden[(steps - 1) * H + k] = d_output * model.head.weight[k];
    }
    for (std::size_t l = model.layers.size(); l-- > 0;) {
        const bool wants_inputs = l > 0 || !d_window.empty();
        std::span<double> d_in;
        if (l > 0) {
            cache.d_inputs.assign(steps * model.layers[l].input_size(), 0.0);
            d_in = cache.d_inputs;
        } else if (wants_inputs) {
            d_in = d_window;
        }
        lstm_backward(model.layers[l], cache.layers[l], cache.d_hidden, grad.layers[l], d_in);
        if (l > 0) {
            cache.d_hidden.swap(cache.d_inputs);
        }
    }
}

void AdamConfig::validate() const {
    if (!(learning_rate > 0.0) || !(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0) ||
        !(epsilon > 0.0)) {
        throw DimensionError("Adam config out of range: need lr > 0, 0 < beta1, beta2 < 1, epsilon > 0");
    }
}

namespace {

void adam_update(std::span<double> params, std::span<const double> grads, AdamMoments& moments,
                 const AdamConfig& config, double correction1, double correction2, std::size_t step,
                 const std::string& name) {
    if (params.size() != grads.size()) {
        throw DimensionError("Adam: '" + name + "' has " + std::to_string(params.size()) +
                             " values but " + std::to_string(grads.size()) + " gradients");
    }
    if (moments.first.size() != params.size()) {
        moments.first.assign(params.size(), 0.0);
        moments.second.assign(params.size(), 0.0);
    }
    for (std::size_t i = 0; i < grads.size(); ++i) {
        if (!std::isfinite(grads[i])) {
            throw TrainingError("non-finite gradient in '" + name + "'[" + std::to_string(i) +
                                "] at Adam step " + std::to_string(step));
        }
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        double& m = moments.first[i];
        double& v = moments.second[i];
        m = config.beta1 * m + (1.0 - config.beta1) * g;
        v = config.beta2 * v + (1.0 - config.beta2) * g * g;
        const double m_hat = m / correction1;
        const double v_hat = v / correction2;
        params[i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
    }
}

}  // namespace

void adam_step(std::span<double> params, std::span<const double> grads, AdamMoments& moments,
               const AdamConfig& config, std::size_t step, const std::string& name) {
    if (step == 0) {
        throw DimensionError("Adam step index starts at 1");
    }
    const double t = static_cast<double>(step);
    adam_update(params, grads, moments, config, 1.0 - std::pow(config.beta1, t), 1.0 - std::pow(config.beta2, t),
                step, name);
}

AdamOptimizer::AdamOptimizer(AdamConfig config) : config_(config) { config_.validate(); }

void AdamOptimizer::step(const std::vector<ParamRef>& params, const std::vector<ParamRef>& grads) {
    if (params.size() != grads.size()) {
        throw DimensionError("Adam: parameter and gradient lists differ in length");
    }
    if (moments_.size() != params.size()) {
        moments_.resize(params.size());
    }
    ++step_;
    power1_ *= config_.beta1;
    power2_ *= config_.beta2;
    for (std::size_t b = 0; b < params.size(); ++b) {
        adam_update(params[b].values, grads[b].values, moments_[b], config_, 1.0 - power1_, 1.0 - power2_, step_,
                    params[b].name);
    }
}

void TrainConfig::validate(std::size_t rows) const {
    if (epochs == 0 || batch_size == 0 || layers == 0 || hidden_size == 0) {
        throw DimensionError("epochs, batch size, layers and hidden size must all be positive");
    }
    if (rows == 0) {
        throw LengthError("no training rows");
    }
    if (batch_size > rows) {
        throw DimensionError("batch size " + std::to_string(batch_size) + " exceeds " +
                             std::to_string(rows) + " training rows");
    }
}

Rng::Rng(std::uint64_t seed) : state_(seed) {}

double Rng::uniform(double lo, double hi) {
    // splitmix64
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z ^= z >> 31;
    const double unit = static_cast<double>(z >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * unit;
}

LstmRegressor init_regressor(const TrainConfig& config, Rng& rng) {
    auto model = make_regressor(1, config.hidden_size, config.layers);
    for (auto& layer : model.layers) {
        const double bound = 0.5 / std::sqrt(static_cast<double>(layer.input_size() + layer.hidden_size()));
        for (Gate g : kGates) {
            for (double& x : layer.w(g)) x = rng.uniform(-bound, bound);
            for (double& x : layer.u(g)) x = rng.uniform(-bound, bound);
            for (double& x : layer.b(g)) x = g == Gate::forget ? 1.0 : 0.0;
        }
    }
    const double bound = 0.5 / std::sqrt(static_cast<double>(config.hidden_size));
    for (double& x : model.head.weight) x = rng.uniform(-bound, bound);
    model.head.bias = 0.0;
    return model;
}

LstmFit train_lstm(const preprocess::SupervisedMatrix& data, const TrainConfig& config, const AdamConfig& adam) {
    config.validate(data.rows());
    Rng rng(config.seed);
    LstmFit fit{init_regressor(config, rng), {}};

    auto grad = fit.model.zeros_like();
    RegressorCache cache;
    fit.loss_history = detail::fit_sequential(
        fit.model, grad, data, config, adam, [&](std::span<const double> window, double target, double scale) {
            const double y = regressor_forward(fit.model, window, cache);
            const double err = y - target;
            regressor_backward(fit.model, cache, 2.0 * err * scale, grad);
            return err * err;
        });
    return fit;
}

std::vector<double> predict(const LstmRegressor& model, const preprocess::SupervisedMatrix& data) {
    RegressorCache cache;
    std::vector<double> out(data.rows());
    for (std::size_t i = 0; i < data.rows(); ++i) {
        out[i] = regressor_forward(model, data.row(i), cache);
    }
    return out;
}

double relative_error(double analytic, double numeric) noexcept {
    const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
    return std::abs(analytic - numeric) / denom;
}

double gradient_check(const GradientCheckDims& dims, std::uint64_t seed, double step) {
    Rng rng(seed);
    auto model = make_regressor(dims.input_size, dims.hidden_size, dims.layers);
    for (auto& ref : model.parameters()) {
        for (double& x : ref.values) x = rng.uniform(-1.0, 1.0);
    }
    std::vector<double> window(dims.steps * dims.input_size);
    for (double& x : window) x = rng.uniform(-1.0, 1.0);
    const double target = rng.uniform(-1.0, 1.0);

    RegressorCache cache;
    auto loss = [&]() {
        const double e = regressor_forward(model, window, cache) - target;
        return e * e;
    };

    auto grad = model.zeros_like();
    const double y = regressor_forward(model, window, cache);
    regressor_backward(model, cache, 2.0 * (y - target), grad);

    auto params = model.parameters();
    const auto grads = grad.parameters();
    double worst = 0.0;
    for (std::size_t b = 0; b < params.size(); ++b) {
        for (std::size_t i = 0; i < params[b].values.size(); ++i) {
            double& x = params[b].values[i];
            const double saved = x;
            x = saved + step;
            const double up = loss();
            x = saved - step;
            const double down = loss();
            x = saved;
            worst = std::max(worst, relative_error(grads[b].values[i], (up - down) / (2.0 * step)));
        }
    }
    return worst;
}

}  // namespace arlstm::nn
