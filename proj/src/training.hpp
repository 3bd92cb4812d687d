#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "arlstm/error.hpp"
#include "arlstm/nn.hpp"
#include "arlstm/preprocess.hpp"

namespace arlstm::nn::detail {

inline void zero(const std::vector<ParamRef>& refs) {
    for (const auto& ref : refs) {
        std::fill(ref.values.begin(), ref.values.end(), 0.0);
    }
}

/// Shared epoch loop for every gradient-trained model. Rows are visited in
/// order; each batch averages its squared errors and takes one Adam step.
///
/// `row_step(window, target, grad_scale)` runs forward and backward for one
/// row, accumulating grad_scale * d(err^2)/d(params) into the gradient
/// buffer, and returns err^2. `on_epoch(epoch)` runs after every epoch.
template <class Model, class RowStep, class OnEpoch>
std::vector<double> fit_sequential(Model& model, Model& grad, const preprocess::SupervisedMatrix& data,
                                   const TrainConfig& config, const AdamConfig& adam, RowStep&& row_step,
                                   OnEpoch&& on_epoch) {
    AdamOptimizer optimizer(adam);
    const auto params = model.parameters();
    const auto grads = grad.parameters();
    const std::size_t rows = data.rows();

    std::vector<double> history;
    history.reserve(config.epochs);
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        double total = 0.0;
        for (std::size_t start = 0; start < rows; start += config.batch_size) {
            const std::size_t stop = std::min(rows, start + config.batch_size);
            const double scale = 1.0 / static_cast<double>(stop - start);
            zero(grads);
            for (std::size_t i = start; i < stop; ++i) {
                total += row_step(data.row(i), data.target(i), scale);
            }
            try {
                optimizer.step(params, grads);
            } catch (const TrainingError& e) {
                throw TrainingError("epoch " + std::to_string(epoch) + ": " + e.what());
            }
        }
        const double mean = total / static_cast<double>(rows);
        if (!std::isfinite(mean)) {
            throw TrainingError("training diverged: non-finite loss at epoch " + std::to_string(epoch));
        }
        history.push_back(mean);
        on_epoch(epoch);
    }
    return history;
}

template <class Model, class RowStep>
std::vector<double> fit_sequential(Model& model, Model& grad, const preprocess::SupervisedMatrix& data,
                                   const TrainConfig& config, const AdamConfig& adam, RowStep&& row_step) {
    return fit_sequential(model, grad, data, config, adam, std::forward<RowStep>(row_step), [](std::size_t) {});
}

}  // namespace arlstm::nn::detail
