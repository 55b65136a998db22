#pragma once

#include <cstdint>
#include <vector>

#include "ncrhok/tensor.hpp"

namespace ncrhok::ad {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.0; ///< decoupled: applied to the value, not the gradient
    double clip_norm = 0.0;    ///< global L2 clip threshold; 0 disables clipping
};

/**
 * Adam with optional global-norm gradient clipping and decoupled weight
 * decay. Parameters are registered once and updated in place; their gradient
 * buffers are shared with whatever tapes compute the loss.
 */
class Adam {
public:
    explicit Adam(AdamConfig cfg = {}) : cfg_(cfg) {}

    void add_param(const Tensor& p);

    void zero_grads();

    /** Global L2 norm over every registered gradient buffer. */
    double grad_norm() const;

    /**
     * One update step. Returns the pre-clip global gradient norm. Throws
     * NumericError when any gradient is not finite.
     */
    double step();

    void set_lr(double lr) { cfg_.lr = lr; }
    double lr() const { return cfg_.lr; }
    std::int64_t steps_taken() const { return t_; }
    std::size_t num_params() const { return params_.size(); }

private:
    AdamConfig cfg_;
    std::vector<std::shared_ptr<TensorData>> params_;
    std::vector<std::vector<double>> m_, v_;
    std::int64_t t_ = 0;
};

} // namespace ncrhok::ad
