#pragma once

#include <cmath>
#include <vector>

#include "camel/errors.hpp"
#include "camel/kernels.hpp"
#include "camel/params.hpp"

namespace camel {

enum class OptKind { sgd, adam };

struct OptimizerConfig {
    OptKind kind = OptKind::sgd;
    double lr = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// SGD or Adam over a ParameterVector. Freshly constructed state is zeroed
// with step counter 0; inner-loop optimizers rely on that reset semantics.
template <typename T>
class Optimizer {
public:
    Optimizer(OptimizerConfig cfg, LayoutPtr layout) : cfg_(cfg), layout_(std::move(layout)) {
        if (cfg_.kind == OptKind::adam) {
            m_.assign(layout_->total_size(), T(0));
            v_.assign(layout_->total_size(), T(0));
        }
    }

    void step(ParameterVector<T>& params, const ParameterVector<T>& grad) {
        params.check_same_layout(grad);
        if (!(*params.layout == *layout_)) throw InputError("optimizer: layout mismatch");
        ++steps_;
        if (cfg_.kind == OptKind::sgd) {
            kern::axpy(params.size(), static_cast<T>(-cfg_.lr), grad.values.data(), params.values.data());
        } else {
            const T b1c = static_cast<T>(1.0 - std::pow(cfg_.beta1, static_cast<double>(steps_)));
            const T b2c = static_cast<T>(1.0 - std::pow(cfg_.beta2, static_cast<double>(steps_)));
            kern::adam_step(params.size(), params.values.data(), grad.values.data(), m_.data(), v_.data(),
                            static_cast<T>(cfg_.lr), static_cast<T>(cfg_.beta1), static_cast<T>(cfg_.beta2),
                            static_cast<T>(cfg_.eps), b1c, b2c);
        }
    }

    long step_count() const { return steps_; }
    const OptimizerConfig& config() const { return cfg_; }
    const LayoutPtr& layout() const { return layout_; }

    // Checkpoint access.
    const std::vector<T>& adam_m() const { return m_; }
    const std::vector<T>& adam_v() const { return v_; }
    void restore(long steps, std::vector<T> m, std::vector<T> v) {
        if (cfg_.kind == OptKind::adam && (m.size() != layout_->total_size() || v.size() != layout_->total_size()))
            throw InputError("optimizer: bad restored state size");
        steps_ = steps;
        m_ = std::move(m);
        v_ = std::move(v);
    }

private:
    OptimizerConfig cfg_;
    LayoutPtr layout_;
    long steps_ = 0;
    std::vector<T> m_, v_;
};

}  // namespace camel
