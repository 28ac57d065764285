#ifndef MEDPLEX_OPTIMIZER_HPP
#define MEDPLEX_OPTIMIZER_HPP

#include "medplex/model.hpp"

#include <span>
#include <vector>

namespace medplex {

struct AdamOptions {
    double learning_rate = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// Adam with bias correction. Moment buffers are laid out in block order and are
/// created on the first step.
class Adam {
public:
    explicit Adam(AdamOptions options = {}) : options_(options) {}

    /// One update. Throws NumericError naming the block if any gradient is non-finite;
    /// parameters are left untouched in that case.
    void step(std::span<const ParamBlock> params, std::span<const ConstParamBlock> grads);

    long steps() const { return t_; }
    const AdamOptions& options() const { return options_; }

private:
    AdamOptions options_;
    long t_ = 0;
    std::vector<double> m_;
    std::vector<double> v_;
};

/// Convenience overload for the multiplex model.
void adam_step(Adam& adam, ModelState& state);

} // namespace medplex

#endif // MEDPLEX_OPTIMIZER_HPP
