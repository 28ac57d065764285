#include "medplex/optimizer.hpp"

#include <cmath>

namespace medplex {

void Adam::step(std::span<const ParamBlock> params, std::span<const ConstParamBlock> grads) {
    if (params.size() != grads.size()) throw DataError("adam: parameter/gradient block count mismatch");
    std::size_t total = 0;
    for (std::size_t b = 0; b < params.size(); ++b) {
        if (params[b].values.size() != grads[b].values.size()) {
            throw DataError("adam: block '" + params[b].name + "' size mismatch");
        }
        for (double g : grads[b].values) {
            if (!std::isfinite(g)) throw NumericError("adam: non-finite gradient in '" + grads[b].name + "'");
        }
        total += params[b].values.size();
    }
    if (m_.empty()) {
        m_.assign(total, 0.0);
        v_.assign(total, 0.0);
    } else if (m_.size() != total) {
        throw DataError("adam: parameter layout changed between steps");
    }

    ++t_;
    const auto& o = options_;
    const double c1 = 1.0 - std::pow(o.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(o.beta2, static_cast<double>(t_));
    std::size_t k = 0;
    for (std::size_t b = 0; b < params.size(); ++b) {
        auto p = params[b].values;
        auto g = grads[b].values;
        for (std::size_t i = 0; i < p.size(); ++i, ++k) {
            m_[k] = o.beta1 * m_[k] + (1.0 - o.beta1) * g[i];
            v_[k] = o.beta2 * v_[k] + (1.0 - o.beta2) * g[i] * g[i];
            const double m_hat = m_[k] / c1;
            const double v_hat = v_[k] / c2;
            p[i] -= o.learning_rate * m_hat / (std::sqrt(v_hat) + o.epsilon);
        }
    }
}

void adam_step(Adam& adam, ModelState& state) {
    auto p = param_blocks(state.params);
    const auto g = param_blocks(std::as_const(state.grads));
    adam.step(p, g);
}

} // namespace medplex
