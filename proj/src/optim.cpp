#include "ncrhok/optim.hpp"

#include <algorithm>
#include <cmath>

#include "ncrhok/errors.hpp"

namespace ncrhok::ad {

void Adam::add_param(const Tensor& p) {
    if (!p.has_grad()) throw ShapeError("optimizer parameter has no gradient buffer");
    for (const auto& existing : params_)
        if (existing == p.data()) throw ShapeError("parameter registered twice");
    params_.push_back(p.data());
    m_.emplace_back(p.size(), 0.0);
    v_.emplace_back(p.size(), 0.0);
}

void Adam::zero_grads() {
    for (auto& p : params_) std::fill(p->grad.begin(), p->grad.end(), 0.0);
}

double Adam::grad_norm() const {
    double sq = 0.0;
    for (const auto& p : params_)
        for (double g : p->grad) sq += g * g;
    return std::sqrt(sq);
}

double Adam::step() {
    const double norm = grad_norm();
    if (!std::isfinite(norm)) throw NumericError("non-finite gradient norm in optimizer step");
    double clip = 1.0;
    if (cfg_.clip_norm > 0.0 && norm > cfg_.clip_norm) clip = cfg_.clip_norm / norm;

    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));

    for (std::size_t k = 0; k < params_.size(); ++k) {
        auto& p = *params_[k];
        auto& m = m_[k];
        auto& v = v_[k];
        for (std::size_t i = 0; i < p.val.size(); ++i) {
            const double g = p.grad[i] * clip;
            m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * g;
            v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * g * g;
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            p.val[i] -= cfg_.lr * (mhat / (std::sqrt(vhat) + cfg_.eps) +
                                   cfg_.weight_decay * p.val[i]);
        }
    }
    return norm;
}

} // namespace ncrhok::ad
