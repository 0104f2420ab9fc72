#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "pace/tensor.hpp"

namespace pace {

// Global-norm gradient clip over a parameter group. Returns the pre-clip norm.
template <typename S>
S clip_grad_norm(std::vector<Tensor<S>>& params, S max_norm) {
    S sq = 0;
    for (auto& p : params) {
        if (!p.has_grad()) continue;
        sq += p.grad().square().sum();
    }
    S norm = std::sqrt(sq);
    if (norm > max_norm && norm > S(0)) {
        S scale = max_norm / norm;
        for (auto& p : params) {
            if (!p.has_grad()) continue;
            p.grad() *= scale;
        }
    }
    return norm;
}

template <typename S>
class Adam {
public:
    Adam() = default;
    Adam(std::vector<Tensor<S>> params, S lr, S beta1 = S(0.9), S beta2 = S(0.999),
         S eps = S(1e-8))
        : params_(std::move(params)), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
        m_.reserve(params_.size());
        v_.reserve(params_.size());
        for (auto& p : params_) {
            m_.push_back(Tensor<S>::Storage::Zero(p.size()));
            v_.push_back(Tensor<S>::Storage::Zero(p.size()));
        }
    }

    void zero_grad() {
        for (auto& p : params_) p.zero_grad();
    }

    void step() {
        ++t_;
        S bc1 = S(1) - std::pow(beta1_, S(t_));
        S bc2 = S(1) - std::pow(beta2_, S(t_));
        for (std::size_t i = 0; i < params_.size(); ++i) {
            auto& p = params_[i];
            if (!p.has_grad()) continue;
            const auto& g = p.grad();
            m_[i] = beta1_ * m_[i] + (S(1) - beta1_) * g;
            v_[i] = beta2_ * v_[i] + (S(1) - beta2_) * g.square();
            p.values() -= lr_ * (m_[i] / bc1) / ((v_[i] / bc2).sqrt() + eps_);
        }
    }

    std::vector<Tensor<S>>& params() { return params_; }
    S lr() const { return lr_; }
    void set_lr(S lr) { lr_ = lr; }
    std::int64_t steps() const { return t_; }

    // checkpoint access: moment buffers and step count round-trip as blobs
    std::vector<typename Tensor<S>::Storage>& m() { return m_; }
    std::vector<typename Tensor<S>::Storage>& v() { return v_; }
    void set_steps(std::int64_t t) { t_ = t; }

private:
    std::vector<Tensor<S>> params_;
    std::vector<typename Tensor<S>::Storage> m_, v_;
    S lr_ = S(1e-3), beta1_ = S(0.9), beta2_ = S(0.999), eps_ = S(1e-8);
    std::int64_t t_ = 0;
};

}  // namespace pace
