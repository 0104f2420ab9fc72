#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pace/error.hpp"
#include "pace/nn.hpp"
#include "pace/optim.hpp"
#include "pace/tensor.hpp"

namespace pace {

inline constexpr double kLog2Pi = 1.8378770664093454836;

// Variational estimator q(y|x): a diagonal Gaussian whose mean and
// log-variance come from two-layer perceptrons over x. The log-variance is
// clamped to [-10, 10] so every log-likelihood stays finite.
template <typename S>
struct ClubEstimator {
    LinearLayer<S> m1, m2, v1, v2;
    Adam<S> opt;

    ClubEstimator() = default;
    ClubEstimator(std::int64_t dx, std::int64_t dy, std::int64_t hidden, Rng& rng)
        : m1(dx, hidden, rng), m2(hidden, dy, rng), v1(dx, hidden, rng), v2(hidden, dy, rng) {
        std::vector<Tensor<S>> ps;
        params(ps);
        opt = Adam<S>(ps, S(1e-4));
    }

    // (mu, logvar), each (N, dy).
    std::pair<Tensor<S>, Tensor<S>> heads(const Tensor<S>& x) const {
        Tensor<S> mu = m2.forward(elu(m1.forward(x)));
        Tensor<S> lv = clamp(v2.forward(elu(v1.forward(x))), S(-10), S(10));
        return {mu, lv};
    }

    // Same map with parameters detached: gradients reach x only.
    std::pair<Tensor<S>, Tensor<S>> heads_frozen(const Tensor<S>& x) const {
        auto frozen = [](const LinearLayer<S>& l, const Tensor<S>& in) {
            return linear(in, l.w.detach(), l.b.detach());
        };
        Tensor<S> mu = frozen(m2, elu(frozen(m1, x)));
        Tensor<S> lv = clamp(frozen(v2, elu(frozen(v1, x))), S(-10), S(10));
        return {mu, lv};
    }

    void params(std::vector<Tensor<S>>& out) const {
        m1.params(out); m2.params(out); v1.params(out); v2.params(out);
    }
    void named_params(const std::string& p, std::vector<std::pair<std::string, Tensor<S>>>& out) const {
        out.emplace_back(p + ".m1.w", m1.w); out.emplace_back(p + ".m1.b", m1.b);
        out.emplace_back(p + ".m2.w", m2.w); out.emplace_back(p + ".m2.b", m2.b);
        out.emplace_back(p + ".v1.w", v1.w); out.emplace_back(p + ".v1.b", v1.b);
        out.emplace_back(p + ".v2.w", v2.w); out.emplace_back(p + ".v2.b", v2.b);
    }
};

namespace detail {

// Row-wise log q(y_i | mu_i, lv_i), summed over dimensions: (N, 1).
template <typename S>
Tensor<S> log_q_rows(const Tensor<S>& y, const Tensor<S>& mu, const Tensor<S>& lv) {
    Tensor<S> term = add_scalar(add(mul(square(sub(y, mu)), exp(neg(lv))), lv), S(kLog2Pi));
    return mul_scalar(sum_over_cols(term), S(-0.5));
}

}  // namespace detail

// (1/N) sum_i [ log q(y_i|x_i) - (1/N) sum_j log q(y_j|x_i) ], the all-pairs
// form. The negative term collapses to column moments of y:
//   mean_j (y_jd - mu_id)^2 = m2_d - 2 mu_id m1_d + mu_id^2.
// Estimator parameters are constants here; gradients flow into x (and y).
template <typename S>
Tensor<S> club_bound(const Tensor<S>& x, const Tensor<S>& y, const ClubEstimator<S>& est) {
    if (x.ndim() != 2 || y.ndim() != 2 || x.dim(0) != y.dim(0))
        throw ContractError("club_bound: batch shapes " + shape_str(x.shape()) + " vs " +
                            shape_str(y.shape()));
    if (x.dim(0) < 2)
        throw ContractError("club_bound: the contrastive term needs at least 2 rows, got " +
                            std::to_string(x.dim(0)));
    auto [mu, lv] = est.heads_frozen(x);
    Tensor<S> pos = mean(detail::log_q_rows(y, mu, lv));

    Tensor<S> m1 = mean_over_rows(y);          // (1, dy)
    Tensor<S> m2 = mean_over_rows(square(y));  // (1, dy)
    Tensor<S> sq = add_rowvec(sub(square(mu), mul_scalar(mul_rowvec(mu, m1), S(2))), m2);
    Tensor<S> term = add_scalar(add(mul(sq, exp(neg(lv))), lv), S(kLog2Pi));
    Tensor<S> neg_rows = mul_scalar(sum_over_cols(term), S(-0.5));
    return sub(pos, mean(neg_rows));
}

// One maximum-likelihood step on the estimator: minimizes the NLL
// -(1/N) sum_i log q(y_i|x_i) with x and y treated as constants. Returns the
// NLL before the step.
template <typename S>
S fit_q_step(const Tensor<S>& x, const Tensor<S>& y, ClubEstimator<S>& est, S lr) {
    if (x.ndim() != 2 || y.ndim() != 2 || x.dim(0) != y.dim(0))
        throw ContractError("fit_q_step: batch shapes " + shape_str(x.shape()) + " vs " +
                            shape_str(y.shape()));
    Tensor<S> xd = x.detach(), yd = y.detach();
    auto [mu, lv] = est.heads(xd);
    Tensor<S> nll = neg(mean(detail::log_q_rows(yd, mu, lv)));
    S before = nll.values()[0];
    if (lr != S(0)) {
        est.opt.zero_grad();
        nll.backward();
        est.opt.set_lr(lr);
        est.opt.step();
    }
    return before;
}

// L_MI = club(e^f, e^{f0}) + club(e^f, e^{uv}); the prosody embeddings are
// constants inside this loss so the tables cannot collapse to zero to satisfy
// it.
template <typename S>
Tensor<S> mi_loss(const Tensor<S>& e_f, const Tensor<S>& e_f0, const Tensor<S>& e_uv,
                  const ClubEstimator<S>& f0_est, const ClubEstimator<S>& uv_est) {
    return add(club_bound(e_f, e_f0.detach(), f0_est), club_bound(e_f, e_uv.detach(), uv_est));
}

}  // namespace pace
