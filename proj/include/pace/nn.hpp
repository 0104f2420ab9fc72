#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "pace/rng.hpp"
#include "pace/tensor.hpp"

namespace pace {

// Adds a (R, 1) column vector to every column of (R, C).
template <typename S>
Tensor<S> add_colvec(const Tensor<S>& a, const Tensor<S>& v) {
    if (a.ndim() != 2 || v.ndim() != 2 || v.dim(1) != 1 || v.dim(0) != a.dim(0))
        throw DimensionError("add_colvec: " + shape_str(a.shape()) + " + " + shape_str(v.shape()));
    std::int64_t r = a.dim(0), c = a.dim(1);
    Tensor<S> out = Tensor<S>::make_result(a.shape(), {a, v});
    {
        typename Tensor<S>::MatMap om(out.data(), r, c);
        typename Tensor<S>::ConstMatMap vm(v.data(), r, 1);
        om = a.matrix();
        om.colwise() += vm.col(0);
    }
    out.set_backprop([a, v, r, c](typename Tensor<S>::Impl& self) mutable {
        typename Tensor<S>::ConstMatMap gm(self.grad.data(), r, c);
        if (a.requires_grad()) {
            typename Tensor<S>::MatMap agm(a.grad().data(), r, c);
            agm += gm;
        }
        if (v.requires_grad()) {
            typename Tensor<S>::MatMap vgm(v.grad().data(), r, 1);
            vgm.col(0) += gm.rowwise().sum();
        }
    });
    return out;
}

namespace detail {

inline std::int64_t conv_out_len(std::int64_t t, std::int64_t k, std::int64_t s, std::int64_t p) {
    std::int64_t span = t + 2 * p - k;
    if (span < 0) throw DimensionError("conv: input length " + std::to_string(t) +
                                       " too short for kernel " + std::to_string(k));
    return span / s + 1;
}

// Unfold (C, T) into (C*k, T_out) patch columns; out-of-range taps are zero.
template <typename M, typename CM>
void im2col_1d(const CM& x, M& cols, std::int64_t k, std::int64_t s, std::int64_t p) {
    std::int64_t cin = x.rows(), t_in = x.cols(), t_out = cols.cols();
    cols.setZero();
    for (std::int64_t c = 0; c < cin; ++c)
        for (std::int64_t j = 0; j < k; ++j)
            for (std::int64_t t = 0; t < t_out; ++t) {
                std::int64_t src = t * s + j - p;
                if (src >= 0 && src < t_in) cols(c * k + j, t) = x(c, src);
            }
}

// Adjoint of im2col_1d: scatter-add patch columns back onto (C, T).
template <typename M, typename CM>
void col2im_1d(const CM& cols, M& x, std::int64_t k, std::int64_t s, std::int64_t p) {
    std::int64_t cin = x.rows(), t_in = x.cols(), t_out = cols.cols();
    for (std::int64_t c = 0; c < cin; ++c)
        for (std::int64_t j = 0; j < k; ++j)
            for (std::int64_t t = 0; t < t_out; ++t) {
                std::int64_t dst = t * s + j - p;
                if (dst >= 0 && dst < t_in) x(c, dst) += cols(c * k + j, t);
            }
}

}  // namespace detail

// x: (C_in, T), w: (C_out, C_in, k), b: (C_out, 1) -> (C_out, T_out).
template <typename S>
Tensor<S> conv1d(const Tensor<S>& x, const Tensor<S>& w, const Tensor<S>& b,
                 std::int64_t stride, std::int64_t pad) {
    if (x.ndim() != 2 || w.ndim() != 3)
        throw DimensionError("conv1d: x " + shape_str(x.shape()) + ", w " + shape_str(w.shape()));
    std::int64_t cin = x.dim(0), t_in = x.dim(1);
    std::int64_t cout = w.dim(0), k = w.dim(2);
    if (w.dim(1) != cin)
        throw DimensionError("conv1d: x channels " + std::to_string(cin) + " vs w " + shape_str(w.shape()));
    std::int64_t t_out = detail::conv_out_len(t_in, k, stride, pad);
    using Mat = typename Tensor<S>::Mat;
    Mat cols(cin * k, t_out);
    {
        typename Tensor<S>::ConstMatMap xm(x.data(), cin, t_in);
        detail::im2col_1d(xm, cols, k, stride, pad);
    }
    Tensor<S> out = Tensor<S>::make_result({cout, t_out}, {x, w, b});
    {
        typename Tensor<S>::MatMap om(out.data(), cout, t_out);
        typename Tensor<S>::ConstMatMap wm(w.data(), cout, cin * k);
        typename Tensor<S>::ConstMatMap bm(b.data(), cout, 1);
        om.noalias() = wm * cols;
        om.colwise() += bm.col(0);
    }
    out.set_backprop([x, w, b, cols = std::move(cols), stride, pad, cin, t_in, cout, k,
                      t_out](typename Tensor<S>::Impl& self) mutable {
        typename Tensor<S>::ConstMatMap gm(self.grad.data(), cout, t_out);
        if (w.requires_grad()) {
            typename Tensor<S>::MatMap wgm(w.grad().data(), cout, cin * k);
            wgm.noalias() += gm * cols.transpose();
        }
        if (b.requires_grad()) {
            typename Tensor<S>::MatMap bgm(b.grad().data(), cout, 1);
            bgm.col(0) += gm.rowwise().sum();
        }
        if (x.requires_grad()) {
            typename Tensor<S>::ConstMatMap wm(w.data(), cout, cin * k);
            typename Tensor<S>::Mat dcols = wm.transpose() * gm;
            typename Tensor<S>::MatMap xgm(x.grad().data(), cin, t_in);
            detail::col2im_1d(dcols, xgm, k, stride, pad);
        }
    });
    return out;
}

// x: (C_in, T), w: (C_in, C_out, k), b: (C_out, 1) -> (C_out, (T-1)*stride - 2*pad + k).
template <typename S>
Tensor<S> conv_transpose1d(const Tensor<S>& x, const Tensor<S>& w, const Tensor<S>& b,
                           std::int64_t stride, std::int64_t pad) {
    if (x.ndim() != 2 || w.ndim() != 3)
        throw DimensionError("conv_transpose1d: x " + shape_str(x.shape()) + ", w " + shape_str(w.shape()));
    std::int64_t cin = x.dim(0), t_in = x.dim(1);
    std::int64_t cout = w.dim(1), k = w.dim(2);
    if (w.dim(0) != cin)
        throw DimensionError("conv_transpose1d: x channels " + std::to_string(cin) +
                             " vs w " + shape_str(w.shape()));
    std::int64_t t_out = (t_in - 1) * stride - 2 * pad + k;
    if (t_out <= 0) throw DimensionError("conv_transpose1d: empty output");
    Tensor<S> out = Tensor<S>::make_result({cout, t_out}, {x, w, b});
    {
        // y_cols[(co*k + j), t] = sum_ci w[ci, co, j] * x[ci, t], then
        // scatter y_cols onto the output grid (adjoint of im2col).
        typename Tensor<S>::ConstMatMap wm(w.data(), cin, cout * k);
        typename Tensor<S>::ConstMatMap xm(x.data(), cin, t_in);
        typename Tensor<S>::Mat y_cols = wm.transpose() * xm;
        typename Tensor<S>::MatMap om(out.data(), cout, t_out);
        om.setZero();
        detail::col2im_1d(y_cols, om, k, stride, pad);
        typename Tensor<S>::ConstMatMap bm(b.data(), cout, 1);
        om.colwise() += bm.col(0);
    }
    out.set_backprop([x, w, b, stride, pad, cin, t_in, cout, k,
                      t_out](typename Tensor<S>::Impl& self) mutable {
        typename Tensor<S>::ConstMatMap gm(self.grad.data(), cout, t_out);
        typename Tensor<S>::Mat g_cols(cout * k, t_in);
        detail::im2col_1d(gm, g_cols, k, stride, pad);
        if (w.requires_grad()) {
            typename Tensor<S>::ConstMatMap xm(x.data(), cin, t_in);
            typename Tensor<S>::MatMap wgm(w.grad().data(), cin, cout * k);
            wgm.noalias() += xm * g_cols.transpose();
        }
        if (b.requires_grad()) {
            typename Tensor<S>::MatMap bgm(b.grad().data(), cout, 1);
            bgm.col(0) += gm.rowwise().sum();
        }
        if (x.requires_grad()) {
            typename Tensor<S>::ConstMatMap wm(w.data(), cin, cout * k);
            typename Tensor<S>::MatMap xgm(x.grad().data(), cin, t_in);
            xgm.noalias() += wm * g_cols;
        }
    });
    return out;
}

// x: (C_in, H, W), w: (C_out, C_in, kh, kw), b: (C_out, 1) -> (C_out, H_out, W_out).
template <typename S>
Tensor<S> conv2d(const Tensor<S>& x, const Tensor<S>& w, const Tensor<S>& b,
                 std::int64_t stride_h, std::int64_t stride_w,
                 std::int64_t pad_h, std::int64_t pad_w) {
    if (x.ndim() != 3 || w.ndim() != 4)
        throw DimensionError("conv2d: x " + shape_str(x.shape()) + ", w " + shape_str(w.shape()));
    std::int64_t cin = x.dim(0), h_in = x.dim(1), w_in = x.dim(2);
    std::int64_t cout = w.dim(0), kh = w.dim(2), kw = w.dim(3);
    if (w.dim(1) != cin)
        throw DimensionError("conv2d: x channels " + std::to_string(cin) + " vs w " + shape_str(w.shape()));
    std::int64_t h_out = detail::conv_out_len(h_in, kh, stride_h, pad_h);
    std::int64_t w_out = detail::conv_out_len(w_in, kw, stride_w, pad_w);
    std::int64_t patch = cin * kh * kw, npos = h_out * w_out;
    using Mat = typename Tensor<S>::Mat;
    Mat cols = Mat::Zero(patch, npos);
    {
        typename Tensor<S>::ConstMatMap xm(x.data(), cin, h_in * w_in);
        for (std::int64_t c = 0; c < cin; ++c)
            for (std::int64_t a = 0; a < kh; ++a)
                for (std::int64_t d = 0; d < kw; ++d) {
                    std::int64_t row = (c * kh + a) * kw + d;
                    for (std::int64_t i = 0; i < h_out; ++i) {
                        std::int64_t sr = i * stride_h + a - pad_h;
                        if (sr < 0 || sr >= h_in) continue;
                        for (std::int64_t j = 0; j < w_out; ++j) {
                            std::int64_t sc = j * stride_w + d - pad_w;
                            if (sc >= 0 && sc < w_in)
                                cols(row, i * w_out + j) = xm(c, sr * w_in + sc);
                        }
                    }
                }
    }
    Tensor<S> out = Tensor<S>::make_result({cout, h_out, w_out}, {x, w, b});
    {
        typename Tensor<S>::MatMap om(out.data(), cout, npos);
        typename Tensor<S>::ConstMatMap wm(w.data(), cout, patch);
        typename Tensor<S>::ConstMatMap bm(b.data(), cout, 1);
        om.noalias() = wm * cols;
        om.colwise() += bm.col(0);
    }
    out.set_backprop([x, w, b, cols = std::move(cols), stride_h, stride_w, pad_h, pad_w, cin, h_in,
                      w_in, cout, kh, kw, h_out, w_out](typename Tensor<S>::Impl& self) mutable {
        std::int64_t patch = cin * kh * kw, npos = h_out * w_out;
        typename Tensor<S>::ConstMatMap gm(self.grad.data(), cout, npos);
        if (w.requires_grad()) {
            typename Tensor<S>::MatMap wgm(w.grad().data(), cout, patch);
            wgm.noalias() += gm * cols.transpose();
        }
        if (b.requires_grad()) {
            typename Tensor<S>::MatMap bgm(b.grad().data(), cout, 1);
            bgm.col(0) += gm.rowwise().sum();
        }
        if (x.requires_grad()) {
            typename Tensor<S>::ConstMatMap wm(w.data(), cout, patch);
            typename Tensor<S>::Mat dcols = wm.transpose() * gm;
            typename Tensor<S>::MatMap xgm(x.grad().data(), cin, h_in * w_in);
            for (std::int64_t c = 0; c < cin; ++c)
                for (std::int64_t a = 0; a < kh; ++a)
                    for (std::int64_t d = 0; d < kw; ++d) {
                        std::int64_t row = (c * kh + a) * kw + d;
                        for (std::int64_t i = 0; i < h_out; ++i) {
                            std::int64_t sr = i * stride_h + a - pad_h;
                            if (sr < 0 || sr >= h_in) continue;
                            for (std::int64_t j = 0; j < w_out; ++j) {
                                std::int64_t sc = j * stride_w + d - pad_w;
                                if (sc >= 0 && sc < w_in)
                                    xgm(c, sr * w_in + sc) += dcols(row, i * w_out + j);
                            }
                        }
                    }
        }
    });
    return out;
}

// x: (N, in), w: (in, out), b: (1, out) -> (N, out).
template <typename S>
Tensor<S> linear(const Tensor<S>& x, const Tensor<S>& w, const Tensor<S>& b) {
    return add_rowvec(matmul(x, w), b);
}

// ---- parameterized layers ----

template <typename S>
struct Conv1dLayer {
    Tensor<S> w, b;
    std::int64_t stride = 1, pad = 0;

    Conv1dLayer() = default;
    Conv1dLayer(std::int64_t cin, std::int64_t cout, std::int64_t k, std::int64_t stride_,
                std::int64_t pad_, Rng& rng)
        : stride(stride_), pad(pad_) {
        w = Tensor<S>::zeros({cout, cin, k}, true);
        b = Tensor<S>::zeros({cout, 1}, true);
        S bound = S(1) / std::sqrt(S(cin * k));
        for (std::int64_t i = 0; i < w.size(); ++i) w.values()[i] = S(rng.uniform(-bound, bound));
        for (std::int64_t i = 0; i < b.size(); ++i) b.values()[i] = S(rng.uniform(-bound, bound));
    }

    Tensor<S> forward(const Tensor<S>& x) const { return conv1d(x, w, b, stride, pad); }
    void params(std::vector<Tensor<S>>& out) const { out.push_back(w); out.push_back(b); }
};

template <typename S>
struct ConvT1dLayer {
    Tensor<S> w, b;
    std::int64_t stride = 1, pad = 0;

    ConvT1dLayer() = default;
    ConvT1dLayer(std::int64_t cin, std::int64_t cout, std::int64_t k, std::int64_t stride_,
                 std::int64_t pad_, Rng& rng)
        : stride(stride_), pad(pad_) {
        w = Tensor<S>::zeros({cin, cout, k}, true);
        b = Tensor<S>::zeros({cout, 1}, true);
        S bound = S(1) / std::sqrt(S(cin * k));
        for (std::int64_t i = 0; i < w.size(); ++i) w.values()[i] = S(rng.uniform(-bound, bound));
        for (std::int64_t i = 0; i < b.size(); ++i) b.values()[i] = S(rng.uniform(-bound, bound));
    }

    Tensor<S> forward(const Tensor<S>& x) const { return conv_transpose1d(x, w, b, stride, pad); }
    void params(std::vector<Tensor<S>>& out) const { out.push_back(w); out.push_back(b); }
};

template <typename S>
struct Conv2dLayer {
    Tensor<S> w, b;
    std::int64_t stride_h = 1, stride_w = 1, pad_h = 0, pad_w = 0;

    Conv2dLayer() = default;
    Conv2dLayer(std::int64_t cin, std::int64_t cout, std::int64_t kh, std::int64_t kw,
                std::int64_t sh, std::int64_t sw, std::int64_t ph, std::int64_t pw, Rng& rng)
        : stride_h(sh), stride_w(sw), pad_h(ph), pad_w(pw) {
        w = Tensor<S>::zeros({cout, cin, kh, kw}, true);
        b = Tensor<S>::zeros({cout, 1}, true);
        S bound = S(1) / std::sqrt(S(cin * kh * kw));
        for (std::int64_t i = 0; i < w.size(); ++i) w.values()[i] = S(rng.uniform(-bound, bound));
        for (std::int64_t i = 0; i < b.size(); ++i) b.values()[i] = S(rng.uniform(-bound, bound));
    }

    Tensor<S> forward(const Tensor<S>& x) const {
        return conv2d(x, w, b, stride_h, stride_w, pad_h, pad_w);
    }
    void params(std::vector<Tensor<S>>& out) const { out.push_back(w); out.push_back(b); }
};

template <typename S>
struct LinearLayer {
    Tensor<S> w, b;

    LinearLayer() = default;
    LinearLayer(std::int64_t in, std::int64_t out, Rng& rng) {
        w = Tensor<S>::zeros({in, out}, true);
        b = Tensor<S>::zeros({1, out}, true);
        S bound = S(1) / std::sqrt(S(in));
        for (std::int64_t i = 0; i < w.size(); ++i) w.values()[i] = S(rng.uniform(-bound, bound));
        for (std::int64_t i = 0; i < b.size(); ++i) b.values()[i] = S(rng.uniform(-bound, bound));
    }

    Tensor<S> forward(const Tensor<S>& x) const { return linear(x, w, b); }
    void params(std::vector<Tensor<S>>& out) const { out.push_back(w); out.push_back(b); }
};

template <typename S>
struct EmbeddingTable {
    Tensor<S> table;  // (V, dim)

    EmbeddingTable() = default;
    EmbeddingTable(std::int64_t v, std::int64_t dim, Rng& rng, S scale = S(0.1)) {
        table = Tensor<S>::zeros({v, dim}, true);
        for (std::int64_t i = 0; i < table.size(); ++i)
            table.values()[i] = S(rng.normal()) * scale;
    }

    Tensor<S> forward(const std::vector<std::int64_t>& idx) const {
        return gather_rows(table, idx);
    }
    void params(std::vector<Tensor<S>>& out) const { out.push_back(table); }
};

}  // namespace pace
