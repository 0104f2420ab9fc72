#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "pace/error.hpp"

namespace pace {

using Shape = std::vector<std::int64_t>;

inline std::int64_t shape_numel(const Shape& s) {
    std::int64_t n = 1;
    for (auto d : s) n *= d;
    return n;
}

inline std::string shape_str(const Shape& s) {
    std::string out = "(";
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) out += ", ";
        out += std::to_string(s[i]);
    }
    return out + ")";
}

// Dense array with reverse-mode automatic differentiation. A Tensor is a
// cheap handle onto shared storage; ops are free functions that build a
// graph of backward closures. Values are row-major over the logical shape.
template <typename S>
class Tensor {
public:
    using Storage = Eigen::Array<S, Eigen::Dynamic, 1>;
    using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    using MatMap = Eigen::Map<Mat>;
    using ConstMatMap = Eigen::Map<const Mat>;

    struct Impl {
        Shape shape;
        Storage values;
        Storage grad;  // size 0 until first accumulation
        bool requires_grad = false;
        std::vector<Tensor> parents;   // graph edges for the topo sort
        std::function<void(Impl&)> backprop;  // reads self.grad, writes parents' grads

        Storage& grad_buf() {
            if (grad.size() == 0) grad = Storage::Zero(values.size());
            return grad;
        }
    };

    Tensor() = default;

    bool defined() const { return impl_ != nullptr; }

    static Tensor zeros(Shape shape, bool requires_grad = false) {
        Tensor t;
        t.impl_ = std::make_shared<Impl>();
        std::int64_t n = shape_numel(shape);
        t.impl_->shape = std::move(shape);
        t.impl_->values = Storage::Zero(n);
        t.impl_->requires_grad = requires_grad;
        return t;
    }

    static Tensor full(Shape shape, S value, bool requires_grad = false) {
        Tensor t = zeros(std::move(shape), requires_grad);
        t.impl_->values.setConstant(value);
        return t;
    }

    static Tensor scalar(S value, bool requires_grad = false) {
        return full({1}, value, requires_grad);
    }

    static Tensor from(Shape shape, std::vector<S> values, bool requires_grad = false) {
        if (static_cast<std::int64_t>(values.size()) != shape_numel(shape))
            throw DimensionError("tensor init: " + std::to_string(values.size()) +
                                 " values for shape " + shape_str(shape));
        Tensor t = zeros(std::move(shape), requires_grad);
        for (std::int64_t i = 0; i < t.size(); ++i) t.impl_->values[i] = values[i];
        return t;
    }

    const Shape& shape() const { return impl_->shape; }
    int ndim() const { return static_cast<int>(impl_->shape.size()); }
    std::int64_t dim(int i) const { return impl_->shape[static_cast<std::size_t>(i)]; }
    std::int64_t size() const { return impl_->values.size(); }

    // Handles have pointer semantics: a const Tensor still exposes mutable
    // storage, the way a shared_ptr's pointee stays mutable.
    S* data() const { return impl_->values.data(); }

    Storage& values() const { return impl_->values; }

    S value() const {
        if (size() != 1) throw ContractError("value(): tensor is not scalar, shape " + shape_str(shape()));
        return impl_->values[0];
    }

    S at(std::int64_t i) const { return impl_->values[i]; }
    S at(std::int64_t r, std::int64_t c) const { return impl_->values[r * dim(1) + c]; }

    // 2-D matrix view (rows = dim 0).
    MatMap matrix() const {
        require_2d();
        return MatMap(impl_->values.data(), dim(0), dim(1));
    }

    bool requires_grad() const { return impl_->requires_grad; }
    const Tensor& set_requires_grad(bool v) const {
        impl_->requires_grad = v;
        return *this;
    }

    bool has_grad() const { return impl_->grad.size() != 0; }
    Storage& grad() const { return impl_->grad_buf(); }

    void zero_grad() const {
        if (impl_->grad.size() != 0) impl_->grad.setZero();
    }

    // Same storage copy, no graph membership, no gradient flow.
    Tensor detach() const {
        Tensor t;
        t.impl_ = std::make_shared<Impl>();
        t.impl_->shape = impl_->shape;
        t.impl_->values = impl_->values;
        t.impl_->requires_grad = false;
        return t;
    }

    // Reverse-mode sweep from a scalar loss. Gradients accumulate, so
    // repeated calls without zero_grad() add up.
    void backward(bool check_finite = false) const {
        if (size() != 1)
            throw ContractError("backward(): loss must be scalar, shape " + shape_str(shape()));
        if (!impl_->requires_grad) return;
        std::vector<Impl*> order;
        topo_sort(order);
        // interior grads are per-sweep scratch; only leaves accumulate
        for (Impl* node : order)
            if (node->backprop && node->grad.size() != 0) node->grad.setZero();
        impl_->grad_buf()[0] += S(1);
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            Impl* node = *it;
            if (node->backprop) node->backprop(*node);
        }
        if (check_finite) {
            for (Impl* node : order) {
                if (node->grad.size() == 0) continue;
                if (!node->grad.isFinite().all())
                    throw ContractError("backward(): non-finite gradient encountered");
            }
        }
    }

    // Drops backward closures and parent edges below this node. Call on
    // roots that outlive a training step to release the graph eagerly.
    void release_graph() const {
        std::vector<Impl*> order;
        topo_sort(order);
        for (Impl* node : order) {
            node->backprop = nullptr;
            node->parents.clear();
        }
    }

    // -- graph construction (used by op implementations) --

    static Tensor make_result(Shape shape, std::vector<Tensor> parents) {
        Tensor t = zeros(std::move(shape));
        bool req = false;
        for (const auto& p : parents) req = req || p.requires_grad();
        t.impl_->requires_grad = req;
        if (req) t.impl_->parents = std::move(parents);
        return t;
    }

    void set_backprop(std::function<void(Impl&)> fn) {
        if (impl_->requires_grad) impl_->backprop = std::move(fn);
    }

    Impl* impl() const { return impl_.get(); }

private:
    void require_2d() const {
        if (ndim() != 2) throw DimensionError("expected 2-D tensor, got shape " + shape_str(shape()));
    }

    void topo_sort(std::vector<Impl*>& order) const {
        // Iterative post-order DFS over grad-requiring nodes.
        std::unordered_set<Impl*> seen;
        std::vector<std::pair<Impl*, std::size_t>> stack;
        stack.emplace_back(impl_.get(), 0);
        seen.insert(impl_.get());
        while (!stack.empty()) {
            auto& top = stack.back();
            Impl* node = top.first;
            if (top.second < node->parents.size()) {
                Impl* p = node->parents[top.second++].impl_.get();
                if (p->requires_grad && !seen.count(p)) {
                    seen.insert(p);
                    stack.emplace_back(p, 0);
                }
            } else {
                order.push_back(node);
                stack.pop_back();
            }
        }
    }

    std::shared_ptr<Impl> impl_;
};

namespace detail {

template <typename S>
void require_same_shape(const Tensor<S>& a, const Tensor<S>& b, const char* op) {
    if (a.shape() != b.shape())
        throw DimensionError(std::string(op) + ": shape mismatch " + shape_str(a.shape()) +
                             " vs " + shape_str(b.shape()));
}

// Binary ops broadcast a size-1 operand against any shape.
template <typename S>
bool is_scalar_like(const Tensor<S>& t) {
    return t.size() == 1;
}

}  // namespace detail

// ---- elementwise binary ops (with scalar broadcast) ----

template <typename S>
Tensor<S> add(const Tensor<S>& a, const Tensor<S>& b) {
    if (!detail::is_scalar_like(a) && !detail::is_scalar_like(b))
        detail::require_same_shape(a, b, "add");
    const Tensor<S>& big = detail::is_scalar_like(a) && !detail::is_scalar_like(b) ? b : a;
    Tensor<S> out = Tensor<S>::make_result(big.shape(), {a, b});
    if (detail::is_scalar_like(a) && !detail::is_scalar_like(b))
        out.values() = b.values() + a.at(0);
    else if (detail::is_scalar_like(b) && !detail::is_scalar_like(a))
        out.values() = a.values() + b.at(0);
    else
        out.values() = a.values() + b.values();
    out.set_backprop([a, b](typename Tensor<S>::Impl& self) mutable {
        if (a.requires_grad()) {
            if (a.size() == self.grad.size()) a.grad() += self.grad;
            else a.grad()[0] += self.grad.sum();
        }
        if (b.requires_grad()) {
            if (b.size() == self.grad.size()) b.grad() += self.grad;
            else b.grad()[0] += self.grad.sum();
        }
    });
    return out;
}

template <typename S>
Tensor<S> sub(const Tensor<S>& a, const Tensor<S>& b) {
    return add(a, neg(b));
}

template <typename S>
Tensor<S> mul(const Tensor<S>& a, const Tensor<S>& b) {
    if (!detail::is_scalar_like(a) && !detail::is_scalar_like(b))
        detail::require_same_shape(a, b, "mul");
    const Tensor<S>& big = detail::is_scalar_like(a) && !detail::is_scalar_like(b) ? b : a;
    Tensor<S> out = Tensor<S>::make_result(big.shape(), {a, b});
    if (detail::is_scalar_like(a) && !detail::is_scalar_like(b))
        out.values() = b.values() * a.at(0);
    else if (detail::is_scalar_like(b) && !detail::is_scalar_like(a))
        out.values() = a.values() * b.at(0);
    else
        out.values() = a.values() * b.values();
    out.set_backprop([a, b](typename Tensor<S>::Impl& self) mutable {
        if (a.requires_grad()) {
            if (a.size() == 1 && self.grad.size() != 1)
                a.grad()[0] += (self.grad * b.values()).sum();
            else if (b.size() == 1 && a.size() != 1)
                a.grad() += self.grad * b.at(0);
            else
                a.grad() += self.grad * b.values();
        }
        if (b.requires_grad()) {
            if (b.size() == 1 && self.grad.size() != 1)
                b.grad()[0] += (self.grad * a.values()).sum();
            else if (a.size() == 1 && b.size() != 1)
                b.grad() += self.grad * a.at(0);
            else
                b.grad() += self.grad * a.values();
        }
    });
    return out;
}

template <typename S>
Tensor<S> div(const Tensor<S>& a, const Tensor<S>& b) {
    return mul(a, pow_scalar(b, S(-1)));
}

// ---- elementwise unary ops ----

// bwd receives the input tensor and the output node (self.values holds the
// forward result, self.grad the incoming gradient).
template <typename S, typename Fwd, typename Bwd>
Tensor<S> unary_op(const Tensor<S>& a, Fwd fwd, Bwd bwd) {
    Tensor<S> out = Tensor<S>::make_result(a.shape(), {a});
    fwd(a.values(), out.values());
    out.set_backprop([a, bwd](typename Tensor<S>::Impl& self) mutable {
        if (a.requires_grad()) bwd(a, self);
    });
    return out;
}

template <typename S>
Tensor<S> neg(const Tensor<S>& a) {
    return unary_op(
        a, [](const auto& x, auto& y) { y = -x; },
        [](auto& ta, auto& self) { ta.grad() -= self.grad; });
}

template <typename S>
Tensor<S> exp(const Tensor<S>& a) {
    return unary_op(
        a, [](const auto& x, auto& y) { y = x.exp(); },
        [](auto& ta, auto& self) { ta.grad() += self.grad * self.values; });
}

template <typename S>
Tensor<S> log(const Tensor<S>& a) {
    return unary_op(
        a, [](const auto& x, auto& y) { y = x.log(); },
        [](auto& ta, auto& self) { ta.grad() += self.grad / ta.values(); });
}

template <typename S>
Tensor<S> sqrt(const Tensor<S>& a) {
    return unary_op(
        a, [](const auto& x, auto& y) { y = x.sqrt(); },
        [](auto& ta, auto& self) {
            // guard: derivative at exact zero would divide by zero
            ta.grad() += self.grad / (S(2) * self.values.max(S(1e-12)));
        });
}

template <typename S>
Tensor<S> square(const Tensor<S>& a) {
    return unary_op(
        a, [](const auto& x, auto& y) { y = x.square(); },
        [](auto& ta, auto& self) { ta.grad() += self.grad * S(2) * ta.values(); });
}

template <typename S>
Tensor<S> abs(const Tensor<S>& a) {
    return unary_op(
        a, [](const auto& x, auto& y) { y = x.abs(); },
        [](auto& ta, auto& self) { ta.grad() += self.grad * ta.values().sign(); });
}

template <typename S>
Tensor<S> pow_scalar(const Tensor<S>& a, S p) {
    return unary_op(
        a, [p](const auto& x, auto& y) { y = x.pow(p); },
        [p](auto& ta, auto& self) { ta.grad() += self.grad * p * ta.values().pow(p - S(1)); });
}

template <typename S>
Tensor<S> mul_scalar(const Tensor<S>& a, S c) {
    return unary_op(
        a, [c](const auto& x, auto& y) { y = x * c; },
        [c](auto& ta, auto& self) { ta.grad() += self.grad * c; });
}

template <typename S>
Tensor<S> add_scalar(const Tensor<S>& a, S c) {
    return unary_op(
        a, [c](const auto& x, auto& y) { y = x + c; },
        [](auto& ta, auto& self) { ta.grad() += self.grad; });
}

template <typename S>
Tensor<S> relu(const Tensor<S>& a) {
    return unary_op(
        a, [](const auto& x, auto& y) { y = x.max(S(0)); },
        [](auto& ta, auto& self) {
            ta.grad() += self.grad * (ta.values() > S(0)).template cast<S>();
        });
}

template <typename S>
Tensor<S> elu(const Tensor<S>& a) {
    return unary_op(
        a,
        [](const auto& x, auto& y) { y = (x > S(0)).select(x, x.exp() - S(1)); },
        [](auto& ta, auto& self) {
            // d/dx = 1 for x>0, exp(x) = y+1 for x<=0; both equal min(y+1, 1)
            ta.grad() += self.grad * (self.values + S(1)).min(S(1));
        });
}

template <typename S>
Tensor<S> tanh(const Tensor<S>& a) {
    return unary_op(
        a, [](const auto& x, auto& y) { y = x.tanh(); },
        [](auto& ta, auto& self) { ta.grad() += self.grad * (S(1) - self.values.square()); });
}

// Clamp with zero gradient outside [lo, hi].
template <typename S>
Tensor<S> clamp(const Tensor<S>& a, S lo, S hi) {
    return unary_op(
        a, [lo, hi](const auto& x, auto& y) { y = x.max(lo).min(hi); },
        [lo, hi](auto& ta, auto& self) {
            ta.grad() += self.grad * ((ta.values() >= lo) && (ta.values() <= hi)).template cast<S>();
        });
}

// ---- reductions ----

template <typename S>
Tensor<S> sum(const Tensor<S>& a) {
    Tensor<S> out = Tensor<S>::make_result({1}, {a});
    out.values()[0] = a.values().sum();
    out.set_backprop([a](typename Tensor<S>::Impl& self) mutable {
        if (a.requires_grad()) a.grad() += self.grad[0];
    });
    return out;
}

template <typename S>
Tensor<S> mean(const Tensor<S>& a) {
    Tensor<S> out = Tensor<S>::make_result({1}, {a});
    out.values()[0] = a.values().mean();
    std::int64_t n = a.size();
    out.set_backprop([a, n](typename Tensor<S>::Impl& self) mutable {
        if (a.requires_grad()) a.grad() += self.grad[0] / S(n);
    });
    return out;
}

// Column means of a 2-D tensor: (R, C) -> (1, C).
template <typename S>
Tensor<S> mean_over_rows(const Tensor<S>& a) {
    if (a.ndim() != 2) throw DimensionError("mean_over_rows: need 2-D, got " + shape_str(a.shape()));
    std::int64_t r = a.dim(0), c = a.dim(1);
    Tensor<S> out = Tensor<S>::make_result({1, c}, {a});
    {
        auto am = a.matrix();
        typename Tensor<S>::MatMap om(out.data(), 1, c);
        om = am.colwise().mean();
    }
    out.set_backprop([a, r, c](typename Tensor<S>::Impl& self) mutable {
        if (!a.requires_grad()) return;
        typename Tensor<S>::ConstMatMap gm(self.grad.data(), 1, c);
        typename Tensor<S>::MatMap agm(a.grad().data(), r, c);
        agm.rowwise() += gm.row(0) / S(r);
    });
    return out;
}

// Row sums of a 2-D tensor: (R, C) -> (R, 1).
template <typename S>
Tensor<S> sum_over_cols(const Tensor<S>& a) {
    if (a.ndim() != 2) throw DimensionError("sum_over_cols: need 2-D, got " + shape_str(a.shape()));
    std::int64_t r = a.dim(0), c = a.dim(1);
    Tensor<S> out = Tensor<S>::make_result({r, 1}, {a});
    {
        auto am = a.matrix();
        typename Tensor<S>::MatMap om(out.data(), r, 1);
        om = am.rowwise().sum();
    }
    out.set_backprop([a, r, c](typename Tensor<S>::Impl& self) mutable {
        if (!a.requires_grad()) return;
        typename Tensor<S>::ConstMatMap gm(self.grad.data(), r, 1);
        typename Tensor<S>::MatMap agm(a.grad().data(), r, c);
        agm.colwise() += gm.col(0);
    });
    return out;
}

// ---- shape ops ----

template <typename S>
Tensor<S> reshape(const Tensor<S>& a, Shape shape) {
    if (shape_numel(shape) != a.size())
        throw DimensionError("reshape: " + shape_str(a.shape()) + " -> " + shape_str(shape) +
                             " changes element count");
    Tensor<S> out = Tensor<S>::make_result(std::move(shape), {a});
    out.values() = a.values();
    out.set_backprop([a](typename Tensor<S>::Impl& self) mutable {
        if (a.requires_grad()) a.grad() += self.grad;
    });
    return out;
}

template <typename S>
Tensor<S> transpose(const Tensor<S>& a) {
    if (a.ndim() != 2) throw DimensionError("transpose: need 2-D, got " + shape_str(a.shape()));
    std::int64_t r = a.dim(0), c = a.dim(1);
    Tensor<S> out = Tensor<S>::make_result({c, r}, {a});
    {
        typename Tensor<S>::MatMap om(out.data(), c, r);
        om = a.matrix().transpose();
    }
    out.set_backprop([a, r, c](typename Tensor<S>::Impl& self) mutable {
        if (!a.requires_grad()) return;
        typename Tensor<S>::ConstMatMap gm(self.grad.data(), c, r);
        typename Tensor<S>::MatMap agm(a.grad().data(), r, c);
        agm += gm.transpose();
    });
    return out;
}

// (R, K) x (K, C) -> (R, C)
template <typename S>
Tensor<S> matmul(const Tensor<S>& a, const Tensor<S>& b) {
    if (a.ndim() != 2 || b.ndim() != 2)
        throw DimensionError("matmul: need 2-D operands");
    if (a.dim(1) != b.dim(0))
        throw DimensionError("matmul: inner dims " + shape_str(a.shape()) + " x " + shape_str(b.shape()));
    std::int64_t r = a.dim(0), k = a.dim(1), c = b.dim(1);
    Tensor<S> out = Tensor<S>::make_result({r, c}, {a, b});
    {
        typename Tensor<S>::MatMap om(out.data(), r, c);
        om.noalias() = a.matrix() * b.matrix();
    }
    out.set_backprop([a, b, r, k, c](typename Tensor<S>::Impl& self) mutable {
        typename Tensor<S>::ConstMatMap gm(self.grad.data(), r, c);
        if (a.requires_grad()) {
            typename Tensor<S>::MatMap agm(a.grad().data(), r, k);
            agm.noalias() += gm * b.matrix().transpose();
        }
        if (b.requires_grad()) {
            typename Tensor<S>::MatMap bgm(b.grad().data(), k, c);
            bgm.noalias() += a.matrix().transpose() * gm;
        }
    });
    return out;
}

// Adds a (1, C) row vector to every row of (R, C).
template <typename S>
Tensor<S> add_rowvec(const Tensor<S>& a, const Tensor<S>& v) {
    if (a.ndim() != 2 || v.ndim() != 2 || v.dim(0) != 1 || v.dim(1) != a.dim(1))
        throw DimensionError("add_rowvec: " + shape_str(a.shape()) + " + " + shape_str(v.shape()));
    std::int64_t r = a.dim(0), c = a.dim(1);
    Tensor<S> out = Tensor<S>::make_result(a.shape(), {a, v});
    {
        typename Tensor<S>::MatMap om(out.data(), r, c);
        typename Tensor<S>::ConstMatMap vm(v.data(), 1, c);
        om = a.matrix();
        om.rowwise() += vm.row(0);
    }
    out.set_backprop([a, v, r, c](typename Tensor<S>::Impl& self) mutable {
        typename Tensor<S>::ConstMatMap gm(self.grad.data(), r, c);
        if (a.requires_grad()) {
            typename Tensor<S>::MatMap agm(a.grad().data(), r, c);
            agm += gm;
        }
        if (v.requires_grad()) {
            typename Tensor<S>::MatMap vgm(v.grad().data(), 1, c);
            vgm.row(0) += gm.colwise().sum();
        }
    });
    return out;
}

// Multiplies every row of (R, C) by a (1, C) row vector.
template <typename S>
Tensor<S> mul_rowvec(const Tensor<S>& a, const Tensor<S>& v) {
    if (a.ndim() != 2 || v.ndim() != 2 || v.dim(0) != 1 || v.dim(1) != a.dim(1))
        throw DimensionError("mul_rowvec: " + shape_str(a.shape()) + " * " + shape_str(v.shape()));
    std::int64_t r = a.dim(0), c = a.dim(1);
    Tensor<S> out = Tensor<S>::make_result(a.shape(), {a, v});
    {
        typename Tensor<S>::MatMap om(out.data(), r, c);
        typename Tensor<S>::ConstMatMap vm(v.data(), 1, c);
        om = a.matrix().array().rowwise() * vm.row(0).array();
    }
    out.set_backprop([a, v, r, c](typename Tensor<S>::Impl& self) mutable {
        typename Tensor<S>::ConstMatMap gm(self.grad.data(), r, c);
        typename Tensor<S>::ConstMatMap vm(v.data(), 1, c);
        if (a.requires_grad()) {
            typename Tensor<S>::MatMap agm(a.grad().data(), r, c);
            agm.array() += gm.array().rowwise() * vm.row(0).array();
        }
        if (v.requires_grad()) {
            typename Tensor<S>::MatMap vgm(v.grad().data(), 1, c);
            vgm.row(0).array() += (gm.array() * a.matrix().array()).colwise().sum();
        }
    });
    return out;
}

// Concatenate 2-D tensors along dim 0.
template <typename S>
Tensor<S> concat_rows(const std::vector<Tensor<S>>& parts) {
    if (parts.empty()) throw ContractError("concat_rows: empty input");
    std::int64_t c = parts[0].dim(1), r = 0;
    for (const auto& p : parts) {
        if (p.ndim() != 2 || p.dim(1) != c)
            throw DimensionError("concat_rows: column mismatch");
        r += p.dim(0);
    }
    Tensor<S> out = Tensor<S>::make_result({r, c}, parts);
    {
        typename Tensor<S>::MatMap om(out.data(), r, c);
        std::int64_t row = 0;
        for (const auto& p : parts) {
            om.middleRows(row, p.dim(0)) = p.matrix();
            row += p.dim(0);
        }
    }
    std::vector<Tensor<S>> caps = parts;
    out.set_backprop([caps, r, c](typename Tensor<S>::Impl& self) mutable {
        typename Tensor<S>::ConstMatMap gm(self.grad.data(), r, c);
        std::int64_t row = 0;
        for (auto& p : caps) {
            if (p.requires_grad()) {
                typename Tensor<S>::MatMap pg(p.grad().data(), p.dim(0), c);
                pg += gm.middleRows(row, p.dim(0));
            }
            row += p.dim(0);
        }
    });
    return out;
}

// Concatenate 2-D tensors along dim 1.
template <typename S>
Tensor<S> concat_cols(const std::vector<Tensor<S>>& parts) {
    if (parts.empty()) throw ContractError("concat_cols: empty input");
    std::int64_t r = parts[0].dim(0), c = 0;
    for (const auto& p : parts) {
        if (p.ndim() != 2 || p.dim(0) != r)
            throw DimensionError("concat_cols: row mismatch");
        c += p.dim(1);
    }
    Tensor<S> out = Tensor<S>::make_result({r, c}, parts);
    {
        typename Tensor<S>::MatMap om(out.data(), r, c);
        std::int64_t col = 0;
        for (const auto& p : parts) {
            om.middleCols(col, p.dim(1)) = p.matrix();
            col += p.dim(1);
        }
    }
    std::vector<Tensor<S>> caps = parts;
    out.set_backprop([caps, r, c](typename Tensor<S>::Impl& self) mutable {
        typename Tensor<S>::ConstMatMap gm(self.grad.data(), r, c);
        std::int64_t col = 0;
        for (auto& p : caps) {
            if (p.requires_grad()) {
                typename Tensor<S>::MatMap pg(p.grad().data(), r, p.dim(1));
                pg += gm.middleCols(col, p.dim(1));
            }
            col += p.dim(1);
        }
    });
    return out;
}

// Row slice [begin, begin+count) of a 2-D tensor.
template <typename S>
Tensor<S> slice_rows(const Tensor<S>& a, std::int64_t begin, std::int64_t count) {
    if (a.ndim() != 2) throw DimensionError("slice_rows: need 2-D");
    if (begin < 0 || count < 0 || begin + count > a.dim(0))
        throw IndexError("slice_rows: [" + std::to_string(begin) + ", " +
                         std::to_string(begin + count) + ") out of " + std::to_string(a.dim(0)));
    std::int64_t c = a.dim(1);
    Tensor<S> out = Tensor<S>::make_result({count, c}, {a});
    {
        typename Tensor<S>::MatMap om(out.data(), count, c);
        om = a.matrix().middleRows(begin, count);
    }
    out.set_backprop([a, begin, count, c](typename Tensor<S>::Impl& self) mutable {
        if (!a.requires_grad()) return;
        typename Tensor<S>::ConstMatMap gm(self.grad.data(), count, c);
        typename Tensor<S>::MatMap agm(a.grad().data(), a.dim(0), c);
        agm.middleRows(begin, count) += gm;
    });
    return out;
}

// Gather rows of a (V, C) table by index: out[i] = table[idx[i]].
template <typename S>
Tensor<S> gather_rows(const Tensor<S>& table, const std::vector<std::int64_t>& idx) {
    if (table.ndim() != 2) throw DimensionError("gather_rows: table must be 2-D");
    std::int64_t v = table.dim(0), c = table.dim(1);
    for (std::size_t i = 0; i < idx.size(); ++i)
        if (idx[i] < 0 || idx[i] >= v)
            throw IndexError("gather_rows: index " + std::to_string(idx[i]) + " at position " +
                             std::to_string(i) + " outside table of " + std::to_string(v) + " rows");
    std::int64_t n = static_cast<std::int64_t>(idx.size());
    Tensor<S> out = Tensor<S>::make_result({n, c}, {table});
    {
        typename Tensor<S>::MatMap om(out.data(), n, c);
        auto tm = table.matrix();
        for (std::int64_t i = 0; i < n; ++i) om.row(i) = tm.row(idx[static_cast<std::size_t>(i)]);
    }
    out.set_backprop([table, idx, n, c](typename Tensor<S>::Impl& self) mutable {
        if (!table.requires_grad()) return;
        typename Tensor<S>::ConstMatMap gm(self.grad.data(), n, c);
        typename Tensor<S>::MatMap tgm(table.grad().data(), table.dim(0), c);
        for (std::int64_t i = 0; i < n; ++i) tgm.row(idx[static_cast<std::size_t>(i)]) += gm.row(i);
    });
    return out;
}

// Forward passes `values`, backward routes gradients to `grad_path`.
// Used where a non-differentiable map (quantization) sits between them.
template <typename S>
Tensor<S> straight_through(const Tensor<S>& values, const Tensor<S>& grad_path) {
    detail::require_same_shape(values, grad_path, "straight_through");
    Tensor<S> out = Tensor<S>::make_result(values.shape(), {grad_path});
    out.values() = values.values();
    out.set_backprop([grad_path](typename Tensor<S>::Impl& self) mutable {
        if (grad_path.requires_grad()) grad_path.grad() += self.grad;
    });
    return out;
}

}  // namespace pace
