#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <random>
#include <vector>

#include "fsan/errors.hpp"

namespace fsan {

class Tape;

/// Dense real tensor of rank 1..3, double precision, row-major.
///
/// A Tensor is an immutable value. It may additionally be attached to a
/// Tape node, in which case gradients flow through it during backward().
/// Tensors without a tape are plain constants and are safe to share
/// across threads.
class Tensor {
public:
    Tensor() = default;
    Tensor(std::vector<std::size_t> shape, std::vector<double> values);

    static Tensor scalar(double v);
    static Tensor zeros(std::vector<std::size_t> shape);
    static Tensor full(std::vector<std::size_t> shape, double v);

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t size() const { return data_ ? data_->size() : 0; }
    bool empty() const { return size() == 0; }

    /// Rank-2 accessors; throw on other ranks.
    std::size_t rows() const;
    std::size_t cols() const;
    double at(std::size_t r, std::size_t c) const;

    /// Flat element access.
    double operator[](std::size_t i) const { return (*data_)[i]; }

    /// Value of a single-element tensor.
    double value() const;

    const std::vector<double>& values() const { return *data_; }
    std::shared_ptr<const std::vector<double>> data_handle() const { return data_; }

    bool requires_grad() const { return node_ >= 0; }
    int node() const { return node_; }
    Tape* tape() const { return tape_; }

private:
    friend class Tape;

    std::shared_ptr<const std::vector<double>> data_;
    std::vector<std::size_t> shape_;
    Tape* tape_ = nullptr;
    int node_ = -1;
};

/// Recorded-operation tape for reverse-mode differentiation.
///
/// Nodes are appended in forward order; backward() visits them in strict
/// reverse append order. Recording is single-threaded; a Tape lives for
/// one training step and is then reset or destroyed.
class Tape {
public:
    /// Backward rule of one node: receives the node's output gradient and
    /// accumulates into the gradients of its inputs via grad_buffer().
    using BackwardFn = std::function<void(const std::vector<double>& out_grad, Tape&)>;

    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    /// Registers a differentiable leaf (parameter) with the given value.
    Tensor watch(const std::vector<std::size_t>& shape, std::vector<double> values);

    /// Appends an operation node. `backward` may be empty for leaves.
    Tensor record(std::vector<std::size_t> shape,
                  std::shared_ptr<const std::vector<double>> values,
                  BackwardFn backward);

    /// Runs reverse accumulation from a scalar loss. Calling twice without
    /// reset() is a contract error; losses not on this tape are rejected.
    void backward(const Tensor& loss);

    /// Gradient of a tensor on this tape. Zeros if the node was never
    /// reached (unused outputs have zero gradient).
    const std::vector<double>& grad(const Tensor& t);

    /// Mutable gradient buffer for backward closures.
    std::vector<double>& grad_buffer(int node);

    bool backward_done() const { return backward_done_; }
    void reset();
    std::size_t size() const { return nodes_.size(); }

private:
    struct Node {
        std::size_t numel = 0;
        BackwardFn backward;
        std::vector<double> grad;  // lazily sized to numel
        bool touched = false;
    };

    std::vector<Node> nodes_;
    bool backward_done_ = false;
};

/// Threads the recording/training state through model forward passes.
/// With tape == nullptr every operation runs in pure value mode.
struct ForwardContext {
    Tape* tape = nullptr;
    bool training = false;          // enables dropout masks
    std::mt19937_64* rng = nullptr; // mask sampling; required when training
};

// ---- operations -----------------------------------------------------------
//
// Every op computes its value eagerly. If any input lives on a tape the
// result is recorded there with the op's backward rule; otherwise the
// result is a constant. Mixing inputs from two different tapes is a
// contract error.

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& x);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);  // elementwise
Tensor scale(const Tensor& x, double c);
Tensor add_scalar(const Tensor& x, double c);
/// x[m×n] + row[n] broadcast over rows.
Tensor add_row(const Tensor& x, const Tensor& row);

Tensor sigmoid(const Tensor& x);
Tensor relu(const Tensor& x);
/// Natural log; any element <= 0 is a domain error (callers clamp first).
Tensor log_op(const Tensor& x);
Tensor clamp(const Tensor& x, double lo, double hi);

Tensor sum(const Tensor& x);   // -> scalar
Tensor mean(const Tensor& x);  // -> scalar
/// Per-row minimum of a rank-2 tensor -> rank-1 [m]. The backward rule
/// routes the gradient to the first (lowest-index) argmin of each row.
Tensor row_min(const Tensor& x);

/// Row-wise softmax with per-row max subtraction.
Tensor softmax_rows(const Tensor& x);
/// Per-row normalization to zero mean / unit population variance followed
/// by the affine transform gain * xhat + bias. Requires cols >= 2.
Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias,
                  double eps = 1e-5);
/// Scales every column of x[d×n] to unit Euclidean norm; columns with
/// norm < eps are scaled by 1/eps instead so the result stays finite.
Tensor l2_normalize_columns(const Tensor& x, double eps = 1e-12);

Tensor slice_rows(const Tensor& x, std::size_t r0, std::size_t r1);  // [r0, r1)
Tensor slice_cols(const Tensor& x, std::size_t c0, std::size_t c1);  // [c0, c1)
Tensor concat_cols(const std::vector<Tensor>& parts);

/// Gathers table rows by id; duplicate ids accumulate gradient.
Tensor embedding_rows(const Tensor& table, const std::vector<int>& ids);

/// Inverted-dropout mask op. Identity unless ctx.training and rate > 0.
Tensor dropout(const Tensor& x, double rate, ForwardContext& ctx);

namespace detail {
std::string shape_str(const std::vector<std::size_t>& s);
/// Tape shared by the inputs (nullptr if none); throws on a mix of tapes.
Tape* common_tape(std::initializer_list<const Tensor*> xs);
}  // namespace detail

}  // namespace fsan
