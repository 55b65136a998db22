#pragma once

#include <functional>
#include <memory>
#include <vector>

namespace ncrhok::ad {

/**
 * Dense row-major 2-D tensor of doubles. Tensors are cheap handles sharing
 * their storage; a tensor created on (or watched by) a Tape participates in
 * reverse-mode differentiation, a free tensor is a plain value.
 */
class Tape;

struct TensorData {
    int rows = 0, cols = 0;
    std::vector<double> val;
    std::vector<double> grad; ///< empty when the tensor does not carry gradients
};

class Tensor {
public:
    Tensor() = default;
    Tensor(std::shared_ptr<TensorData> d, Tape* tape) : d_(std::move(d)), tape_(tape) {}

    bool defined() const { return static_cast<bool>(d_); }
    int rows() const { return d_->rows; }
    int cols() const { return d_->cols; }
    std::size_t size() const { return d_->val.size(); }

    const std::vector<double>& value() const { return d_->val; }
    std::vector<double>& value() { return d_->val; }
    const std::vector<double>& grad() const { return d_->grad; }
    std::vector<double>& grad() { return d_->grad; }
    bool has_grad() const { return defined() && !d_->grad.empty(); }

    Tape* tape() const { return tape_; }
    const std::shared_ptr<TensorData>& data() const { return d_; }

private:
    std::shared_ptr<TensorData> d_;
    Tape* tape_ = nullptr;
};

/** Value tensor outside any tape (no gradient). */
Tensor make_tensor(int rows, int cols, std::vector<double> val);
Tensor make_tensor(int rows, int cols, double fill = 0.0);

/**
 * Records the forward DAG; backward() replays it in reverse. One tape per
 * forward pass; tapes are single-threaded and discarded after use.
 */
class Tape {
public:
    /** New leaf tensor carrying gradients. */
    Tensor leaf(int rows, int cols, std::vector<double> val);
    Tensor leaf(int rows, int cols, double fill = 0.0);

    /**
     * Adopt a persistent tensor (e.g. a model parameter) for this pass. The
     * returned handle shares value and gradient storage, so backward()
     * accumulates into the persistent gradient buffer.
     */
    Tensor watch(const Tensor& t);

    /** Seed d(loss)/d(loss) = 1 and propagate; loss must be 1x1 on this tape. */
    void backward(const Tensor& loss);

    std::size_t num_nodes() const { return backs_.size(); }

    // Internal: used by ops to register backward closures.
    void record(std::function<void()> fn) { backs_.push_back(std::move(fn)); }

private:
    std::vector<std::function<void()>> backs_;
};

/**
 * Contiguous partition of `member.size()` entries into groups: group g spans
 * member indices [offsets[g], offsets[g+1]). Used for neighbor lists and
 * hyperedge membership in attention softmax/aggregation ops.
 */
struct Groups {
    std::vector<int> offsets{0};
    std::vector<int> member;

    int num_groups() const { return static_cast<int>(offsets.size()) - 1; }
    int num_entries() const { return static_cast<int>(member.size()); }
    void push_group(const std::vector<int>& members) {
        member.insert(member.end(), members.begin(), members.end());
        offsets.push_back(static_cast<int>(member.size()));
    }
};

// --- differentiable ops -----------------------------------------------------

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor add(const Tensor& a, const Tensor& b);
/** Broadcast-add a [1 x n] bias row to every row of a. */
Tensor add_rowvec(const Tensor& a, const Tensor& bias);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double c);
Tensor relu(const Tensor& a);
Tensor leaky_relu(const Tensor& a, double slope);
Tensor sigmoid(const Tensor& a);
/** Column-concatenate tensors with equal row counts. */
Tensor concat_cols(const std::vector<Tensor>& parts);
/** Row-major reshape (copy) to [rows x cols]; element count must match. */
Tensor reshape(const Tensor& a, int rows, int cols);
/** Select rows of a by index: out[i, :] = a[idx[i], :]. */
Tensor gather_rows(const Tensor& a, const std::vector<int>& idx);
/**
 * Softmax within each group over per-entry scores [nnz x 1]; groups index the
 * score rows contiguously through Groups::offsets (member ids unused here).
 */
Tensor group_softmax(const Tensor& scores, const Groups& groups);
/**
 * Weighted row aggregation: out[g, :] = sum over entries e of group g of
 * alpha[e] * rows[groups.member[e], :].
 */
Tensor group_weighted_rows(const Tensor& alpha, const Tensor& rows, const Groups& groups);
Tensor sum_all(const Tensor& a);
Tensor mean_all(const Tensor& a);

// --- losses ------------------------------------------------------------------

/** Mean squared error over all elements (target may be a plain value tensor). */
Tensor mse_loss(const Tensor& pred, const Tensor& target);
/**
 * Smooth L1 (Huber at delta = 1) averaged over all elements:
 * 0.5 d^2 for |d| < 1, |d| - 0.5 otherwise, d = pred - target.
 */
Tensor smooth_l1_loss(const Tensor& pred, const Tensor& target);

} // namespace ncrhok::ad
