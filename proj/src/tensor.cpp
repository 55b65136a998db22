#include "ncrhok/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ncrhok/errors.hpp"

namespace ncrhok::ad {

namespace {

std::string shape_str(const Tensor& t) {
    return "[" + std::to_string(t.rows()) + "x" + std::to_string(t.cols()) + "]";
}

Tape* join_tape(const Tensor& a, const Tensor& b) {
    if (a.tape() && b.tape() && a.tape() != b.tape())
        throw ShapeError("operands recorded on different tapes");
    return a.tape() ? a.tape() : b.tape();
}

Tensor fresh(Tape* tape, int rows, int cols) {
    auto d = std::make_shared<TensorData>();
    d->rows = rows;
    d->cols = cols;
    d->val.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0.0);
    if (tape) d->grad.assign(d->val.size(), 0.0);
    return Tensor(std::move(d), tape);
}

void require(bool ok, const std::string& msg) {
    if (!ok) throw ShapeError(msg);
}

} // namespace

Tensor make_tensor(int rows, int cols, std::vector<double> val) {
    require(rows >= 0 && cols >= 0, "negative tensor dimensions");
    require(val.size() == static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols),
            "tensor data size does not match " + std::to_string(rows) + "x" + std::to_string(cols));
    auto d = std::make_shared<TensorData>();
    d->rows = rows;
    d->cols = cols;
    d->val = std::move(val);
    return Tensor(std::move(d), nullptr);
}

Tensor make_tensor(int rows, int cols, double fill) {
    return make_tensor(rows, cols,
                       std::vector<double>(static_cast<std::size_t>(rows) * cols, fill));
}

Tensor Tape::leaf(int rows, int cols, std::vector<double> val) {
    auto t = make_tensor(rows, cols, std::move(val));
    t.data()->grad.assign(t.size(), 0.0);
    return Tensor(t.data(), this);
}

Tensor Tape::leaf(int rows, int cols, double fill) {
    return leaf(rows, cols, std::vector<double>(static_cast<std::size_t>(rows) * cols, fill));
}

Tensor Tape::watch(const Tensor& t) {
    if (!t.defined()) throw ShapeError("watch of an undefined tensor");
    if (t.tape() && t.tape() != this) throw ShapeError("tensor already recorded on another tape");
    if (t.data()->grad.empty()) t.data()->grad.assign(t.size(), 0.0);
    return Tensor(t.data(), this);
}

void Tape::backward(const Tensor& loss) {
    require(loss.tape() == this, "backward of a loss from a different tape");
    require(loss.rows() == 1 && loss.cols() == 1,
            "backward expects a scalar loss, got " + shape_str(loss));
    loss.data()->grad[0] += 1.0;
    for (auto it = backs_.rbegin(); it != backs_.rend(); ++it) (*it)();
}

Tensor matmul(const Tensor& a, const Tensor& b) {
    require(a.cols() == b.rows(), "matmul shape mismatch " + shape_str(a) + " x " + shape_str(b));
    Tape* tape = join_tape(a, b);
    const int m = a.rows(), k = a.cols(), n = b.cols();
    Tensor out = fresh(tape, m, n);
    const double* av = a.value().data();
    const double* bv = b.value().data();
    double* ov = out.value().data();
    for (int i = 0; i < m; ++i) {
        const double* arow = av + static_cast<std::size_t>(i) * k;
        double* orow = ov + static_cast<std::size_t>(i) * n;
        for (int p = 0; p < k; ++p) {
            const double x = arow[p];
            if (x == 0.0) continue;
            const double* brow = bv + static_cast<std::size_t>(p) * n;
            for (int j = 0; j < n; ++j) orow[j] += x * brow[j];
        }
    }
    if (tape) {
        auto ad = a.data(), bd = b.data(), od = out.data();
        tape->record([ad, bd, od, m, k, n] {
            const double* og = od->grad.data();
            if (!ad->grad.empty()) {
                double* ag = ad->grad.data();
                const double* bv2 = bd->val.data();
                for (int i = 0; i < m; ++i)
                    for (int p = 0; p < k; ++p) {
                        double acc = 0.0;
                        const double* orow = og + static_cast<std::size_t>(i) * n;
                        const double* brow = bv2 + static_cast<std::size_t>(p) * n;
                        for (int j = 0; j < n; ++j) acc += orow[j] * brow[j];
                        ag[static_cast<std::size_t>(i) * k + p] += acc;
                    }
            }
            if (!bd->grad.empty()) {
                double* bg = bd->grad.data();
                const double* av2 = ad->val.data();
                for (int i = 0; i < m; ++i) {
                    const double* orow = og + static_cast<std::size_t>(i) * n;
                    const double* arow = av2 + static_cast<std::size_t>(i) * k;
                    for (int p = 0; p < k; ++p) {
                        const double x = arow[p];
                        if (x == 0.0) continue;
                        double* brow = bg + static_cast<std::size_t>(p) * n;
                        for (int j = 0; j < n; ++j) brow[j] += x * orow[j];
                    }
                }
            }
        });
    }
    return out;
}

namespace {

template <typename Fwd, typename Bwd>
Tensor binary_same_shape(const Tensor& a, const Tensor& b, Fwd fwd, Bwd bwd, const char* name) {
    require(a.rows() == b.rows() && a.cols() == b.cols(),
            std::string(name) + " shape mismatch " + shape_str(a) + " vs " + shape_str(b));
    Tape* tape = join_tape(a, b);
    Tensor out = fresh(tape, a.rows(), a.cols());
    for (std::size_t i = 0; i < out.size(); ++i) out.value()[i] = fwd(a.value()[i], b.value()[i]);
    if (tape) {
        auto ad = a.data(), bd = b.data(), od = out.data();
        tape->record([ad, bd, od, bwd] {
            for (std::size_t i = 0; i < od->grad.size(); ++i) {
                const auto [da, db] = bwd(ad->val[i], bd->val[i]);
                if (!ad->grad.empty()) ad->grad[i] += da * od->grad[i];
                if (!bd->grad.empty()) bd->grad[i] += db * od->grad[i];
            }
        });
    }
    return out;
}

template <typename Fwd, typename Deriv>
Tensor unary_elementwise(const Tensor& a, Fwd fwd, Deriv deriv) {
    Tensor out = fresh(a.tape(), a.rows(), a.cols());
    for (std::size_t i = 0; i < out.size(); ++i) out.value()[i] = fwd(a.value()[i]);
    if (a.tape()) {
        auto ad = a.data(), od = out.data();
        a.tape()->record([ad, od, deriv] {
            if (ad->grad.empty()) return;
            for (std::size_t i = 0; i < od->grad.size(); ++i)
                ad->grad[i] += deriv(ad->val[i], od->val[i]) * od->grad[i];
        });
    }
    return out;
}

} // namespace

Tensor add(const Tensor& a, const Tensor& b) {
    return binary_same_shape(
        a, b, [](double x, double y) { return x + y; },
        [](double, double) { return std::pair{1.0, 1.0}; }, "add");
}

Tensor sub(const Tensor& a, const Tensor& b) {
    return binary_same_shape(
        a, b, [](double x, double y) { return x - y; },
        [](double, double) { return std::pair{1.0, -1.0}; }, "sub");
}

Tensor mul(const Tensor& a, const Tensor& b) {
    return binary_same_shape(
        a, b, [](double x, double y) { return x * y; },
        [](double x, double y) { return std::pair{y, x}; }, "mul");
}

Tensor add_rowvec(const Tensor& a, const Tensor& bias) {
    require(bias.rows() == 1 && bias.cols() == a.cols(),
            "add_rowvec expects a [1x" + std::to_string(a.cols()) + "] bias, got " +
                shape_str(bias));
    Tape* tape = join_tape(a, bias);
    Tensor out = fresh(tape, a.rows(), a.cols());
    const int n = a.cols();
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < n; ++j)
            out.value()[static_cast<std::size_t>(i) * n + j] =
                a.value()[static_cast<std::size_t>(i) * n + j] + bias.value()[static_cast<std::size_t>(j)];
    if (tape) {
        auto ad = a.data(), bd = bias.data(), od = out.data();
        tape->record([ad, bd, od, n] {
            if (!ad->grad.empty())
                for (std::size_t i = 0; i < od->grad.size(); ++i) ad->grad[i] += od->grad[i];
            if (!bd->grad.empty()) {
                const int rows = od->rows;
                for (int i = 0; i < rows; ++i)
                    for (int j = 0; j < n; ++j)
                        bd->grad[static_cast<std::size_t>(j)] +=
                            od->grad[static_cast<std::size_t>(i) * n + j];
            }
        });
    }
    return out;
}

Tensor scale(const Tensor& a, double c) {
    return unary_elementwise(
        a, [c](double x) { return c * x; }, [c](double, double) { return c; });
}

Tensor relu(const Tensor& a) {
    return unary_elementwise(
        a, [](double x) { return x > 0.0 ? x : 0.0; },
        [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Tensor leaky_relu(const Tensor& a, double slope) {
    return unary_elementwise(
        a, [slope](double x) { return x > 0.0 ? x : slope * x; },
        [slope](double x, double) { return x > 0.0 ? 1.0 : slope; });
}

Tensor sigmoid(const Tensor& a) {
    return unary_elementwise(
        a,
        [](double x) {
            return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
        },
        [](double, double y) { return y * (1.0 - y); });
}

Tensor concat_cols(const std::vector<Tensor>& parts) {
    require(!parts.empty(), "concat_cols of an empty list");
    const int rows = parts.front().rows();
    int cols = 0;
    Tape* tape = nullptr;
    for (const auto& p : parts) {
        require(p.rows() == rows, "concat_cols row mismatch");
        cols += p.cols();
        if (p.tape()) {
            if (tape && tape != p.tape())
                throw ShapeError("operands recorded on different tapes");
            tape = p.tape();
        }
    }
    Tensor out = fresh(tape, rows, cols);
    int col0 = 0;
    for (const auto& p : parts) {
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < p.cols(); ++j)
                out.value()[static_cast<std::size_t>(i) * cols + col0 + j] =
                    p.value()[static_cast<std::size_t>(i) * p.cols() + j];
        col0 += p.cols();
    }
    if (tape) {
        std::vector<std::shared_ptr<TensorData>> pd;
        pd.reserve(parts.size());
        for (const auto& p : parts) pd.push_back(p.data());
        auto od = out.data();
        tape->record([pd, od, rows, cols] {
            int base = 0;
            for (const auto& d : pd) {
                if (!d->grad.empty()) {
                    for (int i = 0; i < rows; ++i)
                        for (int j = 0; j < d->cols; ++j)
                            d->grad[static_cast<std::size_t>(i) * d->cols + j] +=
                                od->grad[static_cast<std::size_t>(i) * cols + base + j];
                }
                base += d->cols;
            }
        });
    }
    return out;
}

Tensor reshape(const Tensor& a, int rows, int cols) {
    require(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) == a.size(),
            "reshape to " + std::to_string(rows) + "x" + std::to_string(cols) +
                " changes element count of " + shape_str(a));
    Tensor out = fresh(a.tape(), rows, cols);
    out.value() = a.value();
    if (a.tape()) {
        auto ad = a.data(), od = out.data();
        a.tape()->record([ad, od] {
            if (ad->grad.empty()) return;
            for (std::size_t i = 0; i < od->grad.size(); ++i) ad->grad[i] += od->grad[i];
        });
    }
    return out;
}

Tensor gather_rows(const Tensor& a, const std::vector<int>& idx) {
    const int n = a.cols();
    for (int i : idx)
        require(i >= 0 && i < a.rows(),
                "gather_rows index " + std::to_string(i) + " out of range for " + shape_str(a));
    Tensor out = fresh(a.tape(), static_cast<int>(idx.size()), n);
    for (std::size_t r = 0; r < idx.size(); ++r)
        std::copy_n(a.value().begin() + static_cast<std::size_t>(idx[r]) * n, n,
                    out.value().begin() + r * n);
    if (a.tape()) {
        auto ad = a.data(), od = out.data();
        a.tape()->record([ad, od, idx, n] {
            if (ad->grad.empty()) return;
            for (std::size_t r = 0; r < idx.size(); ++r)
                for (int j = 0; j < n; ++j)
                    ad->grad[static_cast<std::size_t>(idx[r]) * n + j] +=
                        od->grad[r * static_cast<std::size_t>(n) + j];
        });
    }
    return out;
}

Tensor group_softmax(const Tensor& scores, const Groups& groups) {
    require(scores.cols() == 1, "group_softmax expects a column of scores, got " + shape_str(scores));
    require(scores.rows() == groups.num_entries(),
            "group_softmax: " + std::to_string(scores.rows()) + " scores vs " +
                std::to_string(groups.num_entries()) + " group entries");
    Tensor out = fresh(scores.tape(), scores.rows(), 1);
    const auto& off = groups.offsets;
    for (int g = 0; g + 1 < static_cast<int>(off.size()); ++g) {
        const int lo = off[static_cast<std::size_t>(g)], hi = off[static_cast<std::size_t>(g) + 1];
        if (lo == hi) continue;
        double mx = scores.value()[static_cast<std::size_t>(lo)];
        for (int e = lo + 1; e < hi; ++e)
            mx = std::max(mx, scores.value()[static_cast<std::size_t>(e)]);
        double z = 0.0;
        for (int e = lo; e < hi; ++e) {
            const double w = std::exp(scores.value()[static_cast<std::size_t>(e)] - mx);
            out.value()[static_cast<std::size_t>(e)] = w;
            z += w;
        }
        for (int e = lo; e < hi; ++e) out.value()[static_cast<std::size_t>(e)] /= z;
    }
    if (scores.tape()) {
        auto sd = scores.data(), od = out.data();
        auto offsets = groups.offsets;
        scores.tape()->record([sd, od, offsets] {
            if (sd->grad.empty()) return;
            for (int g = 0; g + 1 < static_cast<int>(offsets.size()); ++g) {
                const int lo = offsets[static_cast<std::size_t>(g)];
                const int hi = offsets[static_cast<std::size_t>(g) + 1];
                double dot = 0.0;
                for (int e = lo; e < hi; ++e)
                    dot += od->grad[static_cast<std::size_t>(e)] * od->val[static_cast<std::size_t>(e)];
                for (int e = lo; e < hi; ++e)
                    sd->grad[static_cast<std::size_t>(e)] +=
                        od->val[static_cast<std::size_t>(e)] *
                        (od->grad[static_cast<std::size_t>(e)] - dot);
            }
        });
    }
    return out;
}

Tensor group_weighted_rows(const Tensor& alpha, const Tensor& rows, const Groups& groups) {
    require(alpha.cols() == 1, "group_weighted_rows expects a column of weights");
    require(alpha.rows() == groups.num_entries(),
            "group_weighted_rows: " + std::to_string(alpha.rows()) + " weights vs " +
                std::to_string(groups.num_entries()) + " entries");
    for (int m : groups.member)
        require(m >= 0 && m < rows.rows(),
                "group_weighted_rows member " + std::to_string(m) + " out of range for " +
                    shape_str(rows));
    Tape* tape = join_tape(alpha, rows);
    const int d = rows.cols();
    Tensor out = fresh(tape, groups.num_groups(), d);
    const auto& off = groups.offsets;
    for (int g = 0; g < groups.num_groups(); ++g) {
        double* orow = out.value().data() + static_cast<std::size_t>(g) * d;
        for (int e = off[static_cast<std::size_t>(g)]; e < off[static_cast<std::size_t>(g) + 1]; ++e) {
            const double w = alpha.value()[static_cast<std::size_t>(e)];
            const double* src =
                rows.value().data() + static_cast<std::size_t>(groups.member[static_cast<std::size_t>(e)]) * d;
            for (int j = 0; j < d; ++j) orow[j] += w * src[j];
        }
    }
    if (tape) {
        auto adta = alpha.data(), rd = rows.data(), od = out.data();
        auto offsets = groups.offsets;
        auto member = groups.member;
        tape->record([adta, rd, od, offsets, member, d] {
            for (int g = 0; g + 1 < static_cast<int>(offsets.size()); ++g) {
                const double* ograd = od->grad.data() + static_cast<std::size_t>(g) * d;
                for (int e = offsets[static_cast<std::size_t>(g)];
                     e < offsets[static_cast<std::size_t>(g) + 1]; ++e) {
                    const auto row = static_cast<std::size_t>(member[static_cast<std::size_t>(e)]);
                    if (!adta->grad.empty()) {
                        double acc = 0.0;
                        const double* src = rd->val.data() + row * d;
                        for (int j = 0; j < d; ++j) acc += ograd[j] * src[j];
                        adta->grad[static_cast<std::size_t>(e)] += acc;
                    }
                    if (!rd->grad.empty()) {
                        const double w = adta->val[static_cast<std::size_t>(e)];
                        double* dst = rd->grad.data() + row * d;
                        for (int j = 0; j < d; ++j) dst[j] += w * ograd[j];
                    }
                }
            }
        });
    }
    return out;
}

Tensor sum_all(const Tensor& a) {
    Tensor out = fresh(a.tape(), 1, 1);
    double acc = 0.0;
    for (double x : a.value()) acc += x;
    out.value()[0] = acc;
    if (a.tape()) {
        auto ad = a.data(), od = out.data();
        a.tape()->record([ad, od] {
            if (ad->grad.empty()) return;
            for (double& g : ad->grad) g += od->grad[0];
        });
    }
    return out;
}

Tensor mean_all(const Tensor& a) {
    require(a.size() > 0, "mean_all of an empty tensor");
    return scale(sum_all(a), 1.0 / static_cast<double>(a.size()));
}

Tensor mse_loss(const Tensor& pred, const Tensor& target) {
    require(pred.rows() == target.rows() && pred.cols() == target.cols(),
            "mse_loss shape mismatch " + shape_str(pred) + " vs " + shape_str(target));
    require(pred.size() > 0, "mse_loss of empty tensors");
    Tensor out = fresh(pred.tape(), 1, 1);
    const double inv = 1.0 / static_cast<double>(pred.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double diff = pred.value()[i] - target.value()[i];
        acc += diff * diff;
    }
    out.value()[0] = acc * inv;
    if (pred.tape()) {
        auto pd = pred.data(), td = target.data(), od = out.data();
        pred.tape()->record([pd, td, od, inv] {
            const double g = od->grad[0];
            for (std::size_t i = 0; i < pd->val.size(); ++i) {
                const double diff = pd->val[i] - td->val[i];
                if (!pd->grad.empty()) pd->grad[i] += 2.0 * inv * diff * g;
                if (!td->grad.empty()) td->grad[i] -= 2.0 * inv * diff * g;
            }
        });
    }
    return out;
}

Tensor smooth_l1_loss(const Tensor& pred, const Tensor& target) {
    require(pred.rows() == target.rows() && pred.cols() == target.cols(),
            "smooth_l1_loss shape mismatch " + shape_str(pred) + " vs " + shape_str(target));
    require(pred.size() > 0, "smooth_l1_loss of empty tensors");
    Tensor out = fresh(pred.tape(), 1, 1);
    const double inv = 1.0 / static_cast<double>(pred.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred.value()[i] - target.value()[i];
        const double a = std::abs(d);
        acc += a < 1.0 ? 0.5 * d * d : a - 0.5;
    }
    out.value()[0] = acc * inv;
    if (pred.tape()) {
        auto pd = pred.data(), td = target.data(), od = out.data();
        pred.tape()->record([pd, td, od, inv] {
            const double g = od->grad[0];
            for (std::size_t i = 0; i < pd->val.size(); ++i) {
                const double d = pd->val[i] - td->val[i];
                const double slope = std::abs(d) < 1.0 ? d : (d > 0.0 ? 1.0 : -1.0);
                if (!pd->grad.empty()) pd->grad[i] += inv * slope * g;
                if (!td->grad.empty()) td->grad[i] -= inv * slope * g;
            }
        });
    }
    return out;
}

} // namespace ncrhok::ad
