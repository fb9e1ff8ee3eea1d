#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "camel/errors.hpp"
#include "camel/kernels.hpp"
#include "camel/params.hpp"
#include "camel/rng.hpp"
#include "camel/tensor.hpp"

namespace camel {

enum class LayerKind { dense, relu, flatten, conv2d };

struct LayerSpec {
    LayerKind kind = LayerKind::dense;
    // dense
    int in = 0;
    int out = 0;
    // conv2d (valid padding, square kernel)
    int in_c = 0, in_h = 0, in_w = 0;
    int out_c = 0, ksize = 0, stride = 1;

    static LayerSpec dense_layer(int in, int out) {
        LayerSpec s;
        s.kind = LayerKind::dense;
        s.in = in;
        s.out = out;
        return s;
    }
    static LayerSpec relu_layer() {
        LayerSpec s;
        s.kind = LayerKind::relu;
        return s;
    }
    static LayerSpec flatten_layer() {
        LayerSpec s;
        s.kind = LayerKind::flatten;
        return s;
    }
    static LayerSpec conv2d_layer(int in_c, int in_h, int in_w, int out_c, int ksize, int stride = 1) {
        LayerSpec s;
        s.kind = LayerKind::conv2d;
        s.in_c = in_c;
        s.in_h = in_h;
        s.in_w = in_w;
        s.out_c = out_c;
        s.ksize = ksize;
        s.stride = stride;
        return s;
    }

    int conv_out_h() const { return (in_h - ksize) / stride + 1; }
    int conv_out_w() const { return (in_w - ksize) / stride + 1; }

    bool has_params() const { return kind == LayerKind::dense || kind == LayerKind::conv2d; }
    bool operator==(const LayerSpec&) const = default;
};

struct NetworkSpec {
    std::vector<LayerSpec> layers;
    int input_width = 0;

    // flatten -> dense(hidden[0]) -> relu -> ... -> dense(out)
    static NetworkSpec mlp(int input_dim, const std::vector<int>& hidden, int out_dim) {
        NetworkSpec s;
        s.input_width = input_dim;
        s.layers.push_back(LayerSpec::flatten_layer());
        int w = input_dim;
        for (int h : hidden) {
            s.layers.push_back(LayerSpec::dense_layer(w, h));
            s.layers.push_back(LayerSpec::relu_layer());
            w = h;
        }
        s.layers.push_back(LayerSpec::dense_layer(w, out_dim));
        return s;
    }

    // Flat width of the activation entering each layer; widths()[layers.size()]
    // is the output width.
    std::vector<int> widths() const {
        std::vector<int> w;
        w.reserve(layers.size() + 1);
        int cur = input_width;
        w.push_back(cur);
        for (const auto& l : layers) {
            switch (l.kind) {
                case LayerKind::dense:
                    if (l.in != cur) throw InputError("network spec: dense input width mismatch");
                    cur = l.out;
                    break;
                case LayerKind::conv2d: {
                    if (l.in_c * l.in_h * l.in_w != cur) throw InputError("network spec: conv input shape mismatch");
                    if (l.ksize <= 0 || l.ksize > l.in_h || l.ksize > l.in_w || l.stride <= 0)
                        throw InputError("network spec: bad conv kernel");
                    cur = l.out_c * l.conv_out_h() * l.conv_out_w();
                    break;
                }
                case LayerKind::relu:
                case LayerKind::flatten:
                    break;
            }
            w.push_back(cur);
        }
        return w;
    }

    int output_dim() const { return widths().back(); }

    // Index of the final parameterized layer; its input activation is the
    // penultimate feature tap the adversarial head attaches to.
    int head_layer_index() const {
        for (int i = static_cast<int>(layers.size()) - 1; i >= 0; --i)
            if (layers[static_cast<size_t>(i)].has_params()) return i;
        throw InputError("network spec: no parameterized layer");
    }

    int penultimate_dim() const { return widths()[static_cast<size_t>(head_layer_index())]; }

    LayoutPtr make_layout() const {
        std::vector<ParamEntry> entries;
        size_t off = 0;
        for (size_t i = 0; i < layers.size(); ++i) {
            const auto& l = layers[i];
            const std::string base = "L" + std::to_string(i);
            if (l.kind == LayerKind::dense) {
                entries.push_back({base + ".W", off, l.in, l.out});
                off += entries.back().count();
                entries.push_back({base + ".b", off, 1, l.out});
                off += entries.back().count();
            } else if (l.kind == LayerKind::conv2d) {
                entries.push_back({base + ".K", off, l.out_c, l.in_c * l.ksize * l.ksize});
                off += entries.back().count();
                entries.push_back({base + ".b", off, 1, l.out_c});
                off += entries.back().count();
            }
        }
        return std::make_shared<const ParameterLayout>(std::move(entries));
    }

    bool operator==(const NetworkSpec&) const = default;
};

template <typename T>
struct Network {
    NetworkSpec spec;
    ParameterVector<T> params;

    static Network init(const NetworkSpec& spec, Rng& rng) {
        Network n;
        n.spec = spec;
        n.spec.widths();  // validates
        n.params = ParameterVector<T>(spec.make_layout());
        size_t entry = 0;
        for (const auto& l : spec.layers) {
            if (l.kind == LayerKind::dense) {
                const double a = std::sqrt(6.0 / (l.in + l.out));
                T* w = n.params.block(entry++);
                for (size_t i = 0; i < static_cast<size_t>(l.in) * l.out; ++i)
                    w[i] = static_cast<T>(rng.uniform(-a, a));
                ++entry;  // bias stays zero
            } else if (l.kind == LayerKind::conv2d) {
                const double a = std::sqrt(6.0 / (l.in_c * l.ksize * l.ksize + l.out_c * l.ksize * l.ksize));
                T* w = n.params.block(entry++);
                for (size_t i = 0; i < static_cast<size_t>(l.out_c) * l.in_c * l.ksize * l.ksize; ++i)
                    w[i] = static_cast<T>(rng.uniform(-a, a));
                ++entry;
            }
        }
        return n;
    }

    static Network from_params(const NetworkSpec& spec, ParameterVector<T> params) {
        Network n;
        n.spec = spec;
        auto layout = spec.make_layout();
        if (!params.layout || !(*params.layout == *layout))
            throw InputError("network: parameter layout does not match spec");
        n.params = std::move(params);
        return n;
    }
};

// Per-layer activations from one pass; act[0] is the input batch, act[i+1]
// the output of layer i.
template <typename T>
struct ForwardCache {
    std::vector<Matrix<T>> act;
    int head_layer = 0;

    const Matrix<T>& output() const { return act.back(); }
    const Matrix<T>& penultimate() const { return act[static_cast<size_t>(head_layer)]; }
};

namespace detail {

template <typename T>
void conv2d_fwd(const LayerSpec& l, const T* kernel, const T* bias, const Matrix<T>& x, Matrix<T>& y) {
    const int oh = l.conv_out_h(), ow = l.conv_out_w();
    const int kk = l.ksize * l.ksize;
    for (int b = 0; b < x.rows; ++b) {
        const T* xin = x.row(b);
        T* yout = y.row(b);
        for (int oc = 0; oc < l.out_c; ++oc) {
            const T* kslice = kernel + static_cast<size_t>(oc) * l.in_c * kk;
            for (int oy = 0; oy < oh; ++oy)
                for (int ox = 0; ox < ow; ++ox) {
                    T acc = bias[oc];
                    for (int c = 0; c < l.in_c; ++c)
                        for (int ky = 0; ky < l.ksize; ++ky)
                            for (int kx = 0; kx < l.ksize; ++kx)
                                acc += kslice[c * kk + ky * l.ksize + kx] *
                                       xin[(c * l.in_h + oy * l.stride + ky) * l.in_w + ox * l.stride + kx];
                    yout[(oc * oh + oy) * ow + ox] = acc;
                }
        }
    }
}

template <typename T>
void conv2d_bwd(const LayerSpec& l, const T* kernel, const Matrix<T>& x, const Matrix<T>& dy, T* dkernel, T* dbias,
                Matrix<T>& dx) {
    const int oh = l.conv_out_h(), ow = l.conv_out_w();
    const int kk = l.ksize * l.ksize;
    dx.fill(T(0));
    for (int b = 0; b < x.rows; ++b) {
        const T* xin = x.row(b);
        const T* dyo = dy.row(b);
        T* dxo = dx.row(b);
        for (int oc = 0; oc < l.out_c; ++oc) {
            const T* kslice = kernel + static_cast<size_t>(oc) * l.in_c * kk;
            T* dkslice = dkernel + static_cast<size_t>(oc) * l.in_c * kk;
            for (int oy = 0; oy < oh; ++oy)
                for (int ox = 0; ox < ow; ++ox) {
                    const T g = dyo[(oc * oh + oy) * ow + ox];
                    dbias[oc] += g;
                    for (int c = 0; c < l.in_c; ++c)
                        for (int ky = 0; ky < l.ksize; ++ky)
                            for (int kx = 0; kx < l.ksize; ++kx) {
                                const int xi = (c * l.in_h + oy * l.stride + ky) * l.in_w + ox * l.stride + kx;
                                dkslice[c * kk + ky * l.ksize + kx] += g * xin[xi];
                                dxo[xi] += g * kslice[c * kk + ky * l.ksize + kx];
                            }
                }
        }
    }
}

}  // namespace detail

template <typename T>
ForwardCache<T> forward(const Network<T>& net, const Matrix<T>& batch) {
    const auto widths = net.spec.widths();
    if (batch.cols != widths[0]) throw InputError("forward: batch feature dimension mismatch");
    ForwardCache<T> cache;
    cache.head_layer = net.spec.head_layer_index();
    cache.act.reserve(net.spec.layers.size() + 1);
    cache.act.push_back(batch);
    size_t entry = 0;
    for (size_t i = 0; i < net.spec.layers.size(); ++i) {
        const auto& l = net.spec.layers[i];
        const Matrix<T>& x = cache.act.back();
        Matrix<T> y(batch.rows, widths[i + 1]);
        switch (l.kind) {
            case LayerKind::dense: {
                const T* w = net.params.block(entry);
                const T* b = net.params.block(entry + 1);
                entry += 2;
                kern::matmul(x.rows, l.out, l.in, x.data.data(), w, y.data.data());
                kern::add_bias(x.rows, l.out, y.data.data(), b);
                break;
            }
            case LayerKind::relu:
                kern::relu_fwd(x.size(), x.data.data(), y.data.data());
                break;
            case LayerKind::flatten:
                y.data = x.data;
                break;
            case LayerKind::conv2d: {
                const T* k = net.params.block(entry);
                const T* b = net.params.block(entry + 1);
                entry += 2;
                detail::conv2d_fwd(l, k, b, x, y);
                break;
            }
        }
        cache.act.push_back(std::move(y));
    }
    return cache;
}

// ---------------------------------------------------------------------------
// Losses
// ---------------------------------------------------------------------------

enum class LossKind { cross_entropy, mse };

template <typename T>
struct LossGrad {
    double value = 0.0;
    Matrix<T> dout;
};

// Softmax cross-entropy over logits with integer class targets; batch mean.
template <typename T>
LossGrad<T> cross_entropy_grad(const Matrix<T>& logits, const std::vector<int>& labels) {
    if (static_cast<int>(labels.size()) != logits.rows) throw InputError("cross entropy: label count mismatch");
    LossGrad<T> out;
    out.dout = Matrix<T>(logits.rows, logits.cols);
    double total = 0.0;
    const T inv_b = T(1) / static_cast<T>(logits.rows);
    for (int i = 0; i < logits.rows; ++i) {
        const int y = labels[static_cast<size_t>(i)];
        if (y < 0 || y >= logits.cols) throw InputError("cross entropy: label index out of range");
        const T* row = logits.row(i);
        T mx = row[0];
        for (int j = 1; j < logits.cols; ++j) mx = std::max(mx, row[j]);
        double z = 0.0;
        for (int j = 0; j < logits.cols; ++j) z += std::exp(static_cast<double>(row[j] - mx));
        total += std::log(z) + static_cast<double>(mx) - static_cast<double>(row[y]);
        T* drow = out.dout.row(i);
        for (int j = 0; j < logits.cols; ++j) {
            const T p = static_cast<T>(std::exp(static_cast<double>(row[j] - mx)) / z);
            drow[j] = (p - (j == y ? T(1) : T(0))) * inv_b;
        }
    }
    out.value = total / logits.rows;
    return out;
}

// Mean over all elements.
template <typename T>
LossGrad<T> mse_grad(const Matrix<T>& pred, const Matrix<T>& target) {
    if (pred.rows != target.rows || pred.cols != target.cols) throw InputError("mse: prediction/target shape mismatch");
    LossGrad<T> out;
    out.dout = Matrix<T>(pred.rows, pred.cols);
    double total = 0.0;
    const T scale = T(2) / static_cast<T>(pred.size());
    for (size_t i = 0; i < pred.size(); ++i) {
        const double d = static_cast<double>(pred.data[i]) - static_cast<double>(target.data[i]);
        total += d * d;
        out.dout.data[i] = scale * (pred.data[i] - target.data[i]);
    }
    out.value = total / static_cast<double>(pred.size());
    return out;
}

// Targets for either loss kind; exactly one side is used.
template <typename T>
struct Batch {
    Matrix<T> x;
    LossKind loss = LossKind::cross_entropy;
    std::vector<int> labels;  // cross-entropy
    Matrix<T> targets;        // mse
};

template <typename T>
LossGrad<T> loss_grad(const Matrix<T>& out, const Batch<T>& b) {
    return b.loss == LossKind::cross_entropy ? cross_entropy_grad(out, b.labels) : mse_grad(out, b.targets);
}

// ---------------------------------------------------------------------------
// Backward
// ---------------------------------------------------------------------------

template <typename T>
struct BackwardOut {
    double loss = 0.0;
    ParameterVector<T> grad;
    Matrix<T> dinput;
};

namespace detail {

// Backpropagate dact (gradient at act[from]) through layers [from-1, 0],
// filling grad blocks for those layers. Returns gradient at the input.
template <typename T>
Matrix<T> backprop_below(const Network<T>& net, const ForwardCache<T>& cache, int from, Matrix<T> dact,
                         ParameterVector<T>& grad) {
    // entry index of the first parameter block of each layer
    std::vector<size_t> entry_at(net.spec.layers.size(), 0);
    size_t e = 0;
    for (size_t i = 0; i < net.spec.layers.size(); ++i) {
        entry_at[i] = e;
        if (net.spec.layers[i].has_params()) e += 2;
    }
    for (int i = from - 1; i >= 0; --i) {
        const auto& l = net.spec.layers[static_cast<size_t>(i)];
        const Matrix<T>& x = cache.act[static_cast<size_t>(i)];
        Matrix<T> dx(x.rows, x.cols);
        switch (l.kind) {
            case LayerKind::dense: {
                const T* w = net.params.block(entry_at[static_cast<size_t>(i)]);
                T* dw = grad.block(entry_at[static_cast<size_t>(i)]);
                T* db = grad.block(entry_at[static_cast<size_t>(i)] + 1);
                kern::matmul_at(l.in, l.out, x.rows, x.data.data(), dact.data.data(), dw);
                kern::col_sum(x.rows, l.out, dact.data.data(), db);
                kern::matmul_bt(x.rows, l.in, l.out, dact.data.data(), w, dx.data.data());
                break;
            }
            case LayerKind::relu:
                kern::relu_bwd(x.size(), x.data.data(), dact.data.data(), dx.data.data());
                break;
            case LayerKind::flatten:
                dx.data = dact.data;
                break;
            case LayerKind::conv2d: {
                const T* k = net.params.block(entry_at[static_cast<size_t>(i)]);
                T* dk = grad.block(entry_at[static_cast<size_t>(i)]);
                T* db = grad.block(entry_at[static_cast<size_t>(i)] + 1);
                detail::conv2d_bwd(l, k, x, dact, dk, db, dx);
                break;
            }
        }
        dact = std::move(dx);
    }
    return dact;
}

}  // namespace detail

// Full backward pass: loss at the output, gradient for every parameter.
template <typename T>
BackwardOut<T> backward(const Network<T>& net, const Batch<T>& batch) {
    ForwardCache<T> cache = forward(net, batch.x);
    LossGrad<T> lg = loss_grad(cache.output(), batch);
    BackwardOut<T> out;
    out.loss = lg.value;
    out.grad = ParameterVector<T>(net.params.layout);
    out.dinput = detail::backprop_below(net, cache, static_cast<int>(net.spec.layers.size()), std::move(lg.dout), out.grad);
    return out;
}

template <typename T>
double loss_value(const Network<T>& net, const Batch<T>& batch) {
    ForwardCache<T> cache = forward(net, batch.x);
    return loss_grad(cache.output(), batch).value;
}

// Backward from a gradient injected at the penultimate feature tap. Layers at
// and above the tap receive zero gradient.
template <typename T>
BackwardOut<T> backward_from_penultimate(const Network<T>& net, const ForwardCache<T>& cache, Matrix<T> dfeat) {
    const auto& feat = cache.penultimate();
    if (dfeat.rows != feat.rows || dfeat.cols != feat.cols)
        throw InputError("backward_from_penultimate: feature gradient shape mismatch");
    BackwardOut<T> out;
    out.grad = ParameterVector<T>(net.params.layout);
    out.dinput = detail::backprop_below(net, cache, cache.head_layer, std::move(dfeat), out.grad);
    return out;
}

}  // namespace camel
