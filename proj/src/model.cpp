#include "amil/model.hpp"

#include <cmath>
#include <cstring>

#include "amil/errors.hpp"
#include "net_detail.hpp"

namespace amil::net {

namespace {

double elu(double u) { return u > 0.0 ? u : std::expm1(u); }

} // namespace

std::size_t param_count(const Topology& topo) {
    return make_layout(topo).total;
}

ParamLayout make_layout(const Topology& topo) {
    if (topo.input_dim < 1 || topo.hidden_width < 1 || topo.n_hidden < 1)
        throw InvalidSpecError("topology dimensions must be positive");
    if (topo.head == HeadKind::MultiClassSoftmax && topo.n_classes < 2)
        throw InvalidSpecError("softmax head needs at least 2 classes");

    ParamLayout lay;
    std::size_t off = 0;
    auto block = [&off](std::size_t n) {
        ParamLayout::Block b{off, n};
        off += n;
        return b;
    };
    const auto w = static_cast<std::size_t>(topo.hidden_width);
    std::size_t in = static_cast<std::size_t>(topo.input_dim);
    for (int l = 0; l < topo.n_hidden; ++l) {
        ParamLayout::Layer layer;
        layer.w = block(in * w);
        layer.b = block(w);
        layer.gamma = block(w);
        layer.beta = block(w);
        lay.layers.push_back(layer);
        in = w;
    }
    lay.head_w = block(w * static_cast<std::size_t>(topo.head_out()));
    lay.head_b = block(static_cast<std::size_t>(topo.head_out()));
    lay.total = off;

    std::size_t roff = 0;
    for (int l = 0; l < topo.n_hidden; ++l) {
        ParamLayout::Running r;
        r.mean = {roff, w};
        roff += w;
        r.var = {roff, w};
        roff += w;
        lay.running.push_back(r);
    }
    lay.running_total = roff;
    return lay;
}

void Normalizer::adapt(const Matrix& events) {
    if (events.rows() == 0) throw InsufficientDataError("cannot adapt normalizer to no events");
    const std::size_t n = events.rows(), d = events.cols();
    mean.assign(d, 0.0);
    stdev.assign(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = events.row(i);
        for (std::size_t j = 0; j < d; ++j) mean[j] += row[j];
    }
    for (std::size_t j = 0; j < d; ++j) mean[j] /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = events.row(i);
        for (std::size_t j = 0; j < d; ++j) {
            const double r = row[j] - mean[j];
            stdev[j] += r * r;
        }
    }
    for (std::size_t j = 0; j < d; ++j) {
        stdev[j] = std::sqrt(stdev[j] / static_cast<double>(n));
        if (stdev[j] < 1e-12) stdev[j] = 1.0; // constant feature
    }
}

void Normalizer::apply(Matrix& events) const {
    if (mean.size() != events.cols()) throw ShapeError("normalizer dimensionality mismatch");
    const std::size_t n = events.rows(), d = events.cols();
    for (std::size_t i = 0; i < n; ++i) {
        double* row = events.row(i);
        for (std::size_t j = 0; j < d; ++j) row[j] = (row[j] - mean[j]) / stdev[j];
    }
}

BagModel::BagModel(Topology topo, std::uint64_t init_seed)
    : topo_(topo), layout_(make_layout(topo)) {
    params_.assign(layout_.total, 0.0);
    running_.assign(layout_.running_total, 0.0);

    // Scaled-uniform fan-in kernels, zero biases, identity batch norm.
    rng::Stream stream(init_seed, "init");
    std::size_t in = static_cast<std::size_t>(topo_.input_dim);
    const auto w = static_cast<std::size_t>(topo_.hidden_width);
    for (int l = 0; l < topo_.n_hidden; ++l) {
        const double limit = std::sqrt(3.0 / static_cast<double>(in));
        for (double& v : block(layout_.layers[l].w))
            v = (2.0 * stream.next_unit() - 1.0) * limit;
        for (double& v : block(layout_.layers[l].gamma)) v = 1.0;
        in = w;
    }
    const double limit = std::sqrt(3.0 / static_cast<double>(w));
    for (double& v : block(layout_.head_w)) v = (2.0 * stream.next_unit() - 1.0) * limit;
    for (int l = 0; l < topo_.n_hidden; ++l) {
        auto var = layout_.running[l].var;
        for (std::size_t j = 0; j < var.size; ++j) running_[var.offset + j] = 1.0;
    }
}

namespace detail {

void check_events_shape(const BagModel& model, const Matrix& events) {
    if (static_cast<int>(events.cols()) != model.topology().input_dim)
        throw ShapeError("event feature width does not match the model input");
    if (events.rows() == 0) throw InvalidBagError("empty bag");
}

Matrix run_stack(const BagModel& model, const Matrix& events, bool training,
                 rng::Stream* dropout, StackCache* cache, double* running_mut) {
    check_events_shape(model, events);
    if (!model.norm().adapted()) throw InvalidSpecError("model normalizer has not been adapted");

    const Topology& topo = model.topology();
    const ParamLayout& lay = model.layout();
    const std::size_t n = events.rows();
    const auto width = static_cast<std::size_t>(topo.hidden_width);
    const double keep_prob = 1.0 - topo.dropout_rate;

    Matrix h = events;
    model.norm().apply(h);
    if (cache) {
        cache->x_norm = h;
        cache->layers.assign(static_cast<std::size_t>(topo.n_hidden), {});
    }

    for (int l = 0; l < topo.n_hidden; ++l) {
        const auto& lv = lay.layers[l];
        const std::size_t in = h.cols();
        Matrix z(n, width);
        {
            const double* b = model.params().data() + lv.b.offset;
            for (std::size_t i = 0; i < n; ++i) std::memcpy(z.row(i), b, width * sizeof(double));
        }
        raw::add_matmul(h.data(), n, in, model.params().data() + lv.w.offset, width, z.data());

        std::vector<double> mu(width), inv_sigma(width);
        if (training) {
            std::vector<double> var(width, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                const double* zi = z.row(i);
                for (std::size_t j = 0; j < width; ++j) mu[j] += zi[j];
            }
            for (std::size_t j = 0; j < width; ++j) mu[j] /= static_cast<double>(n);
            for (std::size_t i = 0; i < n; ++i) {
                const double* zi = z.row(i);
                for (std::size_t j = 0; j < width; ++j) {
                    const double r = zi[j] - mu[j];
                    var[j] += r * r;
                }
            }
            for (std::size_t j = 0; j < width; ++j) {
                var[j] /= static_cast<double>(n);
                inv_sigma[j] = 1.0 / std::sqrt(var[j] + topo.bn_eps);
            }
            if (running_mut) {
                double* rmean = running_mut + lay.running[l].mean.offset;
                double* rvar = running_mut + lay.running[l].var.offset;
                const double m = topo.bn_momentum;
                for (std::size_t j = 0; j < width; ++j) {
                    rmean[j] = m * rmean[j] + (1.0 - m) * mu[j];
                    rvar[j] = m * rvar[j] + (1.0 - m) * var[j];
                }
            }
        } else {
            const double* rmean = model.running().data() + lay.running[l].mean.offset;
            const double* rvar = model.running().data() + lay.running[l].var.offset;
            for (std::size_t j = 0; j < width; ++j) {
                mu[j] = rmean[j];
                inv_sigma[j] = 1.0 / std::sqrt(rvar[j] + topo.bn_eps);
            }
        }

        // xhat in place of z
        for (std::size_t i = 0; i < n; ++i) {
            double* zi = z.row(i);
            for (std::size_t j = 0; j < width; ++j) zi[j] = (zi[j] - mu[j]) * inv_sigma[j];
        }
        if (cache) {
            cache->layers[l].xhat = z;
            cache->layers[l].inv_sigma = inv_sigma;
        }

        // scale/shift + ELU (+ inverted dropout in training)
        const double* gamma = model.params().data() + lv.gamma.offset;
        const double* beta = model.params().data() + lv.beta.offset;
        const bool drop = training && dropout != nullptr && topo.dropout_rate > 0.0;
        std::vector<std::uint8_t>* keep = nullptr;
        if (cache && drop) {
            cache->layers[l].keep.resize(n * width);
            keep = &cache->layers[l].keep;
        }
        Matrix out(n, width);
        for (std::size_t i = 0; i < n; ++i) {
            const double* zi = z.row(i);
            double* oi = out.row(i);
            for (std::size_t j = 0; j < width; ++j) {
                double a = elu(gamma[j] * zi[j] + beta[j]);
                if (drop) {
                    const bool k = dropout->next_unit() < keep_prob;
                    if (keep) (*keep)[i * width + j] = k ? 1 : 0;
                    a = k ? a / keep_prob : 0.0;
                }
                oi[j] = a;
            }
        }
        h = std::move(out);
    }
    return h;
}

Matrix layer_output(const BagModel& model, int layer, const LayerCache& cache) {
    const Topology& topo = model.topology();
    const ParamLayout& lay = model.layout();
    const std::size_t n = cache.xhat.rows();
    const auto width = static_cast<std::size_t>(topo.hidden_width);
    const double* gamma = model.params().data() + lay.layers[layer].gamma.offset;
    const double* beta = model.params().data() + lay.layers[layer].beta.offset;
    const double keep_prob = 1.0 - topo.dropout_rate;

    Matrix out(n, width);
    for (std::size_t i = 0; i < n; ++i) {
        const double* xi = cache.xhat.row(i);
        double* oi = out.row(i);
        for (std::size_t j = 0; j < width; ++j) {
            double a = elu(gamma[j] * xi[j] + beta[j]);
            if (!cache.keep.empty()) a = cache.keep[i * width + j] ? a / keep_prob : 0.0;
            oi[j] = a;
        }
    }
    return out;
}

} // namespace detail

Matrix embed(const BagModel& model, const Matrix& events, bool training, rng::Stream* dropout) {
    return detail::run_stack(model, events, training, dropout, nullptr, nullptr);
}

std::vector<double> pool(const Matrix& embeddings) {
    if (embeddings.rows() == 0) throw InvalidBagError("cannot pool an empty bag");
    const std::size_t n = embeddings.rows(), d = embeddings.cols();
    std::vector<double> p(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = embeddings.row(i);
        for (std::size_t j = 0; j < d; ++j) p[j] += row[j];
    }
    for (double& v : p) v /= static_cast<double>(n);
    return p;
}

HeadOutput head_forward(const BagModel& model, std::span<const double> pooled) {
    const Topology& topo = model.topology();
    const ParamLayout& lay = model.layout();
    const auto width = static_cast<std::size_t>(topo.hidden_width);
    if (pooled.size() != width) throw ShapeError("pooled vector width mismatch");

    const std::size_t out = static_cast<std::size_t>(topo.head_out());
    const double* w = model.params().data() + lay.head_w.offset;
    const double* b = model.params().data() + lay.head_b.offset;

    HeadOutput result;
    result.logits.assign(out, 0.0);
    for (std::size_t k = 0; k < out; ++k) result.logits[k] = b[k];
    for (std::size_t j = 0; j < width; ++j) {
        const double pj = pooled[j];
        for (std::size_t k = 0; k < out; ++k) result.logits[k] += pj * w[j * out + k];
    }

    result.probs.assign(out, 0.0);
    if (topo.head == HeadKind::MultiClassSoftmax) {
        double zmax = result.logits[0];
        for (double z : result.logits) zmax = std::max(zmax, z);
        double denom = 0.0;
        for (std::size_t k = 0; k < out; ++k) {
            result.probs[k] = std::exp(result.logits[k] - zmax);
            denom += result.probs[k];
        }
        for (double& p : result.probs) p /= denom;
    } else {
        const double z = result.logits[0];
        result.probs[0] = z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
    }
    return result;
}

HeadOutput forward(const BagModel& model, const data::Bag& bag, bool training,
                   rng::Stream* dropout) {
    if (model.topology().head == HeadKind::ParamBinary)
        throw HeadMismatchError("ParamBinary head requires a theta value");
    return head_forward(model, pool(embed(model, bag.events, training, dropout)));
}

HeadOutput forward(const BagModel& model, const data::Bag& bag, double theta, bool training,
                   rng::Stream* dropout) {
    if (model.topology().head != HeadKind::ParamBinary)
        throw HeadMismatchError("theta-conditioned forward requires a ParamBinary head");
    const Matrix with_theta = append_theta(bag.events, theta);
    return head_forward(model, pool(embed(model, with_theta, training, dropout)));
}

double predict_pnn(const BagModel& model, const data::Bag& bag, double theta) {
    return forward(model, bag, theta).probs[0];
}

Matrix append_theta(const Matrix& events, double theta) {
    Matrix out(events.rows(), events.cols() + 1);
    for (std::size_t i = 0; i < events.rows(); ++i) {
        std::memcpy(out.row(i), events.row(i), events.cols() * sizeof(double));
        out(i, events.cols()) = theta;
    }
    return out;
}

} // namespace amil::net
