#include <cmath>
#include <cstring>

#include "amil/errors.hpp"
#include "amil/train.hpp"
#include "net_detail.hpp"

namespace amil::net {

namespace {

void check_batch(const BagModel& model, const BagBatch& batch) {
    if (batch.n_bags() == 0) throw InsufficientDataError("empty batch");
    if (batch.offsets.front() != 0 || batch.offsets.back() != batch.events.rows())
        throw ShapeError("batch offsets do not delimit the events matrix");
    for (std::size_t b = 0; b + 1 < batch.offsets.size(); ++b)
        if (batch.offsets[b + 1] <= batch.offsets[b])
            throw InvalidBagError("batch contains an empty bag");
    if (batch.labels.size() != batch.n_bags())
        throw ShapeError("one label per bag required");
    detail::check_events_shape(model, batch.events);
}

void check_labels(const Topology& topo, const std::vector<double>& labels) {
    if (topo.head == HeadKind::MultiClassSoftmax) {
        for (double y : labels) {
            const double r = std::nearbyint(y);
            if (!(r == y) || r < 0.0 || r >= static_cast<double>(topo.n_classes))
                throw InvalidLabelError("class label out of range");
        }
    } else {
        for (double y : labels)
            if (y != 0.0 && y != 1.0) throw InvalidLabelError("binary label must be 0 or 1");
    }
}

// Per-bag loss and dL/dlogits (without the 1/B batch factor).
double head_loss(const Topology& topo, std::span<const double> logits, double label,
                 std::span<double> dlogits) {
    if (topo.head == HeadKind::MultiClassSoftmax) {
        const auto k = static_cast<std::size_t>(label);
        double zmax = logits[0];
        for (double z : logits) zmax = std::max(zmax, z);
        double denom = 0.0;
        for (double z : logits) denom += std::exp(z - zmax);
        const double lse = zmax + std::log(denom);
        for (std::size_t j = 0; j < logits.size(); ++j)
            dlogits[j] = std::exp(logits[j] - lse) - (j == k ? 1.0 : 0.0);
        return lse - logits[k];
    }
    const double z = logits[0];
    const double p = z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
    dlogits[0] = p - label;
    return std::max(z, 0.0) - z * label + std::log1p(std::exp(-std::abs(z)));
}

double l2_penalty(const BagModel& model) {
    const double l2 = model.topology().l2;
    if (l2 == 0.0) return 0.0;
    double acc = 0.0;
    for (const auto& layer : model.layout().layers)
        for (double w : model.block(layer.w)) acc += w * w;
    return l2 * acc;
}

} // namespace

LossGrad loss_and_grad(BagModel& model, const BagBatch& batch, std::uint64_t dropout_key,
                       bool update_running) {
    check_batch(model, batch);
    check_labels(model.topology(), batch.labels);

    const Topology& topo = model.topology();
    const ParamLayout& lay = model.layout();
    const std::size_t n_bags = batch.n_bags();
    const std::size_t n_events = batch.events.rows();
    const auto width = static_cast<std::size_t>(topo.hidden_width);
    const auto out_dim = static_cast<std::size_t>(topo.head_out());

    rng::Stream dropout(dropout_key, "dropout");
    detail::StackCache cache;
    const Matrix emb = detail::run_stack(model, batch.events, /*training=*/true, &dropout, &cache,
                                         update_running ? model.running().data() : nullptr);

    // Pool per bag.
    Matrix pooled(n_bags, width);
    for (std::size_t b = 0; b < n_bags; ++b) {
        const std::size_t lo = batch.offsets[b], hi = batch.offsets[b + 1];
        double* p = pooled.row(b);
        for (std::size_t r = lo; r < hi; ++r) {
            const double* e = emb.row(r);
            for (std::size_t j = 0; j < width; ++j) p[j] += e[j];
        }
        const double inv = 1.0 / static_cast<double>(hi - lo);
        for (std::size_t j = 0; j < width; ++j) p[j] *= inv;
    }

    // Head forward + loss.
    Matrix logits(n_bags, out_dim);
    {
        const double* hb = model.params().data() + lay.head_b.offset;
        for (std::size_t b = 0; b < n_bags; ++b)
            std::memcpy(logits.row(b), hb, out_dim * sizeof(double));
        raw::add_matmul(pooled.data(), n_bags, width, model.params().data() + lay.head_w.offset,
                        out_dim, logits.data());
    }

    Matrix dlogits(n_bags, out_dim);
    double data_loss = 0.0;
    for (std::size_t b = 0; b < n_bags; ++b)
        data_loss += head_loss(topo, logits.row_span(b), batch.labels[b], dlogits.row_span(b));
    data_loss /= static_cast<double>(n_bags);
    if (!std::isfinite(data_loss)) throw InvalidValueError("non-finite loss");

    const double batch_scale = 1.0 / static_cast<double>(n_bags);
    for (std::size_t i = 0; i < dlogits.size(); ++i) dlogits.data()[i] *= batch_scale;

    LossGrad result;
    result.loss = data_loss + l2_penalty(model);
    result.grad.assign(lay.total, 0.0);
    double* grad = result.grad.data();

    // Head backward.
    raw::add_matmul_at(pooled.data(), n_bags, width, dlogits.data(), out_dim,
                       grad + lay.head_w.offset);
    for (std::size_t b = 0; b < n_bags; ++b) {
        const double* dl = dlogits.row(b);
        for (std::size_t k = 0; k < out_dim; ++k) grad[lay.head_b.offset + k] += dl[k];
    }
    Matrix d_pooled(n_bags, width);
    raw::add_matmul_bt(dlogits.data(), n_bags, out_dim, model.params().data() + lay.head_w.offset,
                       width, d_pooled.data());

    // Pooling backward: every event row of a bag receives dP / bag size.
    Matrix d_h(n_events, width);
    for (std::size_t b = 0; b < n_bags; ++b) {
        const std::size_t lo = batch.offsets[b], hi = batch.offsets[b + 1];
        const double inv = 1.0 / static_cast<double>(hi - lo);
        const double* dp = d_pooled.row(b);
        for (std::size_t r = lo; r < hi; ++r) {
            double* dh = d_h.row(r);
            for (std::size_t j = 0; j < width; ++j) dh[j] = dp[j] * inv;
        }
    }

    // Hidden layers, top down.
    const double keep_prob = 1.0 - topo.dropout_rate;
    for (int l = topo.n_hidden - 1; l >= 0; --l) {
        const auto& lv = lay.layers[l];
        const auto& lc = cache.layers[l];
        const double* gamma = model.params().data() + lv.gamma.offset;
        const double* beta = model.params().data() + lv.beta.offset;

        // Through dropout and ELU onto the batch-norm output.
        Matrix d_u(n_events, width);
        for (std::size_t i = 0; i < n_events; ++i) {
            const double* xh = lc.xhat.row(i);
            const double* dh = d_h.row(i);
            double* du = d_u.row(i);
            for (std::size_t j = 0; j < width; ++j) {
                double g = dh[j];
                if (!lc.keep.empty()) g = lc.keep[i * width + j] ? g / keep_prob : 0.0;
                const double u = gamma[j] * xh[j] + beta[j];
                du[j] = g * (u > 0.0 ? 1.0 : std::exp(u));
            }
        }

        // Batch-norm backward through the batch statistics.
        std::vector<double> m1(width, 0.0), m2(width, 0.0);
        for (std::size_t i = 0; i < n_events; ++i) {
            const double* xh = lc.xhat.row(i);
            const double* du = d_u.row(i);
            double* dg = grad + lv.gamma.offset;
            double* db = grad + lv.beta.offset;
            for (std::size_t j = 0; j < width; ++j) {
                dg[j] += du[j] * xh[j];
                db[j] += du[j];
                const double dxhat = du[j] * gamma[j];
                m1[j] += dxhat;
                m2[j] += dxhat * xh[j];
            }
        }
        const double inv_n = 1.0 / static_cast<double>(n_events);
        for (std::size_t j = 0; j < width; ++j) {
            m1[j] *= inv_n;
            m2[j] *= inv_n;
        }
        Matrix d_z(n_events, width);
        for (std::size_t i = 0; i < n_events; ++i) {
            const double* xh = lc.xhat.row(i);
            const double* du = d_u.row(i);
            double* dz = d_z.row(i);
            for (std::size_t j = 0; j < width; ++j) {
                const double dxhat = du[j] * gamma[j];
                dz[j] = lc.inv_sigma[j] * (dxhat - m1[j] - xh[j] * m2[j]);
            }
        }

        // Dense backward.
        const Matrix h_in =
            l == 0 ? cache.x_norm : detail::layer_output(model, l - 1, cache.layers[l - 1]);
        raw::add_matmul_at(h_in.data(), n_events, h_in.cols(), d_z.data(), width,
                           grad + lv.w.offset);
        for (std::size_t i = 0; i < n_events; ++i) {
            const double* dz = d_z.row(i);
            double* db = grad + lv.b.offset;
            for (std::size_t j = 0; j < width; ++j) db[j] += dz[j];
        }
        if (l > 0) { // input gradients are not needed below the first layer
            d_h = Matrix(n_events, width);
            raw::add_matmul_bt(d_z.data(), n_events, width, model.params().data() + lv.w.offset,
                               width, d_h.data());
        }
    }

    // L2 kernel penalty gradient (hidden kernels only).
    if (topo.l2 != 0.0) {
        for (const auto& layer : lay.layers) {
            const double* w = model.params().data() + layer.w.offset;
            double* g = grad + layer.w.offset;
            for (std::size_t i = 0; i < layer.w.size; ++i) g[i] += 2.0 * topo.l2 * w[i];
        }
    }
    return result;
}

double eval_loss(const BagModel& model, const BagBatch& batch, LossKind loss) {
    check_batch(model, batch);
    check_labels(model.topology(), batch.labels);
    const Topology& topo = model.topology();
    if ((loss == LossKind::CategoricalCE) != (topo.head == HeadKind::MultiClassSoftmax))
        throw InvalidSpecError("loss kind does not match the model head");

    const Matrix emb = detail::run_stack(model, batch.events, false, nullptr, nullptr, nullptr);
    const auto width = static_cast<std::size_t>(topo.hidden_width);
    const auto out_dim = static_cast<std::size_t>(topo.head_out());
    const ParamLayout& lay = model.layout();

    double total = 0.0;
    std::vector<double> logits(out_dim), scratch(out_dim);
    for (std::size_t b = 0; b < batch.n_bags(); ++b) {
        const std::size_t lo = batch.offsets[b], hi = batch.offsets[b + 1];
        std::vector<double> p(width, 0.0);
        for (std::size_t r = lo; r < hi; ++r) {
            const double* e = emb.row(r);
            for (std::size_t j = 0; j < width; ++j) p[j] += e[j];
        }
        const double inv = 1.0 / static_cast<double>(hi - lo);
        for (double& v : p) v *= inv;

        const double* hw = model.params().data() + lay.head_w.offset;
        const double* hb = model.params().data() + lay.head_b.offset;
        for (std::size_t k = 0; k < out_dim; ++k) logits[k] = hb[k];
        for (std::size_t j = 0; j < width; ++j)
            for (std::size_t k = 0; k < out_dim; ++k) logits[k] += p[j] * hw[j * out_dim + k];
        total += head_loss(topo, logits, batch.labels[b], scratch);
    }
    return total / static_cast<double>(batch.n_bags()) + l2_penalty(model);
}

} // namespace amil::net
