#include "amil/llr.hpp"

#include <cmath>
#include <cstring>

#include "amil/errors.hpp"
#include "amil/rng.hpp"

namespace amil::stats {

namespace {

constexpr double kGridEps = 1e-12;

void require_head(const net::BagModel& model, net::HeadKind head, const char* what) {
    if (model.topology().head != head) throw HeadMismatchError(what);
}

std::uint64_t bag_content_key(const data::Bag& bag) {
    // FNV-1a over the raw feature bytes.
    std::uint64_t h = 0xcbf29ce484222325ull;
    const auto* bytes = reinterpret_cast<const unsigned char*>(bag.events.data());
    const std::size_t n = bag.events.size() * sizeof(double);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= bytes[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

} // namespace

double bag_llr_binary(const net::BagModel& model, const data::Bag& bag) {
    require_head(model, net::HeadKind::BinarySigmoid, "bag_llr_binary needs a binary head");
    return net::forward(model, bag).logits[0];
}

double bag_llr_multiclass(const net::BagModel& model, const data::Bag& bag, int k, int k0) {
    require_head(model, net::HeadKind::MultiClassSoftmax,
                 "bag_llr_multiclass needs a softmax head");
    const int n = model.topology().n_classes;
    if (k < 0 || k >= n || k0 < 0 || k0 >= n)
        throw InvalidParameterError("class index out of range");
    const auto out = net::forward(model, bag);
    return out.logits[static_cast<std::size_t>(k)] - out.logits[static_cast<std::size_t>(k0)];
}

double bag_llr_pnn(const net::BagModel& model, const data::Bag& bag, double theta, double theta0) {
    require_head(model, net::HeadKind::ParamBinary, "bag_llr_pnn needs a parameterized head");
    if (theta == theta0) return 0.0;
    return net::forward(model, bag, theta).logits[0] - net::forward(model, bag, theta0).logits[0];
}

double test_statistic(std::span<const double> bag_llrs) {
    if (bag_llrs.empty()) throw InsufficientDataError("empty test statistic");
    double t = 0.0;
    for (double v : bag_llrs) {
        if (!std::isfinite(v)) throw InvalidValueError("non-finite bag LLR");
        t += v;
    }
    return t;
}

LLRProfile llr_profile(const BagScorer& scorer, std::span<const data::Bag> bags,
                       std::span<const double> theta_grid, double theta0) {
    if (bags.empty()) throw InsufficientDataError("profile needs at least one bag");
    if (theta_grid.size() < 2) throw InvalidGridError("profile needs at least two grid points");
    for (std::size_t i = 1; i < theta_grid.size(); ++i)
        if (!(theta_grid[i] > theta_grid[i - 1]))
            throw InvalidGridError("theta grid must be strictly increasing");
    bool found = false;
    for (double t : theta_grid) found |= std::abs(t - theta0) < kGridEps;
    if (!found) throw InvalidGridError("theta0 must be a grid point");

    LLRProfile profile;
    profile.theta_grid.assign(theta_grid.begin(), theta_grid.end());
    profile.llr.assign(theta_grid.size(), 0.0);
    for (const auto& bag : bags) {
        profile.n_events_represented += bag.size();
        for (std::size_t i = 0; i < theta_grid.size(); ++i) {
            const double t = theta_grid[i];
            const double v = std::abs(t - theta0) < kGridEps ? 0.0 : scorer(bag, t, theta0);
            if (!std::isfinite(v)) throw InvalidValueError("non-finite profile value");
            profile.llr[i] += v;
        }
    }
    return profile;
}

BagScorer oracle_scorer(const data::EventFamily& family) {
    return [family](const data::Bag& bag, double theta, double theta0) {
        double acc = 0.0;
        for (std::size_t i = 0; i < bag.size(); ++i)
            acc += data::true_llr(family, bag.events.row_span(i), theta, theta0);
        return acc;
    };
}

BagScorer noisy_oracle_scorer(const data::EventFamily& family, double sigma2_eps,
                              double delta_theta_ref, std::uint64_t seed) {
    if (!(sigma2_eps >= 0.0)) throw InvalidParameterError("sigma2_eps must be >= 0");
    if (delta_theta_ref == 0.0) throw InvalidParameterError("delta_theta_ref must be non-zero");
    const double sigma = std::sqrt(sigma2_eps);
    const BagScorer oracle = oracle_scorer(family);
    return [oracle, sigma, delta_theta_ref, seed](const data::Bag& bag, double theta,
                                                  double theta0) {
        rng::Stream stream(rng::derive(seed, "bag-noise", bag_content_key(bag)));
        const double eps = sigma * stream.next_normal();
        return oracle(bag, theta, theta0) + eps * (theta - theta0) / delta_theta_ref;
    };
}

BagScorer multiclass_scorer(const net::BagModel& model, std::span<const double> class_thetas) {
    require_head(model, net::HeadKind::MultiClassSoftmax,
                 "multiclass_scorer needs a softmax head");
    if (static_cast<int>(class_thetas.size()) != model.topology().n_classes)
        throw InvalidGridError("one theta per class required");
    std::vector<double> thetas(class_thetas.begin(), class_thetas.end());
    const net::BagModel* m = &model;
    return [m, thetas](const data::Bag& bag, double theta, double theta0) {
        auto index_of = [&thetas](double t) {
            for (std::size_t i = 0; i < thetas.size(); ++i)
                if (std::abs(thetas[i] - t) < kGridEps) return static_cast<int>(i);
            throw InvalidGridError("theta is not one of the model's classes");
        };
        return bag_llr_multiclass(*m, bag, index_of(theta), index_of(theta0));
    };
}

BagScorer pnn_scorer(const net::BagModel& model) {
    require_head(model, net::HeadKind::ParamBinary, "pnn_scorer needs a parameterized head");
    const net::BagModel* m = &model;
    return [m](const data::Bag& bag, double theta, double theta0) {
        return bag_llr_pnn(*m, bag, theta, theta0);
    };
}

Matrix multiclass_bag_probs(const net::BagModel& model, std::span<const data::Bag> bags) {
    require_head(model, net::HeadKind::MultiClassSoftmax,
                 "multiclass_bag_probs needs a softmax head");
    if (bags.empty()) throw InsufficientDataError("no bags to score");
    const auto k = static_cast<std::size_t>(model.topology().n_classes);

    // One embedding pass over all events of all bags.
    std::size_t total = 0;
    for (const auto& bag : bags) total += bag.size();
    Matrix events(total, bags[0].events.cols());
    std::size_t r = 0;
    for (const auto& bag : bags) {
        std::memcpy(events.row(r), bag.events.data(), bag.events.size() * sizeof(double));
        r += bag.size();
    }
    const Matrix emb = net::embed(model, events);

    Matrix probs(bags.size(), k);
    std::size_t row = 0;
    const std::size_t width = emb.cols();
    std::vector<double> pooled(width);
    for (std::size_t b = 0; b < bags.size(); ++b) {
        std::fill(pooled.begin(), pooled.end(), 0.0);
        for (std::size_t i = 0; i < bags[b].size(); ++i, ++row) {
            const double* e = emb.row(row);
            for (std::size_t j = 0; j < width; ++j) pooled[j] += e[j];
        }
        for (double& v : pooled) v /= static_cast<double>(bags[b].size());
        const auto out = net::head_forward(model, pooled);
        std::memcpy(probs.row(b), out.probs.data(), k * sizeof(double));
    }
    return probs;
}

Matrix pnn_bag_probs(const net::BagModel& model, std::span<const data::Bag> bags,
                     std::span<const double> theta_grid) {
    require_head(model, net::HeadKind::ParamBinary, "pnn_bag_probs needs a parameterized head");
    if (bags.empty()) throw InsufficientDataError("no bags to score");
    Matrix probs(bags.size(), theta_grid.size());
    for (std::size_t g = 0; g < theta_grid.size(); ++g) {
        std::size_t total = 0;
        for (const auto& bag : bags) total += bag.size();
        Matrix events(total, bags[0].events.cols() + 1);
        std::size_t r = 0;
        for (const auto& bag : bags) {
            for (std::size_t i = 0; i < bag.size(); ++i, ++r) {
                std::memcpy(events.row(r), bag.events.row(i), bag.events.cols() * sizeof(double));
                events(r, bag.events.cols()) = theta_grid[g];
            }
        }
        const Matrix emb = net::embed(model, events);
        std::size_t row = 0;
        const std::size_t width = emb.cols();
        std::vector<double> pooled(width);
        for (std::size_t b = 0; b < bags.size(); ++b) {
            std::fill(pooled.begin(), pooled.end(), 0.0);
            for (std::size_t i = 0; i < bags[b].size(); ++i, ++row) {
                const double* e = emb.row(row);
                for (std::size_t j = 0; j < width; ++j) pooled[j] += e[j];
            }
            for (double& v : pooled) v /= static_cast<double>(bags[b].size());
            probs(b, g) = net::head_forward(model, pooled).probs[0];
        }
    }
    return probs;
}

} // namespace amil::stats
