#pragma once

#include <functional>
#include <span>
#include <vector>

#include "amil/bags.hpp"
#include "amil/families.hpp"
#include "amil/model.hpp"

namespace amil::stats {

// Estimated log-likelihood ratio of one bag between theta and theta0.
using BagScorer = std::function<double(const data::Bag&, double theta, double theta0)>;

// The pre-sigmoid logit of a binary head is the bag LLR estimate.
double bag_llr_binary(const net::BagModel& model, const data::Bag& bag);

// log p_k - log p_k0 of a softmax head, computed as the logit difference.
double bag_llr_multiclass(const net::BagModel& model, const data::Bag& bag, int k, int k0);

// logit(bag, theta) - logit(bag, theta0) of a parameterized binary head.
double bag_llr_pnn(const net::BagModel& model, const data::Bag& bag, double theta, double theta0);

// T(D) = sum of per-bag LLR estimates.
double test_statistic(std::span<const double> bag_llrs);

struct LLRProfile {
    std::vector<double> theta_grid;
    std::vector<double> llr;
    std::size_t n_events_represented = 0;
};

// Dataset profile: profile[theta] = sum over bags of scorer(bag, theta, theta0).
// theta0 must be a grid point; the profile is exactly zero there.
LLRProfile llr_profile(const BagScorer& scorer, std::span<const data::Bag> bags,
                       std::span<const double> theta_grid, double theta0);

// Exact-likelihood scorer for a synthetic family.
BagScorer oracle_scorer(const data::EventFamily& family);

// Oracle scorer with additive per-bag noise: at separation |theta - theta0| =
// delta_theta_ref the injected term is Normal(0, sigma2_eps), scaled linearly
// in (theta - theta0) elsewhere. The noise draw is a pure function of the bag
// contents, so one bag sees one error across the whole grid.
BagScorer noisy_oracle_scorer(const data::EventFamily& family, double sigma2_eps,
                              double delta_theta_ref, std::uint64_t seed);

// Multi-class scorer over a theta grid that matches the model's class order.
BagScorer multiclass_scorer(const net::BagModel& model, std::span<const double> class_thetas);

BagScorer pnn_scorer(const net::BagModel& model);

// Per-bag class probabilities of a softmax model, one forward pass per bag.
Matrix multiclass_bag_probs(const net::BagModel& model, std::span<const data::Bag> bags);

// Per-bag PNN probabilities over a theta grid: [n_bags x n_grid].
Matrix pnn_bag_probs(const net::BagModel& model, std::span<const data::Bag> bags,
                     std::span<const double> theta_grid);

} // namespace amil::stats
