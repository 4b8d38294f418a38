#pragma once

#include <span>

namespace amil::stats {

// Probability that a random positive outscores a random negative, ties
// counted half (the Mann-Whitney convention). Labels are 0/1.
double roc_auc(std::span<const double> scores, std::span<const int> labels);

} // namespace amil::stats
