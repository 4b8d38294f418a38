#include "amil/roc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "amil/errors.hpp"

namespace amil::stats {

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) throw ShapeError("one label per score required");
    std::size_t n_pos = 0, n_neg = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != 0 && labels[i] != 1) throw InvalidLabelError("labels must be 0 or 1");
        if (!std::isfinite(scores[i])) throw InvalidValueError("non-finite score");
        labels[i] ? ++n_pos : ++n_neg;
    }
    if (n_pos == 0 || n_neg == 0)
        throw InvalidSpecError("roc_auc needs both classes present");

    // Rank-sum with average ranks over ties.
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&scores](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + j) + 1.0; // 1-based
        for (std::size_t k = i; k <= j; ++k)
            if (labels[order[k]]) rank_sum_pos += avg_rank;
        i = j + 1;
    }
    const double u = rank_sum_pos - 0.5 * static_cast<double>(n_pos) * static_cast<double>(n_pos + 1);
    return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

} // namespace amil::stats
