#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tlink/features.hpp"

namespace tlink {

/// Classifier output per pair, with ground truth when known.
struct ScoredPairs {
    std::vector<VertexPair> pairs;
    std::vector<double> scores;
    std::optional<std::vector<std::uint8_t>> labels;

    std::size_t size() const noexcept { return pairs.size(); }
};

/// Mann-Whitney AUC from average ranks; tied scores count as half a win.
inline double auc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
    if (scores.size() != labels.size()) throw std::invalid_argument("auc: scores and labels differ in length");
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    double rank_sum_pos = 0.0;
    std::uint64_t num_pos = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i + 1;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k) {
            if (labels[order[k]]) {
                rank_sum_pos += avg_rank;
                ++num_pos;
            }
        }
        i = j;
    }
    const std::uint64_t num_neg = scores.size() - num_pos;
    if (num_pos == 0 || num_neg == 0) throw std::invalid_argument("auc: needs at least one positive and one negative");
    const double p = static_cast<double>(num_pos);
    return (rank_sum_pos - p * (p + 1.0) / 2.0) / (p * static_cast<double>(num_neg));
}

inline double auc(const std::vector<double>& scores, const std::vector<std::uint8_t>& labels) {
    return auc(std::span<const double>(scores), std::span<const std::uint8_t>(labels));
}

inline constexpr double kLoglossClamp = 1e-15;

/// Mean binary cross-entropy with probabilities clamped to [1e-15, 1 - 1e-15].
inline double logloss(std::span<const double> scores, std::span<const std::uint8_t> labels) {
    if (scores.size() != labels.size()) throw std::invalid_argument("logloss: scores and labels differ in length");
    if (scores.empty()) throw std::invalid_argument("logloss: empty input");
    double total = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const double p = std::clamp(scores[i], kLoglossClamp, 1.0 - kLoglossClamp);
        total -= labels[i] ? std::log(p) : std::log1p(-p);
    }
    return total / static_cast<double>(scores.size());
}

inline double logloss(const std::vector<double>& scores, const std::vector<std::uint8_t>& labels) {
    return logloss(std::span<const double>(scores), std::span<const std::uint8_t>(labels));
}

}  // namespace tlink
