#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tlink/evalx.hpp"
#include "tlink/features.hpp"
#include "tlink/parallel.hpp"
#include "tlink/random.hpp"
#include "tlink/text_io.hpp"

namespace tlink::gbdt {

struct GBDTConfig {
    std::size_t max_leaves = 16;
    std::size_t max_depth = 4;
    double row_fraction = 0.8;
    double column_fraction = 0.9;
    double learning_rate = 0.01;
    std::size_t max_rounds = 10000;
    /// 0 disables early stopping and keeps every round.
    std::size_t early_stop_rounds = 100;
    std::size_t min_samples_per_leaf = 20;
    double l2_leaf_penalty = 0.0;
    std::size_t histogram_bins = 255;
    std::uint64_t seed = 0;
    std::size_t workers = 1;

    void validate() const {
        if (max_leaves < 2) throw std::invalid_argument("max_leaves must be >= 2");
        if (max_depth < 1) throw std::invalid_argument("max_depth must be >= 1");
        if (histogram_bins < 2 || histogram_bins > 65534) throw std::invalid_argument("histogram_bins must be in [2, 65534]");
        if (!(row_fraction > 0.0 && row_fraction <= 1.0)) throw std::invalid_argument("row_fraction must be in (0, 1]");
        if (!(column_fraction > 0.0 && column_fraction <= 1.0)) throw std::invalid_argument("column_fraction must be in (0, 1]");
        if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be > 0");
        if (!(l2_leaf_penalty >= 0.0)) throw std::invalid_argument("l2_leaf_penalty must be >= 0");
        if (min_samples_per_leaf < 1) throw std::invalid_argument("min_samples_per_leaf must be >= 1");
    }
};

/// A split is kept only when its gain beats this fraction of the node's hessian
/// sum; below that the gain is indistinguishable from summation noise.
inline constexpr double kRelativeMinGain = 1e-10;

/// Internal nodes route x <= threshold to the left child and NaN to the side
/// recorded in missing_left. Leaves have feature == -1.
struct TreeNode {
    std::int32_t feature = -1;
    double threshold = 0.0;
    bool missing_left = false;
    std::int32_t left = -1;
    std::int32_t right = -1;
    double gain = 0.0;
    double leaf_value = 0.0;

    bool is_leaf() const noexcept { return feature < 0; }
};

struct RegressionTree {
    std::vector<TreeNode> nodes;

    std::size_t leaf_index(std::span<const double> row) const {
        std::size_t i = 0;
        while (!nodes[i].is_leaf()) {
            const auto& n = nodes[i];
            const double x = row[static_cast<std::size_t>(n.feature)];
            const bool go_left = std::isnan(x) ? n.missing_left : x <= n.threshold;
            i = static_cast<std::size_t>(go_left ? n.left : n.right);
        }
        return i;
    }

    double predict(std::span<const double> row) const { return nodes[leaf_index(row)].leaf_value; }

    std::size_t num_leaves() const {
        return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.is_leaf(); }));
    }

    /// Edges on the longest root-to-leaf path.
    std::size_t depth() const {
        std::vector<std::size_t> d(nodes.size(), 0);
        std::size_t deepest = 0;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (nodes[i].is_leaf()) continue;
            d[static_cast<std::size_t>(nodes[i].left)] = d[i] + 1;
            d[static_cast<std::size_t>(nodes[i].right)] = d[i] + 1;
            deepest = std::max(deepest, d[i] + 1);
        }
        return deepest;
    }
};

struct TrainingHistory {
    std::vector<double> train_logloss;  // after each round
    std::vector<double> valid_auc;      // after each round, empty without validation data
};

struct GBDTModel {
    GBDTConfig config;
    std::vector<std::string> column_names;
    double init_score = 0.0;
    std::vector<RegressionTree> trees;
    std::vector<double> feature_importance;
    std::size_t best_round = 0;
    TrainingHistory history;  // not serialized

    double raw_score(std::span<const double> row) const {
        double s = init_score;
        for (const auto& t : trees) s += t.predict(row);
        return s;
    }
};

inline double sigmoid(double x) {
    const double p = 1.0 / (1.0 + std::exp(-x));
    return std::clamp(p, std::numeric_limits<double>::min(), std::nextafter(1.0, 0.0));
}

// ---------------------------------------------------------------------------
// Binning

/// Quantile bins for one column. Value bins 0..k-1 are separated by
/// `thresholds` (x <= thresholds[b] lands in bin <= b); NaN maps to bin k.
class BinMapper {
public:
    BinMapper() = default;

    /// Cut points depend only on the ordering of the values, so any strictly
    /// increasing transform of the column yields the same bin assignment.
    BinMapper(std::span<const double> column, std::size_t max_bins) {
        std::vector<double> sorted;
        sorted.reserve(column.size());
        for (double x : column) {
            if (!std::isnan(x)) sorted.push_back(x);
        }
        std::sort(sorted.begin(), sorted.end());
        if (sorted.empty()) return;
        has_values_ = true;

        std::vector<double> distinct;
        std::vector<std::size_t> last_pos;  // last sorted position of each distinct value
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            if (distinct.empty() || sorted[i] != distinct.back()) {
                distinct.push_back(sorted[i]);
                last_pos.push_back(i);
            } else {
                last_pos.back() = i;
            }
        }

        std::vector<std::size_t> cut_after;  // distinct indices that close a bin
        if (distinct.size() <= max_bins) {
            for (std::size_t j = 0; j + 1 < distinct.size(); ++j) cut_after.push_back(j);
        } else {
            const std::size_t m = sorted.size();
            for (std::size_t b = 1; b < max_bins; ++b) {
                const std::size_t pos = (b * m) / max_bins;  // first sorted position of bin b
                if (pos == 0) continue;
                auto it = std::lower_bound(last_pos.begin(), last_pos.end(), pos - 1);
                const auto j = static_cast<std::size_t>(it - last_pos.begin());
                if (j + 1 < distinct.size() && (cut_after.empty() || cut_after.back() < j)) cut_after.push_back(j);
            }
        }
        for (std::size_t j : cut_after) thresholds_.push_back(midpoint(distinct[j], distinct[j + 1]));
    }

    std::size_t num_value_bins() const noexcept { return has_values_ ? thresholds_.size() + 1 : 0; }
    std::size_t missing_bin() const noexcept { return num_value_bins(); }
    const std::vector<double>& thresholds() const noexcept { return thresholds_; }

    std::uint16_t bin(double x) const {
        if (std::isnan(x) || !has_values_) return static_cast<std::uint16_t>(missing_bin());
        return static_cast<std::uint16_t>(std::lower_bound(thresholds_.begin(), thresholds_.end(), x) - thresholds_.begin());
    }

    /// Threshold that sends value bins 0..b left.
    double threshold_after(std::size_t b) const {
        return b < thresholds_.size() ? thresholds_[b] : std::numeric_limits<double>::infinity();
    }

    /// Separator strictly between a and b that still admits a (a < b).
    static double midpoint(double a, double b) {
        const double m = a + (b - a) / 2.0;
        return (m >= a && m < b) ? m : a;
    }

private:
    bool has_values_ = false;
    std::vector<double> thresholds_;
};

// ---------------------------------------------------------------------------
// Tree growth

struct GradientStats {
    double g = 0.0;
    double h = 0.0;
    std::size_t count = 0;

    GradientStats& operator+=(const GradientStats& o) {
        g += o.g;
        h += o.h;
        count += o.count;
        return *this;
    }
};

inline GradientStats operator-(GradientStats a, const GradientStats& b) {
    a.g -= b.g;
    a.h -= b.h;
    a.count -= b.count;
    return a;
}

struct SplitCandidate {
    bool valid = false;
    std::size_t feature = 0;
    std::size_t bin = 0;  // value bins 0..bin go left
    bool missing_left = false;
    double gain = 0.0;
};

namespace detail {

inline double leaf_score(const GradientStats& s, double lambda) { return s.g * s.g / (s.h + lambda); }

struct Binned {
    std::vector<BinMapper> mappers;
    std::vector<std::vector<std::uint16_t>> bins;  // [column][row]
};

inline Binned bin_features(const FeatureMatrix& x, std::size_t max_bins, std::size_t workers) {
    Binned b;
    b.mappers.resize(x.cols());
    b.bins.resize(x.cols());
    parallel_for(x.cols(), workers, [&](std::size_t c) {
        const auto col = x.column(c);
        b.mappers[c] = BinMapper(col, max_bins);
        b.bins[c].resize(col.size());
        for (std::size_t r = 0; r < col.size(); ++r) b.bins[c][r] = b.mappers[c].bin(col[r]);
    });
    return b;
}

class TreeBuilder {
public:
    TreeBuilder(const Binned& data, const GBDTConfig& config, std::span<const double> grad, std::span<const double> hess)
        : data_(data), config_(config), grad_(grad), hess_(hess) {}

    RegressionTree build(std::vector<std::size_t> rows, const std::vector<std::size_t>& columns) {
        columns_ = &columns;
        rows_ = std::move(rows);
        tree_ = RegressionTree{};
        open_.clear();

        GradientStats root;
        for (auto r : rows_) root += GradientStats{grad_[r], hess_[r], 1};
        add_leaf(0, rows_.size(), 0, root);

        std::size_t leaves = 1;
        while (leaves < config_.max_leaves) {
            // best gain first; ties go to the lowest node id
            std::size_t pick = open_.size();
            for (std::size_t i = 0; i < open_.size(); ++i) {
                if (!open_[i].split.valid) continue;
                if (pick == open_.size() || open_[i].split.gain > open_[pick].split.gain ||
                    (open_[i].split.gain == open_[pick].split.gain && open_[i].node < open_[pick].node)) {
                    pick = i;
                }
            }
            if (pick == open_.size()) break;
            split_leaf(pick);
            ++leaves;
        }

        for (const auto& leaf : open_) {
            const double denom = leaf.stats.h + config_.l2_leaf_penalty;
            tree_.nodes[leaf.node].leaf_value = denom > 0.0 ? -leaf.stats.g / denom * config_.learning_rate : 0.0;
        }
        return std::move(tree_);
    }

private:
    struct OpenLeaf {
        std::size_t node;
        std::size_t begin;
        std::size_t end;
        std::size_t depth;
        GradientStats stats;
        SplitCandidate split;
    };

    void add_leaf(std::size_t begin, std::size_t end, std::size_t depth, const GradientStats& stats) {
        OpenLeaf leaf{tree_.nodes.size(), begin, end, depth, stats, {}};
        tree_.nodes.emplace_back();
        if (depth < config_.max_depth && stats.count >= 2 * config_.min_samples_per_leaf) {
            leaf.split = find_split(begin, end, stats);
        }
        open_.push_back(leaf);
    }

    SplitCandidate find_split(std::size_t begin, std::size_t end, const GradientStats& parent) const {
        const auto& cols = *columns_;
        std::vector<SplitCandidate> per_column(cols.size());
        parallel_for(cols.size(), config_.workers, [&](std::size_t i) {
            per_column[i] = best_split_for_column(cols[i], begin, end, parent);
        });
        SplitCandidate best;
        for (const auto& c : per_column) {  // columns ascending, so strict > keeps the lowest index
            if (c.valid && (!best.valid || c.gain > best.gain)) best = c;
        }
        return best;
    }

    SplitCandidate best_split_for_column(std::size_t feature, std::size_t begin, std::size_t end,
                                         const GradientStats& parent) const {
        const auto& mapper = data_.mappers[feature];
        const auto& bins = data_.bins[feature];
        const std::size_t k = mapper.num_value_bins();
        std::vector<GradientStats> hist(k + 1);
        for (std::size_t i = begin; i < end; ++i) {
            const auto r = rows_[i];
            hist[bins[r]] += GradientStats{grad_[r], hess_[r], 1};
        }
        const GradientStats missing = hist[k];
        const double lambda = config_.l2_leaf_penalty;
        const double parent_score = leaf_score(parent, lambda);
        const double min_gain = kRelativeMinGain * (parent.h + lambda);

        SplitCandidate best;
        auto consider = [&](const GradientStats& left, std::size_t bin, bool missing_left) {
            const GradientStats right = parent - left;
            if (left.count < config_.min_samples_per_leaf || right.count < config_.min_samples_per_leaf) return;
            if (!(left.h + lambda > 0.0) || !(right.h + lambda > 0.0)) return;
            const double gain = leaf_score(left, lambda) + leaf_score(right, lambda) - parent_score;
            if (!(gain > min_gain)) return;
            if (!best.valid || gain > best.gain) best = {true, feature, bin, missing_left, gain};
        };

        GradientStats prefix;
        for (std::size_t b = 0; b + 1 < k; ++b) {
            prefix += hist[b];
            consider(prefix, b, false);
            if (missing.count > 0) {
                GradientStats with_missing = prefix;
                with_missing += missing;
                consider(with_missing, b, true);
            }
        }
        if (k > 0 && missing.count > 0) {
            prefix += hist[k - 1];
            consider(prefix, k - 1, false);  // every value left, missing right
        }
        return best;
    }

    void split_leaf(std::size_t index) {
        const OpenLeaf leaf = open_[index];
        const auto& split = leaf.split;
        const auto& bins = data_.bins[split.feature];
        const std::size_t missing_bin = data_.mappers[split.feature].missing_bin();

        auto goes_left = [&](std::size_t r) {
            const std::size_t b = bins[r];
            return b == missing_bin ? split.missing_left : b <= split.bin;
        };
        auto first = rows_.begin() + static_cast<std::ptrdiff_t>(leaf.begin);
        auto last = rows_.begin() + static_cast<std::ptrdiff_t>(leaf.end);
        auto mid = std::stable_partition(first, last, goes_left);
        const std::size_t mid_index = static_cast<std::size_t>(mid - rows_.begin());

        GradientStats left_stats;
        for (auto it = first; it != mid; ++it) left_stats += GradientStats{grad_[*it], hess_[*it], 1};
        GradientStats right_stats;
        for (auto it = mid; it != last; ++it) right_stats += GradientStats{grad_[*it], hess_[*it], 1};

        auto& node = tree_.nodes[leaf.node];
        node.feature = static_cast<std::int32_t>(split.feature);
        node.threshold = data_.mappers[split.feature].threshold_after(split.bin);
        node.missing_left = split.missing_left;
        node.gain = split.gain;
        node.left = static_cast<std::int32_t>(tree_.nodes.size());
        node.right = static_cast<std::int32_t>(tree_.nodes.size() + 1);

        open_.erase(open_.begin() + static_cast<std::ptrdiff_t>(index));
        add_leaf(leaf.begin, mid_index, leaf.depth + 1, left_stats);
        add_leaf(mid_index, leaf.end, leaf.depth + 1, right_stats);
    }

    const Binned& data_;
    const GBDTConfig& config_;
    std::span<const double> grad_;
    std::span<const double> hess_;
    const std::vector<std::size_t>* columns_ = nullptr;
    std::vector<std::size_t> rows_;
    RegressionTree tree_;
    std::vector<OpenLeaf> open_;
};

/// `count` sorted indices drawn without replacement from [0, n).
inline std::vector<std::size_t> subsample(std::size_t n, double fraction, Rng& rng) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    if (fraction >= 1.0) return idx;
    const std::size_t count = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n))));
    for (std::size_t i = 0; i < count; ++i) std::swap(idx[i], idx[i + uniform_index(rng, n - i)]);
    idx.resize(count);
    std::sort(idx.begin(), idx.end());
    return idx;
}

inline void check_labels(const FeatureMatrix& x, std::span<const std::uint8_t> y, const char* what) {
    if (x.rows() != y.size()) {
        throw std::invalid_argument(std::string(what) + ": " + std::to_string(x.rows()) + " feature rows but " +
                                    std::to_string(y.size()) + " labels");
    }
    for (auto label : y) {
        if (label > 1) throw std::invalid_argument(std::string(what) + ": labels must be 0 or 1");
    }
}

}  // namespace detail

/// Builds a single tree on the given gradients; exposed for testing tree growth
/// in isolation. Uses every row and column.
inline RegressionTree grow_tree(const FeatureMatrix& x, std::span<const double> grad, std::span<const double> hess,
                                const GBDTConfig& config) {
    config.validate();
    const auto binned = detail::bin_features(x, config.histogram_bins, config.workers);
    std::vector<std::size_t> rows(x.rows()), cols(x.cols());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    std::iota(cols.begin(), cols.end(), std::size_t{0});
    detail::TreeBuilder builder(binned, config, grad, hess);
    return builder.build(std::move(rows), cols);
}

/// Logistic-loss boosting with leaf-wise histogram trees. With validation data,
/// the model is truncated to the round with the best validation AUC.
inline GBDTModel train(const FeatureMatrix& features, std::span<const std::uint8_t> labels,
                       const FeatureMatrix& valid_features, std::span<const std::uint8_t> valid_labels,
                       const GBDTConfig& config) {
    config.validate();
    detail::check_labels(features, labels, "train");
    detail::check_labels(valid_features, valid_labels, "validation");
    if (features.rows() == 0 || features.cols() == 0) throw std::invalid_argument("train: empty feature matrix");
    const bool has_valid = valid_features.rows() > 0;
    if (has_valid && valid_features.column_names() != features.column_names()) {
        throw std::invalid_argument("train: validation columns differ from training columns");
    }
    const auto pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), std::uint8_t{1}));
    const std::size_t neg = labels.size() - pos;
    if (pos == 0 || neg == 0) throw std::invalid_argument("train: labels are all one class");
    if (has_valid) {
        const auto vpos = static_cast<std::size_t>(std::count(valid_labels.begin(), valid_labels.end(), std::uint8_t{1}));
        if (vpos == 0 || vpos == valid_labels.size()) throw std::invalid_argument("train: validation labels are all one class");
    }

    GBDTModel model;
    model.config = config;
    model.column_names = features.column_names();
    model.init_score = std::log(static_cast<double>(pos) / static_cast<double>(neg));
    model.feature_importance.assign(features.cols(), 0.0);

    const std::size_t n = features.rows();
    const auto binned = detail::bin_features(features, config.histogram_bins, config.workers);
    std::vector<double> score(n, model.init_score), grad(n), hess(n), prob(n);
    std::vector<double> valid_score(valid_features.rows(), model.init_score);

    Rng rng(config.seed);
    detail::TreeBuilder builder(binned, config, grad, hess);
    double best_auc = -1.0;

    for (std::size_t round = 1; round <= config.max_rounds; ++round) {
        parallel_for(n, config.workers, [&](std::size_t i) {
            const double p = 1.0 / (1.0 + std::exp(-score[i]));
            grad[i] = p - static_cast<double>(labels[i]);
            hess[i] = p * (1.0 - p);
        });
        auto rows = detail::subsample(n, config.row_fraction, rng);
        auto cols = detail::subsample(features.cols(), config.column_fraction, rng);
        auto tree = builder.build(std::move(rows), cols);

        parallel_for(n, config.workers, [&](std::size_t i) {
            score[i] += tree.predict(features.row(i));
            prob[i] = sigmoid(score[i]);
        });
        model.history.train_logloss.push_back(logloss(prob, labels));
        model.trees.push_back(std::move(tree));

        if (has_valid) {
            const auto& t = model.trees.back();
            parallel_for(valid_score.size(), config.workers,
                         [&](std::size_t i) { valid_score[i] += t.predict(valid_features.row(i)); });
            const double a = auc(valid_score, valid_labels);
            model.history.valid_auc.push_back(a);
            if (a > best_auc) {
                best_auc = a;
                model.best_round = round;
            }
            if (config.early_stop_rounds > 0 && round - model.best_round >= config.early_stop_rounds) break;
        }
    }
    if (!has_valid || config.early_stop_rounds == 0) model.best_round = model.trees.size();
    model.trees.resize(model.best_round);

    for (const auto& t : model.trees) {
        for (const auto& node : t.nodes) {
            if (!node.is_leaf()) model.feature_importance[static_cast<std::size_t>(node.feature)] += node.gain;
        }
    }
    return model;
}

inline GBDTModel train(const FeatureMatrix& features, const std::vector<std::uint8_t>& labels,
                       const FeatureMatrix& valid_features, const std::vector<std::uint8_t>& valid_labels,
                       const GBDTConfig& config) {
    return train(features, std::span<const std::uint8_t>(labels), valid_features,
                 std::span<const std::uint8_t>(valid_labels), config);
}

inline std::vector<double> predict(const GBDTModel& model, const FeatureMatrix& features, std::size_t workers = 1) {
    if (features.column_names() != model.column_names) {
        throw std::invalid_argument("predict: feature columns do not match the model's training columns");
    }
    std::vector<double> out(features.rows());
    parallel_for(out.size(), workers, [&](std::size_t i) { out[i] = sigmoid(model.raw_score(features.row(i))); });
    return out;
}

// ---------------------------------------------------------------------------
// Model file (format described in docs/model_format.md)

inline constexpr const char* kModelMagic = "tlink-gbdt-model";
inline constexpr int kModelVersion = 1;

namespace detail {

inline std::string hex(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%a", x);
    return buf;
}

inline double parse_hex(const std::string& s) {
    double x = 0;
    if (!io::parse_double(s, x)) throw std::runtime_error("model file: bad number '" + s + "'");
    return x;
}

}  // namespace detail

inline void save_model(const GBDTModel& model, const std::string& path) {
    auto out = io::open_out(path);
    const auto& c = model.config;
    out << kModelMagic << '\n' << "version " << kModelVersion << '\n';
    out << "config max_leaves=" << c.max_leaves << " max_depth=" << c.max_depth
        << " row_fraction=" << detail::hex(c.row_fraction) << " column_fraction=" << detail::hex(c.column_fraction)
        << " learning_rate=" << detail::hex(c.learning_rate) << " max_rounds=" << c.max_rounds
        << " early_stop_rounds=" << c.early_stop_rounds << " min_samples_per_leaf=" << c.min_samples_per_leaf
        << " l2_leaf_penalty=" << detail::hex(c.l2_leaf_penalty) << " histogram_bins=" << c.histogram_bins
        << " seed=" << c.seed << '\n';
    out << "columns " << model.column_names.size() << '\n';
    for (const auto& name : model.column_names) out << name << '\n';
    out << "init_score " << detail::hex(model.init_score) << '\n';
    out << "best_round " << model.best_round << '\n';
    out << "trees " << model.trees.size() << '\n';
    for (std::size_t t = 0; t < model.trees.size(); ++t) {
        out << "tree " << t << " nodes " << model.trees[t].nodes.size() << '\n';
        for (const auto& n : model.trees[t].nodes) {
            out << n.feature << ' ' << detail::hex(n.threshold) << ' ' << int{n.missing_left} << ' ' << n.left << ' '
                << n.right << ' ' << detail::hex(n.gain) << ' ' << detail::hex(n.leaf_value) << '\n';
        }
    }
    out << "importance\n";
    for (std::size_t j = 0; j < model.feature_importance.size(); ++j) {
        out << model.column_names[j] << ' ' << detail::hex(model.feature_importance[j]) << '\n';
    }
    out << "end\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline GBDTModel load_model(const std::string& path) {
    auto in = io::open_in(path);
    std::size_t lineno = 0;
    std::string line;
    auto next_line = [&]() -> std::string {
        if (!std::getline(in, line)) throw io::ParseError(path, lineno + 1, "unexpected end of file (truncated model?)");
        ++lineno;
        return line;
    };
    auto expect_word = [&](std::istringstream& ss, const std::string& word) {
        std::string w;
        if (!(ss >> w) || w != word) throw io::ParseError(path, lineno, "expected '" + word + "'");
    };
    auto read_count = [&](std::istringstream& ss) {
        long long x = -1;
        if (!(ss >> x) || x < 0) throw io::ParseError(path, lineno, "expected a count");
        return static_cast<std::size_t>(x);
    };

    if (next_line() != kModelMagic) throw io::ParseError(path, 1, "not a tlink GBDT model (bad magic header)");
    {
        std::istringstream ss(next_line());
        expect_word(ss, "version");
        long long version = 0;
        if (!(ss >> version)) throw io::ParseError(path, lineno, "missing version number");
        if (version != kModelVersion) {
            throw io::ParseError(path, lineno, "unsupported model version " + std::to_string(version) +
                                                   " (this build reads version " + std::to_string(kModelVersion) + ")");
        }
    }

    GBDTModel model;
    {
        std::istringstream ss(next_line());
        expect_word(ss, "config");
        std::string kv;
        while (ss >> kv) {
            auto eq = kv.find('=');
            if (eq == std::string::npos) throw io::ParseError(path, lineno, "bad config entry '" + kv + "'");
            const std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
            auto& c = model.config;
            auto as_count = [&] {
                long long x = -1;
                if (!io::parse_int(value, x) || x < 0) throw io::ParseError(path, lineno, "bad value for '" + key + "'");
                return static_cast<std::size_t>(x);
            };
            if (key == "max_leaves") c.max_leaves = as_count();
            else if (key == "max_depth") c.max_depth = as_count();
            else if (key == "row_fraction") c.row_fraction = detail::parse_hex(value);
            else if (key == "column_fraction") c.column_fraction = detail::parse_hex(value);
            else if (key == "learning_rate") c.learning_rate = detail::parse_hex(value);
            else if (key == "max_rounds") c.max_rounds = as_count();
            else if (key == "early_stop_rounds") c.early_stop_rounds = as_count();
            else if (key == "min_samples_per_leaf") c.min_samples_per_leaf = as_count();
            else if (key == "l2_leaf_penalty") c.l2_leaf_penalty = detail::parse_hex(value);
            else if (key == "histogram_bins") c.histogram_bins = as_count();
            else if (key == "seed") c.seed = as_count();
            else throw io::ParseError(path, lineno, "unknown config key '" + key + "'");
        }
    }
    {
        std::istringstream ss(next_line());
        expect_word(ss, "columns");
        const auto count = read_count(ss);
        for (std::size_t i = 0; i < count; ++i) model.column_names.push_back(next_line());
    }
    {
        std::istringstream ss(next_line());
        expect_word(ss, "init_score");
        std::string v;
        ss >> v;
        model.init_score = detail::parse_hex(v);
    }
    {
        std::istringstream ss(next_line());
        expect_word(ss, "best_round");
        model.best_round = read_count(ss);
    }
    std::size_t num_trees = 0;
    {
        std::istringstream ss(next_line());
        expect_word(ss, "trees");
        num_trees = read_count(ss);
    }
    for (std::size_t t = 0; t < num_trees; ++t) {
        std::istringstream ss(next_line());
        expect_word(ss, "tree");
        if (read_count(ss) != t) throw io::ParseError(path, lineno, "tree index out of sequence");
        expect_word(ss, "nodes");
        const auto num_nodes = read_count(ss);
        if (num_nodes == 0) throw io::ParseError(path, lineno, "tree without nodes");
        RegressionTree tree;
        for (std::size_t i = 0; i < num_nodes; ++i) {
            std::istringstream ns(next_line());
            TreeNode node;
            std::string thr, gain, leaf;
            int missing_left = 0;
            if (!(ns >> node.feature >> thr >> missing_left >> node.left >> node.right >> gain >> leaf)) {
                throw io::ParseError(path, lineno, "malformed node");
            }
            node.threshold = detail::parse_hex(thr);
            node.missing_left = missing_left != 0;
            node.gain = detail::parse_hex(gain);
            node.leaf_value = detail::parse_hex(leaf);
            if (!node.is_leaf()) {
                const auto nn = static_cast<std::int32_t>(num_nodes);
                if (node.feature >= static_cast<std::int32_t>(model.column_names.size()) || node.left <= 0 ||
                    node.right <= 0 || node.left >= nn || node.right >= nn) {
                    throw io::ParseError(path, lineno, "node references out of range");
                }
            }
            tree.nodes.push_back(node);
        }
        model.trees.push_back(std::move(tree));
    }
    {
        std::istringstream ss(next_line());
        expect_word(ss, "importance");
        model.feature_importance.resize(model.column_names.size());
        for (std::size_t j = 0; j < model.column_names.size(); ++j) {
            std::istringstream is(next_line());
            std::string name, value;
            if (!(is >> name >> value) || name != model.column_names[j]) {
                throw io::ParseError(path, lineno, "importance table out of order");
            }
            model.feature_importance[j] = detail::parse_hex(value);
        }
    }
    if (next_line() != "end") throw io::ParseError(path, lineno, "expected 'end'");
    return model;
}

}  // namespace tlink::gbdt
