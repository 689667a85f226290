#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdlib>
#include <iomanip>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tlink/blend.hpp"
#include "tlink/calendar.hpp"
#include "tlink/dataset.hpp"
#include "tlink/evalx.hpp"
#include "tlink/features.hpp"
#include "tlink/gbdt.hpp"
#include "tlink/synth.hpp"
#include "tlink/temporal_graph.hpp"
#include "tlink/text_io.hpp"

namespace tlink {

struct ConfigKey {
    std::string_view name;
    std::string_view default_value;
    std::string_view help;
};

// clang-format off
inline constexpr std::array kConfigKeys{
    ConfigKey{"workers", "1", "worker threads; results do not depend on it"},
    ConfigKey{"seed", "42", "seed for synth, split sampling and GBDT subsampling"},
    ConfigKey{"edges", "edges.txt", "edge list 'u v day' (written by synth, read by ingest/split/features)"},
    ConfigKey{"num_vertices", "0", "vertex count override; 0 infers it (or reads <edges>.meta)"},

    ConfigKey{"synth_vertices", "2000", "synth: number of vertices"},
    ConfigKey{"synth_edges_per_day", "11.5", "synth: mean edge events per day"},
    ConfigKey{"synth_exponent", "1.0", "synth: preferential-attachment exponent"},
    ConfigKey{"synth_days", "8766", "synth: number of days from 1994-01-01"},
    ConfigKey{"synth_closure", "0.3", "synth: probability of closing a triangle"},

    ConfigKey{"graph_out", "", "ingest: write the validated, day-sorted edge list here"},
    ConfigKey{"decayed_out", "", "ingest: write the decayed adjacency 'u,v,weight' here"},
    ConfigKey{"decay_as_of", "2017-12-31", "ingest: reference date of the decayed adjacency"},
    ConfigKey{"decay_rate", "0.0001", "ingest: per-day decay rate (0 gives binary weights)"},

    ConfigKey{"split_t1", "2011-12-31", "split: observation date t1"},
    ConfigKey{"split_t2", "2014-12-31", "split: label horizon t2"},
    ConfigKey{"split_size", "10000000", "split: total pairs N (all positives plus sampled negatives)"},
    ConfigKey{"split_out", "split.csv", "split: output 'u,v,label' (plus .meta sidecar)"},
    ConfigKey{"augment_swap", "false", "split: also emit every pair reversed"},

    ConfigKey{"features_split", "split.csv", "features: split whose pairs get feature rows"},
    ConfigKey{"features_t1", "", "features: observation date; empty uses t1 from the split sidecar"},
    ConfigKey{"features_out", "features.csv", "features: output feature matrix"},
    ConfigKey{"since", "2000-01-01", "features: first day of the recent sub-network"},
    ConfigKey{"pagerank_damping", "0.85", "features: PageRank damping"},
    ConfigKey{"pagerank_tolerance", "1e-8", "features: PageRank L1 stopping tolerance"},
    ConfigKey{"pagerank_max_iterations", "100", "features: PageRank iteration cap"},

    ConfigKey{"train_split", "train_split.csv", "train: labels for the training rows"},
    ConfigKey{"train_features", "train_features.csv", "train: training feature matrix"},
    ConfigKey{"valid_split", "valid_split.csv", "train: validation labels (empty disables early stopping)"},
    ConfigKey{"valid_features", "valid_features.csv", "train: validation feature matrix"},
    ConfigKey{"model_out", "model.txt", "train: output model file"},
    ConfigKey{"importance_out", "", "train: optional 'feature,importance' table"},
    ConfigKey{"gbdt_max_leaves", "16", "train: leaves per tree"},
    ConfigKey{"gbdt_max_depth", "4", "train: depth limit"},
    ConfigKey{"gbdt_row_fraction", "0.8", "train: rows sampled per tree"},
    ConfigKey{"gbdt_column_fraction", "0.9", "train: columns sampled per tree"},
    ConfigKey{"gbdt_learning_rate", "0.01", "train: shrinkage"},
    ConfigKey{"gbdt_max_rounds", "10000", "train: boosting rounds cap"},
    ConfigKey{"gbdt_early_stop_rounds", "100", "train: rounds without validation AUC gain before stopping"},
    ConfigKey{"gbdt_min_samples_per_leaf", "20", "train: minimum rows per leaf"},
    ConfigKey{"gbdt_l2_leaf_penalty", "0", "train: L2 penalty on leaf values"},
    ConfigKey{"gbdt_histogram_bins", "255", "train: quantile bins per feature"},

    ConfigKey{"model", "model.txt", "predict: model file"},
    ConfigKey{"predict_features", "valid_features.csv", "predict: feature matrix to score"},
    ConfigKey{"scores_out", "scores.csv", "predict: output 'u,v,score'"},

    ConfigKey{"blend_inputs", "", "blend: comma-separated score files, each optionally 'path:weight'"},
    ConfigKey{"blend_power", "3", "blend: exponent applied to scores before averaging"},
    ConfigKey{"blend_out", "blend.csv", "blend: output 'u,v,score'"},

    ConfigKey{"eval_scores", "scores.csv", "eval: score file"},
    ConfigKey{"eval_split", "valid_split.csv", "eval: split file with the labels"},
};
// clang-format on

inline constexpr std::string_view kConfigEnvVar = "TLINK_CONFIG";

/// Flat key-value configuration. Every key has a default; unknown keys are rejected.
class PipelineConfig {
public:
    PipelineConfig() {
        for (const auto& k : kConfigKeys) values_[std::string(k.name)] = std::string(k.default_value);
    }

    void set(const std::string& key, const std::string& value) {
        auto it = values_.find(key);
        if (it == values_.end()) throw std::invalid_argument("unknown config key '" + key + "'");
        it->second = value;
    }

    /// Applies "key=value".
    void apply_override(const std::string& assignment) {
        auto eq = assignment.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw std::invalid_argument("override '" + assignment + "' is not of the form key=value");
        }
        set(assignment.substr(0, eq), assignment.substr(eq + 1));
    }

    void load_file(const std::string& path) {
        for (const auto& [k, v] : io::read_key_values(path)) {
            try {
                set(k, v);
            } catch (const std::invalid_argument& e) {
                throw std::invalid_argument(path + ": " + e.what());
            }
        }
    }

    const std::string& str(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) throw std::invalid_argument("unknown config key '" + key + "'");
        return it->second;
    }

    long long integer(const std::string& key) const {
        long long x = 0;
        if (!io::parse_int(str(key), x)) throw std::invalid_argument(key + ": expected an integer, got '" + str(key) + "'");
        return x;
    }

    std::uint64_t count(const std::string& key) const {
        const auto x = integer(key);
        if (x < 0) throw std::invalid_argument(key + ": expected a non-negative integer");
        return static_cast<std::uint64_t>(x);
    }

    double real(const std::string& key) const {
        double x = 0;
        if (!io::parse_double(str(key), x) || std::isnan(x)) {
            throw std::invalid_argument(key + ": expected a number, got '" + str(key) + "'");
        }
        return x;
    }

    bool flag(const std::string& key) const {
        const auto& v = str(key);
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        throw std::invalid_argument(key + ": expected true/false, got '" + v + "'");
    }

    Day date(const std::string& key) const {
        try {
            return calendar::parse(str(key));
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument(key + ": " + e.what());
        }
    }

    const std::map<std::string, std::string>& values() const noexcept { return values_; }

private:
    std::map<std::string, std::string> values_;
};

/// Config file (explicit path, else $TLINK_CONFIG when set) then command-line overrides.
inline PipelineConfig make_config(const std::string& config_path, const std::vector<std::string>& overrides) {
    PipelineConfig cfg;
    std::string path = config_path;
    if (path.empty()) {
        if (const char* env = std::getenv(std::string(kConfigEnvVar).c_str()); env && *env) path = env;
    }
    if (!path.empty()) cfg.load_file(path);
    for (const auto& o : overrides) cfg.apply_override(o);
    return cfg;
}

inline constexpr std::array<std::string_view, 8> kSubcommands{"ingest", "split",  "features", "train",
                                                              "predict", "blend", "eval",     "synth"};

namespace pipeline {

inline TemporalGraph load_graph(const PipelineConfig& cfg) {
    const auto n = cfg.count("num_vertices");
    return load_edge_list(cfg.str("edges"), n > 0 ? std::optional<std::size_t>(n) : std::nullopt);
}

inline gbdt::GBDTConfig gbdt_config(const PipelineConfig& cfg) {
    gbdt::GBDTConfig c;
    c.max_leaves = cfg.count("gbdt_max_leaves");
    c.max_depth = cfg.count("gbdt_max_depth");
    c.row_fraction = cfg.real("gbdt_row_fraction");
    c.column_fraction = cfg.real("gbdt_column_fraction");
    c.learning_rate = cfg.real("gbdt_learning_rate");
    c.max_rounds = cfg.count("gbdt_max_rounds");
    c.early_stop_rounds = cfg.count("gbdt_early_stop_rounds");
    c.min_samples_per_leaf = cfg.count("gbdt_min_samples_per_leaf");
    c.l2_leaf_penalty = cfg.real("gbdt_l2_leaf_penalty");
    c.histogram_bins = cfg.count("gbdt_histogram_bins");
    c.seed = cfg.count("seed");
    c.workers = cfg.count("workers");
    c.validate();
    return c;
}

/// Labels in the row order of `features`; the two files must list the same pairs.
inline std::vector<std::uint8_t> aligned_labels(const FeatureMatrix& features, const LabeledPairs& split,
                                                const std::string& what) {
    if (features.pairs() != split.pairs) {
        throw std::runtime_error(what + ": feature rows and split rows list different pairs");
    }
    return split.labels;
}

inline int synth(const PipelineConfig& cfg, std::ostream& out) {
    SynthParams p;
    p.vertices = cfg.count("synth_vertices");
    p.edges_per_day = cfg.real("synth_edges_per_day");
    p.attachment_exponent = cfg.real("synth_exponent");
    p.days = static_cast<Day>(cfg.count("synth_days"));
    p.closure_probability = cfg.real("synth_closure");
    p.seed = cfg.count("seed");
    const auto graph = synthesize(p);
    save_edge_list(graph, cfg.str("edges"));
    out << "synth: " << graph.num_vertices() << " vertices, " << graph.events().size() << " events -> "
        << cfg.str("edges") << '\n';
    return 0;
}

inline int ingest(const PipelineConfig& cfg, std::ostream& out) {
    const auto graph = load_graph(cfg);
    const auto& ev = graph.events();
    out << "ingest: " << graph.num_vertices() << " vertices, " << ev.size() << " events";
    if (!ev.empty()) out << ", days " << calendar::format(ev.front().day) << " .. " << calendar::format(ev.back().day);
    out << '\n';
    if (!cfg.str("graph_out").empty()) {
        save_edge_list(graph, cfg.str("graph_out"));
        out << "ingest: wrote " << cfg.str("graph_out") << '\n';
    }
    if (!cfg.str("decayed_out").empty()) {
        const auto adj = decayed_adjacency(graph, cfg.date("decay_as_of"), cfg.real("decay_rate"));
        save_decayed_adjacency(adj, cfg.str("decayed_out"));
        out << "ingest: wrote decayed adjacency (" << adj.num_edges() << " edges) -> " << cfg.str("decayed_out") << '\n';
    }
    return 0;
}

inline int split(const PipelineConfig& cfg, std::ostream& out) {
    const auto graph = load_graph(cfg);
    SplitSpec spec;
    spec.t1_day = cfg.date("split_t1");
    spec.t2_day = cfg.date("split_t2");
    spec.target_size = cfg.count("split_size");
    spec.seed = cfg.count("seed");
    auto data = build_split(graph, spec);
    const auto positives = data.positives();
    if (cfg.flag("augment_swap")) data = augment_swap(data);
    save_split(data, cfg.str("split_out"), spec);
    out << "split: t1=" << calendar::format(spec.t1_day) << " t2=" << calendar::format(spec.t2_day) << " positives="
        << positives << " rows=" << data.size() << " -> " << cfg.str("split_out") << '\n';
    return 0;
}

inline int features(const PipelineConfig& cfg, std::ostream& out) {
    const auto graph = load_graph(cfg);
    const auto& split_path = cfg.str("features_split");
    const auto data = load_split(split_path);
    Day t1 = 0;
    if (!cfg.str("features_t1").empty()) {
        t1 = cfg.date("features_t1");
    } else if (auto spec = load_split_spec(split_path)) {
        t1 = spec->t1_day;
    } else {
        throw std::runtime_error("features: no features_t1 given and " + split_path + ".meta is missing");
    }
    FeatureOptions opt;
    opt.since_day = cfg.date("since");
    opt.pagerank.damping = cfg.real("pagerank_damping");
    opt.pagerank.tolerance = cfg.real("pagerank_tolerance");
    opt.pagerank.max_iterations = cfg.count("pagerank_max_iterations");
    opt.workers = cfg.count("workers");
    const auto m = build_feature_matrix(graph, data.pairs, t1, opt);
    save_feature_matrix(m, cfg.str("features_out"));
    out << "features: t1=" << calendar::format(t1) << " rows=" << m.rows() << " cols=" << m.cols() << " -> "
        << cfg.str("features_out") << '\n';
    return 0;
}

inline int train(const PipelineConfig& cfg, std::ostream& out) {
    const auto config = gbdt_config(cfg);
    const auto x = load_feature_matrix(cfg.str("train_features"));
    const auto y = aligned_labels(x, load_split(cfg.str("train_split")), "train");
    FeatureMatrix vx;
    std::vector<std::uint8_t> vy;
    if (!cfg.str("valid_split").empty()) {
        vx = load_feature_matrix(cfg.str("valid_features"));
        vy = aligned_labels(vx, load_split(cfg.str("valid_split")), "validation");
    }
    const auto model = gbdt::train(x, y, vx, vy, config);
    gbdt::save_model(model, cfg.str("model_out"));
    out << "train: rounds=" << model.history.train_logloss.size() << " best_round=" << model.best_round;
    if (!model.history.valid_auc.empty() && model.best_round > 0) {
        out << " valid_auc=" << std::setprecision(10) << model.history.valid_auc[model.best_round - 1];
    }
    out << " -> " << cfg.str("model_out") << '\n';
    if (!cfg.str("importance_out").empty()) {
        auto f = io::open_out(cfg.str("importance_out"));
        f << "feature,importance\n";
        for (std::size_t j = 0; j < model.column_names.size(); ++j) {
            f << model.column_names[j] << ',' << io::format_double(model.feature_importance[j]) << '\n';
        }
    }
    return 0;
}

inline int predict(const PipelineConfig& cfg, std::ostream& out) {
    const auto model = gbdt::load_model(cfg.str("model"));
    const auto x = load_feature_matrix(cfg.str("predict_features"));
    ScoredPairs scored;
    scored.pairs = x.pairs();
    scored.scores = gbdt::predict(model, x, cfg.count("workers"));
    save_scores(scored, cfg.str("scores_out"));
    out << "predict: rows=" << scored.size() << " -> " << cfg.str("scores_out") << '\n';
    return 0;
}

inline BlendSpec blend_spec(const PipelineConfig& cfg) {
    BlendSpec spec;
    spec.power = cfg.real("blend_power");
    const auto& text = cfg.str("blend_inputs");
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find(',', start);
        if (end == std::string::npos) end = text.size();
        std::string item = text.substr(start, end - start);
        start = end + 1;
        if (item.empty()) continue;
        double weight = 1.0;
        if (auto colon = item.rfind(':'); colon != std::string::npos) {
            if (!io::parse_double(item.substr(colon + 1), weight)) {
                throw std::invalid_argument("blend_inputs: bad weight in '" + item + "'");
            }
            item.resize(colon);
        }
        spec.inputs.emplace_back(item, weight);
    }
    if (spec.inputs.empty()) throw std::invalid_argument("blend_inputs: no score files given");
    return spec;
}

inline int blend(const PipelineConfig& cfg, std::ostream& out) {
    const auto spec = blend_spec(cfg);
    const auto result = tlink::blend(spec);
    save_scores(result, cfg.str("blend_out"));
    out << "blend: " << spec.inputs.size() << " inputs, power " << spec.power << ", rows=" << result.size() << " -> "
        << cfg.str("blend_out") << '\n';
    return 0;
}

inline int eval(const PipelineConfig& cfg, std::ostream& out) {
    const auto scored = load_scores(cfg.str("eval_scores"));
    const auto split = load_split(cfg.str("eval_split"));
    // align labels to score rows by canonical pair
    std::map<VertexPair, std::uint8_t> label_of;
    for (std::size_t i = 0; i < split.size(); ++i) label_of[detail::canonical(split.pairs[i])] = split.labels[i];
    std::vector<std::uint8_t> labels;
    labels.reserve(scored.size());
    for (const auto& p : scored.pairs) {
        auto it = label_of.find(detail::canonical(p));
        if (it == label_of.end()) {
            throw std::runtime_error("eval: pair " + detail::pair_text(p) + " has no label in " + cfg.str("eval_split"));
        }
        labels.push_back(it->second);
    }
    const double a = auc(scored.scores, labels);
    const double ll = logloss(scored.scores, labels);
    out << std::setprecision(10) << "auc=" << a << " logloss=" << ll << " rows=" << scored.size() << '\n';
    return 0;
}

}  // namespace pipeline

/// Runs one subcommand. Returns 0 on success; failures print a diagnostic to `err`
/// and return 1 (2 for an unknown subcommand).
inline int run_subcommand(std::string_view name, const PipelineConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        if (name == "synth") return pipeline::synth(cfg, out);
        if (name == "ingest") return pipeline::ingest(cfg, out);
        if (name == "split") return pipeline::split(cfg, out);
        if (name == "features") return pipeline::features(cfg, out);
        if (name == "train") return pipeline::train(cfg, out);
        if (name == "predict") return pipeline::predict(cfg, out);
        if (name == "blend") return pipeline::blend(cfg, out);
        if (name == "eval") return pipeline::eval(cfg, out);
        err << "tlink: unknown subcommand '" << name << "'\n";
        return 2;
    } catch (const std::exception& e) {
        err << "tlink " << name << ": " << e.what() << '\n';
        return 1;
    }
}

}  // namespace tlink
