#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tlink/evalx.hpp"
#include "tlink/text_io.hpp"

namespace tlink {

/// "u,v,score" rows; scores are written in shortest round-trip form (>= 9 significant digits
/// whenever the value needs them).
inline void save_scores(const ScoredPairs& scored, const std::string& path) {
    if (scored.scores.size() != scored.pairs.size()) throw std::invalid_argument("save_scores: length mismatch");
    auto out = io::open_out(path);
    out << "u,v,score\n";
    for (std::size_t i = 0; i < scored.size(); ++i) {
        out << scored.pairs[i].first << ',' << scored.pairs[i].second << ',' << io::format_double(scored.scores[i])
            << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

/// Reads a score file and checks that every score lies in [0, 1].
inline ScoredPairs load_scores(const std::string& path) {
    auto in = io::open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw io::ParseError(path, 1, "missing header");
    auto header = io::split_fields(line);
    if (header.size() != 3 || header[0] != "u" || header[1] != "v" || header[2] != "score") {
        throw io::ParseError(path, 1, "header must be 'u,v,score'");
    }
    ScoredPairs scored;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto f = io::split_fields(line);
        long long u = 0, v = 0;
        double s = 0;
        if (f.size() != 3 || !io::parse_int(f[0], u) || !io::parse_int(f[1], v) || !io::parse_double(f[2], s) ||
            u < 0 || v < 0) {
            throw io::ParseError(path, lineno, "expected 'u,v,score'");
        }
        if (!(s >= 0.0 && s <= 1.0)) {
            throw io::ParseError(path, lineno, "score " + std::string(f[2]) + " outside [0, 1]");
        }
        scored.pairs.emplace_back(static_cast<Vertex>(u), static_cast<Vertex>(v));
        scored.scores.push_back(s);
    }
    return scored;
}

struct BlendInput {
    ScoredPairs scored;
    double weight = 1.0;
};

struct BlendSpec {
    std::vector<std::pair<std::string, double>> inputs;  // (score file, weight)
    double power = 3.0;
};

namespace detail {

inline VertexPair canonical(VertexPair p) { return p.first < p.second ? p : VertexPair{p.second, p.first}; }

inline std::vector<std::size_t> order_by_key(const std::vector<VertexPair>& pairs) {
    std::vector<std::size_t> order(pairs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return canonical(pairs[a]) < canonical(pairs[b]); });
    return order;
}

inline std::string pair_text(VertexPair p) {
    return "(" + std::to_string(p.first) + ", " + std::to_string(p.second) + ")";
}

}  // namespace detail

/// Weighted mean of score^power. Rows are matched by canonical (u, v) key; the
/// output keeps the first input's row order. Weights are normalized to sum 1.
inline ScoredPairs blend(const std::vector<BlendInput>& inputs, double power) {
    if (inputs.empty()) throw std::invalid_argument("blend: no inputs");
    double weight_sum = 0.0;
    for (const auto& in : inputs) {
        if (!(in.weight >= 0.0)) throw std::invalid_argument("blend: weights must be >= 0");
        weight_sum += in.weight;
        for (double s : in.scored.scores) {
            if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("blend: score outside [0, 1]");
        }
    }
    if (!(weight_sum > 0.0)) throw std::invalid_argument("blend: weights sum to zero");

    const auto& first = inputs.front().scored;
    const auto base_order = detail::order_by_key(first.pairs);
    std::vector<double> blended(first.size(), 0.0);

    for (std::size_t m = 0; m < inputs.size(); ++m) {
        const auto& cur = inputs[m].scored;
        const auto order = m == 0 ? base_order : detail::order_by_key(cur.pairs);
        const std::size_t common = std::min(order.size(), base_order.size());
        for (std::size_t i = 0; i < common; ++i) {
            const auto a = detail::canonical(first.pairs[base_order[i]]);
            const auto b = detail::canonical(cur.pairs[order[i]]);
            if (a != b) {
                throw std::invalid_argument("blend: input " + std::to_string(m) + " diverges from input 0 at pair " +
                                            detail::pair_text(std::min(a, b)));
            }
        }
        if (order.size() != base_order.size()) {
            const auto& longer = order.size() > base_order.size() ? cur.pairs : first.pairs;
            const auto& longer_order = order.size() > base_order.size() ? order : base_order;
            throw std::invalid_argument("blend: input " + std::to_string(m) + " has " + std::to_string(order.size()) +
                                        " rows, input 0 has " + std::to_string(base_order.size()) +
                                        "; first unmatched pair " +
                                        detail::pair_text(detail::canonical(longer[longer_order[common]])));
        }
        const double w = inputs[m].weight / weight_sum;
        for (std::size_t i = 0; i < common; ++i) {
            blended[base_order[i]] += w * std::pow(cur.scores[order[i]], power);
        }
    }

    for (auto& s : blended) s = std::min(s, 1.0);  // rounding in the weight normalization

    ScoredPairs out;
    out.pairs = first.pairs;
    out.scores = std::move(blended);
    out.labels = first.labels;
    return out;
}

inline ScoredPairs blend(const BlendSpec& spec) {
    std::vector<BlendInput> inputs;
    inputs.reserve(spec.inputs.size());
    for (const auto& [path, weight] : spec.inputs) inputs.push_back({load_scores(path), weight});
    return blend(inputs, spec.power);
}

}  // namespace tlink
