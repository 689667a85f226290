#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "tlink/calendar.hpp"
#include "tlink/features.hpp"
#include "tlink/random.hpp"
#include "tlink/temporal_graph.hpp"
#include "tlink/text_io.hpp"

namespace tlink {

struct SplitSpec {
    Day t1_day = calendar::to_day(2011, 12, 31);
    Day t2_day = calendar::to_day(2014, 12, 31);
    std::uint64_t target_size = 10'000'000;
    std::uint64_t seed = 0;
};

/// Candidate pairs with label 1 when the pair connects inside (t1, t2].
struct LabeledPairs {
    std::vector<VertexPair> pairs;
    std::vector<std::uint8_t> labels;

    std::size_t size() const noexcept { return pairs.size(); }

    std::size_t positives() const {
        return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), std::uint8_t{1}));
    }

    friend bool operator==(const LabeledPairs&, const LabeledPairs&) = default;
};

namespace detail {

inline VertexPair unpack(std::uint64_t key) {
    return {static_cast<Vertex>(key >> 32), static_cast<Vertex>(key & 0xffffffffu)};
}

/// Draws `count` distinct pairs uniformly from all u < v pairs not in `blocked`.
/// `available` is the size of that complement.
inline std::vector<std::uint64_t> sample_unconnected(std::size_t n, const std::unordered_set<std::uint64_t>& blocked,
                                                     std::uint64_t available, std::uint64_t count, Rng& rng) {
    std::vector<std::uint64_t> drawn;
    drawn.reserve(count);
    if (count == 0) return drawn;
    if (2 * count > available) {
        // dense request: enumerate the complement and take a seeded partial shuffle
        std::vector<std::uint64_t> pool;
        pool.reserve(available);
        for (Vertex a = 0; a < n; ++a) {
            for (Vertex b = a + 1; b < n; ++b) {
                const auto key = pair_key(a, b);
                if (!blocked.contains(key)) pool.push_back(key);
            }
        }
        for (std::uint64_t i = 0; i < count; ++i) {
            const auto j = i + uniform_index(rng, pool.size() - i);
            std::swap(pool[i], pool[j]);
            drawn.push_back(pool[i]);
        }
        return drawn;
    }
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(count * 2);
    while (drawn.size() < count) {
        const auto a = static_cast<Vertex>(uniform_index(rng, n));
        auto b = static_cast<Vertex>(uniform_index(rng, n - 1));
        if (b >= a) ++b;
        const auto key = pair_key(a, b);
        if (blocked.contains(key) || !seen.insert(key).second) continue;
        drawn.push_back(key);
    }
    return drawn;
}

}  // namespace detail

/// All pairs that first connect inside (t1, t2] plus uniformly drawn pairs that
/// stay unconnected through t2, target_size in total, sorted by (u, v) with u < v.
inline LabeledPairs build_split(const TemporalGraph& graph, const SplitSpec& spec) {
    if (spec.t1_day >= spec.t2_day) {
        throw std::invalid_argument("split requires t1 < t2 (got " + calendar::format(spec.t1_day) + " and " +
                                    calendar::format(spec.t2_day) + ")");
    }
    const std::size_t n = graph.num_vertices();

    std::unordered_set<std::uint64_t> connected;
    for (const auto& e : graph.events_until(spec.t1_day)) connected.insert(pair_key(e.u, e.v));
    const std::uint64_t connected_at_t1 = connected.size();

    std::vector<std::uint64_t> positives;
    for (const auto& e : graph.events_between(spec.t1_day + 1, spec.t2_day)) {
        if (connected.insert(pair_key(e.u, e.v)).second) positives.push_back(pair_key(e.u, e.v));
    }

    const std::uint64_t total_pairs = n < 2 ? 0 : static_cast<std::uint64_t>(n) * (n - 1) / 2;
    const std::uint64_t candidates = total_pairs - connected_at_t1;
    if (spec.target_size < positives.size()) {
        throw std::invalid_argument("target size " + std::to_string(spec.target_size) + " is below the " +
                                    std::to_string(positives.size()) + " positive pairs");
    }
    if (spec.target_size > candidates) {
        throw std::invalid_argument("target size " + std::to_string(spec.target_size) + " exceeds the " +
                                    std::to_string(candidates) + " pairs unconnected at t1");
    }

    Rng rng(spec.seed);
    const auto negatives = detail::sample_unconnected(n, connected, total_pairs - connected.size(),
                                                      spec.target_size - positives.size(), rng);

    std::vector<std::pair<std::uint64_t, std::uint8_t>> rows;
    rows.reserve(spec.target_size);
    for (auto key : positives) rows.emplace_back(key, 1);
    for (auto key : negatives) rows.emplace_back(key, 0);
    std::sort(rows.begin(), rows.end());

    LabeledPairs out;
    out.pairs.reserve(rows.size());
    out.labels.reserve(rows.size());
    for (const auto& [key, label] : rows) {
        out.pairs.push_back(detail::unpack(key));
        out.labels.push_back(label);
    }
    return out;
}

/// Each (u, v) is followed by (v, u) with the same label.
inline LabeledPairs augment_swap(const LabeledPairs& data) {
    LabeledPairs out;
    out.pairs.reserve(2 * data.size());
    out.labels.reserve(2 * data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto [u, v] = data.pairs[i];
        out.pairs.emplace_back(u, v);
        out.labels.push_back(data.labels[i]);
        out.pairs.emplace_back(v, u);
        out.labels.push_back(data.labels[i]);
    }
    return out;
}

/// Writes "u,v,label" rows and, when `spec` is given, a "<path>.meta" sidecar.
inline void save_split(const LabeledPairs& data, const std::string& path, const std::optional<SplitSpec>& spec) {
    auto out = io::open_out(path);
    out << "u,v,label\n";
    for (std::size_t i = 0; i < data.size(); ++i) {
        out << data.pairs[i].first << ',' << data.pairs[i].second << ',' << int{data.labels[i]} << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
    if (spec) {
        io::write_key_values(path + ".meta", {{"t1_day", std::to_string(spec->t1_day)},
                                              {"t2_day", std::to_string(spec->t2_day)},
                                              {"N", std::to_string(spec->target_size)},
                                              {"seed", std::to_string(spec->seed)}});
    }
}

inline LabeledPairs load_split(const std::string& path) {
    auto in = io::open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw io::ParseError(path, 1, "missing header");
    auto header = io::split_fields(line);
    if (header.size() != 3 || header[0] != "u" || header[1] != "v" || header[2] != "label") {
        throw io::ParseError(path, 1, "header must be 'u,v,label'");
    }
    LabeledPairs data;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto f = io::split_fields(line);
        long long u = 0, v = 0, label = 0;
        if (f.size() != 3 || !io::parse_int(f[0], u) || !io::parse_int(f[1], v) || !io::parse_int(f[2], label) ||
            u < 0 || v < 0 || (label != 0 && label != 1)) {
            throw io::ParseError(path, lineno, "expected 'u,v,label' with label 0 or 1");
        }
        data.pairs.emplace_back(static_cast<Vertex>(u), static_cast<Vertex>(v));
        data.labels.push_back(static_cast<std::uint8_t>(label));
    }
    return data;
}

/// Reads the sidecar written by save_split, if present.
inline std::optional<SplitSpec> load_split_spec(const std::string& split_path) {
    const std::string meta = split_path + ".meta";
    if (!std::filesystem::exists(meta)) return std::nullopt;
    auto kv = io::read_key_values(meta);
    auto get = [&](const char* key) {
        auto it = kv.find(key);
        long long x = 0;
        if (it == kv.end() || !io::parse_int(it->second, x)) {
            throw std::runtime_error(meta + ": missing or malformed '" + key + "'");
        }
        return x;
    };
    SplitSpec spec;
    spec.t1_day = static_cast<Day>(get("t1_day"));
    spec.t2_day = static_cast<Day>(get("t2_day"));
    spec.target_size = static_cast<std::uint64_t>(get("N"));
    spec.seed = static_cast<std::uint64_t>(get("seed"));
    return spec;
}

}  // namespace tlink
