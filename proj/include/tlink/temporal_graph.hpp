#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tlink/calendar.hpp"
#include "tlink/text_io.hpp"

namespace tlink {

using Vertex = std::uint32_t;

/// Unordered vertex pair packed into one key, smaller index in the high half.
inline std::uint64_t pair_key(Vertex a, Vertex b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

struct EdgeEvent {
    Vertex u;
    Vertex v;
    Day day;

    friend bool operator==(const EdgeEvent&, const EdgeEvent&) = default;
};

/// Immutable, day-sorted log of undirected edge events over a fixed vertex set.
class TemporalGraph {
public:
    TemporalGraph() = default;

    TemporalGraph(std::size_t num_vertices, std::vector<EdgeEvent> events)
        : num_vertices_(num_vertices), events_(std::move(events)) {
        for (const auto& e : events_) {
            if (e.u == e.v) {
                throw std::invalid_argument("self-loop on vertex " + std::to_string(e.u));
            }
            if (e.day < 0) {
                throw std::invalid_argument("negative day " + std::to_string(e.day));
            }
            if (e.u >= num_vertices_ || e.v >= num_vertices_) {
                throw std::invalid_argument("vertex index out of range: (" + std::to_string(e.u) + ", " +
                                            std::to_string(e.v) + ") with " + std::to_string(num_vertices_) +
                                            " vertices");
            }
        }
        std::stable_sort(events_.begin(), events_.end(),
                         [](const EdgeEvent& a, const EdgeEvent& b) { return a.day < b.day; });
    }

    std::size_t num_vertices() const noexcept { return num_vertices_; }
    std::span<const EdgeEvent> events() const noexcept { return events_; }

    /// Events with day <= as_of_day (events are sorted, so this is a prefix).
    std::span<const EdgeEvent> events_until(Day as_of_day) const {
        auto end = std::upper_bound(events_.begin(), events_.end(), as_of_day,
                                    [](Day d, const EdgeEvent& e) { return d < e.day; });
        return {events_.data(), static_cast<std::size_t>(end - events_.begin())};
    }

    /// Events with from_day <= day <= as_of_day.
    std::span<const EdgeEvent> events_between(Day from_day, Day as_of_day) const {
        auto first = std::lower_bound(events_.begin(), events_.end(), from_day,
                                      [](const EdgeEvent& e, Day d) { return e.day < d; });
        auto last = std::upper_bound(first, events_.end(), as_of_day,
                                     [](Day d, const EdgeEvent& e) { return d < e.day; });
        return {events_.data() + (first - events_.begin()), static_cast<std::size_t>(last - first)};
    }

private:
    std::size_t num_vertices_ = 0;
    std::vector<EdgeEvent> events_;
};

/// Reads a "u v day" edge list. Lines starting with '#' are skipped. The vertex
/// count is 1 + max index unless `num_vertices` is given, or a "<path>.meta"
/// sidecar carries num_vertices.
inline TemporalGraph load_edge_list(const std::string& path, std::optional<std::size_t> num_vertices = std::nullopt) {
    if (!num_vertices) {
        const std::string sidecar = path + ".meta";
        if (std::filesystem::exists(sidecar)) {
            auto kv = io::read_key_values(sidecar);
            if (auto it = kv.find("num_vertices"); it != kv.end()) {
                long long n = 0;
                if (!io::parse_int(it->second, n) || n < 0) {
                    throw std::runtime_error(sidecar + ": bad num_vertices '" + it->second + "'");
                }
                num_vertices = static_cast<std::size_t>(n);
            }
        }
    }

    auto in = io::open_in(path);
    std::vector<EdgeEvent> events;
    std::size_t max_vertex_plus_one = 0;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        auto fields = io::split_fields(line);
        long long u = 0, v = 0, day = 0;
        if (fields.size() != 3 || !io::parse_int(fields[0], u) || !io::parse_int(fields[1], v) ||
            !io::parse_int(fields[2], day)) {
            throw io::ParseError(path, lineno, "expected three integers 'u v day'");
        }
        if (u < 0 || v < 0 || u > UINT32_MAX - 1 || v > UINT32_MAX - 1) {
            throw io::ParseError(path, lineno, "vertex index out of range");
        }
        if (u == v) throw io::ParseError(path, lineno, "self-loop on vertex " + std::to_string(u));
        if (day < 0) throw io::ParseError(path, lineno, "negative day " + std::to_string(day));
        events.push_back({static_cast<Vertex>(u), static_cast<Vertex>(v), static_cast<Day>(day)});
        max_vertex_plus_one = std::max<std::size_t>(max_vertex_plus_one, static_cast<std::size_t>(std::max(u, v)) + 1);
    }
    if (num_vertices && *num_vertices < max_vertex_plus_one) {
        throw std::runtime_error(path + ": declared num_vertices " + std::to_string(*num_vertices) +
                                 " but vertex index " + std::to_string(max_vertex_plus_one - 1) + " appears");
    }
    return TemporalGraph(num_vertices.value_or(max_vertex_plus_one), std::move(events));
}

inline void save_edge_list(const TemporalGraph& graph, const std::string& path) {
    auto out = io::open_out(path);
    out << "# u v day\n";
    for (const auto& e : graph.events()) out << e.u << ' ' << e.v << ' ' << e.day << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
    io::write_key_values(path + ".meta", {{"num_vertices", std::to_string(graph.num_vertices())}});
}

/// Binary adjacency of the events inside a closed day window.
class Snapshot {
public:
    Snapshot(const TemporalGraph& graph, Day from_day, Day as_of_day)
        : from_day_(from_day), as_of_day_(as_of_day), neighbors_(graph.num_vertices()) {
        if (from_day < 0 || from_day > as_of_day) {
            throw std::invalid_argument("snapshot window [" + std::to_string(from_day) + ", " +
                                        std::to_string(as_of_day) + "] is empty or negative");
        }
        for (const auto& e : graph.events_between(from_day, as_of_day)) {
            neighbors_[e.u].push_back(e.v);
            neighbors_[e.v].push_back(e.u);
        }
        for (auto& list : neighbors_) {
            std::sort(list.begin(), list.end());
            list.erase(std::unique(list.begin(), list.end()), list.end());
            list.shrink_to_fit();
        }
    }

    Day from_day() const noexcept { return from_day_; }
    Day as_of_day() const noexcept { return as_of_day_; }
    std::size_t num_vertices() const noexcept { return neighbors_.size(); }

    std::span<const Vertex> neighbors(Vertex x) const { return neighbors_.at(x); }
    std::size_t degree(Vertex x) const { return neighbors_.at(x).size(); }

    bool has_edge(Vertex a, Vertex b) const {
        const auto& list = neighbors_.at(a);
        return std::binary_search(list.begin(), list.end(), b);
    }

    std::size_t num_edges() const {
        std::size_t twice = 0;
        for (const auto& list : neighbors_) twice += list.size();
        return twice / 2;
    }

private:
    Day from_day_;
    Day as_of_day_;
    std::vector<std::vector<Vertex>> neighbors_;
};

inline Snapshot snapshot(const TemporalGraph& graph, Day from_day, Day as_of_day) {
    return Snapshot(graph, from_day, as_of_day);
}

/// Edge weights exp(-rate * age) where age counts days from the latest event
/// at or before as_of_day. Pairs without such an event are absent.
class DecayedAdjacency {
public:
    struct Entry {
        Vertex neighbor;
        double weight;
    };

    DecayedAdjacency(const TemporalGraph& graph, Day as_of_day, double decay_rate)
        : as_of_day_(as_of_day), decay_rate_(decay_rate), rows_(graph.num_vertices()) {
        if (!(decay_rate >= 0.0)) throw std::invalid_argument("decay_rate must be >= 0");
        std::unordered_map<std::uint64_t, Day> latest;
        for (const auto& e : graph.events_until(as_of_day)) {
            auto [it, inserted] = latest.try_emplace(pair_key(e.u, e.v), e.day);
            if (!inserted) it->second = std::max(it->second, e.day);
        }
        for (const auto& [key, day] : latest) {
            const auto a = static_cast<Vertex>(key >> 32);
            const auto b = static_cast<Vertex>(key & 0xffffffffu);
            const double w = std::exp(-decay_rate * static_cast<double>(as_of_day - day));
            rows_[a].push_back({b, w});
            rows_[b].push_back({a, w});
        }
        for (auto& row : rows_) {
            std::sort(row.begin(), row.end(), [](const Entry& x, const Entry& y) { return x.neighbor < y.neighbor; });
        }
    }

    Day as_of_day() const noexcept { return as_of_day_; }
    double decay_rate() const noexcept { return decay_rate_; }
    std::size_t num_vertices() const noexcept { return rows_.size(); }
    std::span<const Entry> row(Vertex x) const { return rows_.at(x); }

    /// 0 when the pair has no event at or before as_of_day.
    double weight(Vertex a, Vertex b) const {
        const auto& row = rows_.at(a);
        auto it = std::lower_bound(row.begin(), row.end(), b,
                                   [](const Entry& e, Vertex v) { return e.neighbor < v; });
        return it != row.end() && it->neighbor == b ? it->weight : 0.0;
    }

    std::size_t num_edges() const {
        std::size_t twice = 0;
        for (const auto& row : rows_) twice += row.size();
        return twice / 2;
    }

private:
    Day as_of_day_;
    double decay_rate_;
    std::vector<std::vector<Entry>> rows_;
};

inline DecayedAdjacency decayed_adjacency(const TemporalGraph& graph, Day as_of_day, double decay_rate) {
    return DecayedAdjacency(graph, as_of_day, decay_rate);
}

/// "u,v,weight" with u < v, one row per edge, rows sorted by (u, v).
inline void save_decayed_adjacency(const DecayedAdjacency& adj, const std::string& path) {
    auto out = io::open_out(path);
    out << "u,v,weight\n";
    for (Vertex a = 0; a < adj.num_vertices(); ++a) {
        for (const auto& e : adj.row(a)) {
            if (e.neighbor > a) out << a << ',' << e.neighbor << ',' << io::format_double(e.weight) << '\n';
        }
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace tlink
