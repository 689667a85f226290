#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstring>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tlink/calendar.hpp"
#include "tlink/parallel.hpp"
#include "tlink/temporal_graph.hpp"
#include "tlink/text_io.hpp"

namespace tlink {

using VertexPair = std::pair<Vertex, Vertex>;

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double x) noexcept { return std::isnan(x); }

/// One real value per vertex: a degree, a rank, or a PageRank probability.
struct VertexScores {
    std::vector<double> values;

    double operator[](Vertex x) const { return values[x]; }
    std::size_t size() const noexcept { return values.size(); }
};

struct PageRankParams {
    double damping = 0.85;
    double tolerance = 1e-8;
    std::size_t max_iterations = 100;
};

/// Power iteration on the undirected snapshot; each edge counts in both
/// directions and degree-0 vertices spread their mass uniformly. Stops once
/// the L1 change between iterates is <= tolerance.
inline VertexScores pagerank(const Snapshot& snap, const PageRankParams& params = {}) {
    const std::size_t n = snap.num_vertices();
    if (n == 0) return {};
    if (!(params.damping >= 0.0 && params.damping < 1.0)) {
        throw std::invalid_argument("pagerank damping must lie in [0, 1)");
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    std::vector<double> rank(n, inv_n), next(n), share(n);
    for (std::size_t it = 0; it < params.max_iterations; ++it) {
        double dangling = 0.0;
        for (Vertex x = 0; x < n; ++x) {
            const auto deg = snap.degree(x);
            if (deg == 0) {
                dangling += rank[x];
                share[x] = 0.0;
            } else {
                share[x] = rank[x] / static_cast<double>(deg);
            }
        }
        const double base = (1.0 - params.damping) * inv_n + params.damping * dangling * inv_n;
        double change = 0.0;
        for (Vertex x = 0; x < n; ++x) {
            double incoming = 0.0;
            for (Vertex w : snap.neighbors(x)) incoming += share[w];
            next[x] = base + params.damping * incoming;
            change += std::abs(next[x] - rank[x]);
        }
        rank.swap(next);
        if (change <= params.tolerance) break;
    }
    const double total = std::accumulate(rank.begin(), rank.end(), 0.0);
    for (auto& r : rank) r /= total;
    return {std::move(rank)};
}

inline void check_vertex(const Snapshot& snap, Vertex x) {
    if (x >= snap.num_vertices()) {
        throw std::out_of_range("vertex " + std::to_string(x) + " out of range (" +
                                std::to_string(snap.num_vertices()) + " vertices)");
    }
}

/// |N(u) & N(v)|, i.e. the (u, v) entry of the squared adjacency matrix.
inline std::size_t common_neighbors(const Snapshot& snap, Vertex u, Vertex v) {
    check_vertex(snap, u);
    check_vertex(snap, v);
    auto a = snap.neighbors(u);
    auto b = snap.neighbors(v);
    std::size_t count = 0;
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i < *j) {
            ++i;
        } else if (*j < *i) {
            ++j;
        } else {
            ++count;
            ++i;
            ++j;
        }
    }
    return count;
}

/// Intersection over union of the two neighborhoods; nullopt when both are empty.
inline std::optional<double> jaccard(const Snapshot& snap, Vertex u, Vertex v) {
    const std::size_t common = common_neighbors(snap, u, v);
    const std::size_t uni = snap.degree(u) + snap.degree(v) - common;
    if (uni == 0) return std::nullopt;
    return static_cast<double>(common) / static_cast<double>(uni);
}

/// Ascending 1-based ranks; ties share the mean of the ranks they span.
inline std::vector<double> rank_transform(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("rank_transform: empty input");
    for (double x : values) {
        if (is_missing(x)) throw std::invalid_argument("rank_transform: missing value in input");
    }
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i + 1;
        while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
        // positions i..j-1 hold ranks i+1..j
        const double avg = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k) ranks[order[k]] = avg;
        i = j;
    }
    return ranks;
}

inline std::vector<double> rank_transform(const std::vector<double>& values) {
    return rank_transform(std::span<const double>(values));
}

// ---------------------------------------------------------------------------
// Feature catalog

enum class FeatureKind {
    DegreeRank,        // rank of degree, `years` before t1
    DegreeRankSince,   // rank of degree in the since-cutoff sub-network
    DegreeDiffRank,    // rank of degree(t1) - degree(t1 - years)
    PageRankScore,     // PageRank `years` before t1
    PageRankDiff,      // PageRank(t1) - PageRank(t1 - years)
    Ordinal,           // raw vertex index
    Jaccard,           // Jaccard `years` before t1
    JaccardSince,      // Jaccard on the since-cutoff sub-network
    JaccardDiff,       // Jaccard(t1) - Jaccard(t1 - years)
    JaccardDiffSince,  // Jaccard(t1) - Jaccard(since-cutoff)
};

enum class Side { U, V, Pair };

struct FeatureColumn {
    std::string_view name;
    FeatureKind kind;
    Side side;
    int years;
};

inline constexpr std::size_t kNumFeatures = 41;

/// Column order and spelling are part of the exported file contract, the
/// "pangrank" misspellings included.
inline constexpr std::array<FeatureColumn, kNumFeatures> kFeatureCatalog{{
    {"rank_num_neighbors_diff_2_year_u", FeatureKind::DegreeDiffRank, Side::U, 2},
    {"rank_num_neighbors_diff_2_year_v", FeatureKind::DegreeDiffRank, Side::V, 2},
    {"rank_num_neighbors_diff_1_year_v", FeatureKind::DegreeDiffRank, Side::V, 1},
    {"rank_num_neighbors_diff_1_year_u", FeatureKind::DegreeDiffRank, Side::U, 1},
    {"rank_num_neighbors_diff_3_year_u", FeatureKind::DegreeDiffRank, Side::U, 3},
    {"jaccard_index", FeatureKind::Jaccard, Side::Pair, 0},
    {"rank_num_neighbors_diff_3_year_v", FeatureKind::DegreeDiffRank, Side::V, 3},
    {"jaccard_index_2000", FeatureKind::JaccardSince, Side::Pair, 0},
    {"pagerank_score_v", FeatureKind::PageRankScore, Side::V, 0},
    {"pangrank_score_u", FeatureKind::PageRankScore, Side::U, 0},
    {"v", FeatureKind::Ordinal, Side::V, 0},
    {"u", FeatureKind::Ordinal, Side::U, 0},
    {"jaccard_index_1_year", FeatureKind::Jaccard, Side::Pair, 1},
    {"jaccard_index_diff_3_year", FeatureKind::JaccardDiff, Side::Pair, 3},
    {"jaccard_index_diff_2_year", FeatureKind::JaccardDiff, Side::Pair, 2},
    {"pagerank_score_diff_2_year_v", FeatureKind::PageRankDiff, Side::V, 2},
    {"pagerank_score_diff_2_year_u", FeatureKind::PageRankDiff, Side::U, 2},
    {"rank_num_neighbors_v", FeatureKind::DegreeRank, Side::V, 0},
    {"rank_num_neighbors_u", FeatureKind::DegreeRank, Side::U, 0},
    {"rank_num_neighbors_2000_v", FeatureKind::DegreeRankSince, Side::V, 0},
    {"rank_num_neighbors_1_year_v", FeatureKind::DegreeRank, Side::V, 1},
    {"rank_num_neighbors_2_year_v", FeatureKind::DegreeRank, Side::V, 2},
    {"rank_num_neighbors_1_year_u", FeatureKind::DegreeRank, Side::U, 1},
    {"rank_num_neighbors_3_year_u", FeatureKind::DegreeRank, Side::U, 3},
    {"rank_num_neighbors_2_year_u", FeatureKind::DegreeRank, Side::U, 2},
    {"rank_num_neighbors_3_year_v", FeatureKind::DegreeRank, Side::V, 3},
    {"rank_num_neighbors_2000_u", FeatureKind::DegreeRankSince, Side::U, 0},
    {"jaccard_index_diff_1_year", FeatureKind::JaccardDiff, Side::Pair, 1},
    {"pagerank_score_diff_1_year_v", FeatureKind::PageRankDiff, Side::V, 1},
    {"pagerank_score_diff_1_year_u", FeatureKind::PageRankDiff, Side::U, 1},
    {"jaccard_index_3_year", FeatureKind::Jaccard, Side::Pair, 3},
    {"pagerank_score_diff_3_year_u", FeatureKind::PageRankDiff, Side::U, 3},
    {"pagerank_score_diff_3_year_v", FeatureKind::PageRankDiff, Side::V, 3},
    {"pangrank_score_2_year_u", FeatureKind::PageRankScore, Side::U, 2},
    {"pagerank_score_1_year_v", FeatureKind::PageRankScore, Side::V, 1},
    {"pangrank_score_1_year_u", FeatureKind::PageRankScore, Side::U, 1},
    {"jaccard_index_2_year", FeatureKind::Jaccard, Side::Pair, 2},
    {"pagerank_score_2_year_v", FeatureKind::PageRankScore, Side::V, 2},
    {"pagerank_score_3_year_v", FeatureKind::PageRankScore, Side::V, 3},
    {"pangrank_scores_3_year_u", FeatureKind::PageRankScore, Side::U, 3},
    {"jaccard_index_diff_2000", FeatureKind::JaccardDiffSince, Side::Pair, 0},
}};

inline std::vector<std::string> feature_names() {
    std::vector<std::string> names;
    names.reserve(kNumFeatures);
    for (const auto& c : kFeatureCatalog) names.emplace_back(c.name);
    return names;
}

/// Row-major real matrix with one row per vertex pair. NaN marks a missing value.
class FeatureMatrix {
public:
    FeatureMatrix() = default;

    FeatureMatrix(std::vector<std::string> column_names, std::vector<VertexPair> pairs)
        : column_names_(std::move(column_names)), pairs_(std::move(pairs)),
          values_(pairs_.size() * column_names_.size(), kMissing) {}

    FeatureMatrix(std::vector<std::string> column_names, std::vector<VertexPair> pairs, std::vector<double> values)
        : column_names_(std::move(column_names)), pairs_(std::move(pairs)), values_(std::move(values)) {
        if (values_.size() != pairs_.size() * column_names_.size()) {
            throw std::invalid_argument("feature matrix: value count does not match rows x columns");
        }
    }

    std::size_t rows() const noexcept { return pairs_.size(); }
    std::size_t cols() const noexcept { return column_names_.size(); }
    const std::vector<std::string>& column_names() const noexcept { return column_names_; }
    const std::vector<VertexPair>& pairs() const noexcept { return pairs_; }

    double at(std::size_t r, std::size_t c) const { return values_[r * cols() + c]; }
    double& at(std::size_t r, std::size_t c) { return values_[r * cols() + c]; }

    std::span<const double> row(std::size_t r) const { return {values_.data() + r * cols(), cols()}; }
    std::span<double> row(std::size_t r) { return {values_.data() + r * cols(), cols()}; }

    std::size_t column_index(std::string_view name) const {
        auto it = std::find(column_names_.begin(), column_names_.end(), name);
        if (it == column_names_.end()) throw std::out_of_range("no feature column '" + std::string(name) + "'");
        return static_cast<std::size_t>(it - column_names_.begin());
    }

    std::vector<double> column(std::size_t c) const {
        std::vector<double> out(rows());
        for (std::size_t r = 0; r < rows(); ++r) out[r] = at(r, c);
        return out;
    }

    const std::vector<double>& values() const noexcept { return values_; }

    friend bool operator==(const FeatureMatrix& a, const FeatureMatrix& b) {
        if (a.column_names_ != b.column_names_ || a.pairs_ != b.pairs_ || a.values_.size() != b.values_.size()) {
            return false;
        }
        // bitwise, so that NaN == NaN
        return std::equal(a.values_.begin(), a.values_.end(), b.values_.begin(), [](double x, double y) {
            return std::memcmp(&x, &y, sizeof(double)) == 0;
        });
    }

private:
    std::vector<std::string> column_names_;
    std::vector<VertexPair> pairs_;
    std::vector<double> values_;
};

struct FeatureOptions {
    PageRankParams pagerank;
    /// First day of the recent sub-network (inclusive).
    Day since_day = calendar::to_day(2000, 1, 1);
    std::size_t workers = 1;
};

/// Per-snapshot vertex statistics the catalog draws on.
struct SnapshotStats {
    std::vector<double> degree;
    std::vector<double> degree_rank;
    std::vector<double> pagerank;
};

inline SnapshotStats snapshot_stats(const Snapshot& snap, const PageRankParams& params) {
    SnapshotStats s;
    s.degree.resize(snap.num_vertices());
    for (Vertex x = 0; x < snap.num_vertices(); ++x) s.degree[x] = static_cast<double>(snap.degree(x));
    s.degree_rank = rank_transform(s.degree);
    s.pagerank = pagerank(snap, params).values;
    return s;
}

/// Builds the 41-column catalog for each pair as observed at t1_day. Pair order
/// is honored: the first vertex fills the *_u columns.
inline FeatureMatrix build_feature_matrix(const TemporalGraph& graph, std::span<const VertexPair> pairs, Day t1_day,
                                          const FeatureOptions& options = {}) {
    const std::size_t n = graph.num_vertices();
    if (n == 0) throw std::invalid_argument("build_feature_matrix: graph has no vertices");
    if (t1_day < 0 || calendar::years_before(t1_day, 3) < 0) {
        throw std::invalid_argument("t1 " + calendar::format(t1_day) +
                                    " leaves no room for the 3-year lookback (earliest allowed is " +
                                    calendar::format(calendar::to_day(1997, 1, 1)) + ")");
    }
    if (options.since_day > t1_day) {
        throw std::invalid_argument("since-cutoff " + calendar::format(options.since_day) + " is after t1 " +
                                    calendar::format(t1_day));
    }
    for (const auto& [u, v] : pairs) {
        if (u >= n || v >= n) {
            throw std::out_of_range("pair (" + std::to_string(u) + ", " + std::to_string(v) + ") out of range");
        }
    }

    // index 0..3: full history at t1 - k years; index 4: since-cutoff at t1
    std::vector<Snapshot> snaps;
    snaps.reserve(5);
    for (int k = 0; k <= 3; ++k) snaps.emplace_back(graph, 0, calendar::years_before(t1_day, k));
    snaps.emplace_back(graph, options.since_day, t1_day);
    constexpr std::size_t kSince = 4;

    std::vector<SnapshotStats> stats(snaps.size());
    parallel_for(snaps.size(), options.workers,
                 [&](std::size_t i) { stats[i] = snapshot_stats(snaps[i], options.pagerank); });

    std::array<std::vector<double>, 4> diff_rank;
    for (int k = 1; k <= 3; ++k) {
        std::vector<double> diff(n);
        for (Vertex x = 0; x < n; ++x) diff[x] = stats[0].degree[x] - stats[k].degree[x];
        diff_rank[k] = rank_transform(diff);
    }

    std::vector<VertexPair> pair_list(pairs.begin(), pairs.end());
    FeatureMatrix m(feature_names(), std::move(pair_list));
    parallel_for(m.rows(), options.workers, [&](std::size_t r) {
        const auto [u, v] = m.pairs()[r];
        std::array<double, 5> jac;
        for (std::size_t s = 0; s < snaps.size(); ++s) jac[s] = jaccard(snaps[s], u, v).value_or(kMissing);
        auto row = m.row(r);
        for (std::size_t c = 0; c < kNumFeatures; ++c) {
            const auto& col = kFeatureCatalog[c];
            const Vertex x = col.side == Side::V ? v : u;
            const auto k = static_cast<std::size_t>(col.years);
            double value = kMissing;
            switch (col.kind) {
                case FeatureKind::DegreeRank: value = stats[k].degree_rank[x]; break;
                case FeatureKind::DegreeRankSince: value = stats[kSince].degree_rank[x]; break;
                case FeatureKind::DegreeDiffRank: value = diff_rank[k][x]; break;
                case FeatureKind::PageRankScore: value = stats[k].pagerank[x]; break;
                case FeatureKind::PageRankDiff: value = stats[0].pagerank[x] - stats[k].pagerank[x]; break;
                case FeatureKind::Ordinal: value = static_cast<double>(x); break;
                case FeatureKind::Jaccard: value = jac[k]; break;
                case FeatureKind::JaccardSince: value = jac[kSince]; break;
                case FeatureKind::JaccardDiff: value = jac[0] - jac[k]; break;  // NaN propagates
                case FeatureKind::JaccardDiffSince: value = jac[0] - jac[kSince]; break;
            }
            row[c] = value;
        }
    });
    return m;
}

inline FeatureMatrix build_feature_matrix(const TemporalGraph& graph, const std::vector<VertexPair>& pairs,
                                          Day t1_day, const FeatureOptions& options = {}) {
    return build_feature_matrix(graph, std::span<const VertexPair>(pairs), t1_day, options);
}

/// Header "u,v,<column names>", then one row per pair; missing cells are "NaN".
inline void save_feature_matrix(const FeatureMatrix& m, const std::string& path) {
    auto out = io::open_out(path);
    out << "u,v";
    for (const auto& name : m.column_names()) out << ',' << name;
    out << '\n';
    for (std::size_t r = 0; r < m.rows(); ++r) {
        out << m.pairs()[r].first << ',' << m.pairs()[r].second;
        for (double x : m.row(r)) out << ',' << io::format_double(x);
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline FeatureMatrix load_feature_matrix(const std::string& path) {
    auto in = io::open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw io::ParseError(path, 1, "missing header");
    auto header = io::split_fields(line);
    if (header.size() < 2 || header[0] != "u" || header[1] != "v") {
        throw io::ParseError(path, 1, "header must start with 'u,v'");
    }
    std::vector<std::string> names(header.begin() + 2, header.end());
    std::vector<VertexPair> pairs;
    std::vector<double> values;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto fields = io::split_fields(line);
        if (fields.size() != names.size() + 2) {
            throw io::ParseError(path, lineno, "expected " + std::to_string(names.size() + 2) + " fields, got " +
                                                   std::to_string(fields.size()));
        }
        long long u = 0, v = 0;
        if (!io::parse_int(fields[0], u) || !io::parse_int(fields[1], v) || u < 0 || v < 0) {
            throw io::ParseError(path, lineno, "bad vertex pair");
        }
        pairs.emplace_back(static_cast<Vertex>(u), static_cast<Vertex>(v));
        for (std::size_t c = 2; c < fields.size(); ++c) {
            double x = 0;
            if (!io::parse_double(fields[c], x)) throw io::ParseError(path, lineno, "bad value '" + std::string(fields[c]) + "'");
            values.push_back(x);
        }
    }
    return FeatureMatrix(std::move(names), std::move(pairs), std::move(values));
}

}  // namespace tlink
