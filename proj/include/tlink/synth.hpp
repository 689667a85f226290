#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "tlink/random.hpp"
#include "tlink/temporal_graph.hpp"

namespace tlink {

struct SynthParams {
    std::size_t vertices = 2000;
    double edges_per_day = 11.5;
    double attachment_exponent = 1.0;
    Day days = 8766;  // 1994-01-01 .. 2017-12-31
    /// Chance that the second endpoint is a neighbor of a neighbor instead of a fresh draw.
    double closure_probability = 0.3;
    std::uint64_t seed = 42;
};

namespace detail {

/// Fenwick tree over non-negative weights with prefix-sum sampling.
class WeightTree {
public:
    explicit WeightTree(std::size_t n) : tree_(n + 1, 0.0), weights_(n, 0.0) {}

    void set(std::size_t i, double w) {
        const double delta = w - weights_[i];
        weights_[i] = w;
        for (std::size_t k = i + 1; k < tree_.size(); k += k & (~k + 1)) tree_[k] += delta;
    }

    double total() const {
        double s = 0.0;
        for (std::size_t k = tree_.size() - 1; k > 0; k -= k & (~k + 1)) s += tree_[k];
        return s;
    }

    /// Index i with prefix(i) <= target < prefix(i + 1).
    std::size_t find(double target) const {
        std::size_t pos = 0;
        std::size_t step = 1;
        while (step * 2 < tree_.size()) step *= 2;
        for (; step > 0; step /= 2) {
            if (pos + step < tree_.size() && tree_[pos + step] <= target) {
                pos += step;
                target -= tree_[pos];
            }
        }
        return std::min(pos, weights_.size() - 1);
    }

private:
    std::vector<double> tree_;
    std::vector<double> weights_;
};

}  // namespace detail

/// Growing preferential-attachment network with triadic closure. Vertices arrive
/// over the first 80% of the horizon (10% are present at day 0); each day emits
/// floor(rate) edges plus one more with probability frac(rate).
/// An endpoint is drawn with weight (degree + 1)^exponent among arrived vertices.
inline TemporalGraph synthesize(const SynthParams& p) {
    if (p.vertices < 3) throw std::invalid_argument("synth: need at least 3 vertices");
    if (p.days < 1) throw std::invalid_argument("synth: days must be >= 1");
    if (!(p.edges_per_day >= 0.0)) throw std::invalid_argument("synth: edges_per_day must be >= 0");
    if (!(p.closure_probability >= 0.0 && p.closure_probability <= 1.0)) {
        throw std::invalid_argument("synth: closure_probability must be in [0, 1]");
    }

    Rng rng(p.seed);
    const std::size_t n = p.vertices;
    const std::size_t initial = std::max<std::size_t>(2, n / 10);
    const double arrival_span = 0.8 * static_cast<double>(p.days);
    auto arrival_day = [&](std::size_t i) -> Day {
        if (i < initial) return 0;
        return static_cast<Day>(arrival_span * static_cast<double>(i - initial) / static_cast<double>(n - initial));
    };

    std::vector<std::uint32_t> degree(n, 0);
    std::vector<std::vector<Vertex>> adj(n);
    detail::WeightTree weights(n);
    auto weight_of = [&](std::size_t i) { return std::pow(static_cast<double>(degree[i]) + 1.0, p.attachment_exponent); };

    std::size_t arrived = 0;
    std::vector<EdgeEvent> events;
    const auto whole = static_cast<std::size_t>(p.edges_per_day);
    const double frac = p.edges_per_day - static_cast<double>(whole);

    // vertices arrive in index order, so clamping to the last arrival keeps drift off inactive ones
    auto draw = [&]() {
        return static_cast<Vertex>(std::min(weights.find(uniform_real(rng) * weights.total()), arrived - 1));
    };

    for (Day day = 0; day < p.days; ++day) {
        while (arrived < n && arrival_day(arrived) <= day) {
            weights.set(arrived, weight_of(arrived));
            ++arrived;
        }
        std::size_t count = whole + (uniform_real(rng) < frac ? 1 : 0);
        for (std::size_t e = 0; e < count; ++e) {
            const Vertex u = draw();
            Vertex v = u;
            if (!adj[u].empty() && uniform_real(rng) < p.closure_probability) {
                const Vertex w = adj[u][uniform_index(rng, adj[u].size())];
                v = adj[w][uniform_index(rng, adj[w].size())];
            }
            for (int attempt = 0; v == u && attempt < 32; ++attempt) v = draw();
            if (v == u) continue;
            events.push_back({u, v, day});
            adj[u].push_back(v);
            adj[v].push_back(u);
            ++degree[u];
            ++degree[v];
            weights.set(u, weight_of(u));
            weights.set(v, weight_of(v));
        }
    }
    return TemporalGraph(n, std::move(events));
}

}  // namespace tlink
