#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>

#include "test_util.hpp"
#include "tlink/dataset.hpp"

using namespace tlink;

namespace {

TemporalGraph toy() { return TemporalGraph(4, {{0, 1, 10}, {2, 3, 100}}); }

SplitSpec toy_spec(std::uint64_t n, std::uint64_t seed = 0) { return {50, 150, n, seed}; }

}  // namespace

TEST(BuildSplit, ToyGraphUsesEveryCandidate) {
    const auto s = build_split(toy(), toy_spec(5));
    const std::vector<VertexPair> expected{{0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
    EXPECT_EQ(s.pairs, expected);
    EXPECT_EQ(s.labels, (std::vector<std::uint8_t>{0, 0, 0, 0, 1}));
}

TEST(BuildSplit, ToyGraphPartialNegatives) {
    const std::set<VertexPair> allowed{{0, 2}, {0, 3}, {1, 2}, {1, 3}};
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto s = build_split(toy(), toy_spec(3, seed));
        ASSERT_EQ(s.size(), 3u);
        EXPECT_EQ(s.positives(), 1u);
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s.labels[i]) EXPECT_EQ(s.pairs[i], (VertexPair{2, 3}));
            else EXPECT_TRUE(allowed.contains(s.pairs[i]));
        }
    }
}

TEST(BuildSplit, ToyGraphCannotHoldSixPairs) {
    // only five pairs are unconnected at t1
    EXPECT_THROW(build_split(toy(), toy_spec(6)), std::invalid_argument);
}

TEST(BuildSplit, Errors) {
    EXPECT_THROW(build_split(toy(), toy_spec(0)), std::invalid_argument);
    EXPECT_THROW(build_split(toy(), {150, 150, 5, 0}), std::invalid_argument);
    EXPECT_THROW(build_split(toy(), {150, 50, 5, 0}), std::invalid_argument);
}

TEST(BuildSplit, LabelsAndExclusionsHold) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        const auto g = random_temporal_graph(rng, 60, 500, 1000);
        const SplitSpec spec{400, 700, 600, static_cast<std::uint64_t>(trial)};
        const auto s = build_split(g, spec);
        ASSERT_EQ(s.size(), 600u);
        std::map<std::uint64_t, std::vector<Day>> days;
        for (const auto& e : g.events()) days[pair_key(e.u, e.v)].push_back(e.day);
        std::set<VertexPair> seen;
        for (std::size_t i = 0; i < s.size(); ++i) {
            const auto [u, v] = s.pairs[i];
            EXPECT_LT(u, v);
            EXPECT_TRUE(seen.insert(s.pairs[i]).second);
            bool before = false, inside = false;
            for (Day d : days[pair_key(u, v)]) {
                before |= d <= spec.t1_day;
                inside |= d > spec.t1_day && d <= spec.t2_day;
            }
            EXPECT_FALSE(before);
            EXPECT_EQ(static_cast<bool>(s.labels[i]), inside);
        }
        EXPECT_TRUE(std::is_sorted(s.pairs.begin(), s.pairs.end()));
        std::size_t positives = 0;
        for (const auto& [key, ds] : days) {
            const bool early = std::any_of(ds.begin(), ds.end(), [&](Day d) { return d <= spec.t1_day; });
            const bool mid = std::any_of(ds.begin(), ds.end(), [&](Day d) { return d > spec.t1_day && d <= spec.t2_day; });
            positives += !early && mid;
        }
        EXPECT_EQ(s.positives(), positives);
    }
}

TEST(BuildSplit, SeedsShareAllPositives) {
    std::mt19937_64 rng(1);
    const auto g = random_temporal_graph(rng, 100, 800, 1000);
    auto positives = [](const LabeledPairs& s) {
        std::vector<VertexPair> out;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s.labels[i]) out.push_back(s.pairs[i]);
        }
        return out;
    };
    const auto a = build_split(g, {500, 800, 1000, 1});
    const auto b = build_split(g, {500, 800, 1000, 2});
    const auto c = build_split(g, {500, 800, 3000, 1});
    EXPECT_EQ(positives(a), positives(b));
    EXPECT_EQ(positives(a), positives(c));
    EXPECT_NE(a.pairs, b.pairs);
    EXPECT_EQ(a, build_split(g, {500, 800, 1000, 1}));
}

TEST(BuildSplit, DenseRequestDrawsUniformly) {
    // 10 vertices, no edges: 45 candidates; asking for 40 takes the enumeration path
    const TemporalGraph g(10, {});
    std::map<VertexPair, int> hits;
    const int runs = 900;
    for (int seed = 0; seed < runs; ++seed) {
        const auto s = build_split(g, {1, 2, 40, static_cast<std::uint64_t>(seed)});
        ASSERT_EQ(std::set<VertexPair>(s.pairs.begin(), s.pairs.end()).size(), 40u);
        for (const auto& p : s.pairs) ++hits[p];
    }
    ASSERT_EQ(hits.size(), 45u);
    // each pair is included with probability 40/45, i.e. 800 of 900 runs; sd ~ 9.4
    for (const auto& [p, h] : hits) EXPECT_NEAR(h, 800, 60);
}

TEST(BuildSplit, SparseRequestDrawsUniformly) {
    const TemporalGraph g(12, {});
    std::map<VertexPair, int> hits;
    for (int seed = 0; seed < 3300; ++seed) {
        for (const auto& p : build_split(g, {1, 2, 10, static_cast<std::uint64_t>(seed)}).pairs) ++hits[p];
    }
    // 66 candidates, 10 drawn: expected 500 hits per pair, sd ~ 20.7
    ASSERT_EQ(hits.size(), 66u);
    for (const auto& [p, h] : hits) EXPECT_NEAR(h, 500, 110);
}

TEST(AugmentSwap, Examples) {
    LabeledPairs one{{{0, 1}}, {1}};
    const auto out = augment_swap(one);
    EXPECT_EQ(out.pairs, (std::vector<VertexPair>{{0, 1}, {1, 0}}));
    EXPECT_EQ(out.labels, (std::vector<std::uint8_t>{1, 1}));
    EXPECT_EQ(augment_swap(LabeledPairs{}).size(), 0u);
    std::mt19937_64 rng(2);
    const auto s = build_split(random_temporal_graph(rng, 30, 100, 100), {40, 80, 200, 0});
    EXPECT_EQ(augment_swap(s).size(), 2 * s.size());
    EXPECT_EQ(augment_swap(s).positives(), 2 * s.positives());
}

TEST(SplitIO, RoundTripWithSidecar) {
    TempDir dir;
    const auto path = dir.path() + "/split.csv";
    const SplitSpec spec = toy_spec(4, 9);
    const auto s = build_split(toy(), spec);
    save_split(s, path, spec);
    EXPECT_EQ(load_split(path), s);
    const auto back = load_split_spec(path);
    ASSERT_TRUE(back.has_value());
    EXPECT_EQ(back->t1_day, 50);
    EXPECT_EQ(back->t2_day, 150);
    EXPECT_EQ(back->target_size, 4u);
    EXPECT_EQ(back->seed, 9u);
    EXPECT_EQ(slurp(path).substr(0, 10), "u,v,label\n");

    save_split(s, dir.path() + "/plain.csv", std::nullopt);
    EXPECT_FALSE(load_split_spec(dir.path() + "/plain.csv").has_value());
    EXPECT_THROW(load_split(dir.file("bad.csv", "u,v,label\n0,1,2\n")), io::ParseError);
    EXPECT_THROW(load_split(dir.file("hdr.csv", "a,b,c\n")), io::ParseError);
}
