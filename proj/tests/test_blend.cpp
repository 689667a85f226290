#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "test_util.hpp"
#include "tlink/blend.hpp"

using namespace tlink;

namespace {

ScoredPairs scored(std::vector<VertexPair> pairs, std::vector<double> scores) {
    return {std::move(pairs), std::move(scores), std::nullopt};
}

}  // namespace

TEST(Blend, Examples) {
    const auto one = blend({{scored({{0, 1}}, {1.0}), 0.3}, {scored({{0, 1}}, {1.0}), 0.7}}, 3);
    EXPECT_EQ(one.scores[0], 1.0);
    EXPECT_EQ(blend({{scored({{0, 1}}, {0.5}), 1.0}}, 3).scores[0], 0.125);
    const auto mix = blend({{scored({{0, 1}}, {0.8}), 1.0}, {scored({{0, 1}}, {0.2}), 1.0}}, 3);
    EXPECT_NEAR(mix.scores[0], 0.26, 1e-12);
}

TEST(Blend, AlignsByKeyAndKeepsFirstOrder) {
    const auto a = scored({{3, 1}, {0, 2}, {5, 4}}, {0.1, 0.2, 0.3});
    const auto b = scored({{0, 2}, {4, 5}, {1, 3}}, {0.9, 0.8, 0.7});
    const auto out = blend({{a, 1.0}, {b, 3.0}}, 2);
    EXPECT_EQ(out.pairs, a.pairs);
    EXPECT_NEAR(out.scores[0], 0.25 * 0.01 + 0.75 * 0.49, 1e-15);
    EXPECT_NEAR(out.scores[1], 0.25 * 0.04 + 0.75 * 0.81, 1e-15);
    EXPECT_NEAR(out.scores[2], 0.25 * 0.09 + 0.75 * 0.64, 1e-15);
}

TEST(Blend, SymmetricUnderInputPermutation) {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<VertexPair> pairs;
    std::vector<double> s1, s2, s3;
    for (Vertex i = 0; i < 200; ++i) {
        pairs.emplace_back(i, i + 1);
        s1.push_back(u(rng));
        s2.push_back(u(rng));
        s3.push_back(u(rng));
    }
    const auto x = blend({{scored(pairs, s1), 0.2}, {scored(pairs, s2), 0.5}, {scored(pairs, s3), 0.3}}, 3);
    const auto y = blend({{scored(pairs, s3), 0.3}, {scored(pairs, s1), 0.2}, {scored(pairs, s2), 0.5}}, 3);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        EXPECT_NEAR(x.scores[i], y.scores[i], 1e-15);
        EXPECT_GE(x.scores[i], 0.0);
        EXPECT_LE(x.scores[i], 1.0);
    }
}

TEST(Blend, Errors) {
    const auto a = scored({{0, 1}, {1, 2}}, {0.5, 0.5});
    try {
        blend({{a, 1}, {scored({{0, 1}, {1, 3}}, {0.5, 0.5}), 1}}, 3);
        FAIL() << "mismatch accepted";
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("(1, 2)"), std::string::npos) << e.what();
    }
    EXPECT_THROW(blend({{a, 1}, {scored({{0, 1}}, {0.5}), 1}}, 3), std::invalid_argument);
    EXPECT_THROW(blend({{scored({{0, 1}}, {1.5}), 1}}, 3), std::invalid_argument);
    EXPECT_THROW(blend({{a, 0}}, 3), std::invalid_argument);
    EXPECT_THROW(blend({{a, -1}, {a, 2}}, 3), std::invalid_argument);
    EXPECT_THROW(blend(std::vector<BlendInput>{}, 3), std::invalid_argument);
}

TEST(ScoreIO, RoundTripIsExact) {
    TempDir dir;
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0, 1);
    ScoredPairs s;
    for (Vertex i = 0; i < 100; ++i) {
        s.pairs.emplace_back(i, 2 * i + 1);
        s.scores.push_back(u(rng));
    }
    s.scores[0] = 0.0;
    s.scores[1] = 1.0;
    save_scores(s, dir.path() + "/s.csv");
    const auto back = load_scores(dir.path() + "/s.csv");
    EXPECT_EQ(back.pairs, s.pairs);
    EXPECT_EQ(back.scores, s.scores);
    EXPECT_EQ(slurp(dir.path() + "/s.csv").substr(0, 10), "u,v,score\n");
}

TEST(ScoreIO, ReadsWhitespaceAndRejectsOutOfRange) {
    TempDir dir;
    const auto s = load_scores(dir.file("ws.txt", "u v score\n0 1 0.25\n\n2 3 1\n"));
    EXPECT_EQ(s.scores, (std::vector<double>{0.25, 1.0}));
    EXPECT_THROW(load_scores(dir.file("hi.csv", "u,v,score\n0,1,1.01\n")), io::ParseError);
    EXPECT_THROW(load_scores(dir.file("nan.csv", "u,v,score\n0,1,NaN\n")), io::ParseError);
    EXPECT_THROW(load_scores(dir.file("hdr.csv", "a,b\n")), io::ParseError);
}

TEST(Blend, FromFiles) {
    TempDir dir;
    const auto p1 = dir.file("a.csv", "u,v,score\n0,1,0.8\n1,2,0.5\n");
    const auto p2 = dir.file("b.csv", "u,v,score\n2,1,0.5\n1,0,0.2\n");
    const auto out = blend(BlendSpec{{{p1, 1.0}, {p2, 1.0}}, 3.0});
    EXPECT_NEAR(out.scores[0], 0.26, 1e-12);
    EXPECT_NEAR(out.scores[1], 0.125, 1e-15);
}
