#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "test_util.hpp"
#include "tlink/calendar.hpp"
#include "tlink/temporal_graph.hpp"

using namespace tlink;

TEST(Calendar, EpochAndSplitDates) {
    EXPECT_EQ(calendar::to_day(1994, 1, 1), 0);
    EXPECT_EQ(calendar::to_day(2000, 1, 1), 2191);
    EXPECT_EQ(calendar::to_day(2011, 12, 31), 6573);
    EXPECT_EQ(calendar::to_day(2014, 12, 31), 7669);
    EXPECT_EQ(calendar::to_day(2017, 12, 31), 8765);
    EXPECT_EQ(calendar::parse("2014-12-31"), 7669);
    EXPECT_EQ(calendar::parse("123"), 123);
    EXPECT_EQ(calendar::format(7669), "2014-12-31");
    EXPECT_THROW(calendar::parse("2014-13-01"), std::invalid_argument);
    EXPECT_THROW(calendar::parse("yesterday"), std::invalid_argument);
}

TEST(Calendar, YearsBeforeKeepsMonthAndDay) {
    EXPECT_EQ(calendar::years_before(calendar::to_day(2014, 12, 31), 1), calendar::to_day(2013, 12, 31));
    EXPECT_EQ(calendar::years_before(calendar::to_day(2014, 12, 31), 3), calendar::to_day(2011, 12, 31));
    EXPECT_EQ(calendar::years_before(calendar::to_day(2016, 2, 29), 1), calendar::to_day(2015, 2, 28));
}

TEST(LoadEdgeList, ParsesEventsAndInfersVertexCount) {
    TempDir dir;
    const auto path = dir.file("g.txt", "# header\n0 1 0\n1 2 10\n");
    const auto g = load_edge_list(path);
    EXPECT_EQ(g.num_vertices(), 3u);
    ASSERT_EQ(g.events().size(), 2u);
    EXPECT_EQ(g.events()[1], (EdgeEvent{1, 2, 10}));
}

TEST(LoadEdgeList, EmptyFileWithDeclaredVertexCount) {
    TempDir dir;
    const auto path = dir.file("g.txt", "");
    EXPECT_EQ(load_edge_list(path, 5).num_vertices(), 5u);
    dir.file("g.txt.meta", "num_vertices=5\n");
    const auto g = load_edge_list(path);
    EXPECT_EQ(g.num_vertices(), 5u);
    EXPECT_TRUE(g.events().empty());
}

TEST(LoadEdgeList, SortsByDayStably) {
    TempDir dir;
    const auto g = load_edge_list(dir.file("g.txt", "0 1 9\n2 3 4\n1 2 4\n"));
    EXPECT_EQ(g.events()[0], (EdgeEvent{2, 3, 4}));
    EXPECT_EQ(g.events()[1], (EdgeEvent{1, 2, 4}));
    EXPECT_EQ(g.events()[2], (EdgeEvent{0, 1, 9}));
}

TEST(LoadEdgeList, Errors) {
    TempDir dir;
    try {
        load_edge_list(dir.file("a.txt", "0 1 0\n3 3 7\n"));
        FAIL() << "self-loop accepted";
    } catch (const io::ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
        EXPECT_NE(std::string(e.what()).find("self-loop"), std::string::npos);
    }
    try {
        load_edge_list(dir.file("b.txt", "0 1 0\n\n0 x 2\n"));
        FAIL() << "garbage accepted";
    } catch (const io::ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
    EXPECT_THROW(load_edge_list(dir.file("c.txt", "0 1 -4\n")), io::ParseError);
    EXPECT_THROW(load_edge_list(dir.file("d.txt", "0 1 2 3\n")), io::ParseError);
    EXPECT_THROW(load_edge_list(dir.file("e.txt", "0 9 2\n"), 5), std::runtime_error);
    EXPECT_THROW(load_edge_list(dir.path() + "/missing.txt"), std::runtime_error);
}

TEST(LoadEdgeList, SaveRoundTrip) {
    TempDir dir;
    TemporalGraph g(7, {{0, 1, 3}, {4, 2, 1}, {0, 1, 9}});
    save_edge_list(g, dir.path() + "/out.txt");
    const auto back = load_edge_list(dir.path() + "/out.txt");
    EXPECT_EQ(back.num_vertices(), 7u);
    EXPECT_TRUE(std::equal(back.events().begin(), back.events().end(), g.events().begin(), g.events().end()));
}

TEST(TemporalGraphTest, ConstructorValidates) {
    EXPECT_THROW(TemporalGraph(3, {{1, 1, 0}}), std::invalid_argument);
    EXPECT_THROW(TemporalGraph(3, {{0, 3, 0}}), std::invalid_argument);
    EXPECT_THROW(TemporalGraph(3, {{0, 1, -1}}), std::invalid_argument);
}

namespace {
TemporalGraph small_graph() { return TemporalGraph(3, {{0, 1, 5}, {0, 1, 20}, {1, 2, 30}}); }

std::vector<Vertex> as_vec(std::span<const Vertex> s) { return {s.begin(), s.end()}; }
}  // namespace

TEST(SnapshotTest, FiltersByWindow) {
    const auto g = small_graph();
    const auto s = snapshot(g, 0, 25);
    EXPECT_EQ(as_vec(s.neighbors(0)), std::vector<Vertex>{1});
    EXPECT_EQ(as_vec(s.neighbors(1)), std::vector<Vertex>{0});
    EXPECT_TRUE(s.neighbors(2).empty());
    EXPECT_EQ(s.num_edges(), 1u);

    const auto late = snapshot(g, 10, 25);
    EXPECT_EQ(as_vec(late.neighbors(0)), std::vector<Vertex>{1});
    EXPECT_EQ(late.degree(1), 1u);
}

TEST(SnapshotTest, EmptyWindowAndErrors) {
    TemporalGraph g(4, {{0, 1, 1}, {2, 3, 2}});
    const auto s = snapshot(g, 0, 0);
    for (Vertex x = 0; x < 4; ++x) EXPECT_EQ(s.degree(x), 0u);
    EXPECT_THROW(snapshot(g, 5, 4), std::invalid_argument);
}

TEST(SnapshotTest, DeduplicatesRepeatedEvents) {
    TemporalGraph g(2, {{0, 1, 1}, {1, 0, 2}, {0, 1, 3}});
    const auto s = snapshot(g, 0, 10);
    EXPECT_EQ(s.degree(0), 1u);
    EXPECT_EQ(s.degree(1), 1u);
}

TEST(SnapshotProperties, MonotoneWindowConsistentAndSymmetric) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 30; ++trial) {
        const auto g = random_temporal_graph(rng, 40, 150, 100);
        const auto events = std::vector<EdgeEvent>(g.events().begin(), g.events().end());
        for (Day a : {0, 10, 50}) {
            const auto sa = snapshot(g, 0, a);
            const auto sb = snapshot(g, 0, a + 25);
            for (Vertex x = 0; x < g.num_vertices(); ++x) {
                for (Vertex w : sa.neighbors(x)) EXPECT_TRUE(sb.has_edge(x, w));
                for (Vertex w : sb.neighbors(x)) EXPECT_TRUE(sb.has_edge(w, x));
            }
        }
        const Day d = 90, m = 37;
        const auto whole = snapshot(g, 0, d);
        const auto first = snapshot(g, 0, m);
        const auto second = snapshot(g, m + 1, d);
        const auto expected = oracle::neighbor_sets(g.num_vertices(), events, 0, d);
        for (Vertex x = 0; x < g.num_vertices(); ++x) {
            std::set<Vertex> uni(first.neighbors(x).begin(), first.neighbors(x).end());
            uni.insert(second.neighbors(x).begin(), second.neighbors(x).end());
            std::set<Vertex> got(whole.neighbors(x).begin(), whole.neighbors(x).end());
            EXPECT_EQ(got, uni);
            EXPECT_EQ(got, expected[x]);
        }
    }
}

TEST(DecayedAdjacencyTest, Weights) {
    TemporalGraph g(4, {{0, 1, 100}, {1, 2, 0}, {1, 2, 3640}, {0, 3, 5000}});
    const auto adj = decayed_adjacency(g, 3650, 0.0001);
    EXPECT_DOUBLE_EQ(adj.weight(0, 1), std::exp(-0.0001 * 3550));
    // latest event at or before the reference day wins; the day-5000 event is ignored
    EXPECT_DOUBLE_EQ(adj.weight(1, 2), std::exp(-0.0001 * 10));
    EXPECT_EQ(adj.weight(0, 3), 0.0);
    EXPECT_EQ(adj.weight(2, 3), 0.0);
    EXPECT_EQ(adj.num_edges(), 2u);

    const auto same_day = decayed_adjacency(g, 5000, 0.0001);
    EXPECT_EQ(same_day.weight(0, 3), 1.0);
    EXPECT_EQ(same_day.weight(3, 0), 1.0);
}

TEST(DecayedAdjacencyTest, TenYearAge) {
    TemporalGraph g(2, {{0, 1, 0}});
    const auto adj = decayed_adjacency(g, 3650, 0.0001);
    EXPECT_NEAR(adj.weight(0, 1), 0.6941966508779789, 1e-15);
    EXPECT_THROW(decayed_adjacency(g, 10, -1.0), std::invalid_argument);
}

TEST(DecayedAdjacencyProperties, DecreasingWithAgeAndBinaryAtZeroRate) {
    std::mt19937_64 rng(11);
    const auto g = random_temporal_graph(rng, 30, 200, 400);
    const Day as_of = 300;
    const auto adj = decayed_adjacency(g, as_of, 0.01);
    const auto binary = decayed_adjacency(g, as_of, 0.0);
    const auto snap = snapshot(g, 0, as_of);
    std::map<std::uint64_t, Day> latest;
    for (const auto& e : g.events_until(as_of)) latest[pair_key(e.u, e.v)] = std::max(latest[pair_key(e.u, e.v)], e.day);
    for (Vertex a = 0; a < g.num_vertices(); ++a) {
        for (Vertex b = 0; b < g.num_vertices(); ++b) {
            EXPECT_EQ(adj.weight(a, b), adj.weight(b, a));
            EXPECT_EQ(binary.weight(a, b), snap.has_edge(a, b) ? 1.0 : 0.0);
            const double w = adj.weight(a, b);
            if (w > 0) {
                EXPECT_LE(w, 1.0);
            }
        }
    }
    for (const auto& [k1, d1] : latest) {
        for (const auto& [k2, d2] : latest) {
            const double w1 = adj.weight(static_cast<Vertex>(k1 >> 32), static_cast<Vertex>(k1));
            const double w2 = adj.weight(static_cast<Vertex>(k2 >> 32), static_cast<Vertex>(k2));
            if (d1 < d2) {
                EXPECT_LT(w1, w2);
            }
        }
    }
}

TEST(DecayedAdjacencyTest, ExportFormat) {
    TempDir dir;
    TemporalGraph g(3, {{2, 0, 10}, {1, 2, 10}});
    save_decayed_adjacency(decayed_adjacency(g, 10, 0.5), dir.path() + "/adj.csv");
    std::ifstream in(dir.path() + "/adj.csv");
    std::stringstream ss;
    ss << in.rdbuf();
    EXPECT_EQ(ss.str(), "u,v,weight\n0,2,1\n1,2,1\n");
}
