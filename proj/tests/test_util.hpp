#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>

#include "tlink/temporal_graph.hpp"

/// Scratch directory removed on destruction.
class TempDir {
public:
    TempDir() {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("tlink_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string path() const { return path_.string(); }

    std::string file(const std::string& name, const std::string& contents) const {
        const auto p = (path_ / name).string();
        std::ofstream(p) << contents;
        return p;
    }

private:
    std::filesystem::path path_;
};

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Uniformly random event log without self-loops.
inline tlink::TemporalGraph random_temporal_graph(std::mt19937_64& rng, std::size_t n, std::size_t events, tlink::Day days) {
    std::uniform_int_distribution<tlink::Vertex> vd(0, static_cast<tlink::Vertex>(n - 1));
    std::uniform_int_distribution<tlink::Day> dd(0, days - 1);
    std::vector<tlink::EdgeEvent> ev;
    while (ev.size() < events) {
        const auto u = vd(rng), v = vd(rng);
        if (u != v) ev.push_back({u, v, dd(rng)});
    }
    return tlink::TemporalGraph(n, std::move(ev));
}
