#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "netalign/network.hpp"
#include "netalign/rounding.hpp"
#include "netalign/scoring.hpp"
#include "netalign/synthgen.hpp"

namespace testsupport {

// Scratch directory removed on destruction.
class TempDir {
public:
    TempDir() {
        auto base = std::filesystem::temp_directory_path();
        static std::atomic<int> counter{0};
        path_ = base / ("netalign_test_" + std::to_string(::getpid()) + "_" +
                        std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    std::filesystem::path path() const { return path_; }
    std::string file(const std::string& name, const std::string& content) const {
        auto p = path_ / name;
        std::ofstream out(p);
        out << content;
        return p.string();
    }

private:
    std::filesystem::path path_;
};

inline netalign::Network make_network(const std::string& name, int nodes,
                                      const std::vector<std::pair<int, int>>& edges) {
    netalign::Network g(name);
    for (int i = 0; i < nodes; ++i) g.add_node(name + "_" + std::to_string(i));
    for (auto [u, v] : edges) g.add_edge(u, v);
    return g;
}

inline netalign::Network random_network(const std::string& name, int nodes, double p,
                                        netalign::Rng& rng) {
    netalign::Network g(name);
    for (int i = 0; i < nodes; ++i) g.add_node(name + "_" + std::to_string(i));
    for (int u = 0; u < nodes; ++u)
        for (int v = u + 1; v < nodes; ++v)
            if (rng.bernoulli(p)) g.add_edge(u, v);
    return g;
}

inline netalign::ScoreMatrices random_scores(const netalign::NetworkFamily& family,
                                             netalign::Rng& rng, double lambda1 = 0.3) {
    netalign::ScoreMatrices scores;
    scores.lambda1 = lambda1;
    scores.C.resize(family.pair_count());
    for (int p = 0; p < family.pair_count(); ++p) {
        auto [i, j] = family.pair_at(p);
        Eigen::MatrixXd c(family.net(i).node_count(), family.net(j).node_count());
        for (int u = 0; u < c.rows(); ++u)
            for (int v = 0; v < c.cols(); ++v) c(u, v) = rng.uniform();
        scores.C[p] = c;
    }
    return scores;
}

// Random feasible discrete alignment via random join choices, mirroring the
// oracle's enumeration structure.
inline netalign::Alignment random_alignment(const netalign::NetworkFamily& family,
                                            netalign::Rng& rng, double join_prob = 0.7) {
    struct Slot {
        std::vector<int> member_of_net;
        std::vector<netalign::NodeRef> members;
    };
    std::vector<Slot> slots;
    for (int i = 0; i < family.size(); ++i)
        for (int u = 0; u < family.net(i).node_count(); ++u) {
            std::vector<int> open;
            for (std::size_t s = 0; s < slots.size(); ++s)
                if (slots[s].member_of_net[i] < 0) open.push_back(static_cast<int>(s));
            if (!open.empty() && rng.bernoulli(join_prob)) {
                int s = open[rng.uniform_int(static_cast<int>(open.size()))];
                slots[s].member_of_net[i] = u;
                slots[s].members.push_back({i, u});
            } else {
                Slot slot;
                slot.member_of_net.assign(family.size(), -1);
                slot.member_of_net[i] = u;
                slot.members.push_back({i, u});
                slots.push_back(std::move(slot));
            }
        }
    netalign::Alignment out;
    for (auto& s : slots)
        if (s.members.size() >= 2) out.clusters.push_back(std::move(s.members));
    out.normalize();
    return out;
}

// X blocks of a discrete alignment (the membership product restricted to a pair).
inline std::vector<Eigen::MatrixXd> alignment_to_blocks(const netalign::Alignment& alignment,
                                                        const netalign::NetworkFamily& family) {
    std::vector<Eigen::MatrixXd> blocks(family.pair_count());
    for (int p = 0; p < family.pair_count(); ++p) {
        auto [i, j] = family.pair_at(p);
        blocks[p] =
            Eigen::MatrixXd::Zero(family.net(i).node_count(), family.net(j).node_count());
    }
    for (const auto& cluster : alignment.clusters)
        for (std::size_t a = 0; a < cluster.size(); ++a)
            for (std::size_t b = a + 1; b < cluster.size(); ++b) {
                auto x = cluster[a], y = cluster[b];
                if (x.network == y.network) continue;
                if (x.network > y.network) std::swap(x, y);
                blocks[family.pair_index(x.network, y.network)](x.node, y.node) = 1.0;
            }
    return blocks;
}

}  // namespace testsupport
