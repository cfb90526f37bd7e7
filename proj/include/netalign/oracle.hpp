#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "netalign/network.hpp"
#include "netalign/rounding.hpp"
#include "netalign/scoring.hpp"

namespace netalign {

struct OracleLimits {
    std::uint64_t max_states = 10'000'000;
};

struct ExactResult {
    Alignment best;
    double objective = 0.0;
    std::uint64_t enumerated = 0;
};

namespace detail {

// Exhaustive enumeration of all partitions of the family's nodes into
// network-disjoint clusters. Nodes are visited network by network; each node
// either opens a fresh cluster (covering the unaligned case when nobody joins
// later) or joins the cluster of an earlier node. Every partition arises from
// exactly one choice sequence, so nothing is enumerated twice.
class ExactEnumerator {
public:
    ExactEnumerator(const NetworkFamily& family, const ScoreMatrices& scores,
                    const ObjectiveSpec& spec)
        : family_(family), scores_(scores), spec_(spec) {
        for (int i = 0; i < family.size(); ++i)
            for (int u = 0; u < family.net(i).node_count(); ++u) order_.push_back({i, u});
    }

    ExactResult run() {
        recurse(0, 0.0, 0.0);
        ExactResult out;
        out.best = best_alignment_;
        out.objective = best_set_ ? best_objective_ : 0.0;
        out.enumerated = enumerated_;
        return out;
    }

private:
    struct ClusterSlot {
        std::vector<int> member_of_net;  // net -> node or -1
        std::vector<int> members;        // positions in order_
    };

    void recurse(std::size_t pos, double f_node, double f_int) {
        if (pos == order_.size()) {
            ++enumerated_;
            consider((1.0 - spec_.lambda2) * f_node + spec_.lambda2 * f_int);
            return;
        }
        auto [net, node] = order_[pos];
        // open a fresh cluster seeded by this node
        clusters_.push_back(ClusterSlot{std::vector<int>(family_.size(), -1), {}});
        join(clusters_.size() - 1, net, node, pos);
        recurse(pos + 1, f_node, f_int);
        leave(clusters_.size() - 1, net, pos);
        clusters_.pop_back();
        // join an earlier cluster lacking this network
        for (std::size_t c = 0; c < clusters_.size(); ++c) {
            if (clusters_[c].member_of_net[net] >= 0) continue;
            double d_node = 0.0, d_int = 0.0;
            deltas(c, net, node, d_node, d_int);
            join(c, net, node, pos);
            recurse(pos + 1, f_node + d_node, f_int + d_int);
            leave(c, net, pos);
        }
    }

    void deltas(std::size_t c, int net, int node, double& d_node, double& d_int) const {
        const auto& slot = clusters_[c];
        for (int i = 0; i < family_.size(); ++i) {
            int other = slot.member_of_net[i];
            if (other < 0) continue;
            int a = std::min(i, net), b = std::max(i, net);
            int ua = i < net ? other : node;
            int vb = i < net ? node : other;
            d_node += scores_.pair(family_, a, b)(ua, vb);
        }
        // conserved interactions gained against every other cluster
        for (std::size_t o = 0; o < clusters_.size(); ++o) {
            if (o == c) continue;
            const auto& os = clusters_[o];
            int w = os.member_of_net[net];
            if (w < 0 || !family_.net(net).has_edge(node, w)) continue;
            for (int i = 0; i < family_.size(); ++i) {
                if (i == net) continue;
                int u = slot.member_of_net[i];
                int v = os.member_of_net[i];
                if (u >= 0 && v >= 0 && family_.net(i).has_edge(u, v)) d_int += 1.0;
            }
        }
    }

    void join(std::size_t c, int net, int node, std::size_t pos) {
        clusters_[c].member_of_net[net] = node;
        clusters_[c].members.push_back(static_cast<int>(pos));
    }

    void leave(std::size_t c, int net, std::size_t pos) {
        (void)pos;
        clusters_[c].member_of_net[net] = -1;
        clusters_[c].members.pop_back();
    }

    void consider(double obj) {
        if (best_set_ && obj < best_objective_) return;
        Alignment al;
        for (const auto& slot : clusters_)
            if (slot.members.size() >= 2) {
                std::vector<NodeRef> cluster;
                for (int p : slot.members) cluster.push_back({order_[p].first, order_[p].second});
                al.clusters.push_back(std::move(cluster));
            }
        al.normalize();
        if (!best_set_ || obj > best_objective_ ||
            (obj == best_objective_ && al.clusters < best_alignment_.clusters)) {
            best_set_ = true;
            best_objective_ = obj;
            best_alignment_ = std::move(al);
        }
    }

    const NetworkFamily& family_;
    const ScoreMatrices& scores_;
    const ObjectiveSpec& spec_;
    std::vector<std::pair<int, int>> order_;
    std::vector<ClusterSlot> clusters_;
    bool best_set_ = false;
    double best_objective_ = 0.0;
    Alignment best_alignment_;
    std::uint64_t enumerated_ = 0;
};

}  // namespace detail

// Exhaustive maximization of the discrete objective over all feasible
// one-to-one consistent alignments. Ties resolve to the lexicographically
// smallest normalized cluster encoding (so an all-zero objective returns the
// empty alignment).
inline ExactResult exact_align(const NetworkFamily& family, const ScoreMatrices& scores,
                               const ObjectiveSpec& spec, const OracleLimits& limits = {}) {
    // enumeration-tree bound: a node of network i may join any of the nodes
    // seen before network i or stay on its own
    long double bound = 1.0L;
    for (int i = 1; i < family.size(); ++i) {
        long double choices = static_cast<long double>(family.offset(i)) + 1.0L;
        for (int u = 0; u < family.net(i).node_count(); ++u) bound *= choices;
        if (bound > static_cast<long double>(limits.max_states))
            throw std::runtime_error(
                "exact_align: state space exceeds max_states; use a smaller instance");
    }
    detail::ExactEnumerator e(family, scores, spec);
    return e.run();
}

}  // namespace netalign
