#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "netalign/network.hpp"
#include "netalign/similarity.hpp"

namespace netalign {

using ImportanceVector = std::vector<double>;

// Topological importance by min-degree elimination with weight propagation.
// Node weights start at 0 and edge weights at 1. While the residual minimum
// degree is <= degree_threshold, the minimum-degree node v (ties: smallest
// index) is removed:
//   deg(v) == 1, neighbor u:  w(u) += w(v) + w(u,v)
//   deg(v) >= 2: every neighbor pair (u,z) gains
//                (w(v) + w(u,v) + w(v,z)) / C(deg(v),2), creating the edge
//                with weight 0 if absent (fill-in joins the residual graph).
// Afterwards S(v) = w(v) + sum of final weights of v's original edges, where
// an edge weight freezes at the moment the edge leaves the residual graph.
inline ImportanceVector topology_scores(const Network& g, int degree_threshold = 10) {
    if (degree_threshold <= 0) throw std::invalid_argument("degree_threshold must be positive");
    if (g.node_count() == 0) throw std::invalid_argument("topology_scores: empty network");

    int n = g.node_count();
    std::vector<double> node_w(n, 0.0);
    std::vector<std::map<int, double>> adj(n);  // residual graph, weighted
    std::map<std::pair<int, int>, double> final_w;
    for (const auto& [u, v] : g.edges()) {
        adj[u][v] = 1.0;
        adj[v][u] = 1.0;
    }
    std::vector<char> alive(n, 1);

    auto canonical = [](int u, int v) { return u < v ? std::make_pair(u, v) : std::make_pair(v, u); };

    int remaining = n;
    while (remaining > 0) {
        int v = -1, best_deg = 0;
        for (int u = 0; u < n; ++u) {
            if (!alive[u]) continue;
            int d = static_cast<int>(adj[u].size());
            if (v < 0 || d < best_deg) {
                v = u;
                best_deg = d;
            }
        }
        if (best_deg > degree_threshold) break;

        std::vector<std::pair<int, double>> nbrs(adj[v].begin(), adj[v].end());
        int deg = static_cast<int>(nbrs.size());
        if (deg == 1) {
            node_w[nbrs[0].first] += node_w[v] + nbrs[0].second;
        } else if (deg >= 2) {
            double pairs = deg * (deg - 1) / 2.0;
            for (int a = 0; a < deg; ++a)
                for (int b = a + 1; b < deg; ++b) {
                    auto [u, wu] = nbrs[a];
                    auto [z, wz] = nbrs[b];
                    double transfer = (node_w[v] + wu + wz) / pairs;
                    adj[u][z] += transfer;  // operator[] creates with 0.0
                    adj[z][u] = adj[u][z];
                }
        }
        for (auto& [u, wu] : nbrs) {
            if (g.has_edge(u, v)) final_w[canonical(u, v)] = adj[v][u];
            adj[u].erase(v);
        }
        adj[v].clear();
        alive[v] = 0;
        --remaining;
    }
    // surviving original edges freeze at their current weight
    for (const auto& [u, v] : g.edges())
        if (alive[u] && alive[v]) final_w[canonical(u, v)] = adj[u].at(v);

    ImportanceVector s(n, 0.0);
    for (int v = 0; v < n; ++v) s[v] = node_w[v];
    for (const auto& [uv, w] : final_w) {
        s[uv.first] += w;
        s[uv.second] += w;
    }
    return s;
}

// T(u,v) = min(S(u),S(v)) / max(S over both networks); all entries in [0,1].
inline Eigen::MatrixXd topology_similarity(const ImportanceVector& sa, const ImportanceVector& sb) {
    double global_max = 0.0;
    for (double x : sa) global_max = std::max(global_max, x);
    for (double x : sb) global_max = std::max(global_max, x);
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(sa.size(), sb.size());
    if (global_max <= 0.0) return t;
    for (std::size_t u = 0; u < sa.size(); ++u)
        for (std::size_t v = 0; v < sb.size(); ++v)
            t(u, v) = std::min(sa[u], sb[v]) / global_max;
    return t;
}

// Per-pair node score matrices C_ij with entries in [0,1]:
// (1 - lambda1) * normalized similarity + lambda1 * topology similarity.
struct ScoreMatrices {
    std::vector<Eigen::MatrixXd> C;  // pair order (0,1),(0,2),...
    double lambda1 = 0.3;

    const Eigen::MatrixXd& pair(const NetworkFamily& family, int i, int j) const {
        return C[family.pair_index(i, j)];
    }
};

inline ScoreMatrices build_score_matrices(const NetworkFamily& family,
                                          const SimilarityTable& similarity, double lambda1 = 0.3,
                                          int degree_threshold = 10) {
    if (lambda1 < 0.0 || lambda1 > 1.0)
        throw std::invalid_argument("lambda1 must lie in [0,1]");
    ScoreMatrices out;
    out.lambda1 = lambda1;
    std::vector<ImportanceVector> importance(family.size());
    for (int i = 0; i < family.size(); ++i)
        importance[i] = topology_scores(family.net(i), degree_threshold);

    out.C.resize(family.pair_count());
    for (int p = 0; p < family.pair_count(); ++p) {
        auto [i, j] = family.pair_at(p);
        Eigen::MatrixXd t = topology_similarity(importance[i], importance[j]);
        Eigen::MatrixXd c =
            Eigen::MatrixXd::Zero(family.net(i).node_count(), family.net(j).node_count());
        double max_score = similarity.pair_max(family, i, j);
        if (max_score > 0.0) {
            for (const auto& [k, raw] : similarity.pair_entries(family, i, j)) {
                int u = static_cast<int>(k >> 32);
                int v = static_cast<int>(k & 0xffffffffu);
                c(u, v) = (1.0 - lambda1) * (raw / max_score);
            }
        }
        c += lambda1 * t;
        out.C[p] = std::move(c);
    }
    return out;
}

}  // namespace netalign
