#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "netalign/formulation.hpp"
#include "netalign/network.hpp"
#include "netalign/scoring.hpp"

namespace netalign {

struct NodeRef {
    int network = 0;
    int node = 0;
    bool operator==(const NodeRef&) const = default;
    bool operator<(const NodeRef& o) const {
        return network != o.network ? network < o.network : node < o.node;
    }
};

// Disjoint clusters of mutually aligned nodes, at most one node per network
// per cluster. Only clusters with >= 2 members are stored; unaligned nodes
// are implicit singletons.
struct Alignment {
    std::vector<std::vector<NodeRef>> clusters;

    int cluster_count() const { return static_cast<int>(clusters.size()); }

    void normalize() {
        for (auto& c : clusters) std::sort(c.begin(), c.end());
        std::sort(clusters.begin(), clusters.end());
    }

    // Network index -> node -> member cluster (or -1).
    std::vector<std::vector<int>> membership(const NetworkFamily& family) const {
        std::vector<std::vector<int>> m(family.size());
        for (int i = 0; i < family.size(); ++i) m[i].assign(family.net(i).node_count(), -1);
        for (std::size_t k = 0; k < clusters.size(); ++k)
            for (const auto& ref : clusters[k]) m[ref.network][ref.node] = static_cast<int>(k);
        return m;
    }
};

struct RoundingConfig {
    double threshold = 0.05;
};

struct RoundingStats {
    int accepted_pairs = 0;
    int rejected_pairs = 0;
    int non_clique_components = 0;            // components completed to cliques afterwards
    std::vector<std::array<int, 3>> accepted;  // (pair, u, v) in scan order
};

// Greedy rounding of the fractional solution: entries above the threshold are
// scanned in decreasing order (ties by pair then node indices) and accepted
// unless the merged component would hold two nodes of one network. Connected
// components become clusters; components that are not cliques are completed.
inline Alignment round_alignment(const std::vector<Eigen::MatrixXd>& x_blocks,
                                 const NetworkFamily& family, const RoundingConfig& config = {},
                                 RoundingStats* stats = nullptr) {
    struct Cand {
        double value;
        int pair, u, v;
    };
    std::vector<Cand> cands;
    for (int p = 0; p < family.pair_count(); ++p) {
        const auto& x = x_blocks[p];
        for (int u = 0; u < x.rows(); ++u)
            for (int v = 0; v < x.cols(); ++v)
                if (x(u, v) > config.threshold) cands.push_back({x(u, v), p, u, v});
    }
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        if (a.value != b.value) return a.value > b.value;
        if (a.pair != b.pair) return a.pair < b.pair;
        if (a.u != b.u) return a.u < b.u;
        return a.v < b.v;
    });

    int m = family.total_nodes();
    std::vector<int> parent(m);
    std::iota(parent.begin(), parent.end(), 0);
    std::vector<std::vector<int>> nets(m);  // sorted networks present in each root's component
    for (int i = 0; i < family.size(); ++i)
        for (int u = 0; u < family.net(i).node_count(); ++u)
            nets[family.global_index(i, u)] = {i};
    std::vector<int> edge_count(m, 0);

    auto find = [&](int a) {
        while (parent[a] != a) {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        return a;
    };

    RoundingStats local;
    for (const auto& c : cands) {
        auto [i, j] = family.pair_at(c.pair);
        int a = find(family.global_index(i, c.u));
        int b = find(family.global_index(j, c.v));
        if (a == b) {  // same component: the edge is admissible and tightens it
            ++edge_count[a];
            ++local.accepted_pairs;
            local.accepted.push_back({c.pair, c.u, c.v});
            continue;
        }
        const auto& na = nets[a];
        const auto& nb = nets[b];
        bool disjoint = true;
        // one-to-one feasibility: the merged component may hold each network once
        for (std::size_t x = 0, y = 0; x < na.size() && y < nb.size();) {
            if (na[x] == nb[y]) {
                disjoint = false;
                break;
            }
            na[x] < nb[y] ? ++x : ++y;
        }
        if (!disjoint) {
            ++local.rejected_pairs;
            continue;
        }
        if (nets[a].size() < nets[b].size()) std::swap(a, b);
        parent[b] = a;
        std::vector<int> merged;
        std::merge(nets[a].begin(), nets[a].end(), nets[b].begin(), nets[b].end(),
                   std::back_inserter(merged));
        nets[a] = std::move(merged);
        nets[b].clear();
        edge_count[a] += edge_count[b] + 1;
        edge_count[b] = 0;
        ++local.accepted_pairs;
        local.accepted.push_back({c.pair, c.u, c.v});
    }

    std::vector<std::vector<int>> comp_members(m);
    for (int g = 0; g < m; ++g) comp_members[find(g)].push_back(g);

    Alignment out;
    for (int r = 0; r < m; ++r) {
        auto& members = comp_members[r];
        if (members.size() < 2) continue;
        int sz = static_cast<int>(members.size());
        if (edge_count[r] < sz * (sz - 1) / 2) ++local.non_clique_components;
        std::vector<NodeRef> cluster;
        cluster.reserve(members.size());
        for (int g : members) {
            int net = 0;
            while (family.offset(net + 1) <= g) ++net;
            cluster.push_back({net, g - family.offset(net)});
        }
        out.clusters.push_back(std::move(cluster));
    }
    out.normalize();
    if (stats) *stats = local;
    return out;
}

struct ConsistencyReport {
    bool ok = true;
    std::vector<std::string> violations;
};

// One-to-one/cycle-consistency verification: at most one node per network per
// cluster, clusters disjoint, and the reconstructed X' = Y Y^T (with implicit
// singleton clusters) has identity diagonal blocks and sub-stochastic rows and
// columns. X' = Y Y^T is positive semidefinite by construction.
inline ConsistencyReport verify_consistency(const Alignment& alignment,
                                            const NetworkFamily& family) {
    ConsistencyReport rep;
    auto complain = [&](std::string msg) {
        rep.ok = false;
        rep.violations.push_back(std::move(msg));
    };

    std::vector<std::vector<int>> seen(family.size());
    for (int i = 0; i < family.size(); ++i) seen[i].assign(family.net(i).node_count(), -1);
    for (std::size_t k = 0; k < alignment.clusters.size(); ++k) {
        std::vector<int> nets_here;
        for (const auto& ref : alignment.clusters[k]) {
            if (ref.network < 0 || ref.network >= family.size() || ref.node < 0 ||
                ref.node >= family.net(ref.network).node_count()) {
                complain("cluster " + std::to_string(k) + ": node reference out of range");
                continue;
            }
            nets_here.push_back(ref.network);
            if (seen[ref.network][ref.node] >= 0 &&
                seen[ref.network][ref.node] != static_cast<int>(k))
                complain("clusters " + std::to_string(seen[ref.network][ref.node]) + " and " +
                         std::to_string(k) + " overlap on " +
                         family.net(ref.network).node_id(ref.node));
            if (seen[ref.network][ref.node] == static_cast<int>(k))
                complain("cluster " + std::to_string(k) + ": duplicate member");
            seen[ref.network][ref.node] = static_cast<int>(k);
        }
        std::sort(nets_here.begin(), nets_here.end());
        for (std::size_t a = 1; a < nets_here.size(); ++a)
            if (nets_here[a] == nets_here[a - 1])
                complain("cluster " + std::to_string(k) + ": two nodes of network " +
                         family.net(nets_here[a]).name());
    }
    if (!rep.ok) return rep;

    // membership matrix over clusters + implicit singletons; every node lands
    // in exactly one column, so X' = Y Y^T is PSD with binary entries
    int m = family.total_nodes();
    int k = alignment.cluster_count();
    std::vector<int> column(m, -1);
    int next_col = k;
    for (int i = 0; i < family.size(); ++i)
        for (int u = 0; u < family.net(i).node_count(); ++u) {
            int g = family.global_index(i, u);
            column[g] = seen[i][u] >= 0 ? seen[i][u] : next_col++;
        }
    // X'(a,b) = [column[a] == column[b]]
    for (int i = 0; i < family.size(); ++i) {
        int ni = family.net(i).node_count();
        for (int u = 0; u < ni; ++u)
            for (int v = 0; v < ni; ++v) {
                int xi = column[family.global_index(i, u)] == column[family.global_index(i, v)];
                if (xi != (u == v ? 1 : 0)) {
                    complain("diagonal block of network " + family.net(i).name() +
                             " is not the identity");
                    return rep;
                }
            }
    }
    for (int i = 0; i < family.size(); ++i)
        for (int j = i + 1; j < family.size(); ++j) {
            int ni = family.net(i).node_count(), nj = family.net(j).node_count();
            for (int u = 0; u < ni; ++u) {
                int rowsum = 0;
                for (int v = 0; v < nj; ++v)
                    rowsum += column[family.global_index(i, u)] == column[family.global_index(j, v)];
                if (rowsum > 1) complain("row sum above 1 in block (" + std::to_string(i) + "," +
                                         std::to_string(j) + ")");
            }
            for (int v = 0; v < nj; ++v) {
                int colsum = 0;
                for (int u = 0; u < ni; ++u)
                    colsum += column[family.global_index(i, u)] == column[family.global_index(j, v)];
                if (colsum > 1) complain("column sum above 1 in block (" + std::to_string(i) + "," +
                                         std::to_string(j) + ")");
            }
        }
    return rep;
}

// Objective of a discrete alignment, computed directly from the clusters:
// f = (1-lambda2) * sum of node scores over within-cluster cross-network
// pairs + lambda2 * count of cluster pairs carrying an edge in both networks
// of some network pair.
inline double alignment_objective(const Alignment& alignment, const NetworkFamily& family,
                                  const ScoreMatrices& scores, const ObjectiveSpec& spec) {
    double f_node = 0.0;
    for (const auto& cluster : alignment.clusters)
        for (std::size_t a = 0; a < cluster.size(); ++a)
            for (std::size_t b = a + 1; b < cluster.size(); ++b) {
                NodeRef x = cluster[a], y = cluster[b];
                if (x.network == y.network) continue;
                if (x.network > y.network) std::swap(x, y);
                f_node += scores.pair(family, x.network, y.network)(x.node, y.node);
            }

    double f_int = 0.0;
    int n = family.size();
    auto node_of = [&](const std::vector<NodeRef>& c, int net) {
        for (const auto& r : c)
            if (r.network == net) return r.node;
        return -1;
    };
    for (std::size_t k = 0; k < alignment.clusters.size(); ++k)
        for (std::size_t l = k + 1; l < alignment.clusters.size(); ++l)
            for (int i = 0; i < n; ++i) {
                int ui = node_of(alignment.clusters[k], i);
                int vi = node_of(alignment.clusters[l], i);
                if (ui < 0 || vi < 0 || !family.net(i).has_edge(ui, vi)) continue;
                for (int j = i + 1; j < n; ++j) {
                    int uj = node_of(alignment.clusters[k], j);
                    int vj = node_of(alignment.clusters[l], j);
                    if (uj >= 0 && vj >= 0 && family.net(j).has_edge(uj, vj)) f_int += 1.0;
                }
            }
    return (1.0 - spec.lambda2) * f_node + spec.lambda2 * f_int;
}

// Alignment file: one cluster per line, members as `network:node`, tab
// separated. Unaligned nodes are emitted as singleton lines but ignored by
// metrics and the loader's cluster list.
inline void save_alignment(const Alignment& alignment, const NetworkFamily& family,
                           const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write alignment file: " + path);
    auto member = alignment.membership(family);
    for (const auto& cluster : alignment.clusters) {
        bool first = true;
        for (const auto& ref : cluster) {
            if (!first) out << '\t';
            out << family.net(ref.network).name() << ':' << family.net(ref.network).node_id(ref.node);
            first = false;
        }
        out << '\n';
    }
    for (int i = 0; i < family.size(); ++i)
        for (int u = 0; u < family.net(i).node_count(); ++u)
            if (member[i][u] < 0)
                out << family.net(i).name() << ':' << family.net(i).node_id(u) << '\n';
}

inline Alignment load_alignment(const std::string& path, const NetworkFamily& family) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open alignment file: " + path);
    Alignment out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = detail::strip_cr(line);
        if (detail::blank_or_comment(line)) continue;
        auto tokens = detail::split_tsv(line);
        std::vector<NodeRef> cluster;
        for (const auto& tok : tokens) {
            auto colon = tok.find(':');
            if (colon == std::string::npos)
                throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                         ": expected network:node token, got '" + tok + "'");
            int net = family.network_index(tok.substr(0, colon));
            if (net < 0)
                throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                         ": unknown network '" + tok.substr(0, colon) + "'");
            int node = family.net(net).node_index(tok.substr(colon + 1));
            if (node < 0)
                throw std::runtime_error(path + ":" + std::to_string(lineno) + ": unknown node '" +
                                         tok.substr(colon + 1) + "' in network '" +
                                         tok.substr(0, colon) + "'");
            cluster.push_back({net, node});
        }
        if (cluster.size() >= 2) out.clusters.push_back(std::move(cluster));
    }
    out.normalize();
    return out;
}

}  // namespace netalign
