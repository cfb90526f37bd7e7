#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "netalign/annotations.hpp"
#include "netalign/network.hpp"
#include "netalign/rounding.hpp"
#include "netalign/similarity.hpp"

namespace netalign {

// mt19937_64's raw stream is pinned by the standard; the derived draws below
// avoid std distributions, whose outputs vary across library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    int uniform_int(int n) {  // [0, n)
        int v = static_cast<int>(uniform() * n);
        return v >= n ? n - 1 : v;
    }

    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 eng_;
};

enum class GrowthModel { DMC, DMR };

inline GrowthModel parse_growth_model(const std::string& s) {
    if (s == "DMC" || s == "dmc") return GrowthModel::DMC;
    if (s == "DMR" || s == "dmr") return GrowthModel::DMR;
    throw std::invalid_argument("unknown growth model: '" + s + "' (expected DMC or DMR)");
}

struct GeneratorConfig {
    GrowthModel model = GrowthModel::DMC;
    int ancestor_size = 50;
    int n_networks = 3;
    int nodes_per_network = 100;
    double q_mod = 0.4;   // DMC: edge-loss probability per shared neighbor
    double q_con = 0.1;   // DMC: anchor-duplicate edge probability
    double q_del = 0.4;   // DMR: per-copied-edge deletion probability
    double q_new = 0.1;   // DMR: expected new edges per duplication
    std::uint64_t seed = 1;
    double noise_floor = 0.1;   // cap for non-orthologous similarity scores
    double noise_rate = 0.05;   // sampling rate of non-orthologous pairs

    void validate() const {
        if (n_networks < 2) throw std::invalid_argument("need at least 2 networks");
        if (ancestor_size < 2) throw std::invalid_argument("ancestor size must be >= 2");
        if (nodes_per_network < ancestor_size)
            throw std::invalid_argument("target size smaller than ancestor");
        for (double p : {q_mod, q_con, q_del, q_new})
            if (p < 0.0 || p > 1.0)
                throw std::invalid_argument("model probabilities must lie in [0,1]");
    }
};

struct GroundTruth {
    Alignment true_clusters;                 // one cluster per ancestor node
    std::vector<std::vector<int>> lineage;   // per network: node -> ancestor id
};

struct SyntheticFamily {
    NetworkFamily family;
    SimilarityTable similarity;
    GroundTruth truth;
};

namespace detail {

struct GrowingGraph {
    std::vector<std::vector<int>> adj;
    std::vector<int> lineage;

    int size() const { return static_cast<int>(adj.size()); }

    bool has_edge(int u, int v) const {
        for (int w : adj[u])
            if (w == v) return true;
        return false;
    }

    void add_edge(int u, int v) {
        if (u == v || has_edge(u, v)) return;
        adj[u].push_back(v);
        adj[v].push_back(u);
    }

    void remove_edge(int u, int v) {
        std::erase(adj[u], v);
        std::erase(adj[v], u);
    }

    int add_node(int lineage_id) {
        adj.emplace_back();
        lineage.push_back(lineage_id);
        return size() - 1;
    }
};

inline void grow_step(GrowingGraph& g, GrowthModel model, const GeneratorConfig& cfg, Rng& rng) {
    int anchor = rng.uniform_int(g.size());
    int v = g.add_node(g.lineage[anchor]);
    std::vector<int> copied(g.adj[anchor]);  // snapshot before mutation
    for (int w : copied) g.add_edge(v, w);
    if (model == GrowthModel::DMC) {
        for (int w : copied)
            if (rng.bernoulli(cfg.q_mod)) {
                if (rng.bernoulli(0.5))
                    g.remove_edge(anchor, w);
                else
                    g.remove_edge(v, w);
            }
        if (rng.bernoulli(cfg.q_con)) g.add_edge(anchor, v);
    } else {
        for (int w : copied)
            if (rng.bernoulli(cfg.q_del)) g.remove_edge(v, w);
        double p = cfg.q_new / static_cast<double>(g.size());
        for (int w = 0; w < g.size(); ++w) {
            if (w == v || w == anchor || g.has_edge(v, w)) continue;
            if (rng.bernoulli(p)) g.add_edge(v, w);
        }
    }
}

// node ids carry the network tag: annotations key proteins by bare id, so ids
// must be unique across the family
inline Network to_network(const GrowingGraph& g, const std::string& name) {
    Network net(name);
    for (int u = 0; u < g.size(); ++u) net.add_node(name + "p" + std::to_string(u));
    for (int u = 0; u < g.size(); ++u)
        for (int w : g.adj[u])
            if (u < w) net.add_edge(u, w);
    return net;
}

}  // namespace detail

// Grows a common ancestor from a single edge by the chosen duplication model,
// then evolves N independent copies to the target size. Ancestor-derived
// lineages define the ground-truth clusters (the original copy of each
// ancestor node in every network); the similarity table scores same-lineage
// pairs 1.0 and a random sample of other pairs below the noise floor.
inline SyntheticFamily generate(const GeneratorConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed);

    detail::GrowingGraph ancestor;
    ancestor.add_node(0);
    ancestor.add_node(1);
    ancestor.add_edge(0, 1);
    while (ancestor.size() < cfg.ancestor_size)
        detail::grow_step(ancestor, cfg.model, cfg, rng);
    for (int u = 0; u < ancestor.size(); ++u) ancestor.lineage[u] = u;

    std::vector<detail::GrowingGraph> copies(cfg.n_networks, ancestor);
    std::vector<Network> nets;
    for (int i = 0; i < cfg.n_networks; ++i) {
        while (copies[i].size() < cfg.nodes_per_network)
            detail::grow_step(copies[i], cfg.model, cfg, rng);
        nets.push_back(detail::to_network(copies[i], "net" + std::to_string(i + 1)));
    }
    SyntheticFamily out{NetworkFamily(std::move(nets)), SimilarityTable{}, GroundTruth{}};
    out.similarity = SimilarityTable(out.family);

    out.truth.lineage.resize(cfg.n_networks);
    for (int i = 0; i < cfg.n_networks; ++i) out.truth.lineage[i] = copies[i].lineage;
    for (int a = 0; a < cfg.ancestor_size; ++a) {
        std::vector<NodeRef> cluster;
        for (int i = 0; i < cfg.n_networks; ++i) cluster.push_back({i, a});
        out.truth.true_clusters.clusters.push_back(std::move(cluster));
    }
    out.truth.true_clusters.normalize();

    for (int i = 0; i < cfg.n_networks; ++i)
        for (int j = i + 1; j < cfg.n_networks; ++j) {
            for (int u = 0; u < copies[i].size(); ++u)
                for (int v = 0; v < copies[j].size(); ++v) {
                    if (copies[i].lineage[u] == copies[j].lineage[v]) {
                        out.similarity.add(out.family, i, j, u, v, 1.0);
                    } else if (rng.bernoulli(cfg.noise_rate)) {
                        out.similarity.add(out.family, i, j, u, v,
                                           rng.uniform() * cfg.noise_floor);
                    }
                }
        }
    return out;
}

// Fraction of aligned cross-network pairs that are same-lineage pairs in the
// ground truth; an empty alignment scores 0.
inline double node_correctness(const Alignment& alignment, const GroundTruth& truth) {
    long total = 0, correct = 0;
    for (const auto& cluster : alignment.clusters)
        for (std::size_t a = 0; a < cluster.size(); ++a)
            for (std::size_t b = a + 1; b < cluster.size(); ++b) {
                if (cluster[a].network == cluster[b].network) continue;
                ++total;
                int la = truth.lineage[cluster[a].network][cluster[a].node];
                int lb = truth.lineage[cluster[b].network][cluster[b].node];
                if (la == lb) ++correct;
            }
    return total > 0 ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
}

// Self-contained annotations for functional-metric runs without real data:
// every lineage becomes one term; a four-link chain under the root puts the
// lineage terms at depth 5, past the usability cutoff.
inline AnnotationSet synthetic_annotations(const SyntheticFamily& sf) {
    AnnotationSet ann;
    int root = ann.add_term("SYN:root", TermNamespace::BP);
    int prev = root;
    for (int d = 1; d <= 4; ++d) {
        int t = ann.add_term("SYN:level" + std::to_string(d), TermNamespace::BP);
        ann.add_parent(t, prev);
        prev = t;
    }
    int n_lineages = 0;
    for (const auto& lin : sf.truth.lineage)
        for (int l : lin) n_lineages = std::max(n_lineages, l + 1);
    std::vector<int> term_of(n_lineages);
    for (int l = 0; l < n_lineages; ++l) {
        term_of[l] = ann.add_term("SYN:lineage" + std::to_string(l), TermNamespace::BP);
        ann.add_parent(term_of[l], prev);
    }
    ann.finalize();
    for (int i = 0; i < sf.family.size(); ++i)
        for (int u = 0; u < sf.family.net(i).node_count(); ++u)
            ann.annotate(sf.family.net(i).node_id(u), term_of[sf.truth.lineage[i][u]]);
    return ann;
}

}  // namespace netalign
