#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace netalign {

// Undirected graph over string node identifiers. All numeric work uses the
// dense node indices assigned in first-appearance order.
class Network {
public:
    Network() = default;
    explicit Network(std::string name) : name_(std::move(name)) {}

    const std::string& name() const { return name_; }
    void set_name(std::string name) { name_ = std::move(name); }

    int add_node(const std::string& id) {
        auto it = index_.find(id);
        if (it != index_.end()) return it->second;
        int idx = static_cast<int>(nodes_.size());
        nodes_.push_back(id);
        index_.emplace(id, idx);
        adj_.emplace_back();
        return idx;
    }

    // Returns false for self-loops and duplicates; canonical storage is (min,max).
    bool add_edge(int u, int v) {
        if (u < 0 || v < 0 || u >= node_count() || v >= node_count())
            throw std::out_of_range("Network::add_edge: node index out of range");
        if (u == v) return false;
        if (u > v) std::swap(u, v);
        if (has_edge(u, v)) return false;
        edges_.emplace_back(u, v);
        adj_[u].push_back(v);
        adj_[v].push_back(u);
        return true;
    }

    bool has_edge(int u, int v) const {
        if (u == v) return false;
        const auto& a = adj_[u].size() <= adj_[v].size() ? adj_[u] : adj_[v];
        int other = adj_[u].size() <= adj_[v].size() ? v : u;
        return std::find(a.begin(), a.end(), other) != a.end();
    }

    int node_index(const std::string& id) const {
        auto it = index_.find(id);
        return it == index_.end() ? -1 : it->second;
    }

    int node_count() const { return static_cast<int>(nodes_.size()); }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    int degree(int u) const { return static_cast<int>(adj_[u].size()); }

    const std::string& node_id(int u) const { return nodes_[u]; }
    const std::vector<std::string>& nodes() const { return nodes_; }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }
    const std::vector<int>& neighbors(int u) const { return adj_[u]; }

private:
    std::string name_;
    std::vector<std::string> nodes_;
    std::unordered_map<std::string, int> index_;
    std::vector<std::pair<int, int>> edges_;
    std::vector<std::vector<int>> adj_;
};

// Ordered collection of N >= 2 networks with unique names.
class NetworkFamily {
public:
    NetworkFamily() = default;
    explicit NetworkFamily(std::vector<Network> networks) : networks_(std::move(networks)) {
        if (networks_.size() < 2)
            throw std::invalid_argument("NetworkFamily: need at least 2 networks");
        for (std::size_t i = 0; i < networks_.size(); ++i)
            for (std::size_t j = i + 1; j < networks_.size(); ++j)
                if (networks_[i].name() == networks_[j].name())
                    throw std::invalid_argument("NetworkFamily: duplicate network name '" +
                                                networks_[i].name() + "'");
        offsets_.resize(networks_.size() + 1, 0);
        for (std::size_t i = 0; i < networks_.size(); ++i)
            offsets_[i + 1] = offsets_[i] + networks_[i].node_count();
    }

    int size() const { return static_cast<int>(networks_.size()); }
    int total_nodes() const { return offsets_.empty() ? 0 : offsets_.back(); }

    const Network& net(int i) const { return networks_[i]; }
    const std::vector<Network>& networks() const { return networks_; }

    // Offset of network i's nodes inside the stacked M-dimensional index space.
    int offset(int i) const { return offsets_[i]; }
    int global_index(int net, int node) const { return offsets_[net] + node; }

    int network_index(const std::string& name) const {
        for (std::size_t i = 0; i < networks_.size(); ++i)
            if (networks_[i].name() == name) return static_cast<int>(i);
        return -1;
    }

    int pair_count() const { return size() * (size() - 1) / 2; }

    // Index of unordered pair (i,j), i<j, in row-major enumeration
    // (0,1),(0,2),...,(0,N-1),(1,2),...
    int pair_index(int i, int j) const {
        if (i > j) std::swap(i, j);
        int n = size();
        return i * n - i * (i + 1) / 2 + (j - i - 1);
    }

    std::pair<int, int> pair_at(int p) const {
        int n = size();
        for (int i = 0; i < n; ++i) {
            int row = n - i - 1;
            if (p < row) return {i, i + 1 + p};
            p -= row;
        }
        throw std::out_of_range("NetworkFamily::pair_at");
    }

private:
    std::vector<Network> networks_;
    std::vector<int> offsets_;
};

struct NetworkLoadStats {
    int dropped_self_loops = 0;
    int dropped_duplicates = 0;
};

namespace detail {

inline std::vector<std::string> split_tsv(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t tab = line.find('\t', start);
        if (tab == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
    return out;
}

inline bool blank_or_comment(const std::string& line) {
    if (!line.empty() && line[0] == '#') return true;
    return line.find_first_not_of(" \t\r\n") == std::string::npos;
}

inline std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

}  // namespace detail

// Edge-list TSV: one `u<TAB>v` per line, `#` comments allowed. Nodes are
// registered in first-appearance order; self-loops and duplicate edges are
// dropped and counted in stats.
inline Network load_network(const std::string& path, NetworkLoadStats* stats = nullptr) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open network file: " + path);
    std::string stem = path;
    if (auto slash = stem.find_last_of("/\\"); slash != std::string::npos) stem = stem.substr(slash + 1);
    if (auto dot = stem.find_last_of('.'); dot != std::string::npos && dot > 0) stem = stem.substr(0, dot);
    Network g(stem);
    NetworkLoadStats local;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = detail::strip_cr(line);
        if (detail::blank_or_comment(line)) continue;
        auto cols = detail::split_tsv(line);
        if (cols.size() != 2 || cols[0].empty() || cols[1].empty())
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected 2 tab-separated columns");
        int u = g.add_node(cols[0]);
        int v = g.add_node(cols[1]);
        if (u == v) {
            ++local.dropped_self_loops;
        } else if (!g.add_edge(u, v)) {
            ++local.dropped_duplicates;
        }
    }
    if (stats) *stats = local;
    return g;
}

inline void save_network(const Network& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write network file: " + path);
    for (const auto& [u, v] : g.edges())
        out << g.node_id(u) << '\t' << g.node_id(v) << '\n';
    // isolated nodes written as self-loops: the loader drops the loop but keeps the node
    for (int u = 0; u < g.node_count(); ++u)
        if (g.degree(u) == 0) out << g.node_id(u) << '\t' << g.node_id(u) << '\n';
}

}  // namespace netalign
