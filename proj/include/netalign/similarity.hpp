#pragma once

#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "netalign/network.hpp"

namespace netalign {

// Sparse nonnegative cross-network node scores, stored per ordered pair (i<j)
// in the (i,j) orientation only.
class SimilarityTable {
public:
    SimilarityTable() = default;
    explicit SimilarityTable(const NetworkFamily& family)
        : n_networks_(family.size()), maps_(family.pair_count()) {}

    static std::uint64_t key(int u, int v) {
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(u)) << 32) |
               static_cast<std::uint32_t>(v);
    }

    // Duplicate keys keep the maximum score.
    void add(const NetworkFamily& family, int i, int j, int u, int v, double score) {
        if (score < 0) throw std::invalid_argument("similarity score must be nonnegative");
        if (i > j) { std::swap(i, j); std::swap(u, v); }
        auto& m = maps_[family.pair_index(i, j)];
        auto [it, inserted] = m.emplace(key(u, v), score);
        if (!inserted && score > it->second) it->second = score;
    }

    double get(const NetworkFamily& family, int i, int j, int u, int v) const {
        if (i > j) { std::swap(i, j); std::swap(u, v); }
        const auto& m = maps_[family.pair_index(i, j)];
        auto it = m.find(key(u, v));
        return it == m.end() ? 0.0 : it->second;
    }

    const std::unordered_map<std::uint64_t, double>& pair_entries(const NetworkFamily& family,
                                                                  int i, int j) const {
        return maps_[family.pair_index(i, j)];
    }

    double pair_max(const NetworkFamily& family, int i, int j) const {
        double m = 0.0;
        for (const auto& [k, v] : maps_[family.pair_index(i, j)])
            if (v > m) m = v;
        return m;
    }

    std::size_t entry_count() const {
        std::size_t n = 0;
        for (const auto& m : maps_) n += m.size();
        return n;
    }

private:
    int n_networks_ = 0;
    std::vector<std::unordered_map<std::uint64_t, double>> maps_;
};

struct SimilarityLoadStats {
    int dropped_unknown_nodes = 0;
};

// One file per pair, `u<TAB>v<TAB>score`, u in net i and v in net j. Entries
// naming nodes absent from the family are dropped (counted); negative scores
// are an error.
inline void load_similarity_file(const std::string& path, const NetworkFamily& family, int i,
                                 int j, SimilarityTable& table, SimilarityLoadStats* stats = nullptr) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open similarity file: " + path);
    std::string line;
    int lineno = 0;
    SimilarityLoadStats local;
    while (std::getline(in, line)) {
        ++lineno;
        line = detail::strip_cr(line);
        if (detail::blank_or_comment(line)) continue;
        auto cols = detail::split_tsv(line);
        if (cols.size() != 3)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected 3 tab-separated columns");
        double score;
        try {
            std::size_t pos = 0;
            score = std::stod(cols[2], &pos);
            if (pos != cols[2].size()) throw std::invalid_argument("trailing chars");
        } catch (const std::exception&) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": score not parseable: '" + cols[2] + "'");
        }
        if (score < 0)
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": negative score");
        int u = family.net(i).node_index(cols[0]);
        int v = family.net(j).node_index(cols[1]);
        if (u < 0 || v < 0) {
            ++local.dropped_unknown_nodes;
            continue;
        }
        table.add(family, i, j, u, v, score);
    }
    if (stats) {
        stats->dropped_unknown_nodes += local.dropped_unknown_nodes;
    }
}

// Paths in pair order (0,1),(0,2),...,(1,2),...; must supply one per pair.
inline SimilarityTable load_similarity(const std::vector<std::string>& paths,
                                       const NetworkFamily& family,
                                       SimilarityLoadStats* stats = nullptr) {
    if (static_cast<int>(paths.size()) != family.pair_count())
        throw std::runtime_error("expected " + std::to_string(family.pair_count()) +
                                 " similarity files, got " + std::to_string(paths.size()));
    SimilarityTable table(family);
    for (int p = 0; p < family.pair_count(); ++p) {
        auto [i, j] = family.pair_at(p);
        load_similarity_file(paths[p], family, i, j, table, stats);
    }
    return table;
}

inline void save_similarity_file(const SimilarityTable& table, const NetworkFamily& family, int i,
                                 int j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write similarity file: " + path);
    const auto& entries = table.pair_entries(family, i, j);
    std::vector<std::pair<std::uint64_t, double>> sorted(entries.begin(), entries.end());
    std::sort(sorted.begin(), sorted.end());
    out.precision(17);
    for (const auto& [k, score] : sorted) {
        int u = static_cast<int>(k >> 32);
        int v = static_cast<int>(k & 0xffffffffu);
        out << family.net(i).node_id(u) << '\t' << family.net(j).node_id(v) << '\t' << score
            << '\n';
    }
}

}  // namespace netalign
