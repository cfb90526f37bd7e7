#pragma once

#include <deque>
#include <fstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "netalign/network.hpp"

namespace netalign {

enum class TermNamespace { BP, MF, CC };

inline TermNamespace parse_namespace(const std::string& s) {
    if (s == "BP") return TermNamespace::BP;
    if (s == "MF") return TermNamespace::MF;
    if (s == "CC") return TermNamespace::CC;
    throw std::runtime_error("unknown ontology namespace: '" + s + "' (expected BP, MF or CC)");
}

inline const char* namespace_name(TermNamespace ns) {
    switch (ns) {
        case TermNamespace::BP: return "BP";
        case TermNamespace::MF: return "MF";
        default: return "CC";
    }
}

// Directed acyclic term graph (child -> parents) with per-term namespace,
// depth = minimum distance from a root of the same namespace, and protein
// annotations. Terms shallower than depth 5 and all CC terms are flagged
// unusable and never enter metric computations.
class AnnotationSet {
public:
    static constexpr int kMinUsableDepth = 5;

    int term_count() const { return static_cast<int>(terms_.size()); }

    int term_index(const std::string& id) const {
        auto it = term_index_.find(id);
        return it == term_index_.end() ? -1 : it->second;
    }

    int add_term(const std::string& id, TermNamespace ns) {
        auto it = term_index_.find(id);
        if (it != term_index_.end()) return it->second;
        int idx = static_cast<int>(terms_.size());
        terms_.push_back(id);
        term_index_.emplace(id, idx);
        ns_.push_back(ns);
        parents_.emplace_back();
        children_.emplace_back();
        return idx;
    }

    void add_parent(int term, int parent) {
        for (int p : parents_[term])
            if (p == parent) return;
        parents_[term].push_back(parent);
        children_[parent].push_back(term);
    }

    // Depth/usability/ancestor closure. Throws on a cyclic term graph.
    void finalize() {
        int n = term_count();
        // cycle check via Kahn's algorithm on child->parent arcs
        std::vector<int> out_deg(n, 0);
        for (int t = 0; t < n; ++t) out_deg[t] = static_cast<int>(parents_[t].size());
        std::deque<int> ready;
        for (int t = 0; t < n; ++t)
            if (out_deg[t] == 0) ready.push_back(t);
        int seen = 0;
        while (!ready.empty()) {
            int t = ready.front();
            ready.pop_front();
            ++seen;
            for (int c : children_[t])
                if (--out_deg[c] == 0) ready.push_back(c);
        }
        if (seen != n) throw std::runtime_error("ontology term graph contains a cycle");

        depth_.assign(n, -1);
        std::deque<int> queue;
        for (int t = 0; t < n; ++t)
            if (parents_[t].empty()) {
                depth_[t] = 0;
                queue.push_back(t);
            }
        while (!queue.empty()) {
            int t = queue.front();
            queue.pop_front();
            for (int c : children_[t])
                if (depth_[c] < 0) {
                    depth_[c] = depth_[t] + 1;
                    queue.push_back(c);
                }
        }

        usable_.assign(n, false);
        for (int t = 0; t < n; ++t)
            usable_[t] = depth_[t] >= kMinUsableDepth && ns_[t] != TermNamespace::CC;

        ancestors_.assign(n, {});
        for (int t = 0; t < n; ++t) {
            std::vector<char> mark(n, 0);
            std::deque<int> bfs{t};
            mark[t] = 1;
            while (!bfs.empty()) {
                int x = bfs.front();
                bfs.pop_front();
                ancestors_[t].push_back(x);
                for (int p : parents_[x])
                    if (!mark[p]) {
                        mark[p] = 1;
                        bfs.push_back(p);
                    }
            }
            std::sort(ancestors_[t].begin(), ancestors_[t].end());
        }
        finalized_ = true;
    }

    // Annotation of an unknown term is dropped by the loader, so `term` is valid here.
    void annotate(const std::string& protein, int term) {
        auto& ts = protein_terms_[protein];
        for (int t : ts)
            if (t == term) return;
        ts.push_back(term);
    }

    int depth(int term) const { return depth_[term]; }
    bool usable(int term) const { return usable_[term]; }
    TermNamespace term_ns(int term) const { return ns_[term]; }
    const std::string& term_id(int term) const { return terms_[term]; }

    // Ancestor closure including the term itself.
    const std::vector<int>& ancestors(int term) const { return ancestors_[term]; }

    const std::vector<int>& parents(int term) const { return parents_[term]; }
    const std::vector<int>& children(int term) const { return children_[term]; }

    const std::vector<int>* terms_of(const std::string& protein) const {
        auto it = protein_terms_.find(protein);
        return it == protein_terms_.end() ? nullptr : &it->second;
    }

    std::vector<int> usable_terms_of(const std::string& protein) const {
        std::vector<int> out;
        if (const auto* ts = terms_of(protein))
            for (int t : *ts)
                if (usable_[t]) out.push_back(t);
        return out;
    }

    std::vector<int> usable_terms_of(const std::string& protein, TermNamespace ns) const {
        std::vector<int> out;
        if (const auto* ts = terms_of(protein))
            for (int t : *ts)
                if (usable_[t] && ns_[t] == ns) out.push_back(t);
        return out;
    }

    bool has_usable_annotation(const std::string& protein) const {
        if (const auto* ts = terms_of(protein))
            for (int t : *ts)
                if (usable_[t]) return true;
        return false;
    }

    const std::unordered_map<std::string, std::vector<int>>& protein_terms() const {
        return protein_terms_;
    }

    bool finalized() const { return finalized_; }

private:
    std::vector<std::string> terms_;
    std::unordered_map<std::string, int> term_index_;
    std::vector<TermNamespace> ns_;
    std::vector<std::vector<int>> parents_, children_;
    std::vector<int> depth_;
    std::vector<bool> usable_;
    std::vector<std::vector<int>> ancestors_;
    std::unordered_map<std::string, std::vector<int>> protein_terms_;
    bool finalized_ = false;
};

struct AnnotationLoadStats {
    int dropped_unknown_terms = 0;
};

// Ontology rows: `term<TAB>parent<TAB>namespace`; a parent of `-` (or empty)
// declares a root. Annotation rows: `protein<TAB>term`.
inline AnnotationSet load_annotations(const std::string& ontology_path,
                                      const std::string& annotation_path,
                                      AnnotationLoadStats* stats = nullptr) {
    AnnotationSet ann;
    {
        std::ifstream in(ontology_path);
        if (!in) throw std::runtime_error("cannot open ontology file: " + ontology_path);
        std::string line;
        int lineno = 0;
        std::vector<std::pair<int, std::string>> parent_links;
        while (std::getline(in, line)) {
            ++lineno;
            line = detail::strip_cr(line);
            if (detail::blank_or_comment(line)) continue;
            auto cols = detail::split_tsv(line);
            if (cols.size() != 3)
                throw std::runtime_error(ontology_path + ":" + std::to_string(lineno) +
                                         ": expected 3 tab-separated columns");
            int t = ann.add_term(cols[0], parse_namespace(cols[2]));
            if (!cols[1].empty() && cols[1] != "-") parent_links.emplace_back(t, cols[1]);
        }
        for (auto& [t, pid] : parent_links) {
            int p = ann.term_index(pid);
            if (p < 0)
                throw std::runtime_error(ontology_path + ": parent term '" + pid +
                                         "' never declared");
            ann.add_parent(t, p);
        }
    }
    ann.finalize();
    {
        std::ifstream in(annotation_path);
        if (!in) throw std::runtime_error("cannot open annotation file: " + annotation_path);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            line = detail::strip_cr(line);
            if (detail::blank_or_comment(line)) continue;
            auto cols = detail::split_tsv(line);
            if (cols.size() != 2)
                throw std::runtime_error(annotation_path + ":" + std::to_string(lineno) +
                                         ": expected 2 tab-separated columns");
            int t = ann.term_index(cols[1]);
            if (t < 0) {
                if (stats) ++stats->dropped_unknown_terms;
                continue;
            }
            ann.annotate(cols[0], t);
        }
    }
    return ann;
}

inline void save_ontology(const AnnotationSet& ann, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write ontology file: " + path);
    for (int t = 0; t < ann.term_count(); ++t) {
        if (ann.parents(t).empty()) {
            out << ann.term_id(t) << "\t-\t" << namespace_name(ann.term_ns(t)) << '\n';
        } else {
            for (int p : ann.parents(t))
                out << ann.term_id(t) << '\t' << ann.term_id(p) << '\t'
                    << namespace_name(ann.term_ns(t)) << '\n';
        }
    }
}

inline void save_protein_annotations(const AnnotationSet& ann, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write annotation file: " + path);
    std::vector<std::string> proteins;
    proteins.reserve(ann.protein_terms().size());
    for (const auto& [p, ts] : ann.protein_terms()) proteins.push_back(p);
    std::sort(proteins.begin(), proteins.end());
    for (const auto& p : proteins)
        for (int t : *ann.terms_of(p)) out << p << '\t' << ann.term_id(t) << '\n';
}

}  // namespace netalign
