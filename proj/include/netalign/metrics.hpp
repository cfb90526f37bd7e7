#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "netalign/annotations.hpp"
#include "netalign/network.hpp"
#include "netalign/rounding.hpp"

namespace netalign {

// ---- topological metrics ---------------------------------------------------

struct CoverageEntry {
    int clusters = 0;
    int proteins = 0;
};

// Clusters keyed by the number of distinct networks they span (== cluster
// size under the one-to-one invariant). Total coverage counts c >= 2.
inline std::map<int, CoverageEntry> c_coverage(const Alignment& alignment) {
    std::map<int, CoverageEntry> out;
    for (const auto& cluster : alignment.clusters) {
        int c = static_cast<int>(cluster.size());
        out[c].clusters += 1;
        out[c].proteins += c;
    }
    return out;
}

inline CoverageEntry total_coverage(const Alignment& alignment) {
    CoverageEntry total;
    for (const auto& [c, entry] : c_coverage(alignment)) {
        if (c < 2) continue;
        total.clusters += entry.clusters;
        total.proteins += entry.proteins;
    }
    return total;
}

struct ConservedInteractions {
    long aligned = 0;  // cluster pair x network pair with the edge in both networks
    long total = 0;    // cluster pair x network with an edge between the clusters
    double ci = 0.0;
};

inline ConservedInteractions conserved_interactions(const Alignment& alignment,
                                                    const NetworkFamily& family) {
    ConservedInteractions out;
    int n = family.size();
    auto node_of = [](const std::vector<NodeRef>& c, int net) {
        for (const auto& r : c)
            if (r.network == net) return r.node;
        return -1;
    };
    for (std::size_t k = 0; k < alignment.clusters.size(); ++k)
        for (std::size_t l = k + 1; l < alignment.clusters.size(); ++l) {
            std::vector<char> has_edge(n, 0);
            for (int i = 0; i < n; ++i) {
                int u = node_of(alignment.clusters[k], i);
                int v = node_of(alignment.clusters[l], i);
                if (u >= 0 && v >= 0 && family.net(i).has_edge(u, v)) {
                    has_edge[i] = 1;
                    ++out.total;
                }
            }
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j)
                    if (has_edge[i] && has_edge[j]) ++out.aligned;
        }
    out.ci = out.total > 0 ? static_cast<double>(out.aligned) / static_cast<double>(out.total) : 0.0;
    return out;
}

// ---- annotation-based metrics ----------------------------------------------

namespace detail {

inline std::string protein_key(const NetworkFamily& family, const NodeRef& ref) {
    return family.net(ref.network).node_id(ref.node);
}

}  // namespace detail

// A cluster is annotated when at least two members carry usable terms, and
// consistent when all annotated members share at least one usable term.
inline bool cluster_annotated(const std::vector<NodeRef>& cluster, const NetworkFamily& family,
                              const AnnotationSet& ann) {
    int annotated = 0;
    for (const auto& ref : cluster)
        if (ann.has_usable_annotation(detail::protein_key(family, ref))) ++annotated;
    return annotated >= 2;
}

inline bool cluster_consistent(const std::vector<NodeRef>& cluster, const NetworkFamily& family,
                               const AnnotationSet& ann) {
    if (!cluster_annotated(cluster, family, ann)) return false;
    std::vector<int> shared;
    bool first = true;
    for (const auto& ref : cluster) {
        auto ts = ann.usable_terms_of(detail::protein_key(family, ref));
        if (ts.empty()) continue;
        std::sort(ts.begin(), ts.end());
        if (first) {
            shared = ts;
            first = false;
        } else {
            std::vector<int> inter;
            std::set_intersection(shared.begin(), shared.end(), ts.begin(), ts.end(),
                                  std::back_inserter(inter));
            shared = std::move(inter);
        }
        if (shared.empty()) return false;
    }
    return !shared.empty();
}

struct SpecificityResult {
    int consistent = 0;
    int annotated = 0;
    double ratio = 0.0;
};

// c_filter < 0 evaluates all clusters (>= 2 species); otherwise only clusters
// spanning exactly c_filter networks.
inline SpecificityResult specificity(const Alignment& alignment, const NetworkFamily& family,
                                     const AnnotationSet& ann, int c_filter = -1) {
    SpecificityResult out;
    for (const auto& cluster : alignment.clusters) {
        if (c_filter >= 0 && static_cast<int>(cluster.size()) != c_filter) continue;
        if (!cluster_annotated(cluster, family, ann)) continue;
        ++out.annotated;
        if (cluster_consistent(cluster, family, ann)) ++out.consistent;
    }
    out.ratio = out.annotated > 0 ? static_cast<double>(out.consistent) / out.annotated : 0.0;
    return out;
}

// Corpus information content per namespace: IC(g) = -ln(occurrences of g or
// its descendants / total occurrences in the namespace), occurrences counted
// over all loaded protein-term records.
class InformationContent {
public:
    explicit InformationContent(const AnnotationSet& ann) : ann_(&ann) {
        int n = ann.term_count();
        subtree_.assign(n, 0);
        total_[0] = total_[1] = total_[2] = 0;
        std::vector<long> direct(n, 0);
        for (const auto& [p, ts] : ann.protein_terms())
            for (int t : ts) {
                ++direct[t];
                ++total_[static_cast<int>(ann.term_ns(t))];
            }
        for (int t = 0; t < n; ++t)
            if (direct[t] > 0)
                for (int g : ann.ancestors(t)) subtree_[g] += direct[t];
    }

    // Defined only for terms whose subtree is annotated somewhere in the corpus.
    double ic(int term) const {
        long total = total_[static_cast<int>(ann_->term_ns(term))];
        if (total == 0 || subtree_[term] == 0) return 0.0;
        return -std::log(static_cast<double>(subtree_[term]) / static_cast<double>(total));
    }

    // Most informative common ancestor of two terms; 0 when only an
    // uninformative ancestor (e.g. the namespace root) is shared.
    double resnik(int t1, int t2) const {
        const auto& a1 = ann_->ancestors(t1);
        const auto& a2 = ann_->ancestors(t2);
        double best = 0.0;
        bool found = false;
        for (std::size_t x = 0, y = 0; x < a1.size() && y < a2.size();) {
            if (a1[x] == a2[y]) {
                best = std::max(best, ic(a1[x]));
                found = true;
                ++x;
                ++y;
            } else if (a1[x] < a2[y]) {
                ++x;
            } else {
                ++y;
            }
        }
        return found ? best : 0.0;
    }

private:
    const AnnotationSet* ann_;
    std::vector<long> subtree_;
    long total_[3];
};

// Pairwise functional similarity: all-vs-all Resnik over the two usable term
// sets, then max of the row-maxima mean and the column-maxima mean. Empty on
// a protein without usable terms in the category.
inline std::optional<double> schlicker_similarity(const std::string& p, const std::string& q,
                                                  const AnnotationSet& ann,
                                                  const InformationContent& ic,
                                                  TermNamespace category) {
    auto tp = ann.usable_terms_of(p, category);
    auto tq = ann.usable_terms_of(q, category);
    if (tp.empty() || tq.empty()) return std::nullopt;
    std::vector<double> row_max(tp.size(), 0.0), col_max(tq.size(), 0.0);
    for (std::size_t i = 0; i < tp.size(); ++i)
        for (std::size_t j = 0; j < tq.size(); ++j) {
            double s = ic.resnik(tp[i], tq[j]);
            row_max[i] = std::max(row_max[i], s);
            col_max[j] = std::max(col_max[j], s);
        }
    double score_row = 0.0, score_col = 0.0;
    for (double s : row_max) score_row += s;
    for (double s : col_max) score_col += s;
    score_row /= static_cast<double>(tp.size());
    score_col /= static_cast<double>(tq.size());
    return std::max(score_row, score_col);
}

struct AfsResult {
    double mean = 0.0;
    int qualifying_clusters = 0;
    std::vector<double> per_cluster;
};

// Per-cluster average functional similarity over unordered annotated member
// pairs, normalized by |A|(|A|-1)/2; clusters qualify with >= 60% members
// annotated in the category. c_filter as in specificity.
inline AfsResult afs(const Alignment& alignment, const NetworkFamily& family,
                     const AnnotationSet& ann, const InformationContent& ic,
                     TermNamespace category, int c_filter = -1) {
    AfsResult out;
    for (const auto& cluster : alignment.clusters) {
        if (c_filter >= 0 && static_cast<int>(cluster.size()) != c_filter) continue;
        int sz = static_cast<int>(cluster.size());
        int annotated = 0;
        for (const auto& ref : cluster)
            if (!ann.usable_terms_of(detail::protein_key(family, ref), category).empty())
                ++annotated;
        if (sz < 2 || annotated * 5 < sz * 3) continue;  // < 60% annotated
        double sum = 0.0;
        for (int a = 0; a < sz; ++a)
            for (int b = a + 1; b < sz; ++b) {
                auto s = schlicker_similarity(detail::protein_key(family, cluster[a]),
                                              detail::protein_key(family, cluster[b]), ann, ic,
                                              category);
                if (s) sum += *s;
            }
        double value = sum / (sz * (sz - 1) / 2.0);
        out.per_cluster.push_back(value);
        ++out.qualifying_clusters;
        out.mean += value;
    }
    if (out.qualifying_clusters > 0) out.mean /= out.qualifying_clusters;
    return out;
}

// Normalized annotation entropy of one cluster over usable term occurrences;
// a single distinct term gives 0, d > 1 uses -(1/log d) * sum p_i log p_i.
inline double normalized_entropy(const std::vector<NodeRef>& cluster, const NetworkFamily& family,
                                 const AnnotationSet& ann) {
    std::map<int, int> occ;
    int total = 0;
    for (const auto& ref : cluster)
        for (int t : ann.usable_terms_of(detail::protein_key(family, ref))) {
            ++occ[t];
            ++total;
        }
    int d = static_cast<int>(occ.size());
    if (d <= 1 || total == 0) return 0.0;
    double h = 0.0;
    for (const auto& [t, c] : occ) {
        double p = static_cast<double>(c) / total;
        h -= p * std::log(p);
    }
    return h / std::log(static_cast<double>(d));
}

// Mean normalized entropy over annotated clusters.
inline double mne(const Alignment& alignment, const NetworkFamily& family,
                  const AnnotationSet& ann) {
    double sum = 0.0;
    int count = 0;
    for (const auto& cluster : alignment.clusters) {
        if (!cluster_annotated(cluster, family, ann)) continue;
        sum += normalized_entropy(cluster, family, ann);
        ++count;
    }
    return count > 0 ? sum / count : 0.0;
}

struct CoiResult {
    long coi = 0;
    double coi_ci_ratio = 0.0;  // COI / total aligned interactions
};

// Aligned interactions restricted to cluster pairs where both clusters are
// functionally consistent.
inline CoiResult coi(const Alignment& alignment, const NetworkFamily& family,
                     const AnnotationSet& ann) {
    CoiResult out;
    int n = family.size();
    std::vector<char> consistent(alignment.clusters.size(), 0);
    for (std::size_t k = 0; k < alignment.clusters.size(); ++k)
        consistent[k] = cluster_consistent(alignment.clusters[k], family, ann) ? 1 : 0;
    auto node_of = [](const std::vector<NodeRef>& c, int net) {
        for (const auto& r : c)
            if (r.network == net) return r.node;
        return -1;
    };
    long aligned_total = 0;
    for (std::size_t k = 0; k < alignment.clusters.size(); ++k)
        for (std::size_t l = k + 1; l < alignment.clusters.size(); ++l) {
            std::vector<char> has_edge(n, 0);
            for (int i = 0; i < n; ++i) {
                int u = node_of(alignment.clusters[k], i);
                int v = node_of(alignment.clusters[l], i);
                has_edge[i] = u >= 0 && v >= 0 && family.net(i).has_edge(u, v);
            }
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j)
                    if (has_edge[i] && has_edge[j]) {
                        ++aligned_total;
                        if (consistent[k] && consistent[l]) ++out.coi;
                    }
        }
    out.coi_ci_ratio =
        aligned_total > 0 ? static_cast<double>(out.coi) / static_cast<double>(aligned_total) : 0.0;
    return out;
}

// Average over usable terms (appearing on some cluster member) of the
// annotated fraction of the term's closest cluster; ties resolved by lowest
// cluster index.
inline double sensitivity(const Alignment& alignment, const NetworkFamily& family,
                          const AnnotationSet& ann) {
    std::map<int, std::vector<int>> term_counts;  // term -> per-cluster count
    int k = alignment.cluster_count();
    for (int c = 0; c < k; ++c)
        for (const auto& ref : alignment.clusters[c])
            for (int t : ann.usable_terms_of(detail::protein_key(family, ref))) {
                auto& counts = term_counts[t];
                if (counts.empty()) counts.assign(k, 0);
                ++counts[c];
            }
    if (term_counts.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& [t, counts] : term_counts) {
        int best = 0;
        for (int c = 1; c < k; ++c)
            if (counts[c] > counts[best]) best = c;
        sum += static_cast<double>(counts[best]) /
               static_cast<double>(alignment.clusters[best].size());
    }
    return sum / static_cast<double>(term_counts.size());
}

// ---- report ----------------------------------------------------------------

struct MetricsReport {
    std::map<int, CoverageEntry> coverage;
    CoverageEntry total;
    ConservedInteractions ci;
    bool has_annotations = false;
    std::map<int, SpecificityResult> specificity_by_c;
    SpecificityResult specificity_overall;
    std::map<int, AfsResult> afs_bp, afs_mf;
    double mne_value = 0.0;
    CoiResult coi_result;
    double sensitivity_value = 0.0;
};

inline MetricsReport compute_metrics(const Alignment& alignment, const NetworkFamily& family,
                                     const AnnotationSet* ann = nullptr) {
    MetricsReport rep;
    rep.coverage = c_coverage(alignment);
    rep.total = total_coverage(alignment);
    rep.ci = conserved_interactions(alignment, family);
    if (ann) {
        rep.has_annotations = true;
        InformationContent ic(*ann);
        for (const auto& [c, entry] : rep.coverage) {
            rep.specificity_by_c[c] = specificity(alignment, family, *ann, c);
            rep.afs_bp[c] = afs(alignment, family, *ann, ic, TermNamespace::BP, c);
            rep.afs_mf[c] = afs(alignment, family, *ann, ic, TermNamespace::MF, c);
        }
        rep.specificity_overall = specificity(alignment, family, *ann);
        rep.mne_value = mne(alignment, family, *ann);
        rep.coi_result = coi(alignment, family, *ann);
        rep.sensitivity_value = sensitivity(alignment, family, *ann);
    }
    return rep;
}

inline void write_metrics_table(const MetricsReport& rep, std::ostream& out) {
    out << "measure\tvalue\n";
    for (const auto& [c, entry] : rep.coverage)
        out << "c=" << c << " coverage (clusters/proteins)\t" << entry.clusters << "/"
            << entry.proteins << '\n';
    out << "total coverage (clusters/proteins)\t" << rep.total.clusters << "/" << rep.total.proteins
        << '\n';
    out << "CI\t" << rep.ci.ci << " (" << rep.ci.aligned << "/" << rep.ci.total << ")\n";
    out << "CIQ\tnot computed\n";
    if (!rep.has_annotations) {
        out << "annotation metrics\tskipped (no annotations loaded)\n";
        return;
    }
    for (const auto& [c, s] : rep.specificity_by_c)
        out << "c=" << c << " specificity (consistent/annotated)\t" << s.ratio << " ("
            << s.consistent << "/" << s.annotated << ")\n";
    out << "overall specificity\t" << rep.specificity_overall.ratio << " ("
        << rep.specificity_overall.consistent << "/" << rep.specificity_overall.annotated << ")\n";
    for (const auto& [c, a] : rep.afs_bp)
        out << "AFS BP c=" << c << "\t" << a.mean << " over " << a.qualifying_clusters
            << " clusters\n";
    for (const auto& [c, a] : rep.afs_mf)
        out << "AFS MF c=" << c << "\t" << a.mean << " over " << a.qualifying_clusters
            << " clusters\n";
    out << "MNE\t" << rep.mne_value << '\n';
    out << "COI\t" << rep.coi_result.coi << '\n';
    out << "COI/CI\t" << rep.coi_result.coi_ci_ratio << '\n';
    out << "sensitivity\t" << rep.sensitivity_value << '\n';
}

// Machine-readable `key<TAB>value` records.
inline void write_metrics_records(const MetricsReport& rep, std::ostream& out) {
    for (const auto& [c, entry] : rep.coverage) {
        out << "coverage.c" << c << ".clusters\t" << entry.clusters << '\n';
        out << "coverage.c" << c << ".proteins\t" << entry.proteins << '\n';
    }
    out << "coverage.total.clusters\t" << rep.total.clusters << '\n';
    out << "coverage.total.proteins\t" << rep.total.proteins << '\n';
    out << "ci\t" << rep.ci.ci << '\n';
    out << "ci.aligned\t" << rep.ci.aligned << '\n';
    out << "ci.total\t" << rep.ci.total << '\n';
    if (!rep.has_annotations) return;
    for (const auto& [c, s] : rep.specificity_by_c) {
        out << "specificity.c" << c << ".consistent\t" << s.consistent << '\n';
        out << "specificity.c" << c << ".annotated\t" << s.annotated << '\n';
        out << "specificity.c" << c << ".ratio\t" << s.ratio << '\n';
    }
    out << "specificity.overall.ratio\t" << rep.specificity_overall.ratio << '\n';
    for (const auto& [c, a] : rep.afs_bp) out << "afs.bp.c" << c << "\t" << a.mean << '\n';
    for (const auto& [c, a] : rep.afs_mf) out << "afs.mf.c" << c << "\t" << a.mean << '\n';
    out << "mne\t" << rep.mne_value << '\n';
    out << "coi\t" << rep.coi_result.coi << '\n';
    out << "coi_ci_ratio\t" << rep.coi_result.coi_ci_ratio << '\n';
    out << "sensitivity\t" << rep.sensitivity_value << '\n';
}

}  // namespace netalign
