// Command-line driver: ingestion -> scoring -> solve -> round -> evaluate.
#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "netalign/annotations.hpp"
#include "netalign/metrics.hpp"
#include "netalign/network.hpp"
#include "netalign/oracle.hpp"
#include "netalign/rounding.hpp"
#include "netalign/scoring.hpp"
#include "netalign/similarity.hpp"
#include "netalign/solver.hpp"
#include "netalign/synthgen.hpp"

namespace fs = std::filesystem;
using namespace netalign;

namespace {

struct CommonInputs {
    std::vector<std::string> network_paths;
    std::vector<std::string> similarity_paths;
    std::string ontology_path, annotation_path;
    std::string out_dir = ".";
};

struct AlignOptions : CommonInputs {
    double lambda1 = 0.3;
    double lambda2 = 0.02;
    int degree_threshold = 10;
    double threshold = 0.05;
    SolverConfig solver;
};

NetworkFamily load_family(const std::vector<std::string>& paths) {
    if (paths.size() < 2) throw std::runtime_error("need at least 2 networks");
    std::vector<Network> nets;
    for (const auto& p : paths) {
        NetworkLoadStats stats;
        nets.push_back(load_network(p, &stats));
        if (stats.dropped_self_loops || stats.dropped_duplicates)
            std::cerr << p << ": dropped " << stats.dropped_self_loops << " self-loops, "
                      << stats.dropped_duplicates << " duplicate edges\n";
    }
    return NetworkFamily(std::move(nets));
}

std::optional<AnnotationSet> maybe_load_annotations(const CommonInputs& in) {
    if (in.ontology_path.empty() || in.annotation_path.empty()) return std::nullopt;
    AnnotationLoadStats stats;
    auto ann = load_annotations(in.ontology_path, in.annotation_path, &stats);
    if (stats.dropped_unknown_terms)
        std::cerr << in.annotation_path << ": dropped " << stats.dropped_unknown_terms
                  << " annotations with unknown terms\n";
    return ann;
}

int run_align(const AlignOptions& opt) {
    auto family = load_family(opt.network_paths);
    SimilarityLoadStats sim_stats;
    auto similarity = load_similarity(opt.similarity_paths, family, &sim_stats);
    if (sim_stats.dropped_unknown_nodes)
        std::cerr << "similarity: dropped " << sim_stats.dropped_unknown_nodes
                  << " entries naming unknown nodes\n";
    auto scores = build_score_matrices(family, similarity, opt.lambda1, opt.degree_threshold);
    ObjectiveSpec spec(opt.lambda2);

    fs::create_directories(opt.out_dir);
    std::ofstream telemetry(fs::path(opt.out_dir) / "telemetry.log");
    telemetry << "# iteration\tobjective\tprimal_residual\tmin_eig_S\twall_seconds\n";
    auto result = solve(family, scores, spec, opt.solver, &telemetry);

    RoundingStats rstats;
    auto alignment = round_alignment(result.x_blocks, family, {opt.threshold}, &rstats);
    auto consistency = verify_consistency(alignment, family);
    if (!consistency.ok) {
        for (const auto& v : consistency.violations) std::cerr << "consistency: " << v << '\n';
        throw std::runtime_error("rounded alignment failed consistency verification");
    }
    save_alignment(alignment, family, (fs::path(opt.out_dir) / "alignment.tsv").string());

    {
        std::ofstream summary(fs::path(opt.out_dir) / "fractional_summary.tsv");
        summary << "# net_i\tnet_j\tentries_above_threshold\tmax\tmean\n";
        for (int p = 0; p < family.pair_count(); ++p) {
            auto [i, j] = family.pair_at(p);
            const auto& x = result.x_blocks[p];
            int above = 0;
            for (int u = 0; u < x.rows(); ++u)
                for (int v = 0; v < x.cols(); ++v)
                    if (x(u, v) > opt.threshold) ++above;
            summary << family.net(i).name() << '\t' << family.net(j).name() << '\t' << above
                    << '\t' << (x.size() ? x.maxCoeff() : 0.0) << '\t'
                    << (x.size() ? x.mean() : 0.0) << '\n';
        }
    }

    std::cout << "iterations: " << result.report.iterations << '\n'
              << "converged: " << (result.report.converged ? "yes" : "no") << '\n'
              << "primal residual: " << result.report.final_residual << '\n'
              << "objective: " << result.report.final_objective << '\n'
              << "clusters: " << alignment.cluster_count() << '\n'
              << "non-clique components: " << rstats.non_clique_components << '\n'
              << "discrete objective: " << alignment_objective(alignment, family, scores, spec)
              << '\n';
    return result.report.converged ? 0 : 2;
}

struct EvalOptions : CommonInputs {
    std::string alignment_path;
};

int run_eval(const EvalOptions& opt) {
    auto family = load_family(opt.network_paths);
    auto alignment = load_alignment(opt.alignment_path, family);
    auto consistency = verify_consistency(alignment, family);
    if (!consistency.ok) {
        for (const auto& v : consistency.violations) std::cerr << "violation: " << v << '\n';
        return 1;
    }
    auto ann = maybe_load_annotations(opt);
    if (!ann) std::cerr << "no annotations given: GO-based metrics skipped\n";
    auto report = compute_metrics(alignment, family, ann ? &*ann : nullptr);
    fs::create_directories(opt.out_dir);
    {
        std::ofstream table(fs::path(opt.out_dir) / "metrics.txt");
        write_metrics_table(report, table);
    }
    {
        std::ofstream records(fs::path(opt.out_dir) / "metrics.tsv");
        write_metrics_records(report, records);
    }
    std::ifstream echo(fs::path(opt.out_dir) / "metrics.txt");
    std::cout << echo.rdbuf();
    return 0;
}

struct SynthOptions {
    GeneratorConfig gen;
    std::string model_name = "DMC";
    std::string out_dir = ".";
};

int run_synth(const SynthOptions& opt) {
    GeneratorConfig cfg = opt.gen;
    cfg.model = parse_growth_model(opt.model_name);
    auto sf = generate(cfg);
    fs::create_directories(opt.out_dir);
    for (int i = 0; i < sf.family.size(); ++i)
        save_network(sf.family.net(i),
                     (fs::path(opt.out_dir) / ("net" + std::to_string(i + 1) + ".tsv")).string());
    for (int i = 0; i < sf.family.size(); ++i)
        for (int j = i + 1; j < sf.family.size(); ++j)
            save_similarity_file(sf.similarity, sf.family, i, j,
                                 (fs::path(opt.out_dir) / ("sim_" + std::to_string(i + 1) + "_" +
                                                           std::to_string(j + 1) + ".tsv"))
                                     .string());
    save_alignment(sf.truth.true_clusters, sf.family,
                   (fs::path(opt.out_dir) / "truth_clusters.tsv").string());
    auto ann = synthetic_annotations(sf);
    save_ontology(ann, (fs::path(opt.out_dir) / "ontology.tsv").string());
    save_protein_annotations(ann, (fs::path(opt.out_dir) / "annotations.tsv").string());
    std::cout << "wrote " << sf.family.size() << " networks ("
              << sf.family.net(0).node_count() << " nodes each) to " << opt.out_dir << '\n';
    return 0;
}

struct OracleOptions : CommonInputs {
    double lambda1 = 0.3;
    double lambda2 = 0.02;
    int degree_threshold = 10;
    std::uint64_t max_states = 10'000'000;
};

int run_oracle(const OracleOptions& opt) {
    auto family = load_family(opt.network_paths);
    auto similarity = load_similarity(opt.similarity_paths, family);
    auto scores = build_score_matrices(family, similarity, opt.lambda1, opt.degree_threshold);
    auto result = exact_align(family, scores, ObjectiveSpec(opt.lambda2), {opt.max_states});
    fs::create_directories(opt.out_dir);
    save_alignment(result.best, family, (fs::path(opt.out_dir) / "oracle_alignment.tsv").string());
    std::cout << "enumerated: " << result.enumerated << '\n'
              << "objective: " << result.objective << '\n'
              << "clusters: " << result.best.cluster_count() << '\n';
    return 0;
}

}  // namespace

// Options live on the top-level app so a flat `key = value` config file can
// set any of them; subcommands select the mode and fall unmatched arguments
// through to the parent. Command-line flags beat config-file values.
int main(int argc, char** argv) {
    CLI::App app{"joint one-to-one alignment of multiple networks"};
    app.require_subcommand(1);
    auto* align_cmd = app.add_subcommand("align", "solve the relaxation and round to clusters");
    auto* eval_cmd = app.add_subcommand("eval", "score an existing alignment");
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic family with ground truth");
    auto* oracle_cmd = app.add_subcommand("oracle", "exact alignment of a tiny instance");
    for (auto* cmd : {align_cmd, eval_cmd, synth_cmd, oracle_cmd}) cmd->fallthrough();

    AlignOptions align_opt;
    EvalOptions eval_opt;
    SynthOptions synth_opt;
    OracleOptions oracle_opt;

    CommonInputs common;
    app.add_option("--network", common.network_paths, "network edge-list TSV (repeat per network)");
    app.add_option("--similarity", common.similarity_paths,
                   "per-pair similarity TSV in pair order (1,2),(1,3),(2,3),...");
    app.add_option("--ontology", common.ontology_path, "ontology TSV (term, parent, namespace)");
    app.add_option("--annotations", common.annotation_path, "protein annotation TSV");
    app.add_option("--out", common.out_dir, "output directory");

    double lambda1 = 0.3, lambda2 = 0.02;
    int degree_threshold = 10;
    app.add_option("--lambda1", lambda1, "topology-score weight in node scores");
    app.add_option("--lambda2", lambda2, "interaction-score weight");
    app.add_option("--degree-threshold", degree_threshold,
                   "min-degree elimination cutoff for topology scores");
    app.add_option("--threshold", align_opt.threshold, "rounding threshold");
    app.add_option("--mu", align_opt.solver.mu, "augmented-Lagrangian penalty");
    app.add_option("--max-iters", align_opt.solver.max_iters, "iteration cap");
    app.add_option("--tol-primal", align_opt.solver.tol_primal, "residual tolerance");
    app.add_option("--tol-change", align_opt.solver.tol_change, "stagnation tolerance");
    app.add_option("--log-every", align_opt.solver.log_every, "telemetry stride");

    app.add_option("--alignment", eval_opt.alignment_path, "alignment file to score");

    app.add_option("--model", synth_opt.model_name, "growth model: DMC or DMR");
    app.add_option("--ancestor-size", synth_opt.gen.ancestor_size, "ancestor node count");
    app.add_option("--networks", synth_opt.gen.n_networks, "number of networks");
    app.add_option("--nodes", synth_opt.gen.nodes_per_network, "nodes per network");
    app.add_option("--q-mod", synth_opt.gen.q_mod, "DMC edge-loss probability");
    app.add_option("--q-con", synth_opt.gen.q_con, "DMC anchor-duplicate edge probability");
    app.add_option("--q-del", synth_opt.gen.q_del, "DMR copied-edge deletion probability");
    app.add_option("--q-new", synth_opt.gen.q_new, "DMR new-edge rate");
    app.add_option("--noise-floor", synth_opt.gen.noise_floor, "background similarity cap");
    app.add_option("--noise-rate", synth_opt.gen.noise_rate, "background sampling rate");
    app.add_option("--seed", synth_opt.gen.seed, "RNG seed");

    app.add_option("--max-states", oracle_opt.max_states, "enumeration budget");
    app.set_config("--config", "", "flat key = value configuration file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);  // prints help or the usage error
        return code == 0 ? 0 : 1;
    }

    static_cast<CommonInputs&>(align_opt) = common;
    static_cast<CommonInputs&>(eval_opt) = common;
    static_cast<CommonInputs&>(oracle_opt) = common;
    synth_opt.out_dir = common.out_dir;
    align_opt.lambda1 = lambda1;
    align_opt.lambda2 = lambda2;
    align_opt.degree_threshold = degree_threshold;
    oracle_opt.lambda1 = lambda1;
    oracle_opt.lambda2 = lambda2;
    oracle_opt.degree_threshold = degree_threshold;

    try {
        if (*align_cmd) return run_align(align_opt);
        if (*eval_cmd) {
            if (eval_opt.alignment_path.empty())
                throw std::runtime_error("eval requires --alignment");
            return run_eval(eval_opt);
        }
        if (*synth_cmd) return run_synth(synth_opt);
        if (*oracle_cmd) return run_oracle(oracle_opt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
