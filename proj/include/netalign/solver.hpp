#pragma once

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "netalign/formulation.hpp"
#include "netalign/network.hpp"
#include "netalign/scoring.hpp"

namespace netalign {

struct SolverConfig {
    double mu = 1.0;            // augmented-Lagrangian penalty, constant across iterations
    int max_iters = 1000;
    double tol_primal = 1e-3;   // stop when the combined residual drops below this
    double tol_change = 1e-5;   // stop when the primal state stops moving
    int dual_sweeps = 4;        // inner passes over the dual blocks per iteration
    int log_every = 10;         // telemetry stride; 0 disables streaming
    bool track_s_spectrum = false;  // recompute min eig of the dual PSD block per iteration
};

// Per-pair slice of the primal/dual state. X holds the upper block of the
// symmetric alignment matrix; diagonal blocks are identically I and never
// stored. z1/z2/s live on constraint rows, z0/y on edge-correspondence
// variables, z3/z4 on rows/columns of X, Z5 on X cells.
struct PairState {
    int net_i = 0, net_j = 0;
    EdgePairIndex index;
    ConstraintOperators ops;
    Eigen::MatrixXd C;
    Eigen::MatrixXd X;       // |V_i| x |V_j|
    Eigen::VectorXd y, s;
    Eigen::VectorXd z0, z1, z2;
    Eigen::VectorXd z3, z4;
    Eigen::MatrixXd Z5;
    Eigen::MatrixXd f_z2;    // cached scatter of z2, refreshed in step_z2_to_z6
};

struct SolverState {
    const NetworkFamily* family = nullptr;
    double lambda2 = 0.02;
    double lambda = 0.02 / 0.98;  // lambda2 / (1 - lambda2)
    double mu = 1.0;
    std::vector<PairState> pairs;      // family pair order
    std::vector<Eigen::MatrixXd> Z6;   // per network, |V_i| x |V_i|
    Eigen::MatrixXd S;                 // M x M, symmetric PSD

    Eigen::Block<Eigen::MatrixXd> s_block(int i, int j) {
        return S.block(family->offset(i), family->offset(j), family->net(i).node_count(),
                       family->net(j).node_count());
    }
    Eigen::Block<const Eigen::MatrixXd> s_block(int i, int j) const {
        return S.block(family->offset(i), family->offset(j), family->net(i).node_count(),
                       family->net(j).node_count());
    }
};

inline SolverState make_solver_state(const NetworkFamily& family, const ScoreMatrices& scores,
                                     const ObjectiveSpec& spec, const SolverConfig& config) {
    if (config.mu <= 0) throw std::invalid_argument("solver penalty mu must be positive");
    SolverState st;
    st.family = &family;
    st.lambda2 = spec.lambda2;
    st.lambda = spec.lambda();
    st.mu = config.mu;
    int m = family.total_nodes();
    st.S = Eigen::MatrixXd::Zero(m, m);
    st.Z6.resize(family.size());
    for (int i = 0; i < family.size(); ++i) {
        int ni = family.net(i).node_count();
        st.Z6[i] = Eigen::MatrixXd::Zero(ni, ni);
    }
    st.pairs.resize(family.pair_count());
    for (int p = 0; p < family.pair_count(); ++p) {
        auto [i, j] = family.pair_at(p);
        PairState& ps = st.pairs[p];
        ps.net_i = i;
        ps.net_j = j;
        ps.index = enumerate_edge_pairs(family, i, j);
        ps.ops = build_constraints(ps.index, family);
        ps.C = scores.pair(family, i, j);
        int ni = family.net(i).node_count();
        int nj = family.net(j).node_count();
        int ny = ps.ops.n_y;
        int nr = ps.ops.n_rows;
        ps.X = Eigen::MatrixXd::Zero(ni, nj);
        ps.y = Eigen::VectorXd::Zero(ny);
        ps.s = Eigen::VectorXd::Zero(nr);
        ps.z0 = Eigen::VectorXd::Zero(ny);
        ps.z1 = Eigen::VectorXd::Zero(nr);
        ps.z2 = Eigen::VectorXd::Zero(nr);
        ps.z3 = Eigen::VectorXd::Zero(ni);
        ps.z4 = Eigen::VectorXd::Zero(nj);
        ps.Z5 = Eigen::MatrixXd::Zero(ni, nj);
        ps.f_z2 = Eigen::MatrixXd::Zero(ni, nj);
    }
    return st;
}

// z0 <- max(0, B^T z1 - mu y - lambda d), the nonnegative minimizer of
// <y, z0> + 1/(2 mu) || lambda d + z0 - B^T z1 ||^2.
inline void step_z0(SolverState& st) {
    for (auto& ps : st.pairs) {
        if (ps.ops.n_y == 0) continue;
        ps.z0 = (ps.ops.bt(ps.z1).array() - st.mu * ps.y.array() - st.lambda).max(0.0).matrix();
    }
}

// Block-coordinate pass over the four row groups of B. Block l solves
//   min_{z>=0} ||B_l^T z - r||^2 + ||z - (z2_l - mu s_l)||^2,
// r = lambda d + z0 + mu y - sum_{p != l} B_p^T z1_p  (latest values),
// whose Hessian B_l B_l^T + I is diagonal. The -mu s_l term follows from the
// <s, z1 - z2> multiplier coupling in the augmented Lagrangian; dropping it
// fails the numeric minimizer check.
inline void step_z1(SolverState& st) {
    for (auto& ps : st.pairs) {
        if (ps.ops.n_y == 0) continue;
        const auto& ops = ps.ops;
        Eigen::VectorXd u = ops.bt(ps.z1);  // running B^T z1 over all blocks
        for (int l = 0; l < 4; ++l) {
            int begin = ops.block_begin[l], end = ops.block_begin[l + 1];
            Eigen::VectorXd num = Eigen::VectorXd::Zero(end - begin);
            for (int t = 0; t < ops.n_y; ++t) {
                int row = ops.y_rows[t][l];
                double excl = st.lambda + ps.z0[t] + st.mu * ps.y[t] - (u[t] - ps.z1[row]);
                num[row - begin] += excl;
            }
            for (int r = begin; r < end; ++r) {
                double v = (num[r - begin] + ps.z2[r] - st.mu * ps.s[r]) / (ops.row_nnz[r] + 1.0);
                v = std::max(0.0, v);
                if (v != ps.z1[r]) {
                    double delta = v - ps.z1[r];
                    for (int k = ops.row_ptr[r]; k < ops.row_ptr[r + 1]; ++k)
                        u[ops.row_members[k]] += delta;
                    ps.z1[r] = v;
                }
            }
        }
    }
}

// z2, z3, z4, Z5 per pair and Z6 per network, each the exact minimizer of its
// own subproblem with every other variable held at its latest value.
inline void step_z2_to_z6(SolverState& st) {
    for (auto& ps : st.pairs) {
        const int ni = static_cast<int>(ps.X.rows());
        const int nj = static_cast<int>(ps.X.cols());
        auto S_ij = st.s_block(ps.net_i, ps.net_j);

        // z2 (free): (F F^T + I) z2 = z1 + mu s + F(z3 1^T + 1 z4^T - C - Z5
        // - 2S - mu X); the mu s term comes from the <s, z1 - z2> coupling and
        // is required for the rest point to encode s = F(X).
        if (ps.ops.n_rows > 0) {
            Eigen::MatrixXd w = ps.z3 * Eigen::RowVectorXd::Ones(nj) +
                                Eigen::VectorXd::Ones(ni) * ps.z4.transpose() - ps.C - ps.Z5 -
                                2.0 * S_ij - st.mu * ps.X;
            Eigen::VectorXd q = ps.z1 + st.mu * ps.s + ps.ops.pick(w);
            ps.z2 = ps.ops.solve_normal(q);
        }
        ps.f_z2 = ps.ops.scatter(ps.z2, ni, nj);

        // z3 >= 0 row duals; the 2 S_ij term belongs to the stationarity
        // residual and cannot be dropped without failing the minimizer check
        Eigen::MatrixXd base = ps.C + ps.f_z2 + ps.Z5 + 2.0 * S_ij + st.mu * ps.X;
        Eigen::VectorXd rowsum =
            (base - Eigen::VectorXd::Ones(ni) * ps.z4.transpose()).rowwise().sum();
        ps.z3 = ((rowsum.array() - st.mu) / static_cast<double>(nj)).max(0.0).matrix();

        // z4 >= 0 column duals, using the fresh z3
        Eigen::VectorXd colsum =
            (base - ps.z3 * Eigen::RowVectorXd::Ones(nj)).colwise().sum().transpose();
        ps.z4 = ((colsum.array() - st.mu) / static_cast<double>(ni)).max(0.0).matrix();

        // Z5 >= 0 entrywise duals
        ps.Z5 = (ps.z3 * Eigen::RowVectorXd::Ones(nj) +
                 Eigen::VectorXd::Ones(ni) * ps.z4.transpose() - ps.C - ps.f_z2 - 2.0 * S_ij -
                 st.mu * ps.X)
                    .cwiseMax(0.0);
    }
    // Z6 per network is the free dual of X_ii = I: Z6 = S_ii + mu(X_ii - I),
    // which is S_ii with the diagonal pinned to the identity. Clamping it at
    // zero would distort the projection target's diagonal blocks and move the
    // S step's rest point.
    for (int i = 0; i < st.family->size(); ++i) st.Z6[i] = st.s_block(i, i);
}

// Frobenius-nearest PSD matrix: clip negative eigenvalues.
inline Eigen::MatrixXd project_psd(const Eigen::MatrixXd& t) {
    if (!t.allFinite()) throw std::runtime_error("project_psd: non-finite input");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(t);
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("project_psd: eigen-decomposition failed");
    Eigen::VectorXd clipped = eig.eigenvalues().cwiseMax(0.0);
    Eigen::MatrixXd s = eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().transpose();
    return 0.5 * (s + s.transpose());
}

// Frobenius-nearest PSD matrix to the assembled target T:
//   T_ij = (z3 1^T + 1 z4^T - C - F^T(z2) - Z5 - mu X) / 2   (i < j)
//   T_ii = Z6 - (mu/2) X_ii = S_ii - (mu/2) I
// S <- U max(Sigma, 0) U^T.
//
// Three details here are load-bearing and were validated numerically:
//  - Z5 must appear in the off-diagonal target. With Z5 = max(0, W - 2S) the
//    target is min(W, 2S)/2 entrywise; dropping Z5 leaves S + Z5/2 wherever
//    Z5 is active and S grows linearly without bound.
//  - The X-coupling must be mu/2 on the diagonal blocks to match the halved
//    off-diagonal blocks. At stationarity of the other duals the target is
//    then exactly S - (mu/2) X over the whole stacked matrix, whose projection
//    rest point is conic complementarity (S, X PSD, SX = 0), and a positive
//    eigenvalue appears exactly when X is not PSD. A full-mu diagonal makes
//    the zero-S target -(mu/2)(X + I), which cannot reach a positive
//    eigenvalue for three pairwise-feasible networks: the consistency dual
//    would never activate and the solver settles on inconsistent matchings.
//  - Z6 stays free: clamping it distorts the diagonal blocks of the target.
inline void step_S(SolverState& st) {
    int m = st.family->total_nodes();
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
    for (const auto& ps : st.pairs) {
        int ni = static_cast<int>(ps.X.rows());
        int nj = static_cast<int>(ps.X.cols());
        Eigen::MatrixXd tij = 0.5 * (ps.z3 * Eigen::RowVectorXd::Ones(nj) +
                                     Eigen::VectorXd::Ones(ni) * ps.z4.transpose() - ps.C -
                                     ps.f_z2 - ps.Z5 - st.mu * ps.X);
        t.block(st.family->offset(ps.net_i), st.family->offset(ps.net_j), ni, nj) = tij;
        t.block(st.family->offset(ps.net_j), st.family->offset(ps.net_i), nj, ni) = tij.transpose();
    }
    for (int i = 0; i < st.family->size(); ++i) {
        int ni = st.family->net(i).node_count();
        t.block(st.family->offset(i), st.family->offset(i), ni, ni) =
            st.Z6[i] - 0.5 * st.mu * Eigen::MatrixXd::Identity(ni, ni);
    }
    st.S = project_psd(t);
}

// Multiplier ascent with step 1/mu along each dual residual; X_ii stays I.
inline void step_primal(SolverState& st) {
    for (auto& ps : st.pairs) {
        int ni = static_cast<int>(ps.X.rows());
        int nj = static_cast<int>(ps.X.cols());
        if (ps.ops.n_y > 0) {
            ps.y += (Eigen::VectorXd::Constant(ps.ops.n_y, st.lambda) + ps.z0 - ps.ops.bt(ps.z1)) /
                    st.mu;
            ps.s += (ps.z1 - ps.z2) / st.mu;
        }
        ps.X += (ps.C + ps.f_z2 - ps.z3 * Eigen::RowVectorXd::Ones(nj) -
                 Eigen::VectorXd::Ones(ni) * ps.z4.transpose() + ps.Z5 +
                 2.0 * st.s_block(ps.net_i, ps.net_j)) /
                st.mu;
    }
}

// Max violation of the relaxation's constraints by the current (X, y):
// negativity of y and X, B y <= F(X), row/column sums of X at most 1, and
// positive semidefiniteness of the full block matrix. The zero state is
// feasible, so this alone cannot drive the stopping rule; solve() combines it
// with the stationarity residual mu * |Delta state| (the dual-ascent step,
// which equals the residual of each multiplier's stationarity condition).
inline double primal_residual(const SolverState& st) {
    double r = 0.0;
    for (const auto& ps : st.pairs) {
        if (ps.ops.n_y > 0) {
            r = std::max(r, -ps.y.minCoeff());
            Eigen::VectorXd slack = ps.ops.b(ps.y) - ps.ops.pick(ps.X);
            r = std::max(r, slack.maxCoeff());
        }
        if (ps.X.size() == 0) continue;
        r = std::max(r, -ps.X.minCoeff());
        r = std::max(r, (ps.X.rowwise().sum().array() - 1.0).maxCoeff());
        r = std::max(r, (ps.X.colwise().sum().array() - 1.0).maxCoeff());
    }
    int m = st.family->total_nodes();
    Eigen::MatrixXd x = Eigen::MatrixXd::Identity(m, m);
    for (const auto& ps : st.pairs) {
        x.block(st.family->offset(ps.net_i), st.family->offset(ps.net_j), ps.X.rows(),
                ps.X.cols()) = ps.X;
        x.block(st.family->offset(ps.net_j), st.family->offset(ps.net_i), ps.X.cols(),
                ps.X.rows()) = ps.X.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(x, Eigen::EigenvaluesOnly);
    r = std::max(r, -eig.eigenvalues().minCoeff());
    return r;
}

inline double current_objective(const SolverState& st) {
    double obj = 0.0;
    for (const auto& ps : st.pairs) {
        obj += (1.0 - st.lambda2) * (ps.C.array() * ps.X.array()).sum();
        obj += st.lambda2 * ps.y.sum();
    }
    return obj;
}

struct IterationStats {
    int iteration = 0;
    double objective = 0.0;
    double residual = 0.0;       // max(constraint violation, mu * |Delta state|)
    double feasibility = 0.0;    // constraint-violation part alone
    double min_eig_s = 0.0;
    double s_norm = 0.0;
    double wall_seconds = 0.0;
};

enum class StopReason { residual, stagnation, max_iters };

struct ConvergenceReport {
    bool converged = false;
    StopReason reason = StopReason::max_iters;
    int iterations = 0;
    double final_residual = 0.0;
    double final_objective = 0.0;
    std::vector<IterationStats> history;
};

struct SolveResult {
    std::vector<Eigen::MatrixXd> x_blocks;  // clamped to [0,1], pair order
    ConvergenceReport report;
};

// Full dual-block ADMM loop. Telemetry records are emitted to `telemetry`
// (when given) as tab-separated lines: iteration, objective, primal residual,
// min eigenvalue of S, wall seconds.
inline SolveResult solve(const NetworkFamily& family, const ScoreMatrices& scores,
                         const ObjectiveSpec& spec, const SolverConfig& config = {},
                         std::ostream* telemetry = nullptr) {
    SolverState st = make_solver_state(family, scores, spec, config);
    SolveResult result;
    auto t0 = std::chrono::steady_clock::now();

    for (int iter = 1; iter <= config.max_iters; ++iter) {
        std::vector<Eigen::MatrixXd> x_before;
        std::vector<Eigen::VectorXd> y_before, s_before;
        x_before.reserve(st.pairs.size());
        y_before.reserve(st.pairs.size());
        s_before.reserve(st.pairs.size());
        for (const auto& ps : st.pairs) {
            x_before.push_back(ps.X);
            y_before.push_back(ps.y);
            s_before.push_back(ps.s);
        }

        // the dual blocks are cheap next to the eigen-decomposition, and a
        // second pass markedly tightens the inner minimization at scale
        for (int sweep = 0; sweep < std::max(1, config.dual_sweeps); ++sweep) {
            step_z0(st);
            step_z1(st);
            step_z2_to_z6(st);
        }
        step_S(st);
        step_primal(st);

        for (const auto& ps : st.pairs)
            if (!ps.X.allFinite() || !ps.y.allFinite())
                throw std::runtime_error("solver diverged: non-finite state at iteration " +
                                         std::to_string(iter));

        double change = 0.0;
        for (std::size_t p = 0; p < st.pairs.size(); ++p) {
            if (st.pairs[p].X.size() > 0)
                change = std::max(change, (st.pairs[p].X - x_before[p]).cwiseAbs().maxCoeff());
            if (st.pairs[p].ops.n_y > 0) {
                change = std::max(change, (st.pairs[p].y - y_before[p]).cwiseAbs().maxCoeff());
                change = std::max(change, (st.pairs[p].s - s_before[p]).cwiseAbs().maxCoeff());
            }
        }

        IterationStats stats;
        stats.iteration = iter;
        stats.objective = current_objective(st);
        stats.feasibility = primal_residual(st);
        stats.residual = std::max(stats.feasibility, st.mu * change);
        stats.s_norm = st.S.norm();
        if (config.track_s_spectrum) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(st.S, Eigen::EigenvaluesOnly);
            stats.min_eig_s = eig.eigenvalues().minCoeff();
        }
        stats.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        result.report.history.push_back(stats);
        if (telemetry && config.log_every > 0 &&
            (iter % config.log_every == 0 || iter == 1 || stats.residual < config.tol_primal)) {
            double mineig = stats.min_eig_s;
            if (!config.track_s_spectrum) {
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(st.S, Eigen::EigenvaluesOnly);
                mineig = eig.eigenvalues().minCoeff();
            }
            (*telemetry) << iter << '\t' << stats.objective << '\t' << stats.residual << '\t'
                         << mineig << '\t' << stats.wall_seconds << '\n';
        }

        result.report.iterations = iter;
        result.report.final_residual = stats.residual;
        result.report.final_objective = stats.objective;
        if (stats.residual < config.tol_primal) {
            result.report.converged = true;
            result.report.reason = StopReason::residual;
            break;
        }
        if (change < config.tol_change) {
            result.report.reason = StopReason::stagnation;
            break;
        }
    }

    result.x_blocks.reserve(st.pairs.size());
    for (const auto& ps : st.pairs)
        result.x_blocks.push_back(ps.X.cwiseMax(0.0).cwiseMin(1.0));
    return result;
}

}  // namespace netalign
