#pragma once

#include <Eigen/Dense>
#include <array>
#include <map>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "netalign/network.hpp"
#include "netalign/scoring.hpp"

namespace netalign {

// One indicator variable per simultaneous match of an edge of E_i with an
// edge of E_j. The E_i edge is kept in canonical (min,max) order; both ways
// of pairing its endpoints with the E_j edge are distinct variables, so a
// conserved interaction is counted exactly once whichever way the endpoints
// correspond. n_y = 2 * |E_i| * |E_j|.
struct EdgePairIndex {
    struct Tuple {
        int vi, vj, vip, vjp;  // (vi,vip) in E_i, (vj,vjp) in E_j; vi matched to vj, vip to vjp
    };
    int net_i = 0, net_j = 0;
    std::vector<Tuple> tuples;

    int size() const { return static_cast<int>(tuples.size()); }
};

inline EdgePairIndex enumerate_edge_pairs(const NetworkFamily& family, int i, int j) {
    if (i >= j) throw std::invalid_argument("enumerate_edge_pairs: need i < j");
    EdgePairIndex idx;
    idx.net_i = i;
    idx.net_j = j;
    const auto& ei = family.net(i).edges();
    const auto& ej = family.net(j).edges();
    idx.tuples.reserve(2 * ei.size() * ej.size());
    for (const auto& [a, b] : ei)
        for (const auto& [x, y] : ej) {
            idx.tuples.push_back({a, x, b, y});
            idx.tuples.push_back({a, y, b, x});
        }
    return idx;
}

// Linearization rows for one pair: four families of inequalities, each edge
// correspondence variable appearing in exactly one row of each family.
//   family 0: fixed (vi, vj, vjp), sums over vip   -> rhs X(vi, vj)
//   family 1: fixed (vi, vj, vip), sums over vjp   -> rhs X(vi, vj)
//   family 2: fixed (vip, vjp, vj), sums over vi   -> rhs X(vip, vjp)
//   family 3: fixed (vip, vjp, vi), sums over vj   -> rhs X(vip, vjp)
// Rows are stored stacked; block l occupies [block_begin[l], block_begin[l+1]).
// Rows with identical right-hand cells are grouped so that the selection
// operator's normal matrix F F^T + I can be inverted exactly per group.
struct ConstraintOperators {
    int n_y = 0;
    int n_rows = 0;
    std::array<int, 5> block_begin{};       // 4 blocks + sentinel
    std::vector<int> row_cell_u, row_cell_v;  // rhs cell of each row
    std::vector<int> row_nnz;                 // support size = diagonal of B_l B_l^T
    std::vector<std::array<int, 4>> y_rows;   // per variable: its row in each block
    std::vector<int> row_ptr;                 // CSR over rows -> member variables
    std::vector<int> row_members;
    std::vector<std::vector<int>> cell_groups;  // rows sharing one X cell

    int block_of_row(int r) const {
        for (int l = 0; l < 4; ++l)
            if (r < block_begin[l + 1]) return l;
        throw std::out_of_range("block_of_row");
    }

    // B^T z, one gather of the variable's four rows.
    Eigen::VectorXd bt(const Eigen::VectorXd& z) const {
        Eigen::VectorXd out(n_y);
        for (int t = 0; t < n_y; ++t) {
            const auto& r = y_rows[t];
            out[t] = z[r[0]] + z[r[1]] + z[r[2]] + z[r[3]];
        }
        return out;
    }

    // B y, row sums over member variables.
    Eigen::VectorXd b(const Eigen::VectorXd& y) const {
        Eigen::VectorXd out = Eigen::VectorXd::Zero(n_rows);
        for (int r = 0; r < n_rows; ++r)
            for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) out[r] += y[row_members[k]];
        return out;
    }

    // F(M): picks the rhs cell of every row.
    Eigen::VectorXd pick(const Eigen::MatrixXd& m) const {
        Eigen::VectorXd out(n_rows);
        for (int r = 0; r < n_rows; ++r) out[r] = m(row_cell_u[r], row_cell_v[r]);
        return out;
    }

    // F^T(z): scatter-add of row values into their cells.
    Eigen::MatrixXd scatter(const Eigen::VectorXd& z, int rows, int cols) const {
        Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rows, cols);
        for (int r = 0; r < n_rows; ++r) out(row_cell_u[r], row_cell_v[r]) += z[r];
        return out;
    }

    // Solves (F F^T + I) x = q. F F^T is the all-ones block per cell group,
    // so (I + J)^{-1} q = q - sum(q)/(g+1) within each group of size g.
    Eigen::VectorXd solve_normal(const Eigen::VectorXd& q) const {
        Eigen::VectorXd out = q;
        for (const auto& rows : cell_groups) {
            double sum = 0.0;
            for (int r : rows) sum += q[r];
            double shift = sum / (static_cast<double>(rows.size()) + 1.0);
            for (int r : rows) out[r] -= shift;
        }
        return out;
    }

    // Solves (2 F F^T + I) x = q: (I + 2J)^{-1} q = q - 2 sum(q)/(2g+1).
    Eigen::VectorXd solve_normal2(const Eigen::VectorXd& q) const {
        Eigen::VectorXd out = q;
        for (const auto& rows : cell_groups) {
            double sum = 0.0;
            for (int r : rows) sum += q[r];
            double shift = 2.0 * sum / (2.0 * static_cast<double>(rows.size()) + 1.0);
            for (int r : rows) out[r] -= shift;
        }
        return out;
    }
};

inline ConstraintOperators build_constraints(const EdgePairIndex& idx, const NetworkFamily& family) {
    ConstraintOperators ops;
    ops.n_y = idx.size();
    ops.y_rows.assign(ops.n_y, {});

    // row keys per family; maps assign stable, deterministic row numbers
    std::array<std::map<std::tuple<int, int, int>, int>, 4> keys;
    std::array<std::vector<std::pair<int, int>>, 4> rhs;       // per-family rhs cells
    std::array<std::vector<std::vector<int>>, 4> members;      // per-family row members

    for (int t = 0; t < ops.n_y; ++t) {
        const auto& tp = idx.tuples[t];
        std::array<std::tuple<int, int, int>, 4> k = {
            std::make_tuple(tp.vi, tp.vj, tp.vjp),
            std::make_tuple(tp.vi, tp.vj, tp.vip),
            std::make_tuple(tp.vip, tp.vjp, tp.vj),
            std::make_tuple(tp.vip, tp.vjp, tp.vi),
        };
        std::array<std::pair<int, int>, 4> cell = {
            std::make_pair(tp.vi, tp.vj),
            std::make_pair(tp.vi, tp.vj),
            std::make_pair(tp.vip, tp.vjp),
            std::make_pair(tp.vip, tp.vjp),
        };
        for (int l = 0; l < 4; ++l) {
            auto [it, inserted] = keys[l].emplace(k[l], static_cast<int>(rhs[l].size()));
            if (inserted) {
                rhs[l].push_back(cell[l]);
                members[l].emplace_back();
            }
            members[l][it->second].push_back(t);
            ops.y_rows[t][l] = it->second;  // local row id, offset below
        }
    }

    ops.block_begin[0] = 0;
    for (int l = 0; l < 4; ++l)
        ops.block_begin[l + 1] = ops.block_begin[l] + static_cast<int>(rhs[l].size());
    ops.n_rows = ops.block_begin[4];

    ops.row_cell_u.resize(ops.n_rows);
    ops.row_cell_v.resize(ops.n_rows);
    ops.row_nnz.resize(ops.n_rows);
    ops.row_ptr.assign(ops.n_rows + 1, 0);
    for (int l = 0; l < 4; ++l)
        for (std::size_t r = 0; r < rhs[l].size(); ++r) {
            int gr = ops.block_begin[l] + static_cast<int>(r);
            ops.row_cell_u[gr] = rhs[l][r].first;
            ops.row_cell_v[gr] = rhs[l][r].second;
            ops.row_nnz[gr] = static_cast<int>(members[l][r].size());
            ops.row_ptr[gr + 1] = ops.row_nnz[gr];
        }
    for (int r = 0; r < ops.n_rows; ++r) ops.row_ptr[r + 1] += ops.row_ptr[r];
    ops.row_members.resize(ops.row_ptr[ops.n_rows]);
    for (int l = 0; l < 4; ++l)
        for (std::size_t r = 0; r < rhs[l].size(); ++r) {
            int gr = ops.block_begin[l] + static_cast<int>(r);
            std::copy(members[l][r].begin(), members[l][r].end(),
                      ops.row_members.begin() + ops.row_ptr[gr]);
        }
    for (int t = 0; t < ops.n_y; ++t)
        for (int l = 0; l < 4; ++l) ops.y_rows[t][l] += ops.block_begin[l];

    std::map<std::pair<int, int>, std::vector<int>> by_cell;
    for (int r = 0; r < ops.n_rows; ++r)
        by_cell[{ops.row_cell_u[r], ops.row_cell_v[r]}].push_back(r);
    ops.cell_groups.reserve(by_cell.size());
    for (auto& [cell, rows] : by_cell) ops.cell_groups.push_back(std::move(rows));

    (void)family;
    return ops;
}

// Objective data of the program and its relaxation.
struct ObjectiveSpec {
    double lambda2 = 0.02;

    ObjectiveSpec() = default;
    explicit ObjectiveSpec(double l2) : lambda2(l2) {
        if (l2 < 0.0 || l2 >= 1.0) throw std::invalid_argument("lambda2 must lie in [0,1)");
    }

    double lambda() const { return lambda2 / (1.0 - lambda2); }
};

// sum over pairs of (1-lambda2)<C,X> + lambda2<1,y>.
inline double evaluate_objective(const std::vector<Eigen::MatrixXd>& x_blocks,
                                 const std::vector<Eigen::VectorXd>& y,
                                 const ScoreMatrices& scores, const ObjectiveSpec& spec) {
    if (x_blocks.size() != scores.C.size() || y.size() != scores.C.size())
        throw std::invalid_argument("evaluate_objective: block count mismatch");
    double obj = 0.0;
    for (std::size_t p = 0; p < x_blocks.size(); ++p) {
        if (x_blocks[p].rows() != scores.C[p].rows() || x_blocks[p].cols() != scores.C[p].cols())
            throw std::invalid_argument("evaluate_objective: X block dimension mismatch");
        obj += (1.0 - spec.lambda2) * (scores.C[p].array() * x_blocks[p].array()).sum();
        obj += spec.lambda2 * y[p].sum();
    }
    return obj;
}

}  // namespace netalign
