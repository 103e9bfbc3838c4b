#pragma once

// Maximum-weight bipartite assignment (Kuhn-Munkres, primal-dual form) with
// incremental routines for adding vertices and changing one row or column of
// weights without re-solving from scratch.
//
// Conventions: rows are STAs, columns are AP slots. Maximization throughout.
// Duals alpha (rows) and theta (columns) satisfy
//     alpha_i + theta_j >= w_ij            for every edge
//     alpha_i + theta_j == w_ij            on matched edges
// and, when there are more columns than rows, theta_j == 0 on free columns
// and theta_j >= 0 elsewhere.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "wlanassoc/common.hpp"

namespace wlanassoc {

class WeightMatrix {
 public:
  WeightMatrix() = default;
  WeightMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), values_(rows * cols, fill), row_labels_(rows), col_labels_(cols) {
    for (std::size_t i = 0; i < rows; ++i) row_labels_[i] = static_cast<int>(i);
    for (std::size_t j = 0; j < cols; ++j) col_labels_[j] = static_cast<int>(j);
  }

  static WeightMatrix from_rows(const std::vector<std::vector<double>>& rows) {
    const std::size_t n = rows.size();
    const std::size_t m = n ? rows.front().size() : 0;
    WeightMatrix w(n, m);
    for (std::size_t i = 0; i < n; ++i) {
      if (rows[i].size() != m) throw std::invalid_argument("WeightMatrix: ragged rows");
      std::copy(rows[i].begin(), rows[i].end(), w.values_.begin() + static_cast<std::ptrdiff_t>(i * m));
    }
    return w;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const { return {values_.data() + r * cols_, cols_}; }
  std::vector<double> col(std::size_t c) const {
    std::vector<double> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
  }

  void set_row(std::size_t r, std::span<const double> v) {
    if (v.size() != cols_) throw std::invalid_argument("set_row: length mismatch");
    std::copy(v.begin(), v.end(), values_.begin() + static_cast<std::ptrdiff_t>(r * cols_));
  }
  void set_col(std::size_t c, std::span<const double> v) {
    if (v.size() != rows_) throw std::invalid_argument("set_col: length mismatch");
    for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = v[r];
  }

  void append_row(std::span<const double> v, int label) {
    if (v.size() != cols_) throw std::invalid_argument("append_row: length mismatch");
    values_.insert(values_.end(), v.begin(), v.end());
    row_labels_.push_back(label);
    ++rows_;
  }
  void append_row(std::span<const double> v) { append_row(v, static_cast<int>(rows_)); }

  void append_col(std::span<const double> v, int label) {
    if (v.size() != rows_) throw std::invalid_argument("append_col: length mismatch");
    std::vector<double> next(rows_ * (cols_ + 1));
    for (std::size_t r = 0; r < rows_; ++r) {
      std::copy_n(values_.begin() + static_cast<std::ptrdiff_t>(r * cols_), cols_,
                  next.begin() + static_cast<std::ptrdiff_t>(r * (cols_ + 1)));
      next[r * (cols_ + 1) + cols_] = v[r];
    }
    values_ = std::move(next);
    col_labels_.push_back(label);
    ++cols_;
  }
  void append_col(std::span<const double> v) { append_col(v, static_cast<int>(cols_)); }

  /// Row label: STA identity, -1 for padding rows.
  const std::vector<int>& row_labels() const { return row_labels_; }
  /// Column label: AP identity, -1 for padding columns.
  const std::vector<int>& col_labels() const { return col_labels_; }
  void set_row_label(std::size_t r, int label) { row_labels_.at(r) = label; }
  void set_col_label(std::size_t c, int label) { col_labels_.at(c) = label; }

  bool all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
  }

  friend bool operator==(const WeightMatrix&, const WeightMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
  std::vector<int> row_labels_;
  std::vector<int> col_labels_;
};

struct Matching {
  std::vector<int> row_to_col;  // -1: unassigned
  std::vector<int> col_to_row;  // -1: free
  std::vector<double> row_dual;  // alpha
  std::vector<double> col_dual;  // theta
  double objective = 0.0;
  std::size_t stages = 0;  // augmenting stages run to reach this matching

  std::size_t rows() const { return row_to_col.size(); }
  std::size_t cols() const { return col_to_row.size(); }
};

/// Scratch state of one augmenting stage: per-column slack to the search
/// tree, predecessor links and cover markers.
struct KmaWorkspace {
  std::vector<double> slack;
  std::vector<int> way;
  std::vector<char> covered;
  std::size_t covered_count = 0;

  void reset(std::size_t cols) {
    slack.assign(cols, std::numeric_limits<double>::infinity());
    way.assign(cols, -1);
    covered.assign(cols, 0);
    covered_count = 0;
  }
};

inline double objective_of(const WeightMatrix& w, const Matching& m) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    if (m.row_to_col[i] >= 0) s += w(i, static_cast<std::size_t>(m.row_to_col[i]));
  return s;
}

namespace detail {

inline double slack_tolerance(double w, double a, double t) {
  return 1e-9 * std::max({1.0, std::abs(w), std::abs(a), std::abs(t)});
}

inline double best_row_dual(const WeightMatrix& w, const Matching& m, std::size_t i) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < w.cols(); ++j) best = std::max(best, w(i, j) - m.col_dual[j]);
  return best;
}

inline double best_col_dual(const WeightMatrix& w, const Matching& m, std::size_t j) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < w.rows(); ++i) best = std::max(best, w(i, j) - m.row_dual[i]);
  return best;
}

inline void unmatch_row(Matching& m, std::size_t i) {
  const int j = m.row_to_col[i];
  if (j >= 0) m.col_to_row[static_cast<std::size_t>(j)] = -1;
  m.row_to_col[i] = -1;
}

// One Hungarian stage: grow an alternating tree from the free row `root`,
// adjusting duals by the smallest uncovered slack each time no tight edge
// leaves the tree, until a free column is reached; then augment.
// Slack ties go to the lowest column index.
inline void run_stage(const WeightMatrix& w, Matching& m, std::size_t root, KmaWorkspace& ws) {
  const std::size_t ncols = w.cols();
  ws.reset(ncols);
  int cur = -1;  // -1 is the virtual column holding the root
  std::vector<std::size_t> tree_cols;
  tree_cols.reserve(16);
  while (true) {
    const std::size_t row = cur < 0 ? root : static_cast<std::size_t>(m.col_to_row[static_cast<std::size_t>(cur)]);
    if (cur >= 0) {
      ws.covered[static_cast<std::size_t>(cur)] = 1;
      ++ws.covered_count;
      tree_cols.push_back(static_cast<std::size_t>(cur));
    }
    double delta = std::numeric_limits<double>::infinity();
    int next = -1;
    const double a = m.row_dual[row];
    for (std::size_t j = 0; j < ncols; ++j) {
      if (ws.covered[j]) continue;
      const double s = a + m.col_dual[j] - w(row, j);
      if (s < ws.slack[j]) {
        ws.slack[j] = s;
        ws.way[j] = cur;
      }
      if (ws.slack[j] < delta) {
        delta = ws.slack[j];
        next = static_cast<int>(j);
      }
    }
    if (next < 0) throw std::logic_error("run_stage: no free column reachable");
    if (delta != 0.0) {
      m.row_dual[root] -= delta;
      for (std::size_t j : tree_cols) {
        m.row_dual[static_cast<std::size_t>(m.col_to_row[j])] -= delta;
        m.col_dual[j] += delta;
      }
      for (std::size_t j = 0; j < ncols; ++j)
        if (!ws.covered[j]) ws.slack[j] -= delta;
    }
    cur = next;
    if (m.col_to_row[static_cast<std::size_t>(cur)] < 0) break;
  }
  // Augment along the predecessor chain.
  while (cur >= 0) {
    const int prev = ws.way[static_cast<std::size_t>(cur)];
    const std::size_t row = prev < 0 ? root : static_cast<std::size_t>(m.col_to_row[static_cast<std::size_t>(prev)]);
    m.col_to_row[static_cast<std::size_t>(cur)] = static_cast<int>(row);
    m.row_to_col[row] = cur;
    cur = prev;
  }
  ++m.stages;
}

inline void check_finite(const WeightMatrix& w) {
  if (!w.all_finite()) throw std::invalid_argument("weight matrix contains a non-finite entry");
}

}  // namespace detail

/// Optimal maximum-weight assignment of every row to a distinct column.
/// Requires rows <= cols (pad with pad_and_replicate otherwise).
inline Matching solve(const WeightMatrix& w) {
  detail::check_finite(w);
  if (w.rows() > w.cols()) throw std::invalid_argument("solve: more rows than columns; pad the matrix first");
  const std::size_t n = w.rows();
  const std::size_t m = w.cols();
  Matching out;
  out.row_to_col.assign(n, -1);
  out.col_to_row.assign(m, -1);
  out.row_dual.assign(n, 0.0);
  out.col_dual.assign(m, 0.0);
  if (n == 0) return out;

  // Row reduction.
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = w.row(i);
    out.row_dual[i] = *std::max_element(r.begin(), r.end());
  }
  // Column reduction is only admissible when every column ends up matched.
  if (w.square())
    for (std::size_t j = 0; j < m; ++j) out.col_dual[j] = detail::best_col_dual(w, out, j);

  KmaWorkspace ws;
  for (std::size_t i = 0; i < n; ++i) detail::run_stage(w, out, i, ws);
  out.objective = objective_of(w, out);
  return out;
}

/// Checks dual feasibility, complementary slackness and (for rectangular
/// problems) zero duals on free columns. Returns an empty string when the
/// certificate holds, otherwise a description of the first violation.
inline std::string certificate_violation(const WeightMatrix& w, const Matching& m, double rel_tol = 1e-9) {
  if (m.rows() != w.rows() || m.cols() != w.cols()) return "dimension mismatch";
  const auto tol = [&](double x, double a, double t) {
    return rel_tol * std::max({1.0, std::abs(x), std::abs(a), std::abs(t)});
  };
  for (std::size_t i = 0; i < w.rows(); ++i) {
    for (std::size_t j = 0; j < w.cols(); ++j) {
      const double s = m.row_dual[i] + m.col_dual[j] - w(i, j);
      if (s < -tol(w(i, j), m.row_dual[i], m.col_dual[j]))
        return "dual infeasible at (" + std::to_string(i) + "," + std::to_string(j) + ")";
    }
    const int j = m.row_to_col[i];
    if (j < 0) return "row " + std::to_string(i) + " unassigned";
    const auto jj = static_cast<std::size_t>(j);
    if (m.col_to_row[jj] != static_cast<int>(i)) return "inconsistent assignment at row " + std::to_string(i);
    const double s = m.row_dual[i] + m.col_dual[jj] - w(i, jj);
    if (std::abs(s) > tol(w(i, jj), m.row_dual[i], m.col_dual[jj]))
      return "slackness violated at (" + std::to_string(i) + "," + std::to_string(jj) + ")";
  }
  if (!w.square())
    for (std::size_t j = 0; j < w.cols(); ++j) {
      if (m.col_to_row[j] < 0 && std::abs(m.col_dual[j]) > rel_tol)
        return "free column " + std::to_string(j) + " has nonzero dual";
      if (m.col_dual[j] < -rel_tol) return "negative column dual at " + std::to_string(j);
    }
  return {};
}

/// Replicates each AP column `capacity` times and pads with zero-weight
/// dummy rows to a square working matrix. Column labels carry the AP index; dummy
/// rows carry label -1.
inline WeightMatrix pad_and_replicate(const WeightMatrix& w, std::size_t capacity) {
  const std::size_t n = w.rows();
  const std::size_t m = w.cols();
  if (m == 0) throw std::invalid_argument("pad_and_replicate: no columns");
  if (capacity * m < n) throw std::invalid_argument("pad_and_replicate: capacity below ceil(N/M)");
  const std::size_t dim = m * capacity;
  WeightMatrix out(dim, dim, 0.0);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t k = 0; k < capacity; ++k) out.set_col_label(j * capacity + k, w.col_labels()[j]);
  for (std::size_t i = 0; i < dim; ++i) out.set_row_label(i, i < n ? w.row_labels()[i] : -1);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t k = 0; k < capacity; ++k) out(i, j * capacity + k) = w(i, j);
  return out;
}

/// Replicates column j capacities[j] times without padding rows; the result
/// is rectangular and is solved directly when it has at least as many
/// columns as rows.
inline WeightMatrix replicate_columns(const WeightMatrix& w, std::span<const std::size_t> capacities) {
  if (capacities.size() != w.cols()) throw std::invalid_argument("replicate_columns: one capacity per column");
  std::size_t total = 0;
  for (auto c : capacities) total += c;
  WeightMatrix out(w.rows(), total);
  std::size_t col = 0;
  for (std::size_t j = 0; j < w.cols(); ++j)
    for (std::size_t k = 0; k < capacities[j]; ++k, ++col) {
      out.set_col_label(col, w.col_labels()[j]);
      for (std::size_t i = 0; i < w.rows(); ++i) out(i, col) = w(i, j);
    }
  for (std::size_t i = 0; i < w.rows(); ++i) out.set_row_label(i, w.row_labels()[i]);
  return out;
}

/// Re-optimizes after arbitrary edits given the rows and columns whose
/// weights changed (or were appended). Every affected row is unmatched, its
/// dual reseeded to max_j(w_ij - theta_j), and one stage runs per free row.
inline Matching reoptimize(Matching m, const WeightMatrix& w, std::span<const std::size_t> changed_rows,
                           std::span<const std::size_t> changed_cols) {
  if (m.rows() != w.rows() || m.cols() != w.cols()) throw std::invalid_argument("reoptimize: dimension mismatch");
  if (w.rows() > w.cols()) throw std::invalid_argument("reoptimize: more rows than columns");
  for (auto i : changed_rows) {
    for (double v : w.row(i))
      if (!std::isfinite(v)) throw std::invalid_argument("weight matrix contains a non-finite entry");
    detail::unmatch_row(m, i);
  }
  for (auto j : changed_cols) {
    for (std::size_t i = 0; i < w.rows(); ++i)
      if (!std::isfinite(w(i, j))) throw std::invalid_argument("weight matrix contains a non-finite entry");
    const int i = m.col_to_row[j];
    if (i >= 0) detail::unmatch_row(m, static_cast<std::size_t>(i));
  }

  // Columns against which the remaining matched rows may have become
  // infeasible. Matched edges themselves are untouched, so they stay tight.
  std::vector<std::size_t> suspect(changed_cols.begin(), changed_cols.end());
  if (w.square()) {
    for (auto j : changed_cols) m.col_dual[j] = detail::best_col_dual(w, m, j);
    suspect.clear();
  }
  while (true) {
    // Rectangular case: free columns must carry a zero dual and no dual may
    // be negative (a square solution can leave some). Raising a negative one
    // is safe once its row is freed; lowering a positive one needs a
    // feasibility scan, which may free further columns.
    if (!w.square())
      for (std::size_t j = 0; j < w.cols(); ++j) {
        if (m.col_dual[j] < 0.0) {
          if (m.col_to_row[j] >= 0) detail::unmatch_row(m, static_cast<std::size_t>(m.col_to_row[j]));
          m.col_dual[j] = 0.0;
          continue;
        }
        if (m.col_to_row[j] >= 0 || m.col_dual[j] == 0.0) continue;
        if (m.col_dual[j] > 0.0) suspect.push_back(j);
        m.col_dual[j] = 0.0;
      }
    if (suspect.empty()) break;
    for (std::size_t i = 0; i < w.rows(); ++i) {
      if (m.row_to_col[i] < 0) continue;
      for (auto j : suspect)
        if (m.row_dual[i] + m.col_dual[j] < w(i, j) - detail::slack_tolerance(w(i, j), m.row_dual[i], m.col_dual[j])) {
          detail::unmatch_row(m, i);
          break;
        }
    }
    suspect.clear();
  }
  KmaWorkspace ws;
  for (std::size_t i = 0; i < w.rows(); ++i)
    if (m.row_to_col[i] < 0) {
      m.row_dual[i] = detail::best_row_dual(w, m, i);
      detail::run_stage(w, m, i, ws);
    }
  m.objective = objective_of(w, m);
  return m;
}

/// Extends an optimal square matching by one row and one column.
/// The new column's dual is seeded as
///   theta_new = max(max_i (w'_{i,new} - alpha_i), w'_{new,new})
/// and the new row's as alpha_new = max_j (w'_{new,j} - theta_j); one stage
/// then yields the optimum of the extended matrix.
inline Matching add_vertex(Matching m, const WeightMatrix& w_ext) {
  detail::check_finite(w_ext);
  const std::size_t n = m.rows();
  if (m.cols() != n) throw std::invalid_argument("add_vertex: prior matching must be square");
  if (w_ext.rows() != n + 1 || w_ext.cols() != n + 1)
    throw std::invalid_argument("add_vertex: extended matrix must add exactly one row and one column");
  m.row_to_col.push_back(-1);
  m.col_to_row.push_back(-1);
  double theta = w_ext(n, n);
  for (std::size_t i = 0; i < n; ++i) theta = std::max(theta, w_ext(i, n) - m.row_dual[i]);
  m.col_dual.push_back(theta);
  m.row_dual.push_back(0.0);
  m.row_dual[n] = detail::best_row_dual(w_ext, m, n);
  KmaWorkspace ws;
  detail::run_stage(w_ext, m, n, ws);
  m.objective = objective_of(w_ext, m);
  return m;
}

/// General growth: rows and/or columns appended to the matrix the matching
/// was computed on. Appended square-case columns get a feasible seeded dual;
/// rectangular-case columns start free with a zero dual.
inline Matching extend(Matching m, const WeightMatrix& w_ext) {
  detail::check_finite(w_ext);
  const std::size_t n0 = m.rows();
  const std::size_t m0 = m.cols();
  if (w_ext.rows() < n0 || w_ext.cols() < m0) throw std::invalid_argument("extend: matrix shrank");
  m.row_to_col.resize(w_ext.rows(), -1);
  m.row_dual.resize(w_ext.rows(), 0.0);
  m.col_to_row.resize(w_ext.cols(), -1);
  m.col_dual.resize(w_ext.cols(), 0.0);
  std::vector<std::size_t> new_cols;
  for (std::size_t j = m0; j < w_ext.cols(); ++j) {
    new_cols.push_back(j);
    if (w_ext.square()) {
      double theta = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < n0; ++i) theta = std::max(theta, w_ext(i, j) - m.row_dual[i]);
      m.col_dual[j] = std::isfinite(theta) ? theta : 0.0;
    }
  }
  std::vector<std::size_t> new_rows;
  for (std::size_t i = n0; i < w_ext.rows(); ++i) new_rows.push_back(i);
  if (w_ext.square()) new_cols.clear();  // seeded duals are already feasible
  return reoptimize(std::move(m), w_ext, new_rows, new_cols);
}

enum class Line { row, column };

struct LineChange {
  Line line = Line::row;
  std::size_t index = 0;
  std::vector<double> values;
};

/// Applies a single row or column change to `w` and restores optimality with
/// one stage. An unchanged line returns the matching untouched.
inline Matching update_weights(Matching m, WeightMatrix& w, const LineChange& change) {
  if (m.rows() != w.rows() || m.cols() != w.cols()) throw std::invalid_argument("update_weights: dimension mismatch");
  const bool is_row = change.line == Line::row;
  if (change.index >= (is_row ? w.rows() : w.cols())) throw std::out_of_range("update_weights: index out of range");
  const std::vector<double> current = is_row ? std::vector<double>(w.row(change.index).begin(), w.row(change.index).end())
                                             : w.col(change.index);
  if (current == change.values) return m;
  for (double v : change.values)
    if (!std::isfinite(v)) throw std::invalid_argument("update_weights: non-finite weight");
  if (is_row)
    w.set_row(change.index, change.values);
  else
    w.set_col(change.index, change.values);

  if (!w.square()) {
    const std::size_t idx[1] = {change.index};
    return is_row ? reoptimize(std::move(m), w, idx, {}) : reoptimize(std::move(m), w, {}, idx);
  }

  std::size_t free_row = 0;
  if (is_row) {
    free_row = change.index;
    detail::unmatch_row(m, free_row);
    m.row_dual[free_row] = detail::best_row_dual(w, m, free_row);
  } else {
    const int i = m.col_to_row[change.index];
    if (i < 0) throw std::logic_error("update_weights: square matching has a free column");
    free_row = static_cast<std::size_t>(i);
    detail::unmatch_row(m, free_row);
    m.col_dual[change.index] = detail::best_col_dual(w, m, change.index);
  }
  KmaWorkspace ws;
  detail::run_stage(w, m, free_row, ws);
  m.objective = objective_of(w, m);
  return m;
}

}  // namespace wlanassoc
