#include "crossview/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "crossview/types.hpp"

namespace crossview {

namespace {

// Shortest augmenting path assignment on an n x m cost matrix, n <= m.
// Returns the column assigned to each row.
std::vector<int> min_cost_assignment(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  const int m = static_cast<int>(cost.cols());
  const double inf = std::numeric_limits<double>::infinity();
  // 1-based potentials; column 0 is the virtual source.
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0), minv(m + 1);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  std::vector<char> used(m + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= m; ++j)
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

}  // namespace

std::vector<Match> hungarian_max(const AffinityMatrix& A) {
  std::vector<Match> out;
  if (A.rows() == 0 || A.cols() == 0) return out;

  const bool transposed = A.rows() > A.cols();
  const Eigen::MatrixXd S = transposed ? Eigen::MatrixXd(A.transpose()) : A;
  const int n = static_cast<int>(S.rows());

  double hi = -std::numeric_limits<double>::infinity();
  double lo = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < S.size(); ++i) {
    const double s = S.data()[i];
    if (std::isfinite(s)) {
      hi = std::max(hi, s);
      lo = std::min(lo, s);
    }
  }
  if (!std::isfinite(hi)) return out;

  // One more forbidden pair must always cost more than any finite total.
  const double forbidden_cost = (hi - lo + 1.0) * (n + 1);
  Eigen::MatrixXd cost(S.rows(), S.cols());
  for (Eigen::Index i = 0; i < S.rows(); ++i)
    for (Eigen::Index j = 0; j < S.cols(); ++j)
      cost(i, j) = std::isfinite(S(i, j)) ? hi - S(i, j) : forbidden_cost;

  const std::vector<int> row_to_col = min_cost_assignment(cost);
  for (int i = 0; i < n; ++i) {
    const int j = row_to_col[static_cast<std::size_t>(i)];
    if (j < 0 || !std::isfinite(S(i, j))) continue;
    out.push_back(transposed ? Match{j, i} : Match{i, j});
  }
  std::sort(out.begin(), out.end(),
            [](const Match& a, const Match& b) { return a.row < b.row; });
  return out;
}

FilteredMatches filter_matches(const std::vector<Match>& pairs, const AffinityMatrix& A,
                               double threshold) {
  FilteredMatches out;
  std::vector<char> row_used(static_cast<std::size_t>(A.rows()), 0);
  std::vector<char> col_used(static_cast<std::size_t>(A.cols()), 0);
  for (const Match& m : pairs) {
    if (A(m.row, m.col) >= threshold) {
      out.accepted.push_back(m);
      row_used[static_cast<std::size_t>(m.row)] = 1;
      col_used[static_cast<std::size_t>(m.col)] = 1;
    }
  }
  for (int i = 0; i < A.rows(); ++i)
    if (!row_used[static_cast<std::size_t>(i)]) out.unmatched_rows.push_back(i);
  for (int j = 0; j < A.cols(); ++j)
    if (!col_used[static_cast<std::size_t>(j)]) out.unmatched_cols.push_back(j);
  return out;
}

std::vector<std::vector<int>> Partition::clusters() const {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(num_clusters));
  for (std::size_t i = 0; i < labels.size(); ++i)
    out[static_cast<std::size_t>(labels[i])].push_back(static_cast<int>(i));
  return out;
}

double partition_objective(const Eigen::MatrixXd& a, const Partition& p) {
  double total = 0.0;
  const auto n = static_cast<int>(p.labels.size());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (p.labels[static_cast<std::size_t>(i)] == p.labels[static_cast<std::size_t>(j)]) {
        if (!std::isfinite(a(i, j))) return kForbidden;
        total += a(i, j);
      }
  return total;
}

bool partition_feasible(const Eigen::MatrixXd& a, const Partition& p) {
  return std::isfinite(partition_objective(a, p));
}

namespace {

Partition normalized(const std::vector<int>& raw) {
  Partition p;
  p.labels.resize(raw.size());
  std::vector<int> remap;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const auto r = static_cast<std::size_t>(raw[i]);
    if (r >= remap.size()) remap.resize(r + 1, -1);
    if (remap[r] < 0) remap[r] = p.num_clusters++;
    p.labels[i] = remap[r];
  }
  return p;
}

class BranchAndBound {
 public:
  explicit BranchAndBound(const Eigen::MatrixXd& a)
      : a_(a), n_(static_cast<int>(a.rows())), labels_(static_cast<std::size_t>(n_), -1),
        best_labels_(static_cast<std::size_t>(n_)), remaining_gain_(static_cast<std::size_t>(n_) + 1, 0.0) {
    // Optimistic bound: every positive pair not yet decided is gained.
    for (int i = n_ - 1; i >= 0; --i) {
      double pos = 0.0;
      for (int j = 0; j < i; ++j)
        if (std::isfinite(a_(i, j)) && a_(i, j) > 0.0) pos += a_(i, j);
      remaining_gain_[static_cast<std::size_t>(i)] = remaining_gain_[static_cast<std::size_t>(i) + 1] + pos;
    }
    for (int i = 0; i < n_; ++i) best_labels_[static_cast<std::size_t>(i)] = i;
  }

  Partition solve() {
    members_.clear();
    recurse(0, 0.0);
    return normalized(best_labels_);
  }

 private:
  void recurse(int i, double value) {
    if (i == n_) {
      if (value > best_) {
        best_ = value;
        best_labels_ = labels_;
      }
      return;
    }
    if (value + remaining_gain_[static_cast<std::size_t>(i)] <= best_) return;
    for (std::size_t c = 0; c < members_.size(); ++c) {
      double gain = 0.0;
      bool allowed = true;
      for (int j : members_[c]) {
        const double s = a_(i, j);
        if (!std::isfinite(s)) {
          allowed = false;
          break;
        }
        gain += s;
      }
      if (!allowed) continue;
      members_[c].push_back(i);
      labels_[static_cast<std::size_t>(i)] = static_cast<int>(c);
      recurse(i + 1, value + gain);
      members_[c].pop_back();
    }
    members_.push_back({i});
    labels_[static_cast<std::size_t>(i)] = static_cast<int>(members_.size() - 1);
    recurse(i + 1, value);
    members_.pop_back();
  }

  const Eigen::MatrixXd& a_;
  int n_;
  std::vector<int> labels_;
  std::vector<int> best_labels_;
  std::vector<double> remaining_gain_;
  std::vector<std::vector<int>> members_;
  double best_ = 0.0;  // all singletons
};

}  // namespace

Partition partition_exact(const Eigen::MatrixXd& a) {
  if (a.rows() == 0) return {};
  return BranchAndBound(a).solve();
}

Partition partition_greedy(const Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  std::vector<std::vector<int>> clusters(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) clusters[static_cast<std::size_t>(i)] = {i};

  // Cross-cluster affinity sums; kForbidden once any member pair is forbidden.
  Eigen::MatrixXd link = a;
  std::vector<char> alive(static_cast<std::size_t>(n), 1);
  while (true) {
    int bi = -1, bj = -1;
    double best = 0.0;
    for (int i = 0; i < n; ++i) {
      if (!alive[static_cast<std::size_t>(i)]) continue;
      for (int j = i + 1; j < n; ++j) {
        if (!alive[static_cast<std::size_t>(j)]) continue;
        const double s = link(i, j);
        if (std::isfinite(s) && s > best) {
          best = s;
          bi = i;
          bj = j;
        }
      }
    }
    if (bi < 0) break;
    auto& into = clusters[static_cast<std::size_t>(bi)];
    auto& from = clusters[static_cast<std::size_t>(bj)];
    into.insert(into.end(), from.begin(), from.end());
    from.clear();
    alive[static_cast<std::size_t>(bj)] = 0;
    for (int k = 0; k < n; ++k) {
      if (!alive[static_cast<std::size_t>(k)] || k == bi) continue;
      const double s = link(bi, k) + link(bj, k);  // -inf propagates
      link(bi, k) = s;
      link(k, bi) = s;
    }
  }

  std::vector<int> raw(static_cast<std::size_t>(n));
  for (int c = 0; c < n; ++c)
    for (int i : clusters[static_cast<std::size_t>(c)]) raw[static_cast<std::size_t>(i)] = c;
  return normalized(raw);
}

Partition partition_cycle_consistent(const Eigen::MatrixXd& a, int max_exact) {
  if (a.rows() <= max_exact) return partition_exact(a);
  return partition_greedy(a);
}

}  // namespace crossview
