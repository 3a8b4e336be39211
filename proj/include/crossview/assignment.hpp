#pragma once

#include <utility>
#include <vector>

#include <Eigen/Core>

namespace crossview {

// Dense N x M score matrix (targets x detections); kForbidden marks pairs
// that may never be matched.
using AffinityMatrix = Eigen::MatrixXd;

struct Match {
  int row;
  int col;

  friend bool operator==(const Match&, const Match&) = default;
};

// Maximum-weight assignment. Among all assignments it first maximizes the
// number of non-forbidden pairs, then the total weight. Forbidden pairs are
// never returned. Output is sorted by row.
std::vector<Match> hungarian_max(const AffinityMatrix& A);

struct FilteredMatches {
  std::vector<Match> accepted;
  std::vector<int> unmatched_rows;
  std::vector<int> unmatched_cols;
};

FilteredMatches filter_matches(const std::vector<Match>& pairs, const AffinityMatrix& A,
                               double threshold);

struct Partition {
  std::vector<int> labels;  // cluster label per item, labels are 0..num_clusters-1
  int num_clusters = 0;

  std::vector<std::vector<int>> clusters() const;
};

// Sum of a_ij over same-cluster pairs; kForbidden if any such pair is forbidden.
double partition_objective(const Eigen::MatrixXd& a, const Partition& p);

// True if no cluster joins a forbidden pair. Transitivity holds by construction
// of a label-based partition.
bool partition_feasible(const Eigen::MatrixXd& a, const Partition& p);

// Cycle-consistent graph partitioning: maximizes the same-cluster affinity sum.
// Exact branch and bound up to max_exact items, greedy agglomerative above.
Partition partition_cycle_consistent(const Eigen::MatrixXd& a, int max_exact = 12);

Partition partition_exact(const Eigen::MatrixXd& a);
Partition partition_greedy(const Eigen::MatrixXd& a);

}  // namespace crossview
