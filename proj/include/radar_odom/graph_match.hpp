#pragma once

#include <Eigen/Core>

#include <span>
#include <utility>
#include <vector>

#include "radar_odom/descriptor.hpp"
#include "radar_odom/keypoints.hpp"

namespace radar_odom {

/// Symmetric, non-negative, zero-diagonal u x u matrix with entries in [0, 1].
class CompatibilityMatrix {
 public:
  /// Validates the invariants (tolerance 1e-12 on symmetry); throws
  /// kContractViolation otherwise.
  explicit CompatibilityMatrix(Eigen::MatrixXd scores);

  const Eigen::MatrixXd& scores() const { return scores_; }
  Eigen::Index size() const { return scores_.rows(); }
  double operator()(Eigen::Index g, Eigen::Index h) const { return scores_(g, h); }

 private:
  Eigen::MatrixXd scores_;
};

/// Gaussian kernel on the discrepancy of pairwise distances between two
/// candidate matches, cut to zero beyond three sigma. Candidates that share
/// a keypoint on either side score 0. Throws kDegenerateProblem for u < 2.
CompatibilityMatrix pairwise_compatibility(const UnaryMatches& matches, const KeypointSet& l1, const KeypointSet& l2,
                                           double sigma);

/// Zeroes every row and column whose index is not in `keep` (C*).
CompatibilityMatrix restrict_to(const CompatibilityMatrix& c, std::span<const int> keep);

struct PowerIterationOptions {
  double tolerance = 1e-9;
  int max_iterations = 1000;
};

struct SpectralSolution {
  Eigen::VectorXd eigenvector;  // unit norm, entries >= 0
  double eigenvalue = 0.0;      // Rayleigh quotient at the eigenvector
  int iterations = 0;
  bool converged = false;
};

/// Power iteration from the uniform unit vector. The iteration runs on
/// C + sI with s = half the mean row sum, which keeps the Perron vector but
/// removes the oscillation caused by an eigenvalue of -lambda_1 (bipartite
/// compatibility graphs). Throws kNoCompatibilityStructure for C = 0.
SpectralSolution principal_eigenvector(const CompatibilityMatrix& c, const PowerIterationOptions& options = {});

/// x^T C x / x^T x. Throws kContractViolation for a zero vector.
double global_score(const Eigen::VectorXd& indicator, const CompatibilityMatrix& c);

/// Cosine between w = C (m .* v) and m; 0 when w vanishes. Throws
/// kContractViolation when the indicator has no ones.
double mutual_compatibility_index(const CompatibilityMatrix& c, const Eigen::VectorXd& v_star,
                                  const Eigen::VectorXd& indicator);

/// (lambda_1 - lambda_2) / u of the block of C spanned by the selected
/// candidates, clamped to [0, 1]. Fewer than two selected gives 0.
double eigengap_measure(const CompatibilityMatrix& c, std::span<const int> selected_candidates);

/// Two largest eigenvalues of a symmetric matrix by shifted power iteration
/// with deflation. For a 1 x 1 matrix the second value equals the first.
std::pair<double, double> top_two_eigenvalues(const Eigen::MatrixXd& symmetric,
                                              const PowerIterationOptions& options = {1e-12, 5000});

struct MatchSelection {
  std::vector<std::pair<int, int>> selected;  // (L1 index, L2 index)
  std::vector<int> candidates;                // rows of U, in commit order
  Eigen::VectorXd indicator;                  // length u, ones at committed rows
  double mutual_compatibility = 0.0;
  double eigengap = 0.0;
  double global_score = 0.0;
};

/// Greedy rounding of the relaxed solution: commit candidates in
/// descending v*^2 (ties to the lower index), discarding every candidate
/// that shares a keypoint with a committed one, and stop as soon as the
/// next commit would lower the mutual compatibility index. The first
/// candidate is always committed.
MatchSelection greedy_select(const CompatibilityMatrix& c, const SpectralSolution& solution,
                             const UnaryMatches& matches);

/// True when no L1 index and no L2 index appears twice.
bool satisfies_uniqueness(std::span<const std::pair<int, int>> selected);

}  // namespace radar_odom
