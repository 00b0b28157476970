#include "radar_odom/graph_match.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "radar_odom/error.hpp"

namespace radar_odom {

CompatibilityMatrix::CompatibilityMatrix(Eigen::MatrixXd scores) : scores_(std::move(scores)) {
  require(scores_.rows() == scores_.cols(), "CompatibilityMatrix: matrix must be square");
  const Eigen::Index u = scores_.rows();
  for (Eigen::Index g = 0; g < u; ++g) {
    require(scores_(g, g) == 0.0, "CompatibilityMatrix: diagonal must be zero");
    for (Eigen::Index h = 0; h < u; ++h) {
      const double value = scores_(g, h);
      require(std::isfinite(value) && value >= 0.0 && value <= 1.0, "CompatibilityMatrix: entries must lie in [0, 1]");
      require(std::abs(value - scores_(h, g)) <= 1e-12, "CompatibilityMatrix: matrix must be symmetric");
    }
  }
}

CompatibilityMatrix pairwise_compatibility(const UnaryMatches& matches, const KeypointSet& l1, const KeypointSet& l2,
                                           double sigma) {
  const auto u = static_cast<Eigen::Index>(matches.size());
  if (u < 2) throw_error(ErrorCode::kDegenerateProblem, "pairwise compatibility needs at least 2 candidates");
  require(std::isfinite(sigma) && sigma > 0.0, "pairwise_compatibility: sigma must be positive");
  const double cutoff = 3.0 * sigma;
  const double inv_two_var = 1.0 / (2.0 * sigma * sigma);

  Eigen::MatrixXd scores = Eigen::MatrixXd::Zero(u, u);
  for (Eigen::Index g = 0; g < u; ++g) {
    const CandidateMatch& mg = matches.pairs[static_cast<std::size_t>(g)];
    require(mg.first >= 0 && static_cast<std::size_t>(mg.first) < l1.size() && mg.second >= 0 &&
                static_cast<std::size_t>(mg.second) < l2.size(),
            "pairwise_compatibility: candidate index out of range");
    const CartesianPoint& a1 = l1.keypoints[static_cast<std::size_t>(mg.first)].point;
    const CartesianPoint& a2 = l2.keypoints[static_cast<std::size_t>(mg.second)].point;
    for (Eigen::Index h = g + 1; h < u; ++h) {
      const CandidateMatch& mh = matches.pairs[static_cast<std::size_t>(h)];
      if (mg.first == mh.first || mg.second == mh.second) continue;
      const CartesianPoint& b1 = l1.keypoints[static_cast<std::size_t>(mh.first)].point;
      const CartesianPoint& b2 = l2.keypoints[static_cast<std::size_t>(mh.second)].point;
      const double delta = std::abs(std::hypot(a1.x - b1.x, a1.y - b1.y) - std::hypot(a2.x - b2.x, a2.y - b2.y));
      if (delta > cutoff) continue;
      const double score = std::exp(-delta * delta * inv_two_var);
      scores(g, h) = score;
      scores(h, g) = score;
    }
  }
  return CompatibilityMatrix(std::move(scores));
}

CompatibilityMatrix restrict_to(const CompatibilityMatrix& c, std::span<const int> keep) {
  const Eigen::Index u = c.size();
  Eigen::VectorXd mask = Eigen::VectorXd::Zero(u);
  for (const int k : keep) {
    require(k >= 0 && k < u, "restrict_to: index out of range");
    mask(k) = 1.0;
  }
  return CompatibilityMatrix(mask.asDiagonal() * c.scores() * mask.asDiagonal());
}

SpectralSolution principal_eigenvector(const CompatibilityMatrix& c, const PowerIterationOptions& options) {
  const Eigen::MatrixXd& a = c.scores();
  const Eigen::Index u = a.rows();
  if (u == 0 || a.isZero(0.0)) {
    throw_error(ErrorCode::kNoCompatibilityStructure, "compatibility matrix is identically zero");
  }
  const double shift = 0.5 * a.sum() / static_cast<double>(u);

  SpectralSolution solution;
  Eigen::VectorXd v = Eigen::VectorXd::Constant(u, 1.0 / std::sqrt(static_cast<double>(u)));
  Eigen::VectorXd next(u);
  for (int it = 1; it <= options.max_iterations; ++it) {
    next.noalias() = a * v;
    next += shift * v;
    next /= next.norm();
    const double change = (next - v).norm();
    v.swap(next);
    solution.iterations = it;
    if (change < options.tolerance) {
      solution.converged = true;
      break;
    }
  }
  v = v.cwiseMax(0.0);
  v /= v.norm();
  solution.eigenvalue = v.dot(a * v);
  solution.eigenvector = std::move(v);
  return solution;
}

double global_score(const Eigen::VectorXd& indicator, const CompatibilityMatrix& c) {
  require(indicator.size() == c.size(), "global_score: size mismatch");
  const double norm_sq = indicator.squaredNorm();
  require(norm_sq > 0.0, "global_score: indicator must be non-zero");
  return indicator.dot(c.scores() * indicator) / norm_sq;
}

double mutual_compatibility_index(const CompatibilityMatrix& c, const Eigen::VectorXd& v_star,
                                  const Eigen::VectorXd& indicator) {
  require(indicator.size() == c.size() && v_star.size() == c.size(), "mutual_compatibility_index: size mismatch");
  require((indicator.array() != 0.0).any(), "mutual_compatibility_index: indicator has no selected match");
  const Eigen::VectorXd w = c.scores() * indicator.cwiseProduct(v_star);
  const double w_norm = w.norm();
  if (w_norm == 0.0) return 0.0;
  return std::clamp(w.dot(indicator) / (w_norm * indicator.norm()), 0.0, 1.0);
}

std::pair<double, double> top_two_eigenvalues(const Eigen::MatrixXd& symmetric, const PowerIterationOptions& options) {
  const Eigen::Index size = symmetric.rows();
  require(size >= 1 && symmetric.cols() == size, "top_two_eigenvalues: matrix must be square and non-empty");
  if (size == 1) return {symmetric(0, 0), symmetric(0, 0)};

  // Gershgorin shift makes the iterated matrix positive semi-definite, so
  // the dominant magnitude is also the largest algebraic eigenvalue.
  const double shift = symmetric.cwiseAbs().rowwise().sum().maxCoeff();
  const Eigen::MatrixXd shifted = symmetric + shift * Eigen::MatrixXd::Identity(size, size);

  auto iterate = [&](Eigen::VectorXd v, const Eigen::VectorXd* deflate) {
    auto project = [deflate](Eigen::VectorXd& x) {
      if (deflate != nullptr) x -= deflate->dot(x) * *deflate;
    };
    project(v);
    double norm = v.norm();
    if (norm == 0.0) return std::pair<double, Eigen::VectorXd>{0.0, v};
    v /= norm;
    double value = v.dot(shifted * v);
    for (int it = 0; it < options.max_iterations; ++it) {
      Eigen::VectorXd next = shifted * v;
      project(next);
      norm = next.norm();
      // A null direction of the shifted matrix leaves only rounding noise.
      if (norm <= 1e-12 * shift) return std::pair<double, Eigen::VectorXd>{0.0, v};
      next /= norm;
      const double next_value = next.dot(shifted * next);
      const double change = (next - v).norm();
      const bool settled = std::abs(next_value - value) <= options.tolerance * std::max(1.0, std::abs(next_value));
      v = std::move(next);
      value = next_value;
      if (change < options.tolerance || (it > 10 && settled)) break;
    }
    return std::pair<double, Eigen::VectorXd>{value, v};
  };

  const auto [mu1, v1] = iterate(Eigen::VectorXd::Ones(size), nullptr);
  Eigen::VectorXd start(size);
  for (Eigen::Index i = 0; i < size; ++i) start(i) = 1.0 + 0.37 * static_cast<double>((i * 7 + 3) % 11) - 1.5;
  auto [mu2, v2] = iterate(start, &v1);
  if (v2.norm() == 0.0) mu2 = 0.0;
  return {mu1 - shift, mu2 - shift};
}

double eigengap_measure(const CompatibilityMatrix& c, std::span<const int> selected_candidates) {
  const Eigen::Index u = c.size();
  if (selected_candidates.size() < 2 || u == 0) return 0.0;
  const auto k = static_cast<Eigen::Index>(selected_candidates.size());
  Eigen::MatrixXd block(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      block(i, j) = c(selected_candidates[static_cast<std::size_t>(i)], selected_candidates[static_cast<std::size_t>(j)]);
    }
  }
  const auto [lambda1, lambda2] = top_two_eigenvalues(block);
  return std::clamp((lambda1 - lambda2) / static_cast<double>(u), 0.0, 1.0);
}

MatchSelection greedy_select(const CompatibilityMatrix& c, const SpectralSolution& solution,
                             const UnaryMatches& matches) {
  const Eigen::Index u = c.size();
  require(u >= 1, "greedy_select: empty problem");
  require(solution.eigenvector.size() == u && static_cast<Eigen::Index>(matches.size()) == u,
          "greedy_select: size mismatch between C, v* and U");
  const Eigen::VectorXd& v = solution.eigenvector;
  const Eigen::MatrixXd& a = c.scores();

  std::vector<int> order(static_cast<std::size_t>(u));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&v](int lhs, int rhs) { return v(lhs) * v(lhs) > v(rhs) * v(rhs); });

  MatchSelection out;
  out.indicator = Eigen::VectorXd::Zero(u);
  std::vector<bool> unsearched(static_cast<std::size_t>(u), true);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(u);  // C (m .* v*)
  double current_index = 0.0;

  for (const int g : order) {
    if (!unsearched[static_cast<std::size_t>(g)]) continue;
    const Eigen::VectorXd trial_w = w + a.col(g) * v(g);
    double on_support = trial_w(g);
    for (const int k : out.candidates) on_support += trial_w(k);
    const double w_norm = trial_w.norm();
    const double m_norm = std::sqrt(static_cast<double>(out.candidates.size() + 1));
    const double trial_index = w_norm == 0.0 ? 0.0 : std::clamp(on_support / (w_norm * m_norm), 0.0, 1.0);
    if (!out.candidates.empty() && trial_index < current_index) break;

    w = trial_w;
    current_index = trial_index;
    out.indicator(g) = 1.0;
    out.candidates.push_back(g);
    const CandidateMatch& chosen = matches.pairs[static_cast<std::size_t>(g)];
    out.selected.emplace_back(chosen.first, chosen.second);
    for (Eigen::Index h = 0; h < u; ++h) {
      const CandidateMatch& other = matches.pairs[static_cast<std::size_t>(h)];
      if (other.first == chosen.first || other.second == chosen.second) unsearched[static_cast<std::size_t>(h)] = false;
    }
  }

  out.mutual_compatibility = current_index;
  out.global_score = global_score(out.indicator, c);
  out.eigengap = eigengap_measure(c, out.candidates);
  return out;
}

bool satisfies_uniqueness(std::span<const std::pair<int, int>> selected) {
  std::set<int> firsts;
  std::set<int> seconds;
  for (const auto& [first, second] : selected) {
    if (!firsts.insert(first).second || !seconds.insert(second).second) return false;
  }
  return true;
}

}  // namespace radar_odom
