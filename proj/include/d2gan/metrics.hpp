#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "d2gan/histogram.hpp"
#include "d2gan/sinkhorn.hpp"
#include "d2gan/tensor.hpp"

namespace d2gan {

// Mode coverage of a point cloud against known component centroids. A
// sample is high quality if it lands within radius_mult * sigma of its
// nearest centroid; a mode counts as covered once it attracts at least
// coverage_threshold high-quality samples.
struct ModeReport {
  std::size_t modes_covered = 0;
  double high_quality_fraction = 0.0;
  std::vector<std::size_t> per_mode_counts;
};

inline ModeReport mode_report(const Tensor& points,
                              const std::vector<std::array<double, 2>>& centroids,
                              double sigma, double radius_mult = 3.0,
                              std::size_t coverage_threshold = 20) {
  if (!(radius_mult > 0.0))
    throw std::invalid_argument("mode_report: radius_mult must be > 0");
  if (!(sigma > 0.0))
    throw std::invalid_argument("mode_report: sigma must be > 0");
  if (centroids.empty())
    throw std::invalid_argument("mode_report: no centroids");
  if (points.rank() != 2 || points.cols() != 2)
    throw std::invalid_argument("mode_report: points must be [n x 2]");

  ModeReport r;
  r.per_mode_counts.assign(centroids.size(), 0);
  const double radius2 = radius_mult * sigma * radius_mult * sigma;
  std::size_t hq = 0;
  for (std::size_t i = 0; i < points.rows(); ++i) {
    const double x = points(i, 0), y = points(i, 1);
    std::size_t best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < centroids.size(); ++k) {
      const double dx = x - centroids[k][0], dy = y - centroids[k][1];
      const double d2 = dx * dx + dy * dy;
      if (d2 < best_d2) {
        best_d2 = d2;
        best = k;
      }
    }
    if (best_d2 <= radius2) {
      ++r.per_mode_counts[best];
      ++hq;
    }
  }
  r.high_quality_fraction =
      points.rows() == 0 ? 0.0
                         : static_cast<double>(hq) /
                               static_cast<double>(points.rows());
  for (std::size_t c : r.per_mode_counts)
    if (c >= coverage_threshold) ++r.modes_covered;
  return r;
}

// Batch of per-sample conditional label distributions p(y|x), one row per
// sample, K columns.
struct LabelDistributionBatch {
  std::size_t class_count = 0;
  std::vector<std::vector<double>> rows;

  void validate() const {
    if (class_count == 0 || rows.empty())
      throw std::invalid_argument("label batch: empty");
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != class_count)
        throw std::invalid_argument("label batch: row " + std::to_string(r) +
                                    " has wrong class count");
      double sum = 0.0;
      for (double v : rows[r]) {
        if (!(v >= 0.0) || !std::isfinite(v))
          throw std::invalid_argument("label batch: row " + std::to_string(r) +
                                      " has a negative or non-finite entry");
        sum += v;
      }
      if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("label batch: row " + std::to_string(r) +
                                    " sums to " + std::to_string(sum));
    }
  }

  std::vector<double> marginal() const {
    std::vector<double> m(class_count, 0.0);
    for (const auto& row : rows)
      for (std::size_t k = 0; k < class_count; ++k) m[k] += row[k];
    const double inv = 1.0 / static_cast<double>(rows.size());
    for (double& v : m) v *= inv;
    return m;
  }
};

namespace detail {

// KL(row || ref) with the 0 log 0 = 0 convention; an impossible event
// under ref that the row assigns mass to is an error.
inline double row_kl(std::span<const double> row, std::span<const double> ref,
                     const char* what) {
  double acc = 0.0;
  for (std::size_t k = 0; k < row.size(); ++k) {
    if (row[k] == 0.0) continue;
    if (!(ref[k] > 0.0))
      throw std::invalid_argument(std::string(what) + ": reference has zero "
                                  "mass at class " + std::to_string(k) +
                                  " where the distribution is positive");
    acc += row[k] * std::log(row[k] / ref[k]);
  }
  return acc;
}

}  // namespace detail

// exp(E_x[ KL(p(y|x) || p(y)) ]) with p(y) the batch marginal.
inline double inception_score(const LabelDistributionBatch& batch) {
  batch.validate();
  const std::vector<double> marginal = batch.marginal();
  double mean_kl = 0.0;
  for (const auto& row : batch.rows)
    mean_kl += detail::row_kl(row, marginal, "inception_score");
  mean_kl /= static_cast<double>(batch.rows.size());
  return std::exp(mean_kl);
}

// exp(E_x[ KL(p(y|x) || ref) ] - KL(p(y) || ref)) with ref the training
// label marginal. Equals the inception score when ref = p(y).
inline double mode_score(const LabelDistributionBatch& batch,
                         std::span<const double> train_marginal) {
  batch.validate();
  if (train_marginal.size() != batch.class_count)
    throw std::invalid_argument("mode_score: marginal class count mismatch");
  double sum = 0.0;
  for (double v : train_marginal) {
    if (!(v >= 0.0))
      throw std::invalid_argument("mode_score: negative marginal entry");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("mode_score: train marginal sums to " +
                                std::to_string(sum));

  double mean_kl = 0.0;
  for (const auto& row : batch.rows)
    mean_kl += detail::row_kl(row, train_marginal, "mode_score");
  mean_kl /= static_cast<double>(batch.rows.size());
  const std::vector<double> marginal = batch.marginal();
  const double marginal_kl =
      detail::row_kl(marginal, train_marginal, "mode_score");
  return std::exp(mean_kl - marginal_kl);
}

// KL(model || data) between two label histograms, on smoothed and
// renormalized masses.
inline double reverse_kl_labels(std::span<const double> model_hist,
                                std::span<const double> data_hist,
                                double smoothing = 1e-10) {
  if (model_hist.size() != data_hist.size())
    throw std::invalid_argument("reverse_kl_labels: class count mismatch");
  if (model_hist.empty())
    throw std::invalid_argument("reverse_kl_labels: empty histograms");
  if (!(smoothing > 0.0))
    throw std::invalid_argument("reverse_kl_labels: smoothing must be > 0");
  double sum_m = 0.0, sum_d = 0.0;
  for (double v : model_hist) sum_m += v;
  for (double v : data_hist) sum_d += v;
  if (!(sum_m > 0.0) || !(sum_d > 0.0))
    throw std::invalid_argument("reverse_kl_labels: zero-mass histogram");

  const double n = static_cast<double>(model_hist.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < model_hist.size(); ++k) {
    const double p =
        (model_hist[k] / sum_m + smoothing) / (1.0 + n * smoothing);
    const double q = (data_hist[k] / sum_d + smoothing) / (1.0 + n * smoothing);
    acc += p * std::log(p / q);
  }
  return acc;
}

}  // namespace d2gan
