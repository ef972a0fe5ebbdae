#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "vpgeo/cuboid.hpp"
#include "vpgeo/errors.hpp"
#include "vpgeo/fusion.hpp"
#include "vpgeo/vploss.hpp"

namespace vpgeo {

/// Loss floor for the quality score; keeps perfect cuboids finite.
/// Ceiling = -ln(1e-12), about 27.631.
inline constexpr double kQualityLossFloor = 1e-12;

struct PckConfig {
  double alpha = 0.1;
};

struct PrPoint {
  double precision = 0.0;
  double recall = 0.0;
  double threshold = 0.0;
};

struct ScoredPair {
  double score = 0.0;
  bool same_category = false;
};

struct PrCurve {
  std::vector<PrPoint> points;
  double ap = 0.0;
};

/// Fraction of vertices (matched by label index) whose distance to the
/// ground-truth vertex is at most alpha times the larger box side.
inline double pck(const Cuboid2D& pred, const Cuboid2D& gt, const Box2D& box,
                  const PckConfig& cfg = {}) {
  if (pred.frame != gt.frame) {
    throw FrameMismatch("prediction and ground truth use different frames");
  }
  if (cfg.alpha <= 0.0) {
    throw ValidationError("threshold fraction must be positive");
  }
  const double limit = cfg.alpha * std::max(box.h, box.w);
  int hits = 0;
  for (std::size_t i = 0; i < 8; ++i) {
    if (distance(pred.vertices[i], gt.vertices[i]) <= limit) ++hits;
  }
  return static_cast<double>(hits) / 8.0;
}

/// Negative natural log of the vanishing-point loss, floored at 1e-12 so a
/// projectively perfect cuboid scores the finite ceiling instead of infinity.
inline double cuboid_quality(const Cuboid2D& c) {
  const double loss = vp_loss(c).value;
  return -std::log(std::max(loss, kQualityLossFloor));
}

inline double cosine_similarity(const FeatureVector& a,
                                const FeatureVector& b) {
  if (a.size() != b.size()) {
    throw DimensionMismatch("vectors differ in length");
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) {
    throw ZeroVector("cosine similarity of a zero vector");
  }
  const double sim = dot / (std::sqrt(na) * std::sqrt(nb));
  return std::clamp(sim, -1.0, 1.0);
}

/// Precision/recall swept over every distinct score, descending; equal
/// scores count as a single threshold. Average precision is the step-wise
/// sum AP = sum_k (R_k - R_{k-1}) * P_k.
inline PrCurve pr_curve(std::vector<ScoredPair> pairs) {
  std::size_t total_pos = 0;
  for (const auto& p : pairs) {
    if (p.same_category) ++total_pos;
  }
  if (total_pos == 0) {
    throw NoPositives("no same-category pair in the input");
  }
  std::sort(pairs.begin(), pairs.end(),
            [](const ScoredPair& a, const ScoredPair& b) {
              return a.score > b.score;
            });

  PrCurve curve;
  std::size_t tp = 0, fp = 0;
  double prev_recall = 0.0;
  std::size_t i = 0;
  while (i < pairs.size()) {
    const double threshold = pairs[i].score;
    for (; i < pairs.size() && pairs[i].score == threshold; ++i) {
      if (pairs[i].same_category) {
        ++tp;
      } else {
        ++fp;
      }
    }
    PrPoint pt;
    pt.threshold = threshold;
    pt.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    pt.recall = static_cast<double>(tp) / static_cast<double>(total_pos);
    curve.points.push_back(pt);
    curve.ap += (pt.recall - prev_recall) * pt.precision;
    prev_recall = pt.recall;
  }
  return curve;
}

}  // namespace vpgeo
