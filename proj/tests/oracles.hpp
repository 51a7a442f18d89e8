#pragma once

// Reference implementations used only to check the library. They are written
// independently of src/ and favour obviousness over speed.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "signsep/core.hpp"
#include "signsep/decoder.hpp"

namespace oracle {

using signsep::ClassId;
using signsep::Matrix;

// Singular values of an m x 3 matrix from the eigenvalues of its 3x3 Gram
// matrix, found as the roots of the characteristic cubic (trigonometric form).
inline std::array<double, 3> gram_singular_values(const Matrix& m) {
  double g[3][3] = {};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t r = 0; r < m.rows(); ++r) g[i][j] += m(r, i) * m(r, j);

  std::array<double, 3> eig{};
  const double off = g[0][1] * g[0][1] + g[0][2] * g[0][2] + g[1][2] * g[1][2];
  if (off == 0.0) {
    eig = {g[0][0], g[1][1], g[2][2]};
  } else {
    const double q = (g[0][0] + g[1][1] + g[2][2]) / 3.0;
    const double p2 = (g[0][0] - q) * (g[0][0] - q) + (g[1][1] - q) * (g[1][1] - q) +
                      (g[2][2] - q) * (g[2][2] - q) + 2.0 * off;
    const double p = std::sqrt(p2 / 6.0);
    double b[3][3];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) b[i][j] = (g[i][j] - (i == j ? q : 0.0)) / p;
    const double det = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1]) -
                       b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0]) +
                       b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
    const double r = std::clamp(det / 2.0, -1.0, 1.0);
    const double phi = std::acos(r) / 3.0;
    eig[0] = q + 2.0 * p * std::cos(phi);
    eig[2] = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
    eig[1] = 3.0 * q - eig[0] - eig[2];
  }
  std::sort(eig.begin(), eig.end(), std::greater<>());
  std::array<double, 3> sv{};
  for (int i = 0; i < 3; ++i) sv[i] = std::sqrt(std::max(eig[i], 0.0));
  return sv;
}

// Levenshtein distance by memoized recursion over suffixes.
inline std::size_t edit_distance(std::span<const ClassId> a, std::span<const ClassId> b) {
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
  std::function<std::size_t(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t j) -> std::size_t {
    if (i == a.size()) return b.size() - j;
    if (j == b.size()) return a.size() - i;
    const auto key = std::make_pair(i, j);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    std::size_t best = go(i + 1, j + 1) + (a[i] == b[j] ? 0 : 1);
    best = std::min(best, go(i + 1, j) + 1);
    best = std::min(best, go(i, j + 1) + 1);
    memo[key] = best;
    return best;
  };
  return go(0, 0);
}

inline std::size_t lcs_length(std::span<const ClassId> a, std::span<const ClassId> b) {
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
  std::function<std::size_t(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t j) -> std::size_t {
    if (i == a.size() || j == b.size()) return 0;
    const auto key = std::make_pair(i, j);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    const std::size_t best = a[i] == b[j] ? 1 + go(i + 1, j + 1) : std::max(go(i + 1, j), go(i, j + 1));
    memo[key] = best;
    return best;
  };
  return go(0, 0);
}

// Straight-line version of the window rule; tags are "accept",
// "blank_below" and "blank_dup".
struct DecodeTrace {
  std::vector<ClassId> words;
  std::vector<std::string> tags;
  std::vector<double> confidences;
};

inline DecodeTrace decode(std::span<const signsep::WindowProbability> windows, double threshold) {
  DecodeTrace t;
  std::optional<ClassId> last;
  for (const auto& w : windows) {
    const auto p = w.probs.probs();
    std::size_t best = 0;
    for (std::size_t i = 1; i < p.size(); ++i)
      if (p[i] > p[best]) best = i;
    const auto cls = static_cast<ClassId>(best);
    if (p[best] <= threshold) {
      t.tags.emplace_back("blank_below");
    } else if (last && *last == cls) {
      t.tags.emplace_back("blank_dup");
    } else {
      t.tags.emplace_back("accept");
      t.words.push_back(cls);
      t.confidences.push_back(p[best]);
      last = cls;
    }
  }
  return t;
}

}  // namespace oracle
