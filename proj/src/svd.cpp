#include "signsep/svd.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <fmt/format.h>

namespace signsep {

std::vector<double> singular_values(const Matrix& m) {
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  if (rows < cols) {
    throw DimensionError(fmt::format("singular_values expects rows >= cols, got {}x{}", rows, cols));
  }
  for (double v : m.values()) {
    if (!std::isfinite(v)) throw NonFiniteError("singular_values: non-finite matrix entry");
  }

  // Column-major working copy.
  std::vector<double> a(rows * cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) a[c * rows + r] = m(r, c);
  auto col = [&](std::size_t c) { return a.data() + c * rows; };

  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr int kMaxSweeps = 60;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < cols; ++p) {
      for (std::size_t q = p + 1; q < cols; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        const double* ap = col(p);
        const double* aq = col(q);
        for (std::size_t r = 0; r < rows; ++r) {
          alpha += ap[r] * ap[r];
          beta += aq[r] * aq[r];
          gamma += ap[r] * aq[r];
        }
        if (gamma == 0.0 || std::abs(gamma) <= eps * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        double* wp = col(p);
        double* wq = col(q);
        for (std::size_t r = 0; r < rows; ++r) {
          const double xp = wp[r];
          const double xq = wq[r];
          wp[r] = c * xp - s * xq;
          wq[r] = s * xp + c * xq;
        }
      }
    }
    if (!rotated) break;
  }

  std::vector<double> sv(cols);
  for (std::size_t c = 0; c < cols; ++c) {
    const double* ac = col(c);
    double sq = 0.0;
    for (std::size_t r = 0; r < rows; ++r) sq += ac[r] * ac[r];
    sv[c] = std::sqrt(sq);
  }
  std::sort(sv.begin(), sv.end(), std::greater<>());
  return sv;
}

}  // namespace signsep
