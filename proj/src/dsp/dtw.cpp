#include "vahf/dsp/dtw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vahf/common/error.hpp"

namespace vahf::dsp {

double frame_cost(std::span<const double> a, std::span<const double> b, Metric metric) {
  double acc = 0.0;
  if (metric == Metric::Manhattan) {
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
    return acc;
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

double dtw_distance(const VectorSequence& a, const VectorSequence& b, Metric metric) {
  require(!a.empty() && !b.empty(), "empty-sequence", "dtw needs nonempty sequences");
  const std::size_t dim = a.front().size();
  for (const auto& v : a) require(v.size() == dim, "dimension-mismatch", "ragged sequence a");
  for (const auto& v : b) require(v.size() == dim, "dimension-mismatch", "frame dimensions differ");

  const std::size_t n = a.size(), m = b.size();
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> prev(m + 1, inf), cur(m + 1, inf);
  prev[0] = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = inf;
    for (std::size_t j = 1; j <= m; ++j) {
      const double c = frame_cost(a[i - 1], b[j - 1], metric);
      cur[j] = c + std::min({prev[j], cur[j - 1], prev[j - 1]});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

VectorSequence frames_of(const MfccSeries& m) {
  VectorSequence out(static_cast<std::size_t>(m.frames()), std::vector<double>(static_cast<std::size_t>(m.n_coeffs())));
  for (int r = 0; r < m.n_coeffs(); ++r) {
    for (int f = 0; f < m.frames(); ++f) out[f][r] = m.coeffs.at(r, f);
  }
  return out;
}

}  // namespace vahf::dsp
