#pragma once

#include "katz/padic/rational.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace katz {

struct NewtonSegment {
  Rational slope;
  std::int64_t width = 0;
  bool operator==(const NewtonSegment&) const = default;
};

struct NewtonPolygon {
  std::vector<std::pair<std::int64_t, Rational>> vertices;
  std::vector<NewtonSegment> segments;

  /// Total width of all segments.
  std::int64_t length() const {
    std::int64_t w = 0;
    for (const auto& s : segments) w += s.width;
    return w;
  }
};

/// A point (index, valuation); nullopt valuation means "infinite" (zero coefficient).
using NewtonPoint = std::pair<std::int64_t, std::optional<Rational>>;

/// Lower convex hull of the finite points. Collinear vertices are merged.
inline NewtonPolygon newton_polygon(std::vector<NewtonPoint> pts) {
  if (pts.empty()) throw std::invalid_argument("newton_polygon: empty input");
  std::vector<std::pair<std::int64_t, Rational>> fin;
  fin.reserve(pts.size());
  for (auto& [i, v] : pts)
    if (v) fin.emplace_back(i, *v);
  std::sort(fin.begin(), fin.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t t = 1; t < fin.size(); ++t)
    if (fin[t].first == fin[t - 1].first) throw std::invalid_argument("newton_polygon: repeated index");

  NewtonPolygon np;
  if (fin.empty()) return np;
  // monotone chain, lower hull; pop on non-left turns so collinear points merge
  std::vector<std::pair<std::int64_t, Rational>> h;
  for (const auto& pt : fin) {
    while (h.size() >= 2) {
      const auto& a = h[h.size() - 2];
      const auto& b = h[h.size() - 1];
      // slope(a,b) >= slope(a,pt)  => b is not strictly below the chord
      Rational s_ab = (b.second - a.second) / Rational(b.first - a.first);
      Rational s_ap = (pt.second - a.second) / Rational(pt.first - a.first);
      if (s_ab >= s_ap) h.pop_back();
      else break;
    }
    h.push_back(pt);
  }
  np.vertices = h;
  for (std::size_t t = 1; t < h.size(); ++t) {
    std::int64_t run = h[t].first - h[t - 1].first;
    np.segments.push_back({(h[t].second - h[t - 1].second) / Rational(run), run});
  }
  return np;
}

}  // namespace katz
