#pragma once
// Reference implementations kept deliberately naive. They share no code with
// the library so a bug cannot cancel itself out.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <queue>
#include <set>
#include <utility>
#include <vector>

namespace oracle {

struct Pt {
  double x, y;
};

// W. R. Franklin's crossing test.
inline bool pnpoly(const std::vector<Pt>& v, double x, double y) {
  bool inside = false;
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    if (((v[i].y > y) != (v[j].y > y)) &&
        (x < (v[j].x - v[i].x) * (y - v[i].y) / (v[j].y - v[i].y) + v[i].x)) {
      inside = !inside;
    }
  }
  return inside;
}

inline int pnpoly_count(const std::vector<Pt>& v, int w, int h) {
  int n = 0;
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) n += pnpoly(v, c + 0.5, r + 0.5);
  return n;
}

// Straight from the definition, O(K^4).
inline std::vector<double> dct2(const std::vector<double>& m, int k) {
  const double pi = std::numbers::pi;
  std::vector<double> out(m.size(), 0.0);
  for (int u = 0; u < k; ++u) {
    for (int v = 0; v < k; ++v) {
      double s = 0.0;
      for (int x = 0; x < k; ++x)
        for (int y = 0; y < k; ++y)
          s += m[x * k + y] * std::cos((2 * x + 1) * u * pi / (2.0 * k)) *
               std::cos((2 * y + 1) * v * pi / (2.0 * k));
      const double cu = u == 0 ? 1.0 / std::sqrt(2.0) : 1.0;
      const double cv = v == 0 ? 1.0 / std::sqrt(2.0) : 1.0;
      out[u * k + v] = 2.0 / k * cu * cv * s;
    }
  }
  return out;
}

inline std::vector<double> idct2(const std::vector<double>& s, int k) {
  const double pi = std::numbers::pi;
  std::vector<double> out(s.size(), 0.0);
  for (int x = 0; x < k; ++x) {
    for (int y = 0; y < k; ++y) {
      double acc = 0.0;
      for (int u = 0; u < k; ++u)
        for (int v = 0; v < k; ++v) {
          const double cu = u == 0 ? 1.0 / std::sqrt(2.0) : 1.0;
          const double cv = v == 0 ? 1.0 / std::sqrt(2.0) : 1.0;
          acc += cu * cv * s[u * k + v] *
                 std::cos((2 * x + 1) * u * pi / (2.0 * k)) *
                 std::cos((2 * y + 1) * v * pi / (2.0 * k));
        }
      out[x * k + y] = 2.0 / k * acc;
    }
  }
  return out;
}

// Collect each anti-diagonal by ascending row, flip the even ones.
inline std::vector<std::pair<int, int>> zigzag(int k) {
  std::vector<std::pair<int, int>> out;
  for (int d = 0; d <= 2 * (k - 1); ++d) {
    std::vector<std::pair<int, int>> diag;
    for (int u = 0; u < k; ++u) {
      const int v = d - u;
      if (v >= 0 && v < k) diag.emplace_back(u, v);
    }
    if (d % 2 == 0) std::reverse(diag.begin(), diag.end());
    out.insert(out.end(), diag.begin(), diag.end());
  }
  return out;
}

inline int bfs_components(const std::vector<std::uint8_t>& g, int rows,
                          int cols, bool eight) {
  std::vector<bool> seen(g.size(), false);
  int count = 0;
  for (int start = 0; start < rows * cols; ++start) {
    if (!g[start] || seen[start]) continue;
    ++count;
    std::queue<int> q;
    q.push(start);
    seen[start] = true;
    while (!q.empty()) {
      const int cur = q.front();
      q.pop();
      const int r = cur / cols, c = cur % cols;
      for (int dr = -1; dr <= 1; ++dr)
        for (int dc = -1; dc <= 1; ++dc) {
          if (dr == 0 && dc == 0) continue;
          if (!eight && dr != 0 && dc != 0) continue;
          const int nr = r + dr, nc = c + dc;
          if (nr < 0 || nc < 0 || nr >= rows || nc >= cols) continue;
          const int ni = nr * cols + nc;
          if (g[ni] && !seen[ni]) {
            seen[ni] = true;
            q.push(ni);
          }
        }
    }
  }
  return count;
}

struct Cand {
  double x0, y0, x1, y1;
  double score;
  int cell;
  int kernel;
};

inline double iou(const Cand& a, const Cand& b) {
  const double iw = std::max(0.0, std::min(a.x1, b.x1) - std::max(a.x0, b.x0));
  const double ih = std::max(0.0, std::min(a.y1, b.y1) - std::max(a.y0, b.y0));
  const double inter = iw * ih;
  const double uni =
      (a.x1 - a.x0) * (a.y1 - a.y0) + (b.x1 - b.x0) * (b.y1 - b.y0) - inter;
  return uni > 0 ? inter / uni : 0.0;
}

inline bool better(const Cand& a, const Cand& b) {
  return a.score > b.score || (a.score == b.score && a.cell < b.cell);
}

// Repeatedly take the best remaining box and strike everything it overlaps.
inline std::set<int> nms(const std::vector<Cand>& c, std::set<int> pool,
                         double thr) {
  std::set<int> keep;
  while (!pool.empty()) {
    int best = *pool.begin();
    for (int i : pool)
      if (better(c[i], c[best])) best = i;
    keep.insert(best);
    std::set<int> rest;
    for (int i : pool)
      if (i != best && iou(c[i], c[best]) < thr) rest.insert(i);
    pool = std::move(rest);
  }
  return keep;
}

inline std::set<int> all(const std::vector<Cand>& c) {
  std::set<int> s;
  for (int i = 0; i < static_cast<int>(c.size()); ++i) s.insert(i);
  return s;
}

inline std::set<int> s_nms(const std::vector<Cand>& c, double thr) {
  std::set<int> firsts;
  for (int i = 0; i < static_cast<int>(c.size()); ++i) {
    bool top = true;
    for (int j = 0; j < static_cast<int>(c.size()); ++j)
      if (j != i && c[j].kernel == c[i].kernel && better(c[j], c[i])) top = false;
    if (top) firsts.insert(i);
  }
  return nms(c, firsts, thr);
}

inline std::set<int> k_nms(const std::vector<Cand>& c, double thr) {
  std::set<int> kernels, survivors;
  for (const auto& x : c) kernels.insert(x.kernel);
  for (int k : kernels) {
    std::set<int> members;
    for (int i = 0; i < static_cast<int>(c.size()); ++i)
      if (c[i].kernel == k) members.insert(i);
    for (int i : nms(c, members, thr)) survivors.insert(i);
  }
  return nms(c, survivors, thr);
}

}  // namespace oracle
