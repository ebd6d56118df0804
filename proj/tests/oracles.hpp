#pragma once

// Independent reference computations used to freeze expected values. These
// deliberately avoid the library's own reduction paths: dense linear algebra
// over the full polynomial ring, determinant-based tree counts, permutation
// statistics, and direct cone-pair analysis.

#include <algorithm>
#include <map>
#include <set>
#include <vector>

#include "tropmat/chow.hpp"
#include "tropmat/matroid.hpp"
#include "tropmat/rational.hpp"

namespace oracle {

using tropmat::Int;
using tropmat::Rat;
using tropmat::RatMat;
using tropmat::RatVec;

// Eulerian number <m, k>: permutations of {1..m} with k descents.
inline long eulerian(int m, int k) {
  std::vector<int> perm(m);
  for (int i = 0; i < m; ++i) perm[i] = i;
  long count = 0;
  do {
    int descents = 0;
    for (int i = 0; i + 1 < m; ++i)
      if (perm[i] > perm[i + 1]) ++descents;
    if (descents == k) ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return count;
}

// Spanning tree count by the matrix-tree theorem.
inline Rat spanning_trees(int n_vertices, const std::vector<std::pair<int, int>>& edges) {
  RatMat lap(n_vertices, RatVec(n_vertices, Rat(0)));
  for (auto [u, v] : edges) {
    if (u == v) continue;
    lap[u][u] += 1;
    lap[v][v] += 1;
    lap[u][v] -= 1;
    lap[v][u] -= 1;
  }
  RatMat minor(n_vertices - 1, RatVec(n_vertices - 1));
  for (int i = 1; i < n_vertices; ++i)
    for (int j = 1; j < n_vertices; ++j) minor[i - 1][j - 1] = lap[i][j];
  return tropmat::abs_det(minor);
}

// closure as the largest superset of equal rank (checked unique)
inline uint32_t closure_by_supersets(const tropmat::Matroid& m, uint32_t s) {
  int r = m.rank_of(s);
  uint32_t best = s;
  for (uint32_t t = s; t <= m.ground_mask(); t = (t + 1) | s) {
    if ((t & s) != s) continue;
    if (m.rank_of(t) == r && tropmat::popcount(t) > tropmat::popcount(best)) best = t;
    if (t == m.ground_mask()) break;
  }
  return best;
}

// Dimension of grade k of the Chow ring computed over the full polynomial
// ring: all degree-k monomials in the flat generators modulo the
// incomparability monomials and all multiples of the linear forms.
inline size_t chow_grade_dim_dense(const tropmat::Matroid& m, int k) {
  auto flats = m.proper_flats();
  size_t nf = flats.size();
  // enumerate exponent vectors of total degree k
  std::vector<std::vector<int>> monos;
  std::vector<int> cur(nf, 0);
  std::function<void(size_t, int)> rec = [&](size_t at, int left) {
    if (at == nf) {
      if (left == 0) monos.push_back(cur);
      return;
    }
    for (int e = 0; e <= left; ++e) {
      cur[at] = e;
      rec(at + 1, left - e);
    }
    cur[at] = 0;
  };
  rec(0, k);
  std::map<std::vector<int>, size_t> index;
  for (size_t i = 0; i < monos.size(); ++i) index[monos[i]] = i;

  auto comparable = [&](size_t a, size_t b) {
    uint32_t x = flats[a].elements, y = flats[b].elements;
    return (x & y) == x || (x & y) == y;
  };
  RatMat rows;
  // incomparable monomials are relations themselves
  for (size_t i = 0; i < monos.size(); ++i) {
    bool bad = false;
    for (size_t a = 0; a < nf && !bad; ++a)
      for (size_t b = a + 1; b < nf && !bad; ++b)
        if (monos[i][a] > 0 && monos[i][b] > 0 && !comparable(a, b)) bad = true;
    if (bad) {
      RatVec row(monos.size(), Rat(0));
      row[i] = 1;
      rows.push_back(std::move(row));
    }
  }
  // linear form multiples: (sum_{F ni t} x_F - sum_{F ni 0} x_F) * monomial
  if (k >= 1) {
    std::vector<std::vector<int>> lower;
    std::vector<int> cur2(nf, 0);
    std::function<void(size_t, int)> rec2 = [&](size_t at, int left) {
      if (at == nf) {
        if (left == 0) lower.push_back(cur2);
        return;
      }
      for (int e = 0; e <= left; ++e) {
        cur2[at] = e;
        rec2(at + 1, left - e);
      }
      cur2[at] = 0;
    };
    rec2(0, k - 1);
    for (const auto& mon : lower) {
      for (int t = 1; t < m.ground_size(); ++t) {
        RatVec row(monos.size(), Rat(0));
        for (size_t f = 0; f < nf; ++f) {
          int c = 0;
          if (flats[f].elements & (1u << t)) c += 1;
          if (flats[f].elements & 1u) c -= 1;
          if (c == 0) continue;
          std::vector<int> prod = mon;
          prod[f] += 1;
          row[index.at(prod)] += c;
        }
        if (!tropmat::is_zero(row)) rows.push_back(std::move(row));
      }
    }
  }
  size_t rank = rows.empty() ? 0 : tropmat::mat_rank(rows);
  return monos.size() - rank;
}

// Stable trees with labeled legs, generated independently by inserting one
// leg at a time (on a vertex or subdividing an edge), deduplicated by their
// split systems.
inline std::set<std::vector<uint32_t>> stable_trees(int r) {
  struct Tree {
    // adjacency between internal vertices; legs attached per vertex
    std::vector<std::vector<int>> adj;
    std::vector<std::vector<int>> legs;
  };
  std::vector<Tree> current;
  current.push_back({{{}}, {{0, 1, 2}}});  // the 3-leg star
  for (int leg = 3; leg < r; ++leg) {
    std::vector<Tree> next;
    for (const auto& t : current) {
      for (size_t v = 0; v < t.adj.size(); ++v) {  // attach at a vertex
        Tree u = t;
        u.legs[v].push_back(leg);
        next.push_back(std::move(u));
      }
      for (size_t v = 0; v < t.adj.size(); ++v) {  // subdivide an edge
        for (int w : t.adj[v]) {
          if (w < static_cast<int>(v)) continue;
          Tree u = t;
          int mid = static_cast<int>(u.adj.size());
          u.adj.push_back({});
          u.legs.push_back({leg});
          auto& av = u.adj[v];
          av.erase(std::find(av.begin(), av.end(), w));
          auto& aw = u.adj[w];
          aw.erase(std::find(aw.begin(), aw.end(), static_cast<int>(v)));
          av.push_back(mid);
          aw.push_back(mid);
          u.adj[mid].push_back(static_cast<int>(v));
          u.adj[mid].push_back(w);
          next.push_back(std::move(u));
        }
      }
    }
    current = std::move(next);
  }
  std::set<std::vector<uint32_t>> out;
  for (const auto& t : current) {
    // splits: for each edge, legs on the side away from leg 0
    std::vector<uint32_t> splits;
    size_t nv = t.adj.size();
    for (size_t v = 0; v < nv; ++v) {
      for (int w : t.adj[v]) {
        if (w < static_cast<int>(v)) continue;
        // collect legs reachable from w without the edge (v,w)
        std::vector<bool> seen(nv, false);
        std::vector<int> stack{w};
        seen[w] = true;
        seen[v] = true;
        uint32_t side = 0;
        while (!stack.empty()) {
          int x = stack.back();
          stack.pop_back();
          for (int l : t.legs[x]) side |= 1u << l;
          for (int y : t.adj[x])
            if (!seen[y]) {
              seen[y] = true;
              stack.push_back(y);
            }
        }
        if (side & 1u) side = ((1u << r) - 1) & ~side;
        splits.push_back(side);
      }
    }
    std::sort(splits.begin(), splits.end());
    out.insert(splits);
  }
  return out;
}

}  // namespace oracle
