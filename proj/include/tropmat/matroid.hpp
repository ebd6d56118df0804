#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <vector>

#include "tropmat/errors.hpp"
#include "tropmat/linalg.hpp"
#include "tropmat/rational.hpp"
#include "tropmat/util.hpp"

namespace tropmat {

// Ground sets live in {0,..,n} with n <= 19; subsets are bitmasks.
constexpr int kMaxGroundSize = 20;

struct Flat {
  uint32_t elements = 0;
  int rank = 0;
  std::vector<int> element_list() const { return mask_elements(elements); }
  friend bool operator==(const Flat& a, const Flat& b) {
    return a.elements == b.elements;
  }
};

// lexicographic on sorted element lists, rank-graded first
inline bool flat_order(const Flat& a, const Flat& b) {
  if (a.rank != b.rank) return a.rank < b.rank;
  return mask_elements(a.elements) < mask_elements(b.elements);
}

// Strictly increasing chain of proper nonempty flats; indexes Bergman cones.
using FlagChain = std::vector<Flat>;

class Matroid {
 public:
  static Matroid from_bases(int ground_size, std::vector<uint32_t> bases,
                            bool verify_exchange = true) {
    check(ground_size >= 1, errc::empty_ground_set, "ground set must be nonempty");
    check(ground_size <= kMaxGroundSize, errc::out_of_range, "ground set too large");
    check(!bases.empty(), errc::axiom_violation, "basis list is empty");
    std::sort(bases.begin(), bases.end());
    bases.erase(std::unique(bases.begin(), bases.end()), bases.end());
    uint32_t all = full_mask(ground_size);
    int r = popcount(bases[0]);
    for (uint32_t b : bases) {
      check((b & ~all) == 0, errc::out_of_range, "basis uses element outside ground set");
      check(popcount(b) == r, errc::axiom_violation, "bases of unequal cardinality");
    }
    Matroid m(ground_size, std::move(bases));
    if (verify_exchange) m.verify_exchange_axiom();
    return m;
  }

  static Matroid uniform(int r, int m) {
    check(m >= 1, errc::empty_ground_set, "uniform matroid needs a nonempty ground set");
    check(r >= 0 && r <= m, errc::bad_input, "uniform rank out of range");
    std::vector<uint32_t> bases;
    uint32_t all = full_mask(m);
    for (uint32_t s = 0; s <= all; ++s)
      if (popcount(s) == r && (s & ~all) == 0) bases.push_back(s);
    return from_bases(m, std::move(bases), false);
  }

  static Matroid boolean_matroid(int m) { return uniform(m, m); }

  // Elements are the edges, in the given order; multigraphs and self-loops
  // are allowed (a self-loop is a matroid loop).
  static Matroid graphic(const std::vector<std::pair<int, int>>& edges) {
    check(!edges.empty(), errc::empty_ground_set, "graphic matroid needs at least one edge");
    int n_edges = static_cast<int>(edges.size());
    check(n_edges <= kMaxGroundSize, errc::out_of_range, "too many edges");
    int n_vertices = 0;
    for (auto [u, v] : edges) {
      check(u >= 0 && v >= 0, errc::bad_input, "negative vertex id");
      n_vertices = std::max({n_vertices, u + 1, v + 1});
    }
    auto forest_rank = [&](uint32_t subset) {
      std::vector<int> parent(n_vertices);
      std::iota(parent.begin(), parent.end(), 0);
      std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
      };
      int rank = 0;
      for (int e = 0; e < n_edges; ++e) {
        if (!(subset & (1u << e))) continue;
        int a = find(edges[e].first), b = find(edges[e].second);
        if (a != b) { parent[a] = b; ++rank; }
      }
      return rank;
    };
    int r = forest_rank(full_mask(n_edges));
    std::vector<uint32_t> bases;
    for (uint32_t s = 0; s <= full_mask(n_edges); ++s)
      if (popcount(s) == r && forest_rank(s) == r) bases.push_back(s);
    return from_bases(n_edges, std::move(bases), false);
  }

  // Columns of the matrix index the ground set; ranks over Q.
  static Matroid linear(const RatMat& matrix) {
    check(!matrix.empty() && n_cols(matrix) >= 1, errc::empty_ground_set,
          "linear matroid needs at least one column");
    int m = static_cast<int>(n_cols(matrix));
    check(m <= kMaxGroundSize, errc::out_of_range, "too many columns");
    auto col_rank = [&](uint32_t subset) {
      RatMat cols;
      for (int j = 0; j < m; ++j) {
        if (!(subset & (1u << j))) continue;
        RatVec col(n_rows(matrix));
        for (size_t i = 0; i < n_rows(matrix); ++i) col[i] = matrix[i][j];
        cols.push_back(std::move(col));
      }
      return cols.empty() ? size_t(0) : mat_rank(cols);
    };
    size_t r = col_rank(full_mask(m));
    std::vector<uint32_t> bases;
    for (uint32_t s = 0; s <= full_mask(m); ++s)
      if (static_cast<size_t>(popcount(s)) == r && col_rank(s) == r) bases.push_back(s);
    return from_bases(m, std::move(bases), false);
  }

  static Matroid direct_sum(const Matroid& a, const Matroid& b) {
    int gs = a.ground_size_ + b.ground_size_;
    check(gs <= kMaxGroundSize, errc::out_of_range, "direct sum ground set too large");
    std::vector<uint32_t> bases;
    for (uint32_t ba : a.bases_)
      for (uint32_t bb : b.bases_) bases.push_back(ba | (bb << a.ground_size_));
    return from_bases(gs, std::move(bases), false);
  }

  int ground_size() const { return ground_size_; }
  int n() const { return ground_size_ - 1; }
  int rank() const { return popcount(bases_[0]); }
  const std::vector<uint32_t>& bases() const { return bases_; }
  uint32_t ground_mask() const { return full_mask(ground_size_); }

  int rank_of(uint32_t subset) const {
    check((subset & ~ground_mask()) == 0, errc::out_of_range,
          "subset uses element outside ground set");
    int best = 0;
    for (uint32_t b : bases_) best = std::max(best, popcount(subset & b));
    return best;
  }

  uint32_t closure_mask(uint32_t subset) const {
    int r = rank_of(subset);
    uint32_t cl = subset;
    for (int e = 0; e < ground_size_; ++e) {
      uint32_t bit = 1u << e;
      if ((cl & bit) == 0 && rank_of(subset | bit) == r) cl |= bit;
    }
    return cl;
  }

  Flat closure(uint32_t subset) const {
    uint32_t cl = closure_mask(subset);
    return Flat{cl, rank_of(cl)};
  }

  bool is_loop_free() const { return closure_mask(0) == 0; }

  // All flats F with 0 != F != ground set, graded by rank, deterministic
  // order. Pure; callers that need the list repeatedly keep their own copy.
  std::vector<Flat> proper_flats() const {
    check(is_loop_free(), errc::loopy_matroid, "matroid has loops");
    std::map<uint32_t, int> seen;
    for (uint32_t s = 0; s <= ground_mask(); ++s) {
      uint32_t cl = closure_mask(s);
      if (cl != 0 && cl != ground_mask()) seen.emplace(cl, rank_of(cl));
    }
    std::vector<Flat> flats;
    for (auto [mask, r] : seen) flats.push_back(Flat{mask, r});
    std::sort(flats.begin(), flats.end(), flat_order);
    return flats;
  }

  bool is_flat(uint32_t subset) const { return closure_mask(subset) == subset; }

  Matroid deleted(int e) const {
    check_element(e);
    std::vector<uint32_t> kept;
    for (uint32_t b : bases_)
      if (!(b & (1u << e))) kept.push_back(relabel_without(b, e));
    if (kept.empty())  // e is a coloop
      for (uint32_t b : bases_) kept.push_back(relabel_without(b & ~(1u << e), e));
    check(ground_size_ >= 2, errc::empty_ground_set, "cannot delete the last element");
    return from_bases(ground_size_ - 1, std::move(kept), false);
  }

  Matroid contracted(int e) const {
    check_element(e);
    check(rank_of(1u << e) == 1, errc::out_of_range, "cannot contract a loop");
    check(ground_size_ >= 2, errc::empty_ground_set, "cannot contract the last element");
    std::vector<uint32_t> kept;
    for (uint32_t b : bases_)
      if (b & (1u << e)) kept.push_back(relabel_without(b & ~(1u << e), e));
    return from_bases(ground_size_ - 1, std::move(kept), false);
  }

  bool operator==(const Matroid& other) const {
    return ground_size_ == other.ground_size_ && bases_ == other.bases_;
  }

 private:
  Matroid(int ground_size, std::vector<uint32_t> bases)
      : ground_size_(ground_size), bases_(std::move(bases)) {}

  static uint32_t full_mask(int m) { return (m == 32) ? ~0u : ((1u << m) - 1); }

  void check_element(int e) const {
    check(e >= 0 && e < ground_size_, errc::out_of_range, "element outside ground set");
  }

  static uint32_t relabel_without(uint32_t mask, int e) {
    uint32_t low = mask & ((1u << e) - 1);
    uint32_t high = mask >> (e + 1);
    return low | (high << e);
  }

  void verify_exchange_axiom() const {
    for (uint32_t a : bases_) {
      for (uint32_t b : bases_) {
        uint32_t only_a = a & ~b;
        for (int x = 0; x < ground_size_; ++x) {
          if (!(only_a & (1u << x))) continue;
          bool found = false;
          uint32_t only_b = b & ~a;
          for (int y = 0; y < ground_size_ && !found; ++y) {
            if (!(only_b & (1u << y))) continue;
            uint32_t candidate = (a & ~(1u << x)) | (1u << y);
            found = std::binary_search(bases_.begin(), bases_.end(), candidate);
          }
          check(found, errc::axiom_violation, "basis exchange axiom fails");
        }
      }
    }
  }

  int ground_size_;
  std::vector<uint32_t> bases_;
};

}  // namespace tropmat
