#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "tropmat/errors.hpp"
#include "tropmat/linalg.hpp"
#include "tropmat/matroid.hpp"
#include "tropmat/rational.hpp"

namespace tropmat {

// Feichtner-Yuzvinsky Chow ring of a loop-free matroid, presented on the
// generators x_F for proper nonempty flats F with the incomparability and
// linear relations. Graded pieces are computed by exact linear algebra over
// Q per degree: chain-supported monomials modulo relation multiples.

// Monomial supported on a chain of flats, exponents >= 1. Flat ids index the
// owning ring's flat list; ids strictly increase along the chain.
struct ChainMono {
  std::vector<int> flats;
  std::vector<int> exps;

  int degree() const {
    int d = 0;
    for (int e : exps) d += e;
    return d;
  }
  friend bool operator<(const ChainMono& a, const ChainMono& b) {
    return std::tie(a.flats, a.exps) < std::tie(b.flats, b.exps);
  }
  friend bool operator==(const ChainMono& a, const ChainMono& b) {
    return a.flats == b.flats && a.exps == b.exps;
  }
};

// FY basis monomial: chain of nonempty flats, the full ground set allowed as
// the top element.
struct FYMonomial {
  std::vector<Flat> chain;
  std::vector<int> exps;
  int degree() const {
    int d = 0;
    for (int e : exps) d += e;
    return d;
  }
};

class ChowRing;

class ChowClass {
 public:
  ChowClass() = default;
  ChowClass(const ChowRing* ring, int grade, RatVec coords)
      : ring_(ring), grade_(grade), coords_(std::move(coords)) {}

  int grade() const { return grade_; }
  const RatVec& coords() const { return coords_; }
  const ChowRing* ring() const { return ring_; }
  bool is_zero() const { return tropmat::is_zero(coords_); }

  // Zero classes act as the zero of every grade.
  friend ChowClass operator+(const ChowClass& a, const ChowClass& b) {
    if (a.grade_ != b.grade_) {
      if (a.is_zero()) return b;
      if (b.is_zero()) return a;
    }
    a.require_compatible(b);
    return ChowClass(a.ring_, a.grade_, add(a.coords_, b.coords_));
  }
  friend ChowClass operator-(const ChowClass& a, const ChowClass& b) {
    return a + Rat(-1) * b;
  }
  friend ChowClass operator*(const Rat& c, const ChowClass& a) {
    return ChowClass(a.ring_, a.grade_, scale(c, a.coords_));
  }
  friend ChowClass operator*(const ChowClass& a, const ChowClass& b);
  friend bool operator==(const ChowClass& a, const ChowClass& b) {
    if (a.grade_ != b.grade_) return a.is_zero() && b.is_zero();
    a.require_compatible(b);
    return a.coords_ == b.coords_;
  }

 private:
  void require_compatible(const ChowClass& b) const {
    check(ring_ == b.ring_, errc::matroid_mismatch, "classes from different rings");
    check(grade_ == b.grade_, errc::wrong_grade, "classes of different grades");
  }

  const ChowRing* ring_ = nullptr;
  int grade_ = 0;
  RatVec coords_;
};

class ChowRing {
 public:
  explicit ChowRing(Matroid m) : matroid_(std::move(m)) {
    check(matroid_.is_loop_free(), errc::loopy_matroid, "Chow ring needs a loop-free matroid");
    flats_ = matroid_.proper_flats();
    int nf = static_cast<int>(flats_.size());
    below_.assign(nf, std::vector<bool>(nf, false));
    for (int i = 0; i < nf; ++i)
      for (int j = 0; j < nf; ++j)
        below_[i][j] = i != j && (flats_[i].elements & ~flats_[j].elements) == 0;
    grades_.resize(top_grade() + 1);
    mult_.resize(top_grade() + 1);
  }

  const Matroid& matroid() const { return matroid_; }
  const std::vector<Flat>& flats() const { return flats_; }
  int top_grade() const { return matroid_.rank() - 1; }

  size_t dim(int k) const {
    if (k < 0 || k > top_grade()) return 0;
    return grade(k).basis.size();
  }

  ChowClass zero(int k) const { return ChowClass(this, k, RatVec(dim(k), Rat(0))); }
  ChowClass one() const { return basis_element(0, 0); }

  ChowClass basis_element(int k, size_t idx) const {
    check(k >= 0 && k <= top_grade(), errc::grade_out_of_range, "grade out of range");
    check(idx < dim(k), errc::out_of_range, "basis index out of range");
    RatVec c(dim(k), Rat(0));
    c[idx] = 1;
    return ChowClass(this, k, c);
  }

  const ChainMono& basis_monomial(int k, size_t idx) const { return grade(k).monos[grade(k).basis[idx]]; }

  int flat_id(uint32_t mask) const {
    for (size_t i = 0; i < flats_.size(); ++i)
      if (flats_[i].elements == mask) return static_cast<int>(i);
    fail(errc::out_of_range, "not a proper nonempty flat of the matroid");
  }

  // x_F
  ChowClass generator(uint32_t flat_mask) const {
    int id = flat_id(flat_mask);
    ChainMono m{{id}, {1}};
    return class_of_chain(m);
  }

  ChowClass class_of_chain(const ChainMono& m) const {
    int k = m.degree();
    if (k > top_grade()) return zero(k);
    const GradeData& g = grade(k);
    auto it = g.index.find(m);
    check(it != g.index.end(), errc::bad_input, "not a chain monomial of this ring");
    return ChowClass(this, k, g.reduction[it->second]);
  }

  // Monomial on arbitrary proper flats; incomparable pairs give zero.
  ChowClass from_monomial(const std::vector<uint32_t>& flat_masks,
                          const std::vector<int>& exps) const {
    check(flat_masks.size() == exps.size(), errc::bad_input, "flats/exponents mismatch");
    ChowClass acc = one();
    for (size_t i = 0; i < flat_masks.size(); ++i) {
      check(exps[i] >= 0, errc::bad_input, "negative exponent");
      for (int t = 0; t < exps[i]; ++t) acc = multiply_by_generator(acc, flat_id(flat_masks[i]));
    }
    return acc;
  }

  // The class of an FY monomial; x_E is eliminated through the linear
  // relation sum_{F ni 0} x_F + x_E = 0.
  ChowClass class_of_fy_monomial(const FYMonomial& m) const {
    ChowClass acc = one();
    for (size_t i = 0; i < m.chain.size(); ++i) {
      for (int t = 0; t < m.exps[i]; ++t) {
        if (m.chain[i].elements == matroid_.ground_mask()) {
          ChowClass next = zero(acc.grade() + 1);
          for (size_t f = 0; f < flats_.size(); ++f)
            if (flats_[f].elements & 1u)
              next = next + Rat(-1) * multiply_by_generator(acc, static_cast<int>(f));
          acc = next;
        } else {
          acc = multiply_by_generator(acc, flat_id(m.chain[i].elements));
        }
      }
    }
    return acc;
  }

  ChowClass multiply_by_generator(const ChowClass& a, int flat) const {
    check(a.ring() == this, errc::matroid_mismatch, "class from another ring");
    int k = a.grade();
    if (k + 1 > top_grade()) return zero(k + 1);
    const auto& table = mult_table(k, flat);
    RatVec out(dim(k + 1), Rat(0));
    for (size_t j = 0; j < a.coords().size(); ++j) {
      if (a.coords()[j] == 0) continue;
      for (size_t c = 0; c < out.size(); ++c)
        if (table[j][c] != 0) out[c] += a.coords()[j] * table[j][c];
    }
    return ChowClass(this, k + 1, std::move(out));
  }

  // The (combinatorial) Feichtner-Yuzvinsky monomial basis of A^k: chains of
  // nonempty flats with the ground set allowed on top, exponents bounded by
  // m_i <= rank(F_i) - rank(F_{i-1}) - 1 with F_0 the empty flat.
  std::vector<FYMonomial> fy_basis(int k) const {
    check(k >= 0 && k <= top_grade(), errc::grade_out_of_range, "grade out of range");
    std::vector<Flat> pool = flats_;
    pool.push_back(Flat{matroid_.ground_mask(), matroid_.rank()});
    std::vector<FYMonomial> out;
    FYMonomial cur;
    enum_fy(pool, 0, 0, k, cur, out);
    return out;
  }

  // Degree map on the top grade, normalized so every complete flag monomial
  // x_{F_1} ... x_{F_d} has degree 1.
  Rat degree(const ChowClass& a) const {
    check(a.ring() == this, errc::matroid_mismatch, "class from another ring");
    check(a.grade() == top_grade(), errc::wrong_grade, "degree needs a top-grade class");
    check(dim(top_grade()) == 1, errc::wrong_grade, "top grade is not one dimensional");
    if (flag_value_ == 0) {
      // first complete flag in flat order
      ChowClass m = one();
      int prev = -1;
      for (int r = 1; r <= top_grade(); ++r) {
        int pick = -1;
        for (size_t f = 0; f < flats_.size(); ++f) {
          if (flats_[f].rank != r) continue;
          if (prev >= 0 && !below_[prev][f]) continue;
          pick = static_cast<int>(f);
          break;
        }
        check(pick >= 0, errc::wrong_grade, "no complete flag of proper flats");
        m = multiply_by_generator(m, pick);
        prev = pick;
      }
      check(!m.is_zero(), errc::wrong_grade, "flag monomial vanishes");
      flag_value_ = m.coords()[0];
    }
    return a.coords()[0] / flag_value_;
  }

 private:
  struct GradeData {
    std::vector<ChainMono> monos;          // canonical order
    std::map<ChainMono, size_t> index;
    std::vector<size_t> basis;             // mono indices forming the basis
    std::vector<RatVec> reduction;         // mono -> coordinates in basis
  };

  bool comparable(int f, int g) const { return f == g || below_[f][g] || below_[g][f]; }

  void enum_chain_monos(int start, int remaining, ChainMono& cur,
                        std::vector<ChainMono>& out) const {
    if (remaining == 0) {
      out.push_back(cur);
      return;
    }
    for (int f = start; f < static_cast<int>(flats_.size()); ++f) {
      if (!cur.flats.empty() && !below_[cur.flats.back()][f]) continue;
      for (int e = 1; e <= remaining; ++e) {
        cur.flats.push_back(f);
        cur.exps.push_back(e);
        enum_chain_monos(f + 1, remaining - e, cur, out);
        cur.flats.pop_back();
        cur.exps.pop_back();
      }
    }
  }

  void enum_fy(const std::vector<Flat>& pool, int start, int prev_rank, int remaining,
               FYMonomial& cur, std::vector<FYMonomial>& out) const {
    if (remaining == 0) {
      out.push_back(cur);
      return;
    }
    for (int f = start; f < static_cast<int>(pool.size()); ++f) {
      if (!cur.chain.empty() &&
          (cur.chain.back().elements & ~pool[f].elements) != 0)
        continue;
      if (!cur.chain.empty() && cur.chain.back().elements == pool[f].elements) continue;
      int bound = pool[f].rank - prev_rank - 1;
      for (int e = 1; e <= std::min(bound, remaining); ++e) {
        cur.chain.push_back(pool[f]);
        cur.exps.push_back(e);
        enum_fy(pool, f + 1, pool[f].rank, remaining - e, cur, out);
        cur.chain.pop_back();
        cur.exps.pop_back();
      }
    }
  }

  // m * x_f as a chain monomial, or nullopt when incomparable.
  std::optional<ChainMono> mono_times_gen(const ChainMono& m, int f) const {
    for (int g : m.flats)
      if (!comparable(f, g)) return std::nullopt;
    ChainMono out = m;
    size_t pos = 0;
    while (pos < out.flats.size() && below_[out.flats[pos]][f]) ++pos;
    if (pos < out.flats.size() && out.flats[pos] == f) {
      out.exps[pos] += 1;
    } else {
      out.flats.insert(out.flats.begin() + pos, f);
      out.exps.insert(out.exps.begin() + pos, 1);
    }
    return out;
  }

  const GradeData& grade(int k) const {
    check(k >= 0 && k <= top_grade(), errc::grade_out_of_range, "grade out of range");
    if (grades_[k]) return *grades_[k];
    GradeData g;
    ChainMono cur;
    enum_chain_monos(0, k, cur, g.monos);
    std::sort(g.monos.begin(), g.monos.end());
    for (size_t i = 0; i < g.monos.size(); ++i) g.index.emplace(g.monos[i], i);

    // relation rows: (sum_{F ni i} x_F - sum_{F ni 0} x_F) * m over chain
    // monomials m of degree k-1 and i = 1..n
    std::map<size_t, std::map<size_t, Rat>> pivots;  // leading col -> row
    auto reduce_row = [&](std::map<size_t, Rat> row) {
      while (!row.empty()) {
        size_t lead = row.begin()->first;
        auto p = pivots.find(lead);
        if (p == pivots.end()) return row;
        Rat f = row.begin()->second;
        for (const auto& [c, v] : p->second) {
          auto it = row.find(c);
          Rat nv = (it == row.end() ? Rat(0) : it->second) - f * v;
          if (nv == 0) {
            if (it != row.end()) row.erase(it);
          } else {
            row[c] = nv;
          }
        }
      }
      return row;
    };
    if (k >= 1) {
      std::vector<ChainMono> lower;
      ChainMono c2;
      enum_chain_monos(0, k - 1, c2, lower);
      std::sort(lower.begin(), lower.end());
      for (const auto& m : lower) {
        for (int i = 1; i < matroid_.ground_size(); ++i) {
          std::map<size_t, Rat> row;
          auto accumulate = [&](int elem, const Rat& sign) {
            for (size_t f = 0; f < flats_.size(); ++f) {
              if (!(flats_[f].elements & (1u << elem))) continue;
              auto prod = mono_times_gen(m, static_cast<int>(f));
              if (!prod) continue;
              size_t col = g.index.at(*prod);
              Rat nv = row.count(col) ? row[col] + sign : sign;
              if (nv == 0)
                row.erase(col);
              else
                row[col] = nv;
            }
          };
          accumulate(i, Rat(1));
          accumulate(0, Rat(-1));
          auto reduced = reduce_row(std::move(row));
          if (reduced.empty()) continue;
          size_t lead = reduced.begin()->first;
          Rat inv = Rat(1) / reduced.begin()->second;
          for (auto& [c, v] : reduced) v *= inv;
          pivots.emplace(lead, std::move(reduced));
        }
      }
      // full back-substitution, descending pivot columns
      for (auto it = pivots.rbegin(); it != pivots.rend(); ++it) {
        auto& row = it->second;
        bool changed = true;
        while (changed) {
          changed = false;
          for (const auto& [c, v] : row) {
            if (c == it->first) continue;
            auto p = pivots.find(c);
            if (p == pivots.end()) continue;
            Rat f = v;
            for (const auto& [c2_, v2] : p->second) {
              Rat nv = (row.count(c2_) ? row[c2_] : Rat(0)) - f * v2;
              if (nv == 0)
                row.erase(c2_);
              else
                row[c2_] = nv;
            }
            changed = true;
            break;
          }
        }
      }
    }
    std::vector<bool> is_pivot(g.monos.size(), false);
    for (const auto& [c, row] : pivots) is_pivot[c] = true;
    std::map<size_t, size_t> basis_pos;
    for (size_t c = 0; c < g.monos.size(); ++c)
      if (!is_pivot[c]) {
        basis_pos[c] = g.basis.size();
        g.basis.push_back(c);
      }
    g.reduction.assign(g.monos.size(), RatVec(g.basis.size(), Rat(0)));
    for (size_t c = 0; c < g.monos.size(); ++c) {
      if (!is_pivot[c]) {
        g.reduction[c][basis_pos[c]] = 1;
      } else {
        for (const auto& [c2_, v] : pivots.at(c)) {
          if (c2_ == c) continue;
          g.reduction[c][basis_pos.at(c2_)] = -v;
        }
      }
    }
    grades_[k] = std::move(g);
    return *grades_[k];
  }

  // table[j] = coordinates of basis_mono_j * x_flat in grade k+1
  const std::vector<RatVec>& mult_table(int k, int flat) const {
    auto& slot = mult_[k];
    auto it = slot.find(flat);
    if (it != slot.end()) return it->second;
    const GradeData& g = grade(k);
    const GradeData& h = grade(k + 1);
    std::vector<RatVec> table(g.basis.size(), RatVec(h.basis.size(), Rat(0)));
    for (size_t j = 0; j < g.basis.size(); ++j) {
      auto prod = mono_times_gen(g.monos[g.basis[j]], flat);
      if (!prod) continue;
      table[j] = h.reduction[h.index.at(*prod)];
    }
    return slot.emplace(flat, std::move(table)).first->second;
  }

  Matroid matroid_;
  std::vector<Flat> flats_;
  std::vector<std::vector<bool>> below_;  // strict containment
  mutable std::vector<std::optional<GradeData>> grades_;
  mutable std::vector<std::map<int, std::vector<RatVec>>> mult_;
  mutable Rat flag_value_ = Rat(0);
};

inline ChowClass operator*(const ChowClass& a, const ChowClass& b) {
  check(a.ring() == b.ring() && a.ring() != nullptr, errc::matroid_mismatch,
        "classes from different rings");
  const ChowRing& ring = *a.ring();
  int k = a.grade() + b.grade();
  if (k > ring.top_grade()) return ring.zero(k);
  ChowClass out = ring.zero(k);
  for (size_t j = 0; j < b.coords().size(); ++j) {
    if (b.coords()[j] == 0) continue;
    const ChainMono& m = ring.basis_monomial(b.grade(), j);
    ChowClass term = a;
    for (size_t t = 0; t < m.flats.size(); ++t)
      for (int e = 0; e < m.exps[t]; ++e)
        term = ring.multiply_by_generator(term, m.flats[t]);
    out = out + b.coords()[j] * term;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Curve classes: A_1(M) inside A_1(X(Delta_n)) = Z^{rays}.

// all proper nonempty subsets of {0..n}, in flat order (size, then lex)
inline std::vector<uint32_t> permutohedral_ray_masks(int n) {
  std::vector<uint32_t> rays;
  uint32_t all = (1u << (n + 1)) - 1;
  for (uint32_t s = 1; s < all; ++s) rays.push_back(s);
  std::sort(rays.begin(), rays.end(), [](uint32_t a, uint32_t b) {
    int pa = popcount(a), pb = popcount(b);
    if (pa != pb) return pa < pb;
    return mask_elements(a) < mask_elements(b);
  });
  return rays;
}

struct CurveClassLattice {
  std::vector<uint32_t> rays;  // canonical ray order of Delta_n
  IntMat kernel_generators;    // rows spanning ker(A^1(X) -> A^1(U)) lifted to Z^rays
  IntMat basis;                // rows: an integer basis of A_1(M)

  size_t rank() const { return basis.size(); }

  bool contains(const IntVec& beta) const {
    if (beta.size() != rays.size()) return false;
    for (const auto& row : kernel_generators) {
      Int dot = 0;
      for (size_t i = 0; i < row.size(); ++i) dot += row[i] * beta[i];
      if (dot != 0) return false;
    }
    return true;
  }
};

// A_1(M): curve classes beta with gamma . beta = 0 for every gamma in the
// kernel of the restriction A^1(X(Delta_n)) -> A^1(X(Delta_M)). The kernel is
// spanned by the character relations together with the rays absent from
// Delta_M; A_1(M) is the integer kernel of that stack of pairings.
inline CurveClassLattice curve_class_lattice(const Matroid& m) {
  check(m.is_loop_free(), errc::loopy_matroid, "curve lattice needs a loop-free matroid");
  int n = m.n();
  CurveClassLattice out;
  out.rays = permutohedral_ray_masks(n);
  size_t nr = out.rays.size();
  // character relations: for t < n the row [t in S] - [n in S]
  for (int t = 0; t < n; ++t) {
    IntVec row(nr, Int(0));
    for (size_t j = 0; j < nr; ++j) {
      int v = 0;
      if (out.rays[j] & (1u << t)) v += 1;
      if (out.rays[j] & (1u << n)) v -= 1;
      row[j] = v;
    }
    out.kernel_generators.push_back(std::move(row));
  }
  // rays outside the Bergman fan
  for (size_t j = 0; j < nr; ++j) {
    if (m.is_flat(out.rays[j])) continue;
    IntVec row(nr, Int(0));
    row[j] = 1;
    out.kernel_generators.push_back(std::move(row));
  }
  out.basis = int_kernel(out.kernel_generators);
  return out;
}

}  // namespace tropmat
