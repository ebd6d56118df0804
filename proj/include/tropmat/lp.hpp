#pragma once

#include <optional>
#include <vector>

#include "tropmat/linalg.hpp"
#include "tropmat/rational.hpp"

namespace tropmat {

namespace detail_lp {

// Phase-one simplex with Bland's rule; free variables are split into a
// difference of two bounded ones. All arithmetic exact.
inline std::optional<RatVec> phase_one(const RatMat& a_in, const RatVec& b_in,
                                       const std::vector<std::optional<Rat>>& lower) {
  size_t m = n_rows(a_in);
  size_t n = lower.size();
  if (m == 0) {
    RatVec x(n, Rat(0));
    for (size_t j = 0; j < n; ++j)
      if (lower[j]) x[j] = *lower[j];
    return x;
  }
  std::vector<size_t> col_of_pos(n), col_of_neg(n, SIZE_MAX);
  size_t cols = 0;
  for (size_t j = 0; j < n; ++j) {
    col_of_pos[j] = cols++;
    if (!lower[j]) col_of_neg[j] = cols++;
  }
  RatMat tab(m, RatVec(cols + 1, Rat(0)));
  for (size_t i = 0; i < m; ++i) {
    Rat rhs = b_in[i];
    for (size_t j = 0; j < n; ++j) {
      const Rat& c = a_in[i][j];
      if (c == 0) continue;
      tab[i][col_of_pos[j]] += c;
      if (col_of_neg[j] != SIZE_MAX)
        tab[i][col_of_neg[j]] -= c;
      else
        rhs -= c * (*lower[j]);
    }
    tab[i][cols] = rhs;
  }
  for (size_t i = 0; i < m; ++i)
    if (tab[i][cols] < 0)
      for (auto& v : tab[i]) v = -v;

  std::vector<size_t> basis(m);
  for (size_t i = 0; i < m; ++i) basis[i] = cols + i;  // artificials
  RatVec cost(cols + 1, Rat(0));
  for (size_t i = 0; i < m; ++i)
    for (size_t j = 0; j <= cols; ++j)
      if (tab[i][j] != 0) cost[j] -= tab[i][j];

  while (true) {
    size_t enter = cols;
    for (size_t j = 0; j < cols; ++j)
      if (cost[j] < 0) { enter = j; break; }  // Bland: lowest index
    if (enter == cols) break;
    size_t leave = m;
    Rat best;
    for (size_t i = 0; i < m; ++i) {
      if (tab[i][enter] <= 0) continue;
      Rat ratio = tab[i][cols] / tab[i][enter];
      if (leave == m || ratio < best || (ratio == best && basis[i] < basis[leave])) {
        leave = i;
        best = ratio;
      }
    }
    if (leave == m) return std::nullopt;
    Rat piv = tab[leave][enter];
    if (piv != 1)
      for (auto& v : tab[leave]) v /= piv;
    for (size_t i = 0; i < m; ++i) {
      if (i == leave || tab[i][enter] == 0) continue;
      Rat f = tab[i][enter];
      for (size_t j = 0; j <= cols; ++j)
        if (tab[leave][j] != 0) tab[i][j] -= f * tab[leave][j];
    }
    if (cost[enter] != 0) {
      Rat f = cost[enter];
      for (size_t j = 0; j <= cols; ++j)
        if (tab[leave][j] != 0) cost[j] -= f * tab[leave][j];
    }
    basis[leave] = enter;
  }

  for (size_t i = 0; i < m; ++i)
    if (basis[i] >= cols && tab[i][cols] != 0) return std::nullopt;

  RatVec y(cols, Rat(0));
  for (size_t i = 0; i < m; ++i)
    if (basis[i] < cols) y[basis[i]] = tab[i][cols];
  RatVec x(n, Rat(0));
  for (size_t j = 0; j < n; ++j) {
    x[j] = y[col_of_pos[j]];
    if (col_of_neg[j] != SIZE_MAX)
      x[j] -= y[col_of_neg[j]];
    else
      x[j] += *lower[j];
  }
  return x;
}

}  // namespace detail_lp

// Exact feasibility for { x : a x = b, x_i >= lower_i where bounded }.
// Unbounded variables pass std::nullopt. Free variables are eliminated by
// substitution before the simplex runs.
inline std::optional<RatVec> lp_point(RatMat a, RatVec b,
                                      const std::vector<std::optional<Rat>>& lower) {
  size_t n = lower.size();
  struct Elim {
    size_t var;
    RatVec row;  // var = rhs - row . x with row[var] = 0
    Rat rhs;
  };
  std::vector<Elim> eliminated;
  for (size_t j = 0; j < n; ++j) {
    if (lower[j]) continue;
    size_t pr = n_rows(a);
    for (size_t i = 0; i < n_rows(a); ++i)
      if (a[i][j] != 0) { pr = i; break; }
    if (pr == n_rows(a)) continue;
    RatVec row = a[pr];
    Rat rhs = b[pr];
    Rat inv = Rat(1) / row[j];
    if (inv != 1) {
      for (auto& v : row) v *= inv;
      rhs *= inv;
    }
    a.erase(a.begin() + pr);
    b.erase(b.begin() + pr);
    for (size_t i = 0; i < n_rows(a); ++i) {
      if (a[i][j] == 0) continue;
      Rat f = a[i][j];
      for (size_t c = 0; c < n; ++c)
        if (row[c] != 0) a[i][c] -= f * row[c];
      a[i][j] = 0;
      b[i] -= f * rhs;
    }
    row[j] = 0;
    eliminated.push_back({j, std::move(row), std::move(rhs)});
  }
  auto solved = detail_lp::phase_one(a, b, lower);
  if (!solved) return std::nullopt;
  RatVec& x = *solved;
  for (auto it = eliminated.rbegin(); it != eliminated.rend(); ++it) {
    Rat v = it->rhs;
    for (size_t c = 0; c < n; ++c)
      if (it->row[c] != 0 && x[c] != 0) v -= it->row[c] * x[c];
    x[it->var] = v;
  }
  return x;
}

inline bool lp_feasible(const RatMat& a, const RatVec& b,
                        const std::vector<std::optional<Rat>>& lower) {
  return lp_point(a, b, lower).has_value();
}

// Convenience builder for equality systems assembled incrementally.
struct LinearSystem {
  size_t vars = 0;
  RatMat a;
  RatVec b;
  std::vector<std::optional<Rat>> lower;

  explicit LinearSystem(size_t n) : vars(n), lower(n, std::nullopt) {}

  size_t add_var(std::optional<Rat> lo = std::nullopt) {
    lower.push_back(lo);
    for (auto& row : a) row.push_back(Rat(0));
    return vars++;
  }
  void set_lower(size_t j, Rat lo) { lower[j] = lo; }
  // add equation: sum coeff_i * x_{idx_i} = rhs
  void add_eq(const std::vector<std::pair<size_t, Rat>>& terms, Rat rhs) {
    RatVec row(vars, Rat(0));
    for (const auto& [j, c] : terms) row[j] += c;
    a.push_back(std::move(row));
    b.push_back(std::move(rhs));
  }
  void add_eq_row(RatVec row, Rat rhs) {
    row.resize(vars, Rat(0));
    a.push_back(std::move(row));
    b.push_back(std::move(rhs));
  }
  std::optional<RatVec> point() const { return lp_point(a, b, lower); }
  bool feasible() const { return lp_point(a, b, lower).has_value(); }
};

}  // namespace tropmat
