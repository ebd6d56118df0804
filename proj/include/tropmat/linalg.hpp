#pragma once

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

#include "tropmat/errors.hpp"
#include "tropmat/rational.hpp"

namespace tropmat {

// Matrices are stored as vectors of rows. Row vectors act on the left of
// nothing in particular; lattices are given by generator rows throughout.

using RatMat = std::vector<RatVec>;
using IntMat = std::vector<IntVec>;

inline size_t n_rows(const RatMat& a) { return a.size(); }
inline size_t n_cols(const RatMat& a) { return a.empty() ? 0 : a[0].size(); }
inline size_t n_rows(const IntMat& a) { return a.size(); }
inline size_t n_cols(const IntMat& a) { return a.empty() ? 0 : a[0].size(); }

inline RatMat to_rat(const IntMat& a) {
  RatMat out;
  out.reserve(a.size());
  for (const auto& r : a) out.push_back(to_rat(r));
  return out;
}

inline RatMat rat_identity(size_t n) {
  RatMat id(n, RatVec(n, Rat(0)));
  for (size_t i = 0; i < n; ++i) id[i][i] = 1;
  return id;
}

inline IntMat int_identity(size_t n) {
  IntMat id(n, IntVec(n, Int(0)));
  for (size_t i = 0; i < n; ++i) id[i][i] = 1;
  return id;
}

inline RatVec mat_vec(const RatMat& a, const RatVec& x) {
  RatVec out(n_rows(a), Rat(0));
  for (size_t i = 0; i < n_rows(a); ++i)
    for (size_t j = 0; j < x.size(); ++j)
      if (a[i][j] != 0 && x[j] != 0) out[i] += a[i][j] * x[j];
  return out;
}

inline RatVec vec_mat(const RatVec& x, const RatMat& a) {
  RatVec out(n_cols(a), Rat(0));
  for (size_t i = 0; i < n_rows(a); ++i)
    if (x[i] != 0)
      for (size_t j = 0; j < n_cols(a); ++j)
        if (a[i][j] != 0) out[j] += x[i] * a[i][j];
  return out;
}

inline RatMat mat_mul(const RatMat& a, const RatMat& b) {
  RatMat out(n_rows(a), RatVec(n_cols(b), Rat(0)));
  for (size_t i = 0; i < n_rows(a); ++i)
    for (size_t k = 0; k < n_cols(a); ++k)
      if (a[i][k] != 0)
        for (size_t j = 0; j < n_cols(b); ++j)
          if (b[k][j] != 0) out[i][j] += a[i][k] * b[k][j];
  return out;
}

inline RatMat transpose(const RatMat& a) {
  RatMat out(n_cols(a), RatVec(n_rows(a), Rat(0)));
  for (size_t i = 0; i < n_rows(a); ++i)
    for (size_t j = 0; j < n_cols(a); ++j) out[j][i] = a[i][j];
  return out;
}

inline IntMat transpose(const IntMat& a) {
  IntMat out(n_cols(a), IntVec(n_rows(a), Int(0)));
  for (size_t i = 0; i < n_rows(a); ++i)
    for (size_t j = 0; j < n_cols(a); ++j) out[j][i] = a[i][j];
  return out;
}

// In-place reduced row echelon form. Returns the pivot column of each pivot
// row; rows below the last pivot are zero.
inline std::vector<size_t> rref(RatMat& a) {
  std::vector<size_t> pivots;
  size_t rows = n_rows(a), cols = n_cols(a);
  size_t r = 0;
  for (size_t c = 0; c < cols && r < rows; ++c) {
    size_t sel = rows;
    for (size_t i = r; i < rows; ++i)
      if (a[i][c] != 0) { sel = i; break; }
    if (sel == rows) continue;
    std::swap(a[r], a[sel]);
    Rat inv = Rat(1) / a[r][c];
    for (size_t j = c; j < cols; ++j) a[r][j] *= inv;
    for (size_t i = 0; i < rows; ++i) {
      if (i == r || a[i][c] == 0) continue;
      Rat f = a[i][c];
      for (size_t j = c; j < cols; ++j) a[i][j] -= f * a[r][j];
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

inline size_t mat_rank(RatMat a) { return rref(a).size(); }

inline size_t mat_rank(const IntMat& a) { return mat_rank(to_rat(a)); }

// Basis of {x : a x = 0}, returned as rows.
inline RatMat nullspace(RatMat a) {
  size_t cols = n_cols(a);
  auto pivots = rref(a);
  std::vector<bool> is_pivot(cols, false);
  for (size_t c : pivots) is_pivot[c] = true;
  RatMat basis;
  for (size_t c = 0; c < cols; ++c) {
    if (is_pivot[c]) continue;
    RatVec v(cols, Rat(0));
    v[c] = 1;
    for (size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = -a[i][c];
    basis.push_back(std::move(v));
  }
  return basis;
}

// One solution of a x = b, if any.
inline std::optional<RatVec> solve(const RatMat& a, const RatVec& b) {
  size_t rows = n_rows(a), cols = n_cols(a);
  RatMat aug(rows, RatVec(cols + 1));
  for (size_t i = 0; i < rows; ++i) {
    std::copy(a[i].begin(), a[i].end(), aug[i].begin());
    aug[i][cols] = b[i];
  }
  auto pivots = rref(aug);
  if (!pivots.empty() && pivots.back() == cols) return std::nullopt;
  RatVec x(cols, Rat(0));
  for (size_t i = 0; i < pivots.size(); ++i) x[pivots[i]] = aug[i][cols];
  return x;
}

// Is v in the row span of a?
inline bool in_row_span(const RatMat& a, const RatVec& v) {
  if (a.empty()) return is_zero(v);
  return solve(transpose(a), v).has_value();
}

// ---------------------------------------------------------------------------
// Smith normal form

struct Smith {
  IntVec diag;   // elementary divisors, nonnegative, divisibility chain
  IntMat u;      // unimodular, u * a * v = diag
  IntMat v;
  IntMat v_inv;  // maintained so lattice completions avoid a matrix inverse
};

inline Smith smith_normal_form(IntMat a) {
  size_t rows = n_rows(a), cols = n_cols(a);
  Smith s;
  s.u = int_identity(rows);
  s.v = int_identity(cols);
  s.v_inv = int_identity(cols);

  auto swap_rows = [&](size_t i, size_t j) {
    std::swap(a[i], a[j]);
    std::swap(s.u[i], s.u[j]);
  };
  auto swap_cols = [&](size_t i, size_t j) {
    for (auto& row : a) std::swap(row[i], row[j]);
    for (auto& row : s.v) std::swap(row[i], row[j]);
    std::swap(s.v_inv[i], s.v_inv[j]);
  };
  auto add_row = [&](size_t dst, size_t src, const Int& f) {  // row dst += f * row src
    for (size_t j = 0; j < cols; ++j) a[dst][j] += f * a[src][j];
    for (size_t j = 0; j < rows; ++j) s.u[dst][j] += f * s.u[src][j];
  };
  auto add_col = [&](size_t dst, size_t src, const Int& f) {  // col dst += f * col src
    for (size_t i = 0; i < rows; ++i) a[i][dst] += f * a[i][src];
    for (size_t i = 0; i < cols; ++i) s.v[i][dst] += f * s.v[i][src];
    // v_inv tracks the inverse: row src -= f * row dst
    for (size_t j = 0; j < cols; ++j) s.v_inv[src][j] -= f * s.v_inv[dst][j];
  };
  auto negate_row = [&](size_t i) {
    for (auto& x : a[i]) x = -x;
    for (auto& x : s.u[i]) x = -x;
  };

  size_t t = 0;
  while (t < rows && t < cols) {
    // pick the smallest nonzero entry as pivot to limit growth
    size_t pi = rows, pj = cols;
    for (size_t i = t; i < rows; ++i)
      for (size_t j = t; j < cols; ++j)
        if (a[i][j] != 0 && (pi == rows || abs_int(a[i][j]) < abs_int(a[pi][pj]))) {
          pi = i;
          pj = j;
        }
    if (pi == rows) break;
    swap_rows(t, pi);
    swap_cols(t, pj);
    bool again = true;
    while (again) {
      again = false;
      for (size_t i = t + 1; i < rows; ++i) {
        if (a[i][t] == 0) continue;
        Int q = a[i][t] / a[t][t];
        add_row(i, t, -q);
        if (a[i][t] != 0) {  // remainder became the smaller pivot
          swap_rows(t, i);
          again = true;
        }
      }
      for (size_t j = t + 1; j < cols; ++j) {
        if (a[t][j] == 0) continue;
        Int q = a[t][j] / a[t][t];
        add_col(j, t, -q);
        if (a[t][j] != 0) {
          swap_cols(t, j);
          again = true;
        }
      }
    }
    if (a[t][t] < 0) negate_row(t);
    ++t;
  }
  // enforce the divisibility chain
  for (size_t i = 0; i + 1 < t; ++i) {
    for (size_t j = i + 1; j < t; ++j) {
      if (a[j][j] % a[i][i] == 0) continue;
      add_col(i, j, Int(1));
      // re-clear the 2x2 block with euclidean steps
      while (a[j][i] != 0 || a[i][j] != 0) {
        if (a[i][i] != 0 && a[j][i] != 0) {
          Int q = a[j][i] / a[i][i];
          add_row(j, i, -q);
          if (a[j][i] != 0) swap_rows(i, j);
        } else if (a[i][j] != 0) {
          Int q = a[i][j] / (a[i][i] != 0 ? a[i][i] : a[i][j]);
          if (a[i][i] == 0) { swap_cols(i, j); continue; }
          add_col(j, i, -q);
          if (a[i][j] != 0) swap_cols(i, j);
        }
      }
      if (a[i][i] < 0) negate_row(i);
      if (a[j][j] < 0) negate_row(j);
      j = i;  // re-check the chain from this position
    }
  }
  s.diag.assign(std::min(rows, cols), Int(0));
  for (size_t i = 0; i < s.diag.size(); ++i) s.diag[i] = a[i][i];
  return s;
}

// Basis of the (saturated) lattice {x in Z^n : a x = 0}.
inline IntMat int_kernel(const IntMat& a) {
  if (a.empty()) return int_identity(0);
  size_t cols = n_cols(a);
  Smith s = smith_normal_form(a);
  IntMat basis;
  for (size_t j = 0; j < cols; ++j) {
    bool zero_col = j >= s.diag.size() || s.diag[j] == 0;
    if (!zero_col) continue;
    IntVec v(cols);
    for (size_t i = 0; i < cols; ++i) v[i] = s.v[i][j];  // column j of v
    basis.push_back(std::move(v));
  }
  return basis;
}

// Basis (rows) of Z^n intersected with the rational row span of `span_rows`.
inline IntMat saturated_basis(const IntMat& span_rows, size_t ambient_dim) {
  if (span_rows.empty()) return {};
  RatMat eqs = nullspace(to_rat(span_rows));  // annihilator of the span
  IntMat int_eqs;
  for (const auto& row : eqs) int_eqs.push_back(to_primitive_int(row));
  if (int_eqs.empty()) return int_identity(ambient_dim);
  return int_kernel(int_eqs);
}

// Index [Z^n : L] of the lattice generated by `rows`; 0 when rank < n.
inline Int lattice_index_full(const IntMat& rows, size_t ambient_dim) {
  if (n_rows(rows) < ambient_dim) return 0;
  Smith s = smith_normal_form(rows);
  Int idx = 1;
  size_t nonzero = 0;
  for (const auto& d : s.diag)
    if (d != 0) { idx *= d; ++nonzero; }
  if (nonzero < ambient_dim) return 0;
  return idx;
}

// Integer coordinates of v in the basis `basis` (rows); nullopt if v is not
// in the generated lattice.
inline std::optional<IntVec> lattice_coords(const IntMat& basis, const IntVec& v) {
  if (basis.empty()) return is_zero(v) ? std::optional<IntVec>(IntVec{}) : std::nullopt;
  auto sol = solve(transpose(to_rat(basis)), to_rat(v));
  if (!sol) return std::nullopt;
  IntVec out(sol->size());
  for (size_t i = 0; i < sol->size(); ++i) {
    if (rat_den((*sol)[i]) != 1) return std::nullopt;
    out[i] = rat_num((*sol)[i]);
  }
  return out;
}

// Lattice of the intersection of two saturated spans.
inline IntMat saturated_intersection(const IntMat& sat_a, const IntMat& sat_b,
                                     size_t ambient_dim) {
  RatMat eq_a = nullspace(to_rat(sat_a));
  RatMat eq_b = nullspace(to_rat(sat_b));
  IntMat eqs;
  for (const auto& r : eq_a) eqs.push_back(to_primitive_int(r));
  for (const auto& r : eq_b) eqs.push_back(to_primitive_int(r));
  if (eqs.empty()) return int_identity(ambient_dim);
  return int_kernel(eqs);
}

// Functionals identifying Z^dim / sat_lattice with Z^{dim - rank}; rows act
// on column coordinates. Requires the input lattice to be saturated.
inline RatMat quotient_projection(const IntMat& sat_lattice, size_t dim) {
  if (sat_lattice.empty()) return rat_identity(dim);
  Smith s = smith_normal_form(sat_lattice);
  size_t rank = 0;
  for (const auto& d : s.diag)
    if (d != 0) ++rank;
  RatMat out;
  for (size_t j = rank; j < dim; ++j) {
    RatVec row(dim, Rat(0));
    for (size_t c = 0; c < dim; ++c) row[c] = Rat(s.v[c][j]);
    out.push_back(std::move(row));
  }
  return out;
}

// |det| of a square rational matrix.
inline Rat abs_det(RatMat a) {
  size_t n = n_rows(a);
  if (n == 0) return Rat(1);
  check(n_cols(a) == n, errc::bad_input, "determinant of a non-square matrix");
  Rat det = 1;
  for (size_t c = 0; c < n; ++c) {
    size_t sel = n;
    for (size_t i = c; i < n; ++i)
      if (a[i][c] != 0) { sel = i; break; }
    if (sel == n) return Rat(0);
    std::swap(a[c], a[sel]);
    det *= a[c][c];
    Rat inv = Rat(1) / a[c][c];
    for (size_t i = c + 1; i < n; ++i) {
      if (a[i][c] == 0) continue;
      Rat f = a[i][c] * inv;
      for (size_t j = c; j < n; ++j) a[i][j] -= f * a[c][j];
    }
  }
  return det < 0 ? Rat(-det) : det;
}

// Given rows H spanning a saturated corank-1 sublattice of Z^k, produce x with
// rowspan_Z(H) + Z x = Z^k.
inline IntVec complete_corank_one(const IntMat& h, size_t k) {
  Smith s = smith_normal_form(h);
  for (const auto& d : s.diag)
    check(d == 0 || d == 1, errc::not_a_facet, "facet lattice is not saturated");
  // rows of (h v) generate Z^{k-1} x 0; the missing direction is e_k v^{-1}
  IntVec x(k);
  for (size_t j = 0; j < k; ++j) x[j] = s.v_inv[k - 1][j];
  return x;
}

// ---------------------------------------------------------------------------
// Double description: V-representation of {x : eq x = 0, ineq x >= 0}.

struct ConeVRep {
  IntMat rays;       // primitive generators of the pointed part
  IntMat lineality;  // lattice basis of the lineality space
};

inline ConeVRep double_description(const RatMat& eq, const RatMat& ineq, size_t dim) {
  // current cone: span(lin) + cone(rays); each ray carries the set of
  // processed inequalities it satisfies with equality
  RatMat lin;
  if (eq.empty()) {
    lin = rat_identity(dim);
  } else {
    for (auto& row : nullspace(eq)) lin.push_back(row);
  }
  struct Ray {
    RatVec v;
    std::vector<bool> tight;
  };
  std::vector<Ray> rays;
  size_t m = n_rows(ineq);

  auto dot = [&](const RatVec& f, const RatVec& x) {
    Rat s = 0;
    for (size_t i = 0; i < dim; ++i)
      if (f[i] != 0 && x[i] != 0) s += f[i] * x[i];
    return s;
  };

  for (size_t k = 0; k < m; ++k) {
    const RatVec& f = ineq[k];
    // split lineality on f if needed
    size_t split = lin.size();
    for (size_t i = 0; i < lin.size(); ++i)
      if (dot(f, lin[i]) != 0) { split = i; break; }
    if (split < lin.size()) {
      RatVec l0 = lin[split];
      Rat f0 = dot(f, l0);
      RatMat new_lin;
      for (size_t i = 0; i < lin.size(); ++i) {
        if (i == split) continue;
        Rat fi = dot(f, lin[i]);
        RatVec adj = add(lin[i], scale(-fi / f0, l0));
        new_lin.push_back(std::move(adj));
      }
      lin = std::move(new_lin);
      for (auto& r : rays) {
        Rat fr = dot(f, r.v);
        if (fr != 0) r.v = add(r.v, scale(-fr / f0, l0));
      }
      Ray nr;
      nr.v = f0 > 0 ? l0 : scale(Rat(-1), l0);
      nr.tight.assign(k, true);  // former lineality vector: tight on all previous
      nr.tight.push_back(false);
      for (auto& r : rays) r.tight.push_back(true);
      rays.push_back(std::move(nr));
      continue;
    }
    // classify rays
    std::vector<Rat> val(rays.size());
    for (size_t i = 0; i < rays.size(); ++i) val[i] = dot(f, rays[i].v);
    std::vector<Ray> next;
    for (size_t i = 0; i < rays.size(); ++i) {
      if (val[i] >= 0) {
        Ray r = rays[i];
        r.tight.push_back(val[i] == 0);
        next.push_back(std::move(r));
      }
    }
    for (size_t p = 0; p < rays.size(); ++p) {
      if (val[p] <= 0) continue;
      for (size_t q = 0; q < rays.size(); ++q) {
        if (val[q] >= 0) continue;
        // adjacency: no third ray tight on everything p and q are jointly tight on
        bool adjacent = true;
        for (size_t z = 0; z < rays.size() && adjacent; ++z) {
          if (z == p || z == q) continue;
          bool covers = true;
          for (size_t t = 0; t < k; ++t)
            if (rays[p].tight[t] && rays[q].tight[t] && !rays[z].tight[t]) {
              covers = false;
              break;
            }
          if (covers) adjacent = false;
        }
        if (!adjacent) continue;
        Ray nr;
        nr.v = add(scale(val[p], rays[q].v), scale(-val[q], rays[p].v));
        nr.tight.resize(k + 1);
        for (size_t t = 0; t < k; ++t) nr.tight[t] = rays[p].tight[t] && rays[q].tight[t];
        nr.tight[k] = true;
        next.push_back(std::move(nr));
      }
    }
    rays = std::move(next);
  }

  ConeVRep out;
  IntMat lin_int;
  for (const auto& l : lin) lin_int.push_back(to_primitive_int(l));
  if (!lin_int.empty()) out.lineality = saturated_basis(lin_int, dim);
  // reduce rays modulo lineality and drop duplicates / zero
  std::vector<IntVec> prim;
  for (const auto& r : rays) {
    IntVec v = to_primitive_int(r.v);
    if (is_zero(v)) continue;
    prim.push_back(std::move(v));
  }
  std::sort(prim.begin(), prim.end());
  prim.erase(std::unique(prim.begin(), prim.end()), prim.end());
  out.rays = std::move(prim);
  return out;
}

}  // namespace tropmat
