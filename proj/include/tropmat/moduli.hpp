#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tropmat/chow.hpp"
#include "tropmat/cycle.hpp"
#include "tropmat/errors.hpp"
#include "tropmat/fan.hpp"
#include "tropmat/linalg.hpp"
#include "tropmat/lp.hpp"
#include "tropmat/matroid.hpp"

namespace tropmat {

// Genus-0 tropical stable maps to a fan target. A combinatorial type fixes a
// stable leg-labeled tree, forced edge directions, and the cones of the
// target traversed by every vertex, edge piece and leg piece; its moduli cone
// lives in parameters (root position, piece lengths) and embeds into the
// fixed ambient space A = (R^{C(r,2)}/Phi(R^r)) x R^dim(target).

// ---------------------------------------------------------------------------
// Discrete data

struct DiscreteData {
  int r = 0;
  int n = 0;                        // target is Delta_n
  std::vector<uint32_t> ray_masks;  // canonical ray order of Delta_n
  IntMat contact;                   // r x #rays, nonnegative
  IntMat leg_dirs;                  // r x n, derived directions delta_i
  IntVec beta;                      // per ray: total contact order
};

inline DiscreteData make_gamma(int r, int n, const std::map<uint32_t, IntVec>& contact) {
  check(r >= 1, errc::bad_input, "need at least one marked point");
  check(n >= 1, errc::bad_input, "target dimension must be at least one");
  DiscreteData g;
  g.r = r;
  g.n = n;
  g.ray_masks = permutohedral_ray_masks(n);
  std::map<uint32_t, size_t> ray_pos;
  for (size_t j = 0; j < g.ray_masks.size(); ++j) ray_pos[g.ray_masks[j]] = j;
  g.contact.assign(r, IntVec(g.ray_masks.size(), Int(0)));
  for (const auto& [mask, orders] : contact) {
    auto it = ray_pos.find(mask);
    check(it != ray_pos.end(), errc::out_of_range, "contact key is not a ray of Delta_n");
    check(orders.size() == static_cast<size_t>(r), errc::bad_input,
          "contact row has wrong length");
    for (int i = 0; i < r; ++i) {
      check(orders[i] >= 0, errc::bad_input, "contact orders must be nonnegative");
      g.contact[i][it->second] = orders[i];
    }
  }
  g.leg_dirs.assign(r, IntVec(n, Int(0)));
  g.beta.assign(g.ray_masks.size(), Int(0));
  for (int i = 0; i < r; ++i) {
    for (size_t j = 0; j < g.ray_masks.size(); ++j) {
      if (g.contact[i][j] == 0) continue;
      g.beta[j] += g.contact[i][j];
      IntVec u = quotient_rep(g.ray_masks[j], n + 1);
      for (int c = 0; c < n; ++c) g.leg_dirs[i][c] += g.contact[i][j] * u[c];
    }
  }
  IntVec total(n, Int(0));
  for (int i = 0; i < r; ++i) total = add(total, g.leg_dirs[i]);
  check(is_zero(total), errc::unbalanced_directions,
        "leg directions do not sum to zero");
  return g;
}

// expected dimension: (n + r - 3) - (c1beta + n - d) = d + r - 3 - c1beta
inline int vdim(const DiscreteData& gamma, int d, const Int& c1beta) {
  Int v = Int(d + gamma.r - 3) - c1beta;
  check(v >= -1000000, errc::bad_input, "virtual dimension overflow");
  return static_cast<int>(v.convert_to<long long>());
}

// ---------------------------------------------------------------------------
// Targets: simplicial fans whose containment order is ray-subset inclusion
// (true for subfans of Delta_n and for the product cylinders used by lifts).

struct Target {
  Fan fan;
  size_t dim;
  std::vector<std::vector<bool>> face_of;   // face_of[i][j]: cone i <= cone j
  std::vector<std::vector<int>> common_face;  // index of cone_i cap cone_j, or -1

  explicit Target(Fan f) : fan(std::move(f)), dim(fan.ambient_dim()) {
    size_t m = fan.cones().size();
    for (const auto& c : fan.cones())
      check(c.lineality().empty(), errc::bad_input, "target fans must be pointed");
    face_of.assign(m, std::vector<bool>(m, false));
    common_face.assign(m, std::vector<int>(m, -1));
    for (size_t i = 0; i < m; ++i)
      for (size_t j = 0; j < m; ++j)
        face_of[i][j] = ray_subset(fan.cones()[i], fan.cones()[j]);
    for (size_t i = 0; i < m; ++i) {
      for (size_t j = 0; j < m; ++j) {
        IntMat common;
        for (const auto& r : fan.cones()[i].rays())
          if (std::binary_search(fan.cones()[j].rays().begin(),
                                 fan.cones()[j].rays().end(), r))
            common.push_back(r);
        Cone c(common, {}, dim);
        auto idx = fan.find(c);
        common_face[i][j] = idx ? static_cast<int>(*idx) : -1;
      }
    }
  }

  static bool ray_subset(const Cone& a, const Cone& b) {
    for (const auto& r : a.rays())
      if (!std::binary_search(b.rays().begin(), b.rays().end(), r)) return false;
    return true;
  }

  const Cone& cone(int i) const { return fan.cones()[i]; }
  size_t size() const { return fan.cones().size(); }
};

// ---------------------------------------------------------------------------
// Stable trees from compatible split systems

struct TreeShape {
  int r = 0;
  std::vector<uint32_t> splits;  // far masks, never containing leg 0, sorted
  struct Edge {
    int parent = -1, child = -1;
    uint32_t far = 0;
    IntVec dir;       // displacement per unit length (weight * primitive)
    IntVec prim;      // primitive direction, zero when contracted
    Int weight = 0;
    bool contracted = false;
  };
  std::vector<Edge> edges;
  std::vector<std::vector<int>> vert_legs;
  std::vector<int> leg_vertex;
  int root = 0;  // vertex carrying leg 0
  int n_vertices = 0;
};

inline std::vector<uint32_t> all_far_masks(int r) {
  std::vector<uint32_t> out;
  uint32_t full = (1u << r) - 1;
  for (uint32_t s = 2; s < full; ++s) {
    if (s & 1u) continue;  // canonical side avoids leg 0
    if (popcount(s) < 2 || popcount(full & ~s) < 2) continue;
    out.push_back(s);
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline bool splits_compatible(uint32_t a, uint32_t b) {
  return (a & b) == 0 || (a & b) == a || (a & b) == b;
}

// Tree reconstruction from a laminar family of far masks.
inline TreeShape build_tree(int r, std::vector<uint32_t> splits,
                            const IntMat& leg_dirs) {
  TreeShape t;
  t.r = r;
  std::sort(splits.begin(), splits.end(), [](uint32_t a, uint32_t b) {
    int pa = popcount(a), pb = popcount(b);
    return pa != pb ? pa < pb : a < b;
  });
  t.splits = splits;
  int m = static_cast<int>(splits.size());
  // parent split: smallest strict superset
  std::vector<int> parent_split(m, -1);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if ((splits[i] & splits[j]) == splits[i] && splits[i] != splits[j]) {
        if (parent_split[i] == -1 || popcount(splits[j]) < popcount(splits[parent_split[i]]))
          parent_split[i] = j;
      }
  // vertex per split (its far-side region) plus the root region
  t.n_vertices = m + 1;
  int root_vertex = m;
  t.root = root_vertex;
  t.vert_legs.assign(t.n_vertices, {});
  t.leg_vertex.assign(r, root_vertex);
  std::vector<uint32_t> region(t.n_vertices, 0);
  for (int i = 0; i < m; ++i) {
    region[i] = splits[i];
    for (int j = 0; j < m; ++j)
      if (parent_split[j] == i) region[i] &= ~splits[j];
  }
  region[root_vertex] = (1u << r) - 1;
  for (int i = 0; i < m; ++i)
    if (parent_split[i] == -1) region[root_vertex] &= ~splits[i];
  for (int v = 0; v < t.n_vertices; ++v)
    for (int l = 0; l < r; ++l)
      if (region[v] & (1u << l)) {
        t.vert_legs[v].push_back(l);
        t.leg_vertex[l] = v;
      }
  size_t dim = leg_dirs.empty() ? 0 : leg_dirs[0].size();
  for (int i = 0; i < m; ++i) {
    TreeShape::Edge e;
    e.parent = parent_split[i] == -1 ? root_vertex : parent_split[i];
    e.child = i;
    e.far = splits[i];
    e.dir.assign(dim, Int(0));
    for (int l = 0; l < r; ++l)
      if (splits[i] & (1u << l)) e.dir = add(e.dir, leg_dirs[l]);
    e.weight = content(e.dir);
    e.contracted = (e.weight == 0);
    e.prim = e.contracted ? IntVec(dim, Int(0)) : primitive(e.dir);
    t.edges.push_back(std::move(e));
  }
  // order edges by DFS from the root so positions can be accumulated
  std::sort(t.edges.begin(), t.edges.end(), [&](const auto& a, const auto& b) {
    return a.far < b.far;
  });
  return t;
}

inline std::vector<TreeShape> enumerate_trees(int r, const IntMat& leg_dirs) {
  std::vector<uint32_t> pool = all_far_masks(r);
  std::vector<TreeShape> out;
  std::vector<uint32_t> current;
  std::function<void(size_t)> rec = [&](size_t start) {
    out.push_back(build_tree(r, current, leg_dirs));
    for (size_t i = start; i < pool.size(); ++i) {
      bool ok = true;
      for (uint32_t s : current)
        if (!splits_compatible(s, pool[i])) { ok = false; break; }
      if (!ok) continue;
      current.push_back(pool[i]);
      rec(i + 1);
      current.pop_back();
    }
  };
  rec(0);
  return out;
}

// ---------------------------------------------------------------------------
// Combinatorial types and their moduli cones

struct CombType {
  TreeShape shape;
  std::vector<int> vertex_cone;             // per vertex, target cone id
  std::vector<std::vector<int>> edge_path;  // per edge, traversed cone ids
  std::vector<std::vector<int>> leg_path;   // per leg, traversed cone ids

  std::string key() const {
    std::string s = "t";
    for (uint32_t sp : shape.splits) s += ":" + std::to_string(sp);
    s += "|v";
    for (int c : vertex_cone) s += ":" + std::to_string(c);
    s += "|e";
    for (const auto& p : edge_path) {
      s += ";";
      for (int c : p) s += ":" + std::to_string(c);
    }
    s += "|l";
    for (const auto& p : leg_path) {
      s += ";";
      for (int c : p) s += ":" + std::to_string(c);
    }
    return s;
  }
};

struct ModuliAmbient {
  int r = 0;
  size_t target_dim = 0;
  size_t dim = 0;                         // quotient part + target part
  size_t pair_count = 0;
  std::vector<std::pair<int, int>> pairs;  // index -> (i,j), i<j
  RatMat proj;                             // (dim - target_dim) x pair_count
};

// Coordinates on the distance factor R^{C(r,2)} / Phi(R^r): the lattice is
// generated by the split vectors chi_A (pair-separation indicators), the
// steps an edge length can take; in the plain saturated quotient every
// chi_A is divisible by two and cell lattices would embed non-primitively.
inline ModuliAmbient moduli_ambient(int r, size_t target_dim) {
  ModuliAmbient a;
  a.r = r;
  a.target_dim = target_dim;
  for (int i = 0; i < r; ++i)
    for (int j = i + 1; j < r; ++j) a.pairs.push_back({i, j});
  a.pair_count = a.pairs.size();
  // Phi(a)_{ij} = a_i + a_j
  IntMat gens;
  for (int i = 0; i < r; ++i) {
    IntVec g(a.pair_count, Int(0));
    for (size_t p = 0; p < a.pairs.size(); ++p)
      if (a.pairs[p].first == i || a.pairs[p].second == i) g[p] = 1;
    gens.push_back(std::move(g));
  }
  Smith s = smith_normal_form(gens);
  size_t rank = 0;
  for (const auto& d : s.diag)
    if (d != 0) ++rank;
  // saturated-quotient coordinates: remaining columns of v
  RatMat quot;
  for (size_t j = rank; j < a.pair_count; ++j) {
    RatVec row(a.pair_count, Rat(0));
    for (size_t c = 0; c < a.pair_count; ++c) row[c] = Rat(s.v[c][j]);
    quot.push_back(std::move(row));
  }
  // images of the split vectors, and a basis of the lattice they generate
  IntMat chi_images;
  for (uint32_t far : all_far_masks(r)) {
    IntVec chi(a.pair_count, Int(0));
    for (size_t p = 0; p < a.pairs.size(); ++p) {
      bool in_i = far & (1u << a.pairs[p].first);
      bool in_j = far & (1u << a.pairs[p].second);
      if (in_i != in_j) chi[p] = 1;
    }
    RatVec img = mat_vec(quot, to_rat(chi));
    IntVec img_int(img.size());
    for (size_t c = 0; c < img.size(); ++c) {
      check(rat_den(img[c]) == 1, errc::bad_input, "split image not integral");
      img_int[c] = rat_num(img[c]);
    }
    chi_images.push_back(std::move(img_int));
  }
  if (chi_images.empty()) {
    a.dim = target_dim;
    return a;
  }
  // row basis of the split lattice from the Smith form: rowspan(A) equals
  // rowspan(D V^{-1})
  Smith sl = smith_normal_form(chi_images);
  IntMat basis;
  size_t cols = n_cols(chi_images);
  for (size_t i = 0; i < sl.diag.size(); ++i) {
    if (sl.diag[i] == 0) continue;
    IntVec row(cols);
    for (size_t c = 0; c < cols; ++c) row[c] = sl.diag[i] * sl.v_inv[i][c];
    basis.push_back(std::move(row));
  }
  // coordinate functionals z_i with z_i . basis_j = delta_ij (a left inverse
  // of basis^T); unique on the span of the split lattice
  size_t t = basis.size();
  RatMat basis_rat = to_rat(basis);
  RatMat z;
  for (size_t i = 0; i < t; ++i) {
    RatVec e(t, Rat(0));
    e[i] = 1;
    auto sol = solve(basis_rat, e);
    check(sol.has_value(), errc::bad_input, "split lattice basis is degenerate");
    z.push_back(*sol);
  }
  a.proj = mat_mul(z, quot);
  a.dim = t + target_dim;
  return a;
}

// Moduli cone of one combinatorial type: parameter cone, ambient embedding,
// evaluation maps. Parameters are (root position h, one length per piece).
class ModuliCell {
 public:
  ModuliCell(const Target& target, const ModuliAmbient& ambient, const IntMat& leg_dirs,
             CombType type)
      : target_(&target), ambient_(&ambient), leg_dirs_(&leg_dirs), type_(std::move(type)) {
    build();
  }

  const CombType& type() const { return type_; }
  int dim() const { return dim_; }
  int param_dim() const { return param_dim_; }
  bool injective() const { return injective_; }
  bool feasible() const { return feasible_; }
  size_t n_params() const { return n_params_; }
  const RatMat& embedding() const { return embed_; }
  const RatMat& equalities() const { return eq_; }
  const IntVec& relint_point() const { return relint_ambient_; }
  const IntMat& span_lattice() const { return span_lat_; }
  const RatMat& leg_position(int leg) const { return leg_pos_[leg]; }
  const std::string& key() const { return key_; }

  // closed-membership: is the ambient point y in the closure of this cell?
  bool closed_contains(const RatVec& y) const {
    LinearSystem sys = closed_system();
    for (size_t c = 0; c < embed_.size(); ++c) {
      RatVec row(sys.vars, Rat(0));
      for (size_t p = 0; p < n_params_; ++p) row[p] = embed_[c][p];
      sys.add_eq_row(std::move(row), y[c]);
    }
    return sys.feasible();
  }

  // the closed parameter system: variables 0..n_params-1 are the parameters,
  // later variables are membership multipliers
  const LinearSystem& closed_system_ref() const {
    if (!closed_cache_) closed_cache_ = make_system(false);
    return *closed_cache_;
  }
  LinearSystem closed_system() const { return closed_system_ref(); }
  LinearSystem relint_system() const { return make_system(true); }

  // embedded cone via double description on the closed system
  Cone embedded_cone() const {
    LinearSystem sys = closed_system();
    RatMat ineq;
    for (size_t v = 0; v < sys.vars; ++v) {
      if (!sys.lower[v]) continue;
      RatVec row(sys.vars, Rat(0));
      row[v] = 1;
      ineq.push_back(std::move(row));
    }
    ConeVRep rep = double_description(sys.a, ineq, sys.vars);
    IntMat rays, lin;
    for (const auto& g : rep.rays) {
      RatVec par(n_params_);
      for (size_t p = 0; p < n_params_; ++p) par[p] = Rat(g[p]);
      IntVec img = to_primitive_int(mat_vec(embed_, par));
      if (!is_zero(img)) rays.push_back(img);
    }
    for (const auto& g : rep.lineality) {
      RatVec par(n_params_);
      for (size_t p = 0; p < n_params_; ++p) par[p] = Rat(g[p]);
      IntVec img = to_primitive_int(mat_vec(embed_, par));
      if (!is_zero(img)) lin.push_back(img);
    }
    return Cone(rays, lin, ambient_->dim);
  }

 private:
  struct Membership {
    RatMat point;  // D x n_params expression
    int cone;
    bool strict;       // relint in the strict system
    bool closed_only;  // skip in the relint system (redundant there)
  };

  void build() {
    const TreeShape& sh = type_.shape;
    size_t D = target_->dim;
    // parameter layout: h, then pieces of each edge, then bounded leg pieces
    n_params_ = D;
    edge_piece0_.assign(sh.edges.size(), 0);
    for (size_t e = 0; e < sh.edges.size(); ++e) {
      edge_piece0_[e] = n_params_;
      n_params_ += type_.edge_path[e].size();
    }
    leg_piece0_.assign(sh.r, 0);
    for (int l = 0; l < sh.r; ++l) {
      leg_piece0_[l] = n_params_;
      n_params_ += type_.leg_path[l].size() - 1;  // last piece is unbounded
    }

    // vertex positions as linear expressions over parameters
    std::vector<RatMat> pos(sh.n_vertices, RatMat(D, RatVec(n_params_, Rat(0))));
    for (size_t c = 0; c < D; ++c) pos[sh.root][c][c] = 1;
    // edges are sorted by far mask; process until all vertices are placed
    std::vector<bool> placed(sh.n_vertices, false);
    placed[sh.root] = true;
    bool progress = true;
    while (progress) {
      progress = false;
      for (size_t e = 0; e < sh.edges.size(); ++e) {
        const auto& ed = sh.edges[e];
        if (!placed[ed.parent] || placed[ed.child]) continue;
        pos[ed.child] = pos[ed.parent];
        for (size_t j = 0; j < type_.edge_path[e].size(); ++j)
          for (size_t c = 0; c < D; ++c)
            pos[ed.child][c][edge_piece0_[e] + j] += Rat(ed.dir[c]);
        placed[ed.child] = true;
        progress = true;
      }
    }

    memberships_.clear();
    auto point_after = [&](const RatMat& base, size_t var0, size_t count,
                           const IntVec& dir, Rat fraction) {
      RatMat p = base;
      for (size_t j = 0; j < count; ++j)
        for (size_t c = 0; c < D; ++c) p[c][var0 + j] += fraction * Rat(dir[c]);
      return p;
    };
    // vertices
    for (int v = 0; v < sh.n_vertices; ++v)
      memberships_.push_back({pos[v], type_.vertex_cone[v], true, false});
    // edge pieces and crossings
    for (size_t e = 0; e < sh.edges.size(); ++e) {
      const auto& ed = sh.edges[e];
      const auto& path = type_.edge_path[e];
      RatMat at = pos[ed.parent];
      for (size_t j = 0; j < path.size(); ++j) {
        RatMat start = at;
        RatMat end = point_after(start, edge_piece0_[e] + j, 1, ed.dir, Rat(1));
        RatMat mid = point_after(start, edge_piece0_[e] + j, 1, ed.dir, Rat(1, 2));
        memberships_.push_back({start, path[j], false, true});
        memberships_.push_back({end, path[j], false, true});
        memberships_.push_back({mid, path[j], true, false});
        if (j + 1 < path.size()) {
          int rho = target_->common_face[path[j]][path[j + 1]];
          check(rho >= 0, errc::infeasible_type, "consecutive cones share no face");
          memberships_.push_back({end, rho, true, false});
        }
        at = std::move(end);
      }
    }
    // leg pieces
    for (int l = 0; l < sh.r; ++l) {
      const auto& path = type_.leg_path[l];
      const IntVec& dir = leg_dir(l);
      RatMat at = pos[sh.leg_vertex[l]];
      for (size_t j = 0; j + 1 < path.size(); ++j) {
        RatMat start = at;
        RatMat end = point_after(start, leg_piece0_[l] + j, 1, dir, Rat(1));
        RatMat mid = point_after(start, leg_piece0_[l] + j, 1, dir, Rat(1, 2));
        memberships_.push_back({start, path[j], false, true});
        memberships_.push_back({end, path[j], false, true});
        memberships_.push_back({mid, path[j], true, false});
        int rho = target_->common_face[path[j]][path[j + 1]];
        check(rho >= 0, errc::infeasible_type, "consecutive cones share no face");
        memberships_.push_back({end, rho, true, false});
        at = std::move(end);
      }
      memberships_.push_back({at, path.back(), false, true});
      final_leg_points_.push_back({at, path.back(), l});
    }

    // feasibility of the relative interior
    LinearSystem relint = make_system(true);
    auto point = relint.point();
    feasible_ = point.has_value();
    if (!feasible_) return;
    relint_param_.assign(point->begin(), point->begin() + n_params_);

    // equality rows over parameters: span conditions of every membership
    eq_.clear();
    for (const auto& m : memberships_) {
      const Cone& c = target_->cone(m.cone);
      IntMat span = c.span_generators();
      RatMat normals =
          span.empty() ? rat_identity(D) : nullspace(to_rat(span));
      for (const auto& f : normals) {
        RatVec row(n_params_, Rat(0));
        for (size_t cc = 0; cc < D; ++cc)
          for (size_t p = 0; p < n_params_; ++p) row[p] += f[cc] * m.point[cc][p];
        if (!is_zero(row)) eq_.push_back(std::move(row));
      }
    }
    param_dim_ = static_cast<int>(n_params_ - (eq_.empty() ? 0 : mat_rank(eq_)));

    // ambient embedding: projected pair distances, then position of leg 0
    const ModuliAmbient& amb = *ambient_;
    RatMat dists(amb.pair_count, RatVec(n_params_, Rat(0)));
    for (size_t p = 0; p < amb.pairs.size(); ++p) {
      auto [i, j] = amb.pairs[p];
      // tree distance between base vertices: sum of edge pieces on the path
      uint32_t side_i = 1u << i, side_j = 1u << j;
      for (size_t e = 0; e < sh.edges.size(); ++e) {
        bool sep = ((sh.edges[e].far & side_i) == 0) != ((sh.edges[e].far & side_j) == 0);
        if (!sep) continue;
        for (size_t t = 0; t < type_.edge_path[e].size(); ++t)
          dists[p][edge_piece0_[e] + t] += 1;
      }
    }
    embed_.assign(amb.dim, RatVec(n_params_, Rat(0)));
    for (size_t q = 0; q < amb.proj.size(); ++q)
      for (size_t p = 0; p < amb.pair_count; ++p)
        if (amb.proj[q][p] != 0)
          for (size_t t = 0; t < n_params_; ++t)
            embed_[q][t] += amb.proj[q][p] * dists[p][t];
    for (size_t c = 0; c < D; ++c) embed_[amb.proj.size() + c] = pos[sh.root][c];

    leg_pos_.clear();
    for (int l = 0; l < sh.r; ++l) leg_pos_.push_back(pos[sh.leg_vertex[l]]);

    // embedded dimension and relint point
    RatMat embedded_span;
    {
      RatMat kernel_basis = eq_.empty() ? rat_identity(n_params_) : nullspace(eq_);
      for (const auto& k : kernel_basis) embedded_span.push_back(mat_vec(embed_, k));
    }
    dim_ = embedded_span.empty() ? 0 : static_cast<int>(mat_rank(embedded_span));
    injective_ = (dim_ == param_dim_);
    relint_ambient_ = to_primitive_int(mat_vec(embed_, relint_param_));
    if (relint_ambient_.empty()) relint_ambient_.assign(amb.dim, Int(0));
    IntMat span_int;
    for (const auto& row : embedded_span) {
      IntVec v = to_primitive_int(row);
      if (!is_zero(v)) span_int.push_back(v);
    }
    span_lat_ = span_int.empty() ? IntMat{} : saturated_basis(span_int, amb.dim);
    key_ = type_.key();
  }

  const IntVec& leg_dir(int l) const { return (*leg_dirs_)[l]; }

  LinearSystem make_system(bool strict) const {
    LinearSystem sys(n_params_);
    // piece lengths are nonnegative, strictly positive inside the cell
    for (size_t p = target_->dim; p < n_params_; ++p)
      sys.set_lower(p, strict ? Rat(1) : Rat(0));
    auto add_membership = [&](const RatMat& pt, const Cone& c, bool tight) {
      std::vector<size_t> lam, mu;
      for (size_t i = 0; i < c.rays().size(); ++i)
        lam.push_back(sys.add_var(tight ? Rat(1) : Rat(0)));
      for (size_t i = 0; i < c.lineality().size(); ++i) mu.push_back(sys.add_var());
      for (size_t cc = 0; cc < target_->dim; ++cc) {
        RatVec row(sys.vars, Rat(0));
        for (size_t p = 0; p < pt[cc].size() && p < row.size(); ++p) row[p] = pt[cc][p];
        for (size_t i = 0; i < c.rays().size(); ++i)
          row[lam[i]] = Rat(-c.rays()[i][cc]);
        for (size_t i = 0; i < c.lineality().size(); ++i)
          row[mu[i]] = Rat(-c.lineality()[i][cc]);
        sys.add_eq_row(std::move(row), Rat(0));
      }
    };
    for (const auto& m : memberships_) {
      if (strict && m.closed_only) continue;
      add_membership(m.point, target_->cone(m.cone), strict && m.strict);
    }
    if (strict) {
      // unbounded leg ends: a point far along the leg lies in the relative
      // interior of the final cone
      for (const auto& [pt, cone_id, leg] : final_leg_points_) {
        const IntVec& dir = leg_dir(leg);
        if (is_zero(dir)) continue;
        size_t T = sys.add_var(Rat(1));
        RatMat far = pt;
        for (auto& row : far) row.resize(sys.vars, Rat(0));
        for (size_t cc = 0; cc < target_->dim; ++cc) far[cc][T] = Rat(dir[cc]);
        add_membership(far, target_->cone(cone_id), true);
      }
    }
    return sys;
  }

  const Target* target_;
  const ModuliAmbient* ambient_;
  const IntMat* leg_dirs_ = nullptr;
  CombType type_;
  size_t n_params_ = 0;
  std::vector<size_t> edge_piece0_, leg_piece0_;
  std::vector<Membership> memberships_;
  std::vector<std::tuple<RatMat, int, int>> final_leg_points_;
  RatMat eq_;
  RatMat embed_;
  std::vector<RatMat> leg_pos_;
  RatVec relint_param_;
  IntVec relint_ambient_;
  IntMat span_lat_;
  int param_dim_ = 0;
  int dim_ = 0;
  bool injective_ = true;
  bool feasible_ = false;
  std::string key_;
  mutable std::optional<LinearSystem> closed_cache_;
};

// ---------------------------------------------------------------------------
// Enumeration of combinatorial types over a target fan

namespace detail {

// can a germ at relint(sigma) move in direction vec into relint(c)?
inline bool can_enter(const Cone& sigma, const IntVec& vec, const Cone& c) {
  LinearSystem sys(0);
  size_t eps = sys.add_var(Rat(1));
  std::vector<size_t> lam, mu;
  for (size_t i = 0; i < sigma.rays().size(); ++i) lam.push_back(sys.add_var(Rat(1)));
  for (size_t i = 0; i < c.rays().size(); ++i) mu.push_back(sys.add_var(Rat(1)));
  size_t d = sigma.ambient_dim();
  for (size_t cc = 0; cc < d; ++cc) {
    std::vector<std::pair<size_t, Rat>> terms;  // x + eps vec - y = 0
    for (size_t i = 0; i < sigma.rays().size(); ++i)
      terms.push_back({lam[i], Rat(sigma.rays()[i][cc])});
    terms.push_back({eps, Rat(vec[cc])});
    for (size_t i = 0; i < c.rays().size(); ++i)
      terms.push_back({mu[i], Rat(-c.rays()[i][cc])});
    sys.add_eq(terms, Rat(0));
  }
  return sys.feasible();
}

// can the line cross from relint(c_from) through relint(rho) into relint(c_to)?
inline bool can_cross(const Cone& c_from, const IntVec& vec, const Cone& rho,
                      const Cone& c_to) {
  LinearSystem sys(0);
  size_t eps = sys.add_var(Rat(1));
  std::vector<size_t> pr, la, mu;
  for (size_t i = 0; i < rho.rays().size(); ++i) pr.push_back(sys.add_var(Rat(1)));
  for (size_t i = 0; i < c_from.rays().size(); ++i) la.push_back(sys.add_var(Rat(1)));
  for (size_t i = 0; i < c_to.rays().size(); ++i) mu.push_back(sys.add_var(Rat(1)));
  size_t d = rho.ambient_dim();
  for (size_t cc = 0; cc < d; ++cc) {
    std::vector<std::pair<size_t, Rat>> back;  // p - eps vec = from-point
    for (size_t i = 0; i < rho.rays().size(); ++i)
      back.push_back({pr[i], Rat(rho.rays()[i][cc])});
    back.push_back({eps, Rat(-vec[cc])});
    for (size_t i = 0; i < c_from.rays().size(); ++i)
      back.push_back({la[i], Rat(-c_from.rays()[i][cc])});
    sys.add_eq(back, Rat(0));
    std::vector<std::pair<size_t, Rat>> fwd;  // p + eps vec = to-point
    for (size_t i = 0; i < rho.rays().size(); ++i)
      fwd.push_back({pr[i], Rat(rho.rays()[i][cc])});
    fwd.push_back({eps, Rat(vec[cc])});
    for (size_t i = 0; i < c_to.rays().size(); ++i)
      fwd.push_back({mu[i], Rat(-c_to.rays()[i][cc])});
    sys.add_eq(fwd, Rat(0));
  }
  return sys.feasible();
}

struct PathCache {
  const Target* target;
  std::map<std::pair<IntVec, std::pair<int, int>>, bool> enter;
  std::map<std::pair<IntVec, std::pair<int, int>>, bool> cross;
  std::map<std::tuple<IntVec, int, bool>, std::vector<std::vector<int>>> paths;

  bool can_enter(const IntVec& vec, int sigma, int c) {
    auto key = std::make_pair(vec, std::make_pair(sigma, c));
    auto it = enter.find(key);
    if (it != enter.end()) return it->second;
    bool v = detail::can_enter(target->cone(sigma), vec, target->cone(c));
    enter.emplace(key, v);
    return v;
  }
  bool can_cross(const IntVec& vec, int from, int to) {
    auto key = std::make_pair(vec, std::make_pair(from, to));
    auto it = cross.find(key);
    if (it != cross.end()) return it->second;
    int rho = target->common_face[from][to];
    bool v = rho >= 0 &&
             detail::can_cross(target->cone(from), vec, target->cone(rho), target->cone(to));
    cross.emplace(key, v);
    return v;
  }
};

// enumerate cone paths of a ray germ: starting in relint(sigma_v), direction
// vec; `settle` demands the final cone absorb the direction (legs), otherwise
// every feasible prefix is produced (edges, which end at a vertex)
inline const std::vector<std::vector<int>>& enumerate_paths(PathCache& cache, int sigma_v,
                                                            const IntVec& vec, bool settle) {
  auto key = std::make_tuple(vec, sigma_v, settle);
  auto hit = cache.paths.find(key);
  if (hit != cache.paths.end()) return hit->second;
  const Target& t = *cache.target;
  std::vector<std::vector<int>> out;
  if (is_zero(vec)) {
    out.push_back({sigma_v});
    return cache.paths.emplace(key, std::move(out)).first->second;
  }
  std::vector<int> path;
  std::function<void(int)> extend = [&](int cur) {
    bool absorbed = t.cone(cur).contains(vec);
    if (settle) {
      if (absorbed) out.push_back(path);
      // a direction inside the cone can never leave it
    } else {
      out.push_back(path);
    }
    if (absorbed) return;
    for (size_t next = 0; next < t.size(); ++next) {
      int nx = static_cast<int>(next);
      if (nx == cur) continue;
      if (std::find(path.begin(), path.end(), nx) != path.end()) continue;
      if (!cache.can_cross(vec, cur, nx)) continue;
      path.push_back(nx);
      extend(nx);
      path.pop_back();
    }
  };
  for (size_t first = 0; first < t.size(); ++first) {
    int c1 = static_cast<int>(first);
    if (!t.face_of[sigma_v][c1]) continue;
    if (!cache.can_enter(vec, sigma_v, c1)) continue;
    path.assign(1, c1);
    extend(c1);
  }
  return cache.paths.emplace(key, std::move(out)).first->second;
}

}  // namespace detail

// All relint-feasible combinatorial types of genus-zero stable maps with the
// given leg directions into the target, one ModuliCell per cone of the
// complex, in deterministic order.
class ModuliComplex {
 public:
  ModuliComplex(Fan target_fan, IntMat leg_dirs)
      : target_(std::move(target_fan)),
        leg_dirs_(std::move(leg_dirs)),
        r_(static_cast<int>(leg_dirs_.size())),
        ambient_(moduli_ambient(r_, target_.dim)) {
    enumerate();
  }

  ModuliComplex(const ModuliComplex&) = delete;
  ModuliComplex& operator=(const ModuliComplex&) = delete;

  const Target& target() const { return target_; }
  const ModuliAmbient& ambient() const { return ambient_; }
  const IntMat& leg_dirs() const { return leg_dirs_; }
  const std::vector<ModuliCell>& cells() const { return cells_; }

  std::vector<size_t> cells_of_dim(int k) const {
    std::vector<size_t> out;
    for (size_t i = 0; i < cells_.size(); ++i)
      if (cells_[i].dim() == k) out.push_back(i);
    return out;
  }

  // closure containment, memoized; a combinatorial prefilter (faces can only
  // drop splits) keeps the LP count down
  bool cell_contains(size_t big, size_t small) const {
    if (big == small) return true;
    if (cells_[small].dim() >= cells_[big].dim()) return false;
    if (!splits_subset(cells_[small].type().shape.splits, cells_[big].type().shape.splits))
      return false;
    auto key = std::make_pair(big, small);
    auto it = contains_memo_.find(key);
    if (it != contains_memo_.end()) return it->second;
    bool v = cells_[big].closed_contains(to_rat(cells_[small].relint_point()));
    contains_memo_.emplace(key, v);
    return v;
  }

  bool is_maximal(size_t i) const {
    for (size_t j = 0; j < cells_.size(); ++j)
      if (j != i && cell_contains(j, i)) return false;
    return true;
  }

  std::vector<size_t> maximal_cells() const {
    std::vector<size_t> out;
    for (size_t i = 0; i < cells_.size(); ++i)
      if (is_maximal(i)) out.push_back(i);
    return out;
  }

  int dim() const {
    int d = 0;
    for (const auto& c : cells_) d = std::max(d, c.dim());
    return d;
  }

  bool pure() const {
    int d = dim();
    for (size_t i = 0; i < cells_.size(); ++i)
      if (cells_[i].dim() != d && is_maximal(i)) return false;
    return true;
  }

  // the cone set restricted to types whose assignments land inside `sub`;
  // `sub` must be a subfan of the target
  std::vector<size_t> cells_inside(const Fan& sub) const {
    std::vector<bool> allowed(target_.size(), false);
    for (size_t i = 0; i < target_.size(); ++i) allowed[i] = sub.has_cone(target_.cone(i));
    std::vector<size_t> out;
    for (size_t i = 0; i < cells_.size(); ++i) {
      const CombType& t = cells_[i].type();
      bool ok = true;
      for (int c : t.vertex_cone) ok = ok && allowed[c];
      for (const auto& p : t.edge_path)
        for (int c : p) ok = ok && allowed[c];
      for (const auto& p : t.leg_path)
        for (int c : p) ok = ok && allowed[c];
      if (ok) out.push_back(i);
    }
    return out;
  }

 private:
  void enumerate() {
    check(r_ >= 1, errc::bad_input, "need at least one leg");
    std::vector<TreeShape> trees = enumerate_trees(r_, leg_dirs_);
    detail::PathCache cache{&target_, {}, {}};
    for (const auto& shape : trees) enumerate_tree(shape, cache);
    std::sort(cells_.begin(), cells_.end(),
              [](const ModuliCell& a, const ModuliCell& b) { return a.key() < b.key(); });
  }

  void enumerate_tree(const TreeShape& shape, detail::PathCache& cache) {
    // process parents before children
    std::vector<size_t> edge_order(shape.edges.size());
    for (size_t i = 0; i < edge_order.size(); ++i) edge_order[i] = i;
    std::sort(edge_order.begin(), edge_order.end(), [&](size_t a, size_t b) {
      int pa = popcount(shape.edges[a].far), pb = popcount(shape.edges[b].far);
      return pa != pb ? pa > pb : shape.edges[a].far < shape.edges[b].far;
    });
    CombType type;
    type.shape = shape;
    type.vertex_cone.assign(shape.n_vertices, -1);
    type.edge_path.assign(shape.edges.size(), {});
    type.leg_path.assign(r_, {});

    std::function<void(size_t)> assign_edge = [&](size_t step) {
      if (step == edge_order.size()) {
        assign_legs(type, cache, 0);
        return;
      }
      size_t e = edge_order[step];
      const auto& ed = shape.edges[e];
      int sv = type.vertex_cone[ed.parent];
      if (ed.contracted) {
        type.edge_path[e] = {sv};
        type.vertex_cone[ed.child] = sv;
        assign_edge(step + 1);
        type.vertex_cone[ed.child] = -1;
        type.edge_path[e].clear();
        return;
      }
      const auto& paths = detail::enumerate_paths(cache, sv, ed.dir, false);
      for (const auto& p : paths) {
        type.edge_path[e] = p;
        for (size_t child_cone = 0; child_cone < target_.size(); ++child_cone) {
          if (!target_.face_of[child_cone][p.back()]) continue;
          type.vertex_cone[ed.child] = static_cast<int>(child_cone);
          assign_edge(step + 1);
        }
        type.vertex_cone[ed.child] = -1;
      }
      type.edge_path[e].clear();
    };

    for (size_t root_cone = 0; root_cone < target_.size(); ++root_cone) {
      type.vertex_cone[shape.root] = static_cast<int>(root_cone);
      assign_edge(0);
    }
  }

  void assign_legs(CombType& type, detail::PathCache& cache, int leg) {
    if (leg == r_) {
      finish(type);
      return;
    }
    int base = type.shape.leg_vertex[leg];
    int sv = type.vertex_cone[base];
    if (is_zero(leg_dirs_[leg])) {
      type.leg_path[leg] = {sv};
      assign_legs(type, cache, leg + 1);
      type.leg_path[leg].clear();
      return;
    }
    const auto& paths = detail::enumerate_paths(cache, sv, leg_dirs_[leg], true);
    for (const auto& p : paths) {
      type.leg_path[leg] = p;
      assign_legs(type, cache, leg + 1);
    }
    type.leg_path[leg].clear();
  }

  void finish(const CombType& type) {
    ModuliCell cell(target_, ambient_, leg_dirs_, type);
    if (!cell.feasible()) return;
    cells_.push_back(std::move(cell));
  }

  static bool splits_subset(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
    for (uint32_t s : a)
      if (!std::binary_search(b.begin(), b.end(), s)) return false;
    return true;
  }

  Target target_;
  IntMat leg_dirs_;
  int r_;
  ModuliAmbient ambient_;
  std::vector<ModuliCell> cells_;
  mutable std::map<std::pair<size_t, size_t>, bool> contains_memo_;
};

// enumerate_types over a subfan of Delta_n per the discrete data
inline ModuliComplex build_moduli_complex(const DiscreteData& gamma, const Fan& target) {
  check(target.ambient_dim() == static_cast<size_t>(gamma.n), errc::ambient_mismatch,
        "target fan does not match the discrete data");
  return ModuliComplex(target, gamma.leg_dirs);
}

// evaluation of a leg on a cell: the position of the vertex carrying it, as a
// linear map on the cell's parameters
inline const RatMat& evaluation(const ModuliCell& cell, int leg) {
  check(leg >= 0 && leg < static_cast<int>(cell.type().shape.leg_vertex.size()),
        errc::out_of_range, "leg index out of range");
  return cell.leg_position(leg);
}

}  // namespace tropmat
