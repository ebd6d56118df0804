#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <vector>

#include "tropmat/errors.hpp"
#include "tropmat/fan.hpp"
#include "tropmat/linalg.hpp"
#include "tropmat/lp.hpp"
#include "tropmat/util.hpp"

namespace tropmat {

// H-representation of a cone: span equations and facet inequalities, both as
// rows of functionals. Obtained from the generators through the dual cone.
struct ConeHRep {
  RatMat eqs;
  RatMat ineqs;
};

inline ConeHRep cone_inequalities(const Cone& c) {
  RatMat lin_eq;
  for (const auto& l : c.lineality()) lin_eq.push_back(to_rat(l));
  ConeVRep dual = double_description(lin_eq, to_rat(c.rays()), c.ambient_dim());
  ConeHRep out;
  for (const auto& g : dual.lineality) out.eqs.push_back(to_rat(g));
  for (const auto& f : dual.rays) out.ineqs.push_back(to_rat(f));
  return out;
}

// sigma cap (tau + shift), as a cone when shift = 0, in general a polyhedron;
// here we only need the shifted-feasibility test and the unshifted cone.
inline bool shifted_intersection_nonempty(const Cone& sigma, const Cone& tau,
                                          const IntVec& shift) {
  size_t d = sigma.ambient_dim();
  LinearSystem sys(0);
  std::vector<size_t> lam, mu, nu, xi;
  for (size_t i = 0; i < sigma.rays().size(); ++i) lam.push_back(sys.add_var(Rat(0)));
  for (size_t i = 0; i < sigma.lineality().size(); ++i) mu.push_back(sys.add_var());
  for (size_t i = 0; i < tau.rays().size(); ++i) nu.push_back(sys.add_var(Rat(0)));
  for (size_t i = 0; i < tau.lineality().size(); ++i) xi.push_back(sys.add_var());
  for (size_t c = 0; c < d; ++c) {
    std::vector<std::pair<size_t, Rat>> terms;
    for (size_t i = 0; i < sigma.rays().size(); ++i)
      terms.push_back({lam[i], Rat(sigma.rays()[i][c])});
    for (size_t i = 0; i < sigma.lineality().size(); ++i)
      terms.push_back({mu[i], Rat(sigma.lineality()[i][c])});
    for (size_t i = 0; i < tau.rays().size(); ++i)
      terms.push_back({nu[i], Rat(-tau.rays()[i][c])});
    for (size_t i = 0; i < tau.lineality().size(); ++i)
      terms.push_back({xi[i], Rat(-tau.lineality()[i][c])});
    sys.add_eq(terms, Rat(shift[c]));
  }
  return sys.feasible();
}

inline Cone cone_intersection(const Cone& a, const Cone& b) {
  ConeHRep ha = cone_inequalities(a);
  ConeHRep hb = cone_inequalities(b);
  RatMat eqs = ha.eqs;
  for (auto& r : hb.eqs) eqs.push_back(r);
  RatMat ineqs = ha.ineqs;
  for (auto& r : hb.ineqs) ineqs.push_back(r);
  ConeVRep v = double_description(eqs, ineqs, a.ambient_dim());
  return Cone(v.rays, v.lineality, a.ambient_dim());
}

// ---------------------------------------------------------------------------

struct BalanceReport {
  bool balanced = true;
  std::optional<Cone> face;  // offending codim-one cone
  RatVec defect;             // weighted normal sum, not in span(face)
};

// A Minkowski weight: rational weights on the k-dimensional cones of a
// carrier complex closed under faces.
class TropicalCycle {
 public:
  TropicalCycle(size_t ambient_dim, int k) : ambient_(ambient_dim), dim_(k) {}

  static TropicalCycle from_weighted_cones(size_t ambient_dim, int k,
                                           const std::vector<std::pair<Cone, Rat>>& cones) {
    TropicalCycle z(ambient_dim, k);
    for (const auto& [c, w] : cones) z.set_weight(c, w);
    return z;
  }

  // weight 1 on the maximal cones of a fan, viewed as a cycle of the fan's
  // top dimension
  static TropicalCycle unit_cycle(const Fan& fan) {
    TropicalCycle z(fan.ambient_dim(), fan.dim());
    for (const auto& c : fan.cones()) {
      z.add_carrier_cone(c);
      if (c.dim() == fan.dim()) z.set_weight(c, Rat(1));
    }
    return z;
  }

  size_t ambient_dim() const { return ambient_; }
  int dim() const { return dim_; }
  const std::vector<Cone>& carrier() const { return carrier_; }

  void add_carrier_cone(const Cone& c) {
    check(c.ambient_dim() == ambient_, errc::ambient_mismatch, "cone in wrong ambient");
    if (index_.emplace(c.key(), carrier_.size()).second) carrier_.push_back(c);
  }

  void set_weight(const Cone& c, const Rat& w) {
    check(c.dim() == dim_, errc::dimension_mismatch, "weight on a cone of wrong dimension");
    for (const auto& f : c.faces()) add_carrier_cone(f);
    weights_[*index_find(c)] = w;
  }

  Rat weight(const Cone& c) const {
    auto idx = index_find(c);
    if (!idx) return Rat(0);
    auto it = weights_.find(*idx);
    return it == weights_.end() ? Rat(0) : it->second;
  }

  std::vector<std::pair<Cone, Rat>> support() const {
    std::vector<std::pair<Cone, Rat>> out;
    for (const auto& [i, w] : weights_)
      if (w != 0) out.push_back({carrier_[i], w});
    return out;
  }

  bool is_effectively_zero() const { return support().empty(); }

  Rat degree0() const {
    check(dim_ == 0, errc::dimension_mismatch, "degree of a positive-dimensional cycle");
    Rat s = 0;
    for (const auto& [i, w] : weights_) s += w;
    return s;
  }

  // Balancing at every face of codimension one inside the carrier: the
  // weighted sum of relative lattice normals must lie in the span of the
  // face. Returns the first offending face in carrier order.
  BalanceReport check_balanced() const {
    std::vector<size_t> faces;
    for (size_t i = 0; i < carrier_.size(); ++i)
      if (carrier_[i].dim() == dim_ - 1) faces.push_back(i);
    std::vector<size_t> tops;
    for (size_t i = 0; i < carrier_.size(); ++i)
      if (carrier_[i].dim() == dim_) tops.push_back(i);

    std::vector<std::optional<BalanceReport>> results(faces.size());
    parallel_for(faces.size(), [&](size_t fi) {
      const Cone& tau = carrier_[faces[fi]];
      RatVec defect(ambient_, Rat(0));
      bool any = false;
      for (size_t ti : tops) {
        auto it = weights_.find(ti);
        if (it == weights_.end() || it->second == 0) continue;
        const Cone& sigma = carrier_[ti];
        if (!sigma.contains_cone(tau)) continue;
        IntVec n = lattice_normal(tau, sigma);
        for (size_t c = 0; c < ambient_; ++c) defect[c] += it->second * Rat(n[c]);
        any = true;
      }
      if (!any) return;
      IntMat span = tau.span_lattice();
      if (!in_row_span(to_rat(span), defect)) {
        BalanceReport r;
        r.balanced = false;
        r.face = tau;
        r.defect = defect;
        results[fi] = r;
      }
    });
    for (const auto& r : results)
      if (r) return *r;
    return BalanceReport{};
  }

  // Pull the weight through a subdivision: each new k-cone inherits the
  // weight of the unique old k-cone whose relative interior contains it.
  TropicalCycle refine(const Fan& subdivision) const {
    check(subdivision.ambient_dim() == ambient_, errc::ambient_mismatch,
          "subdivision in wrong ambient");
    // verify: every carrier cone is exactly covered by the subdivision cones
    // inside it (volume additivity of same-dimensional simplicial pieces)
    std::vector<std::vector<size_t>> pieces(carrier_.size());
    for (size_t ci = 0; ci < carrier_.size(); ++ci) {
      const Cone& c = carrier_[ci];
      Int vol = relative_volume(c);
      check(vol != 0, errc::not_a_subdivision, "carrier cone is not simplicial");
      Int covered = 0;
      for (size_t si = 0; si < subdivision.cones().size(); ++si) {
        const Cone& d = subdivision.cones()[si];
        if (d.dim() != c.dim() || !c.contains_cone(d)) continue;
        Int dv = relative_volume_in(d, c);
        check(dv != 0, errc::not_a_subdivision, "subdivision cone is not simplicial");
        covered += dv;
        pieces[ci].push_back(si);
      }
      check(covered == vol, errc::not_a_subdivision,
            "subdivision does not exactly cover a carrier cone");
    }
    TropicalCycle out(ambient_, dim_);
    for (size_t ci = 0; ci < carrier_.size(); ++ci)
      for (size_t si : pieces[ci]) out.add_carrier_cone(subdivision.cones()[si]);
    for (const auto& [ti, w] : weights_) {
      if (w == 0) continue;
      for (size_t si : pieces[ti]) out.set_weight(subdivision.cones()[si], w);
    }
    return out;
  }

 private:
  std::optional<size_t> index_find(const Cone& c) const {
    auto it = index_.find(c.key());
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  // lattice volume of a simplicial cone relative to its own span lattice
  Int relative_volume(const Cone& c) const {
    if (c.dim() == 0) return 1;
    IntMat sat = c.span_lattice();
    IntMat coords;
    for (const auto& g : c.span_generators()) {
      auto x = lattice_coords(sat, g);
      if (!x) return 0;
      coords.push_back(*x);
    }
    if (n_rows(coords) != static_cast<size_t>(c.dim())) return 0;
    return abs_int(lattice_index_full(coords, c.dim()));
  }

  // volume of d relative to the span lattice of c (requires span d = span c)
  Int relative_volume_in(const Cone& d, const Cone& c) const {
    if (d.dim() != c.dim()) return 0;
    IntMat sat = c.span_lattice();
    IntMat coords;
    for (const auto& g : d.span_generators()) {
      auto x = lattice_coords(sat, g);
      if (!x) return 0;
      coords.push_back(*x);
    }
    if (n_rows(coords) != static_cast<size_t>(d.dim())) return 0;
    return abs_int(lattice_index_full(coords, d.dim()));
  }

  size_t ambient_;
  int dim_;
  std::vector<Cone> carrier_;
  std::map<std::pair<IntMat, IntMat>, size_t> index_;
  std::map<size_t, Rat> weights_;
};

// ---------------------------------------------------------------------------
// Stable intersection via the fan displacement rule.

struct Displacement {
  IntVec vector;
  uint64_t seed = 0;
  int retries = 0;
};

inline IntVec displacement_vector(uint64_t seed, int retry, size_t dim) {
  SeededRng rng(seed * 1000003ULL + static_cast<uint64_t>(retry));
  int64_t bound = 10 + 13 * retry;
  IntVec v(dim);
  for (size_t i = 0; i < dim; ++i) v[i] = Int(rng.next_int(bound));
  return v;
}

// generic: whenever two carrier cones meet after displacing the second, the
// pair must be transverse (spans add up to the ambient space)
inline bool displacement_is_generic(const TropicalCycle& z1, const TropicalCycle& z2,
                                    const IntVec& v) {
  for (const auto& c1 : z1.carrier()) {
    for (const auto& c2 : z2.carrier()) {
      if (!shifted_intersection_nonempty(c1, c2, v)) continue;
      IntMat span = c1.span_generators();
      for (const auto& g : c2.span_generators()) span.push_back(g);
      size_t rank = span.empty() ? 0 : mat_rank(span);
      if (rank != z1.ambient_dim()) return false;
    }
  }
  return true;
}

namespace detail {

// Angular refinement of possibly overlapping 2-dimensional cells sharing a
// plane; used when intersection cells are not already a fan.
inline std::vector<Cone> refine_plane_cells(const std::vector<Cone>& cells) {
  const Cone& first = cells[0];
  IntMat plane = first.span_lattice();  // 2 rows
  check(plane.size() == 2, errc::out_of_range, "plane refinement needs dimension two");
  auto coords2 = [&](const IntVec& g) {
    auto c = lattice_coords(plane, g);
    check(c.has_value(), errc::out_of_range, "generator outside plane lattice");
    return *c;
  };
  struct Dir {
    IntVec xy;
    IntVec amb;
  };
  std::vector<Dir> dirs;
  auto push_dir = [&](const IntVec& g) {
    IntVec xy = primitive(coords2(g));
    for (const auto& d : dirs)
      if (d.xy == xy) return;
    dirs.push_back({xy, g});
  };
  for (const auto& c : cells) {
    check(c.lineality().empty(), errc::out_of_range,
          "plane refinement with lineality unsupported");
    for (const auto& r : c.rays()) push_dir(r);
  }
  auto half = [](const IntVec& v) { return (v[1] > 0 || (v[1] == 0 && v[0] > 0)) ? 0 : 1; };
  std::sort(dirs.begin(), dirs.end(), [&](const Dir& a, const Dir& b) {
    int ha = half(a.xy), hb = half(b.xy);
    if (ha != hb) return ha < hb;
    Int cross = a.xy[0] * b.xy[1] - a.xy[1] * b.xy[0];
    return cross > 0;
  });
  std::vector<Cone> sectors;
  size_t m = dirs.size();
  for (size_t i = 0; i < m; ++i) {
    const Dir& a = dirs[i];
    const Dir& b = dirs[(i + 1) % m];
    Int cross = a.xy[0] * b.xy[1] - a.xy[1] * b.xy[0];
    if (cross <= 0 && m > 1) continue;  // reflex or half-turn gap: not a sector
    sectors.push_back(Cone({a.amb, b.amb}, {}, first.ambient_dim()));
  }
  return sectors;
}

}  // namespace detail

// Z1 . Z2 by the displacement rule: supported on cells sigma cap tau of the
// expected dimension, with multiplicity sum m_sigma m_tau [N : N_sigma+N_tau]
// over the pairs whose displaced copies meet.
inline TropicalCycle stable_intersect(const TropicalCycle& z1, const TropicalCycle& z2,
                                      uint64_t seed = 1, Displacement* used = nullptr) {
  check(z1.ambient_dim() == z2.ambient_dim(), errc::ambient_mismatch,
        "cycles in different ambient spaces");
  size_t d = z1.ambient_dim();
  int g = z1.dim() + z2.dim() - static_cast<int>(d);
  check(g >= 0, errc::dimension_mismatch, "expected dimension is negative");

  constexpr int kMaxRetries = 12;
  IntVec v;
  int retry = 0;
  for (;; ++retry) {
    check(retry < kMaxRetries, errc::genericity_failure,
          "no generic displacement found within the retry budget");
    v = displacement_vector(seed, retry, d);
    if (displacement_is_generic(z1, z2, v)) break;
  }
  if (used) *used = Displacement{v, seed, retry};

  auto s1 = z1.support();
  auto s2 = z2.support();
  struct Pair {
    const Cone* sigma;
    const Cone* tau;
    Rat contribution;
  };
  std::vector<Pair> meets;
  for (const auto& [sigma, ws] : s1) {
    for (const auto& [tau, wt] : s2) {
      if (!shifted_intersection_nonempty(sigma, tau, v)) continue;
      IntMat sum = sigma.span_lattice();
      for (const auto& row : tau.span_lattice()) sum.push_back(row);
      Int idx = lattice_index_full(sum, d);
      check(idx != 0, errc::genericity_failure, "meeting pair is not transverse");
      meets.push_back({&sigma, &tau, ws * wt * Rat(idx)});
    }
  }

  // candidate cells: undisplaced intersections of the expected dimension
  std::vector<Cone> cells;
  for (const auto& p : meets) {
    Cone kappa = cone_intersection(*p.sigma, *p.tau);
    if (kappa.dim() != g) continue;
    bool dup = false;
    for (const auto& c : cells)
      if (c == kappa) { dup = true; break; }
    if (!dup) cells.push_back(std::move(kappa));
  }
  // resolve non-identical overlaps inside a common plane
  if (g >= 1) {
    std::map<IntMat, std::vector<size_t>> by_span;
    for (size_t i = 0; i < cells.size(); ++i) by_span[cells[i].span_lattice()].push_back(i);
    std::vector<Cone> resolved;
    for (const auto& [span, ids] : by_span) {
      bool overlap = false;
      for (size_t a = 0; a < ids.size() && !overlap; ++a)
        for (size_t b = a + 1; b < ids.size() && !overlap; ++b) {
          Cone inter = cone_intersection(cells[ids[a]], cells[ids[b]]);
          if (inter.dim() == g) overlap = true;
        }
      if (!overlap) {
        for (size_t i : ids) resolved.push_back(cells[i]);
      } else {
        check(g == 2, errc::out_of_range,
              "overlapping intersection cells beyond dimension 2");
        std::vector<Cone> group;
        for (size_t i : ids) group.push_back(cells[i]);
        for (auto& s : detail::refine_plane_cells(group)) {
          // keep only sectors inside the union of the group
          bool inside = false;
          for (const auto& c : group)
            if (c.contains_cone(s)) { inside = true; break; }
          if (inside) resolved.push_back(std::move(s));
        }
      }
    }
    cells = std::move(resolved);
  }

  TropicalCycle out(d, g);
  for (const auto& cell : cells) {
    Rat w = 0;
    for (const auto& p : meets)
      if (p.sigma->contains_cone(cell) && p.tau->contains_cone(cell)) w += p.contribution;
    if (w != 0) out.set_weight(cell, w);
  }
  if (cells.empty() && g == 0) {
    // empty intersection: the zero cycle in dimension 0
    out.add_carrier_cone(Cone::origin(d));
  }
  return out;
}

}  // namespace tropmat
