#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "tropmat/cycle.hpp"
#include "tropmat/errors.hpp"
#include "tropmat/moduli.hpp"

namespace tropmat {

// Embedded cones of moduli cells are expensive (double description); cache
// them per complex.
class EmbeddedCells {
 public:
  explicit EmbeddedCells(const ModuliComplex& complex) : complex_(&complex) {}

  const Cone& cone(size_t i) const {
    auto it = memo_.find(i);
    if (it != memo_.end()) return it->second;
    return memo_.emplace(i, complex_->cells()[i].embedded_cone()).first->second;
  }

  const ModuliComplex& complex() const { return *complex_; }

 private:
  const ModuliComplex* complex_;
  mutable std::map<size_t, Cone> memo_;
};

// ---------------------------------------------------------------------------

// Cones of the moduli complex whose dimension equals the virtual dimension,
// faces of higher-dimensional cones included.
inline std::vector<size_t> candidate_support(const ModuliComplex& complex, int virtual_dim) {
  return complex.cells_of_dim(virtual_dim);
}

struct WeightSolution {
  std::vector<size_t> support;     // cell indices the solver ran over
  RatMat basis;                    // rows: basis of the balancing-kernel
  size_t solution_dim = 0;
  std::optional<RatVec> normalized;  // when 1-dimensional: min positive weight 1
};

// Solve the balancing conditions for weights supported on the given cells:
// at every (k-1)-cell tau of the complex the weighted relative normals of the
// adjacent support cells must lie in the span of tau.
inline WeightSolution solve_weights(const EmbeddedCells& cells,
                                    const std::vector<size_t>& support) {
  const ModuliComplex& cx = cells.complex();
  WeightSolution out;
  out.support = support;
  check(!support.empty(), errc::empty_solution, "empty candidate support");
  int k = cx.cells()[support[0]].dim();
  for (size_t i : support)
    check(cx.cells()[i].dim() == k, errc::dimension_mismatch,
          "support cells of unequal dimension");

  RatMat rows;
  for (size_t ti : cx.cells_of_dim(k - 1)) {
    std::vector<std::pair<size_t, IntVec>> normals;  // support position -> normal
    for (size_t s = 0; s < support.size(); ++s) {
      if (!cx.cell_contains(support[s], ti)) continue;
      const Cone& sigma = cells.cone(support[s]);
      const Cone& tau = cells.cone(ti);
      normals.push_back({s, lattice_normal(tau, sigma)});
    }
    if (normals.empty()) continue;
    IntMat tau_span = cells.cone(ti).span_lattice();
    RatMat functionals =
        tau_span.empty() ? rat_identity(cx.ambient().dim) : nullspace(to_rat(tau_span));
    for (const auto& f : functionals) {
      RatVec row(support.size(), Rat(0));
      bool nonzero = false;
      for (const auto& [s, nvec] : normals) {
        Rat dot = 0;
        for (size_t c = 0; c < f.size(); ++c)
          if (f[c] != 0 && nvec[c] != 0) dot += f[c] * Rat(nvec[c]);
        row[s] = dot;
        if (dot != 0) nonzero = true;
      }
      if (nonzero) rows.push_back(std::move(row));
    }
  }
  RatMat kernel = rows.empty() ? rat_identity(support.size()) : nullspace(rows);
  out.basis = kernel;
  out.solution_dim = kernel.size();
  check(out.solution_dim > 0, errc::empty_solution,
        "no nonzero balanced weighting on the candidate support");
  if (out.solution_dim == 1) {
    RatVec w = kernel[0];
    bool has_positive = false;
    for (const auto& x : w) has_positive = has_positive || x > 0;
    if (!has_positive)
      for (auto& x : w) x = -x;
    Rat min_pos = 0;
    for (const auto& x : w)
      if (x > 0 && (min_pos == 0 || x < min_pos)) min_pos = x;
    if (min_pos != 0)
      for (auto& x : w) x /= min_pos;
    out.normalized = w;
  }
  return out;
}

// ---------------------------------------------------------------------------

struct VirtualWeight {
  std::shared_ptr<const ModuliComplex> complex;
  std::shared_ptr<const EmbeddedCells> cells;
  DiscreteData gamma;       // empty ray data for lifted cylinder problems
  int dim = 0;              // virtual dimension
  std::map<size_t, Rat> weights;  // on cells of dimension `dim`
  std::string provenance;

  TropicalCycle to_cycle() const {
    TropicalCycle z(complex->ambient().dim, dim);
    for (const auto& [i, w] : weights) {
      if (w == 0) continue;
      z.set_weight(cells->cone(i), w);
    }
    if (weights.empty()) z.add_carrier_cone(Cone::origin(complex->ambient().dim));
    return z;
  }

  BalanceReport check_balanced() const { return to_cycle().check_balanced(); }
};

// Example-1 weight: 1 on every maximal cone of the moduli complex over the
// full permutohedral fan; the result must balance. Over the complete fan the
// maximal cones are exactly the top-dimensional ones (checked against the
// honest maximality computation in the unit tests). Balance verification is
// optional because it dominates the cost on larger complexes.
inline VirtualWeight boolean_weight(const DiscreteData& gamma, bool verify_balanced = true) {
  auto complex = std::make_shared<ModuliComplex>(permutohedral_fan(gamma.n), gamma.leg_dirs);
  VirtualWeight vw;
  vw.complex = complex;
  vw.cells = std::make_shared<EmbeddedCells>(*complex);
  vw.gamma = gamma;
  vw.dim = complex->dim();
  vw.provenance = "paper-example";
  for (size_t i : complex->cells_of_dim(vw.dim)) vw.weights[i] = 1;
  if (verify_balanced) {
    auto report = vw.check_balanced();
    check(report.balanced, errc::unbalanced_result,
          "weight one on maximal cones fails balancing");
  }
  return vw;
}

// Solve on the expected-dimension support of T_Gamma(Delta_M).
inline VirtualWeight virtual_weight(const Matroid& m, const DiscreteData& gamma,
                                    const Int& c1beta, WeightSolution* report = nullptr) {
  int k = vdim(gamma, m.rank() - 1, c1beta);
  check(k >= 0, errc::empty_solution, "negative virtual dimension");
  auto complex = std::make_shared<ModuliComplex>(bergman_fan(m), gamma.leg_dirs);
  auto cells = std::make_shared<EmbeddedCells>(*complex);
  std::vector<size_t> support = candidate_support(*complex, k);
  check(!support.empty(), errc::empty_solution, "no cones of the expected dimension");
  WeightSolution sol = solve_weights(*cells, support);
  if (report) *report = sol;
  VirtualWeight vw;
  vw.complex = complex;
  vw.cells = cells;
  vw.gamma = gamma;
  vw.dim = k;
  vw.provenance = "solved";
  if (sol.normalized) {
    for (size_t s = 0; s < support.size(); ++s)
      if ((*sol.normalized)[s] != 0) vw.weights[support[s]] = (*sol.normalized)[s];
  }
  return vw;
}

// ---------------------------------------------------------------------------
// Example-4 lift: M' -> M' plus two parallel points, Delta_M = Delta_{M'} x R.

inline Fan cylinder_fan(const Fan& base) {
  size_t d = base.ambient_dim();
  Fan out(d + 1);
  auto lift = [&](const IntVec& v) {
    IntVec w = v;
    w.push_back(Int(0));
    return w;
  };
  IntVec up(d + 1, Int(0)), down(d + 1, Int(0));
  up[d] = 1;
  down[d] = -1;
  for (const auto& c : base.cones()) {
    IntMat rays;
    for (const auto& r : c.rays()) rays.push_back(lift(r));
    out.add_cone(Cone(rays, {}, d + 1));
    IntMat rays_up = rays;
    rays_up.push_back(up);
    out.add_cone(Cone(rays_up, {}, d + 1));
    IntMat rays_down = rays;
    rays_down.push_back(down);
    out.add_cone(Cone(rays_down, {}, d + 1));
  }
  return out;
}

struct ProductLift {
  VirtualWeight lifted;
  std::shared_ptr<const ModuliComplex> base_complex;
};

// Pull a virtual weight back along T_Gamma(Delta_{M'} x R) -> T_Gamma(Delta_{M'}).
// The weight of a cone is the weight of its image cone; the projection drops
// the vertical coordinate of the target.
inline ProductLift product_lift(const VirtualWeight& base) {
  const ModuliComplex& bc = *base.complex;
  Fan cyl = cylinder_fan(bc.target().fan);
  IntMat lifted_dirs;
  for (const auto& d : bc.leg_dirs()) {
    IntVec v = d;
    v.push_back(Int(0));
    lifted_dirs.push_back(v);
  }
  auto complex = std::make_shared<ModuliComplex>(std::move(cyl), std::move(lifted_dirs));
  auto cells = std::make_shared<EmbeddedCells>(*complex);

  size_t base_ambient = bc.ambient().dim;
  size_t lift_ambient = complex->ambient().dim;
  check(lift_ambient == base_ambient + 1, errc::projection_mismatch,
        "lifted ambient dimension mismatch");

  // projection drops the last (vertical) ambient coordinate
  auto project = [&](const IntVec& x) {
    IntVec y(x.begin(), x.end() - 1);
    return y;
  };

  // image cell: the unique base cell whose relative interior holds the
  // projected relint point
  auto image_cell = [&](size_t i) -> std::optional<size_t> {
    RatVec p = to_rat(project(complex->cells()[i].relint_point()));
    std::optional<size_t> best;
    for (size_t j = 0; j < bc.cells().size(); ++j) {
      if (!bc.cells()[j].closed_contains(p)) continue;
      if (!best || bc.cells()[j].dim() < bc.cells()[*best].dim()) best = j;
    }
    return best;
  };

  VirtualWeight out;
  out.complex = complex;
  out.cells = cells;
  out.gamma = base.gamma;
  out.dim = base.dim + 1;
  out.provenance = "lifted-product";
  for (size_t i : complex->cells_of_dim(out.dim)) {
    auto img = image_cell(i);
    check(img.has_value(), errc::projection_mismatch,
          "lifted cell does not project into the base complex");
    auto it = base.weights.find(*img);
    if (it == base.weights.end() || it->second == 0) continue;
    if (bc.cells()[*img].dim() != base.dim) continue;
    out.weights[i] = it->second;
  }
  return ProductLift{std::move(out), base.complex};
}

// The vertical-slice cycle used to project a lifted weight back down.
inline TropicalCycle vertical_slice(size_t ambient_dim) {
  IntMat lin;
  for (size_t c = 0; c + 1 < ambient_dim; ++c) {
    IntVec v(ambient_dim, Int(0));
    v[c] = 1;
    lin.push_back(v);
  }
  TropicalCycle z(ambient_dim, static_cast<int>(ambient_dim) - 1);
  z.set_weight(Cone({}, lin, ambient_dim), Rat(1));
  return z;
}

// ---------------------------------------------------------------------------
// Reconstruction: degree of c . prod ev_i^*(Z_i) for point/divisor constraints
// with generic translations.

struct EvConstraint {
  int leg = 0;
  TropicalCycle cycle;  // in the target R^n; a point is the origin cycle
};

inline EvConstraint point_constraint(int leg, size_t target_dim) {
  TropicalCycle pt(target_dim, 0);
  pt.set_weight(Cone::origin(target_dim), Rat(1));
  return EvConstraint{leg, std::move(pt)};
}

namespace detail {

struct TranslatedConstraint {
  int leg;
  const TropicalCycle* cycle;
  IntVec shift;
};

// feasibility of { p in closure(cell), ev_leg(p) in zeta_i + shift_i for all i }
inline bool constraint_system_feasible(const ModuliCell& cell,
                                       const std::vector<TranslatedConstraint>& cons,
                                       const std::vector<const Cone*>& zetas) {
  LinearSystem sys = cell.closed_system();
  size_t d = cons.empty() ? 0 : cons[0].cycle->ambient_dim();
  for (size_t i = 0; i < cons.size(); ++i) {
    const RatMat& ev = cell.leg_position(cons[i].leg);
    const Cone& z = *zetas[i];
    std::vector<size_t> lam, mu;
    for (size_t t = 0; t < z.rays().size(); ++t) lam.push_back(sys.add_var(Rat(0)));
    for (size_t t = 0; t < z.lineality().size(); ++t) mu.push_back(sys.add_var());
    for (size_t c = 0; c < d; ++c) {
      RatVec row(sys.vars, Rat(0));
      for (size_t p = 0; p < ev[c].size(); ++p) row[p] = ev[c][p];
      for (size_t t = 0; t < z.rays().size(); ++t) row[lam[t]] = Rat(-z.rays()[t][c]);
      for (size_t t = 0; t < z.lineality().size(); ++t)
        row[mu[t]] = Rat(-z.lineality()[t][c]);
      sys.add_eq_row(std::move(row), Rat(cons[i].shift[c]));
    }
  }
  return sys.feasible();
}

}  // namespace detail

// Transverse-tuple count: for each support cell and each tuple of maximal
// constraint cells whose generic translates it meets, the contribution is
// weight * product of cell weights * the covolume of the evaluation map from
// the cell lattice to the sum of target quotients Z^n / N_zeta.
inline Rat reconstruct_count(const VirtualWeight& c, const std::vector<EvConstraint>& cons,
                             uint64_t seed = 1) {
  const ModuliComplex& cx = *c.complex;
  size_t target_dim = cx.target().dim;
  Int total_codim = 0;
  for (const auto& con : cons) {
    check(con.cycle.ambient_dim() == target_dim, errc::ambient_mismatch,
          "constraint lives in the wrong target");
    check(con.leg >= 0 && con.leg < static_cast<int>(cx.leg_dirs().size()),
          errc::out_of_range, "constraint leg out of range");
    total_codim += Int(target_dim) - con.cycle.dim();
  }
  check(total_codim == c.dim, errc::dimension_mismatch,
        "constraint codimensions do not sum to the cycle dimension");
  if (cons.empty()) {
    Rat s = 0;
    for (const auto& [i, w] : c.weights) s += w;
    return s;
  }

  // cells whose meets matter: everything of at most the cycle dimension (a
  // conservative superset of the support closure; feasible meets with cells
  // below the cycle dimension only trigger a retry, which generic translates
  // avoid)
  std::vector<bool> relevant(cx.cells().size(), false);
  for (size_t j = 0; j < cx.cells().size(); ++j)
    if (cx.cells()[j].dim() <= c.dim) relevant[j] = true;

  std::vector<std::vector<const Cone*>> choices(cons.size());
  for (size_t i = 0; i < cons.size(); ++i)
    for (const auto& cone : cons[i].cycle.carrier()) choices[i].push_back(&cone);

  constexpr int kMaxRetries = 10;
  for (int retry = 0;; ++retry) {
    check(retry < kMaxRetries, errc::genericity_failure,
          "no generic constraint translation found within the retry budget");
    SeededRng rng(seed * 7919ULL + static_cast<uint64_t>(retry));
    std::vector<detail::TranslatedConstraint> tcons;
    for (const auto& con : cons) {
      IntVec shift(target_dim);
      for (size_t i = 0; i < target_dim; ++i) shift[i] = Int(rng.next_int(23 + 11 * retry));
      tcons.push_back({con.leg, &con.cycle, shift});
    }

    bool generic = true;
    Rat count = 0;
    for (size_t ci = 0; ci < cx.cells().size() && generic; ++ci) {
      if (!relevant[ci]) continue;
      const ModuliCell& cell = cx.cells()[ci];
      // cheap necessary condition for point constraints: the point must lie
      // in the cone assigned to the vertex carrying the leg
      bool possible = true;
      for (size_t i = 0; i < cons.size() && possible; ++i) {
        if (cons[i].cycle.dim() != 0) continue;
        int base = cell.type().shape.leg_vertex[tcons[i].leg];
        const Cone& vc = cx.target().cone(cell.type().vertex_cone[base]);
        possible = vc.contains(tcons[i].shift);
      }
      if (!possible) continue;
      std::vector<size_t> pick(cons.size(), 0);
      bool done = false;
      while (!done && generic) {
        std::vector<const Cone*> zetas;
        for (size_t i = 0; i < cons.size(); ++i) zetas.push_back(choices[i][pick[i]]);
        if (detail::constraint_system_feasible(cell, tcons, zetas)) {
          bool conforming = cell.dim() == c.dim;
          for (size_t i = 0; i < cons.size() && conforming; ++i)
            conforming = zetas[i]->dim() == cons[i].cycle.dim();
          if (!conforming) {
            generic = false;  // a boundary face or a lower constraint cell is hit
            break;
          }
          // transversality and multiplicity via the evaluation pairing
          const IntMat& span = cell.span_lattice();
          bool transverse = false;
          Rat mult = 0;
          if (span.size() == static_cast<size_t>(c.dim)) {
            RatMat delta;
            bool ok = true;
            for (const auto& b : span) {
              RatMat sys = cell.embedding();
              RatVec rhs = to_rat(b);
              for (const auto& row : cell.equalities()) {
                sys.push_back(row);
                rhs.push_back(Rat(0));
              }
              auto p = solve(sys, rhs);
              if (!p) { ok = false; break; }
              RatVec image;
              for (size_t i = 0; i < cons.size(); ++i) {
                RatVec ev = mat_vec(cell.leg_position(tcons[i].leg), *p);
                RatMat quot = quotient_projection(zetas[i]->span_lattice(), target_dim);
                for (const auto& q : quot) {
                  Rat dot = 0;
                  for (size_t cc = 0; cc < target_dim; ++cc)
                    if (q[cc] != 0 && ev[cc] != 0) dot += q[cc] * ev[cc];
                  image.push_back(dot);
                }
              }
              delta.push_back(std::move(image));
            }
            if (ok && delta.size() == static_cast<size_t>(c.dim) &&
                n_cols(delta) == delta.size()) {
              Rat det = abs_det(delta);
              if (det != 0) {
                transverse = true;
                mult = det;
              }
            }
          }
          if (!transverse) {
            generic = false;
            break;
          }
          auto weight_it = c.weights.find(ci);
          if (weight_it != c.weights.end() && weight_it->second != 0) {
            Rat zw = 1;
            for (size_t i = 0; i < cons.size(); ++i) zw *= cons[i].cycle.weight(*zetas[i]);
            count += weight_it->second * zw * mult;
          }
        }
        size_t i = 0;
        for (; i < pick.size(); ++i) {
          if (++pick[i] < choices[i].size()) break;
          pick[i] = 0;
        }
        done = (i == pick.size());
      }
    }
    if (generic) return count;
  }
}

}  // namespace tropmat
