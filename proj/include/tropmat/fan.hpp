#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "tropmat/errors.hpp"
#include "tropmat/linalg.hpp"
#include "tropmat/lp.hpp"
#include "tropmat/matroid.hpp"

namespace tropmat {

// Ambient lattice N = Z^{n+1} / Z(1,..,1), represented by dropping the last
// coordinate: e_i -> standard basis vector for i < n, e_n -> -(e_0+..+e_{n-1}).

inline IntVec quotient_rep(uint32_t subset_mask, int ground_size) {
  int n = ground_size - 1;
  IntVec v(n, Int(0));
  for (int i = 0; i < ground_size; ++i) {
    if (!(subset_mask & (1u << i))) continue;
    if (i < n)
      v[i] += 1;
    else
      for (int j = 0; j < n; ++j) v[j] -= 1;
  }
  return v;
}

// Rational polyhedral cone, rays plus lineality, in a fixed ambient Z^dim.
// Bergman and permutohedral cones are simplicial with no lineality; cells
// produced by intersections may be neither.
class Cone {
 public:
  Cone() = default;
  Cone(IntMat rays, IntMat lineality, size_t ambient_dim)
      : ambient_(ambient_dim) {
    for (auto& r : rays) {
      IntVec p = primitive(r);
      if (!is_zero(p)) rays_.push_back(std::move(p));
    }
    std::sort(rays_.begin(), rays_.end());
    rays_.erase(std::unique(rays_.begin(), rays_.end()), rays_.end());
    if (!lineality.empty()) lineality_ = hermite_basis(lineality, ambient_dim);
    dim_ = span_rank();
  }

  static Cone from_rays(IntMat rays, size_t ambient_dim) {
    return Cone(std::move(rays), {}, ambient_dim);
  }

  static Cone origin(size_t ambient_dim) { return Cone({}, {}, ambient_dim); }

  const IntMat& rays() const { return rays_; }
  const IntMat& lineality() const { return lineality_; }
  size_t ambient_dim() const { return ambient_; }
  int dim() const { return dim_; }
  bool is_origin() const { return rays_.empty() && lineality_.empty(); }

  IntMat generators() const {
    IntMat g = rays_;
    for (const auto& l : lineality_) {
      g.push_back(l);
      g.push_back(scale(Int(-1), l));
    }
    return g;
  }

  // all span generators (one per lineality direction)
  IntMat span_generators() const {
    IntMat g = rays_;
    for (const auto& l : lineality_) g.push_back(l);
    return g;
  }

  // canonical identity: primitive sorted rays + hermite lineality basis
  std::pair<IntMat, IntMat> key() const { return {rays_, lineality_}; }

  bool operator==(const Cone& o) const {
    return ambient_ == o.ambient_ && rays_ == o.rays_ && lineality_ == o.lineality_;
  }
  bool operator<(const Cone& o) const {
    return std::tie(rays_, lineality_) < std::tie(o.rays_, o.lineality_);
  }

  bool contains(const IntVec& x) const {
    if (is_zero(x)) return true;
    LinearSystem sys(0);
    std::vector<size_t> lam;
    for (size_t i = 0; i < rays_.size(); ++i) lam.push_back(sys.add_var(Rat(0)));
    std::vector<size_t> mu;
    for (size_t i = 0; i < lineality_.size(); ++i) mu.push_back(sys.add_var());
    for (size_t c = 0; c < ambient_; ++c) {
      std::vector<std::pair<size_t, Rat>> terms;
      for (size_t i = 0; i < rays_.size(); ++i) terms.push_back({lam[i], Rat(rays_[i][c])});
      for (size_t i = 0; i < lineality_.size(); ++i)
        terms.push_back({mu[i], Rat(lineality_[i][c])});
      sys.add_eq(terms, Rat(x[c]));
    }
    return sys.feasible();
  }

  // x in relint(cone): scale-invariant test, K x = sum lambda_i r_i + mu L
  // with K >= 1 and every lambda_i >= 1.
  bool contains_relint(const IntVec& x) const {
    if (is_origin()) return is_zero(x);
    LinearSystem sys(0);
    size_t K = sys.add_var(Rat(1));
    std::vector<size_t> lam;
    for (size_t i = 0; i < rays_.size(); ++i) lam.push_back(sys.add_var(Rat(1)));
    std::vector<size_t> mu;
    for (size_t i = 0; i < lineality_.size(); ++i) mu.push_back(sys.add_var());
    for (size_t c = 0; c < ambient_; ++c) {
      std::vector<std::pair<size_t, Rat>> terms;
      terms.push_back({K, Rat(-x[c])});
      for (size_t i = 0; i < rays_.size(); ++i) terms.push_back({lam[i], Rat(rays_[i][c])});
      for (size_t i = 0; i < lineality_.size(); ++i)
        terms.push_back({mu[i], Rat(lineality_[i][c])});
      sys.add_eq(terms, Rat(0));
    }
    return sys.feasible();
  }

  bool contains_cone(const Cone& other) const {
    for (const auto& g : other.generators())
      if (!contains(g)) return false;
    return true;
  }

  IntVec relint_point() const {
    IntVec p(ambient_, Int(0));
    for (const auto& r : rays_) p = add(p, r);
    return p;  // lineality contributes 0
  }

  // Saturated lattice of the linear span, canonical basis rows.
  IntMat span_lattice() const {
    IntMat gens = span_generators();
    if (gens.empty()) return {};
    return saturated_basis(gens, ambient_);
  }

  // Faces as ray subsets; valid for simplicial cones, and for general ones
  // via an exact supporting-functional test. Lineality is shared by all faces.
  std::vector<Cone> faces() const {
    std::vector<Cone> out;
    size_t nr = rays_.size();
    check(nr <= 16, errc::out_of_range, "face enumeration on too many rays");
    bool simplicial = is_simplicial();
    for (uint32_t s = 0; s < (1u << nr); ++s) {
      IntMat sub;
      for (size_t i = 0; i < nr; ++i)
        if (s & (1u << i)) sub.push_back(rays_[i]);
      if (!simplicial && !is_face_subset(s)) continue;
      out.push_back(Cone(std::move(sub), lineality_, ambient_));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  bool is_simplicial() const {
    return static_cast<size_t>(dim_) == rays_.size() + lineality_.size();
  }

  bool is_unimodular() const {
    if (rays_.empty() && lineality_.empty()) return true;
    IntMat sat = span_lattice();
    IntMat coords;
    for (const auto& g : span_generators()) {
      auto c = lattice_coords(sat, g);
      if (!c) return false;
      coords.push_back(*c);
    }
    if (n_rows(coords) != static_cast<size_t>(dim_)) return false;
    Int idx = lattice_index_full(coords, dim_);
    return idx == 1;
  }

  // Detects hidden lineality and non-extremal rays; used when cones come
  // from outside (JSON import) rather than from our own constructions.
  Cone canonicalized() const {
    RatMat eqs;  // span equations
    IntMat gens = span_generators();
    if (!gens.empty()) {
      for (auto& row : nullspace(to_rat(gens))) eqs.push_back(row);
    } else {
      eqs = rat_identity(ambient_);
    }
    RatMat ineq;
    // H-representation inside the span: supporting functionals are found by
    // DD on the dual; cheaper here to re-run DD on the primal description.
    // Build { x : x = sum lam r + mu l, lam >= 0 } as an H-rep via duality:
    // instead, express membership inequalities from the dual cone basis.
    // Desk scale: dualize by enumerating facets through LP is overkill; we
    // take the direct route: DD on the system { eqs x = 0 } cut by the dual
    // description computed from generators.
    // The dual cone of C = cone(R) + span(L) is { f : f L = 0, f R >= 0 }.
    ConeVRep dual = double_description(
        [&] {
          RatMat lin_eq;
          for (const auto& l : lineality_) lin_eq.push_back(to_rat(l));
          return lin_eq;
        }(),
        to_rat(rays_), ambient_);
    RatMat primal_ineq;
    for (const auto& f : dual.rays) primal_ineq.push_back(to_rat(f));
    RatMat primal_eq;
    for (const auto& f : dual.lineality) {
      primal_eq.push_back(to_rat(f));  // f and -f both valid: equality
    }
    ConeVRep vrep = double_description(primal_eq, primal_ineq, ambient_);
    return Cone(vrep.rays, vrep.lineality, ambient_);
  }

 private:
  static IntMat hermite_basis(const IntMat& gens, size_t dim) {
    // unique representation via the saturated basis of the span; lineality
    // spaces here are saturated by construction
    return saturated_basis(gens, dim);
  }

  int span_rank() const {
    IntMat g = span_generators();
    return g.empty() ? 0 : static_cast<int>(mat_rank(g));
  }

  // is the ray subset s the ray set of a face: exists f vanishing on the
  // subset and the lineality, strictly positive on the remaining rays
  bool is_face_subset(uint32_t s) const {
    LinearSystem sys(0);
    std::vector<size_t> f;
    for (size_t c = 0; c < ambient_; ++c) f.push_back(sys.add_var());
    auto add_dot = [&](const IntVec& v, Rat rhs, bool equality) {
      std::vector<std::pair<size_t, Rat>> terms;
      for (size_t c = 0; c < ambient_; ++c)
        if (v[c] != 0) terms.push_back({f[c], Rat(v[c])});
      if (equality) {
        sys.add_eq(terms, rhs);
      } else {
        size_t slack = sys.add_var(Rat(0));
        terms.push_back({slack, Rat(-1)});
        sys.add_eq(terms, rhs);
      }
    };
    for (const auto& l : lineality_) add_dot(l, Rat(0), true);
    for (size_t i = 0; i < rays_.size(); ++i) {
      if (s & (1u << i))
        add_dot(rays_[i], Rat(0), true);
      else
        add_dot(rays_[i], Rat(1), false);  // f . r - slack = 1, slack >= 0
    }
    return sys.feasible();
  }

  size_t ambient_ = 0;
  IntMat rays_;
  IntMat lineality_;
  int dim_ = 0;
};

// Lattice normal n_{sigma,tau} for a facet tau of sigma: a lattice point of
// sigma generating N_sigma / N_tau, well defined modulo N_tau.
inline IntVec lattice_normal(const Cone& tau, const Cone& sigma) {
  check(tau.ambient_dim() == sigma.ambient_dim(), errc::ambient_mismatch,
        "cones in different ambient spaces");
  check(tau.dim() + 1 == sigma.dim(), errc::not_a_facet, "dimension gap is not one");
  check(sigma.contains_cone(tau), errc::not_a_facet, "tau is not contained in sigma");
  IntMat b_sigma = sigma.span_lattice();
  size_t k = b_sigma.size();
  if (tau.dim() == 0) {
    check(sigma.lineality().empty() && sigma.rays().size() == 1, errc::not_a_facet,
          "origin is a facet of rays only");
    return sigma.rays()[0];
  }
  IntMat b_tau = tau.span_lattice();
  IntMat h;
  for (const auto& row : b_tau) {
    auto coords = lattice_coords(b_sigma, row);
    check(coords.has_value(), errc::not_a_facet, "facet lattice not inside cone lattice");
    h.push_back(*coords);
  }
  IntVec x = complete_corank_one(h, k);
  IntVec w(sigma.ambient_dim(), Int(0));
  for (size_t i = 0; i < k; ++i) w = add(w, scale(x[i], b_sigma[i]));
  // orient toward sigma: some generator of sigma off span(tau) must have a
  // positive coefficient on w
  RatMat basis_rows = to_rat(b_tau);
  for (const auto& u : sigma.span_generators()) {
    if (in_row_span(to_rat(b_tau), to_rat(u))) continue;
    // solve u = alpha w + (combination of b_tau)
    RatMat sys = basis_rows;
    sys.insert(sys.begin(), to_rat(w));
    auto sol = solve(transpose(sys), to_rat(u));
    check(sol.has_value(), errc::not_a_facet, "generator not in span of sigma");
    if ((*sol)[0] < 0) return scale(Int(-1), w);
    return w;
  }
  fail(errc::not_a_facet, "sigma has no generator off the facet span");
}

// ---------------------------------------------------------------------------

class Fan {
 public:
  explicit Fan(size_t ambient_dim) : ambient_(ambient_dim) {}

  size_t ambient_dim() const { return ambient_; }
  const std::vector<Cone>& cones() const { return cones_; }

  void add_cone(Cone c) {
    check(c.ambient_dim() == ambient_, errc::ambient_mismatch, "cone in wrong ambient");
    if (index_.emplace(c.key(), cones_.size()).second) cones_.push_back(std::move(c));
  }

  bool has_cone(const Cone& c) const { return index_.count(c.key()) > 0; }

  std::optional<size_t> find(const Cone& c) const {
    auto it = index_.find(c.key());
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::vector<size_t> cones_of_dim(int d) const {
    std::vector<size_t> out;
    for (size_t i = 0; i < cones_.size(); ++i)
      if (cones_[i].dim() == d) out.push_back(i);
    return out;
  }

  int dim() const {
    int d = 0;
    for (const auto& c : cones_) d = std::max(d, c.dim());
    return d;
  }

  bool is_pure() const {
    int d = dim();
    for (const auto& c : cones_) {
      bool maximal = true;
      for (const auto& o : cones_)
        if (&o != &c && o.dim() > c.dim() && o.contains_cone(c)) { maximal = false; break; }
      if (maximal && c.dim() != d) return false;
    }
    return true;
  }

  bool operator==(const Fan& o) const {
    if (ambient_ != o.ambient_ || cones_.size() != o.cones_.size()) return false;
    for (const auto& c : cones_)
      if (!o.has_cone(c)) return false;
    return true;
  }

 private:
  size_t ambient_;
  std::vector<Cone> cones_;
  std::map<std::pair<IntMat, IntMat>, size_t> index_;
};

inline bool is_subfan(const Fan& sub, const Fan& super) {
  check(sub.ambient_dim() == super.ambient_dim(), errc::ambient_mismatch,
        "fans in different ambient spaces");
  for (const auto& c : sub.cones())
    if (!super.has_cone(c)) return false;
  return true;
}

namespace detail {

inline void chain_cones(const std::vector<uint32_t>& pool, size_t start,
                        std::vector<uint32_t>& chain, int ground_size, Fan& fan) {
  IntMat rays;
  for (uint32_t s : chain) rays.push_back(quotient_rep(s, ground_size));
  fan.add_cone(Cone::from_rays(rays, ground_size - 1));
  for (size_t i = start; i < pool.size(); ++i) {
    uint32_t next = pool[i];
    if (!chain.empty()) {
      uint32_t last = chain.back();
      if ((last & next) != last || last == next) continue;  // need strict inclusion
    }
    chain.push_back(next);
    chain_cones(pool, i + 1, chain, ground_size, fan);
    chain.pop_back();
  }
}

// all chains from a pool of subsets ordered so that inclusions go forward
inline Fan fan_of_chains(std::vector<uint32_t> pool, int ground_size) {
  std::sort(pool.begin(), pool.end(), [](uint32_t a, uint32_t b) {
    int pa = popcount(a), pb = popcount(b);
    return pa != pb ? pa < pb : a < b;
  });
  Fan fan(ground_size - 1);
  std::vector<uint32_t> chain;
  chain_cones(pool, 0, chain, ground_size, fan);
  return fan;
}

}  // namespace detail

// Normal fan of the permutohedron: cones indexed by chains of nonempty
// proper subsets of {0,..,n}, with ray e_S per subset S.
inline Fan permutohedral_fan(int n) {
  check(n >= 1, errc::out_of_range, "permutohedral fan needs n >= 1");
  check(n + 1 <= kMaxGroundSize, errc::out_of_range, "n too large");
  int gs = n + 1;
  std::vector<uint32_t> pool;
  uint32_t all = (1u << gs) - 1;
  for (uint32_t s = 1; s < all; ++s) pool.push_back(s);
  return detail::fan_of_chains(std::move(pool), gs);
}

// Projective Bergman fan: cones indexed by chains of proper nonempty flats.
// For the one-element Boolean matroid this is the origin in a zero
// dimensional space.
inline Fan bergman_fan(const Matroid& m) {
  check(m.is_loop_free(), errc::loopy_matroid, "Bergman fan needs a loop-free matroid");
  std::vector<uint32_t> pool;
  for (const auto& f : m.proper_flats()) pool.push_back(f.elements);
  return detail::fan_of_chains(std::move(pool), m.ground_size());
}

}  // namespace tropmat
