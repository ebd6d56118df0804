#pragma once

#include <json.hpp>

#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "tropmat/chow.hpp"
#include "tropmat/cycle.hpp"
#include "tropmat/errors.hpp"
#include "tropmat/fan.hpp"
#include "tropmat/matroid.hpp"
#include "tropmat/moduli.hpp"

namespace tropmat {

using json = nlohmann::json;

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  check(in.good(), errc::bad_input, "cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    fail(errc::bad_input, "invalid JSON in " + path + ": " + e.what());
  }
  return j;
}

// ---------------------------------------------------------------------------
// Matroid: {"n": int, "type": "bases"|"uniform"|"graphic"|"linear", "data": ...}

inline uint32_t mask_from_json(const json& arr, int ground_size) {
  uint32_t m = 0;
  check(arr.is_array(), errc::bad_input, "subset must be an array");
  for (const auto& e : arr) {
    check(e.is_number_integer(), errc::bad_input, "subset entries must be integers");
    int v = e.get<int>();
    check(v >= 0 && v < ground_size, errc::out_of_range, "element outside ground set");
    m |= 1u << v;
  }
  return m;
}

inline json mask_to_json(uint32_t mask) {
  json arr = json::array();
  for (int e : mask_elements(mask)) arr.push_back(e);
  return arr;
}

inline Matroid matroid_from_json(const json& j) {
  check(j.is_object() && j.contains("n") && j.contains("type"), errc::bad_input,
        "matroid JSON needs n and type");
  int n = j.at("n").get<int>();
  int gs = n + 1;
  std::string type = j.at("type").get<std::string>();
  if (type == "uniform") {
    int r = j.at("data").at("r").get<int>();
    return Matroid::uniform(r, gs);
  }
  if (type == "bases") {
    std::vector<uint32_t> bases;
    for (const auto& b : j.at("data")) bases.push_back(mask_from_json(b, gs));
    return Matroid::from_bases(gs, std::move(bases), true);
  }
  if (type == "graphic") {
    std::vector<std::pair<int, int>> edges;
    for (const auto& e : j.at("data")) {
      check(e.is_array() && e.size() == 2, errc::bad_input, "edges are pairs");
      edges.push_back({e[0].get<int>(), e[1].get<int>()});
    }
    check(static_cast<int>(edges.size()) == gs, errc::bad_input,
          "edge count must equal n+1");
    return Matroid::graphic(edges);
  }
  if (type == "linear") {
    RatMat matrix;
    for (const auto& row : j.at("data")) {
      RatVec r;
      for (const auto& e : row)
        r.push_back(e.is_string() ? rat_from_string(e.get<std::string>())
                                  : Rat(e.get<long long>()));
      matrix.push_back(std::move(r));
    }
    check(!matrix.empty() && static_cast<int>(n_cols(matrix)) == gs, errc::bad_input,
          "linear matroid matrix must have n+1 columns");
    return Matroid::linear(matrix);
  }
  fail(errc::bad_input, "unknown matroid type: " + type);
}

inline json matroid_to_json(const Matroid& m) {
  json j;
  j["n"] = m.n();
  j["type"] = "bases";
  json bases = json::array();
  for (uint32_t b : m.bases()) bases.push_back(mask_to_json(b));
  j["data"] = bases;
  return j;
}

// ---------------------------------------------------------------------------
// Fan: rays as integer vectors, cones as ray-index lists.

inline json int_vec_to_json(const IntVec& v) {
  json arr = json::array();
  for (const auto& x : v) arr.push_back(x.str());
  return arr;
}

inline IntVec int_vec_from_json(const json& arr) {
  IntVec v;
  for (const auto& e : arr) {
    if (e.is_string())
      v.push_back(Int(e.get<std::string>()));
    else
      v.push_back(Int(e.get<long long>()));
  }
  return v;
}

inline json fan_to_json(const Fan& fan) {
  // collect rays in deterministic order
  std::map<IntVec, size_t> ray_index;
  std::vector<IntVec> rays;
  for (const auto& c : fan.cones())
    for (const auto& r : c.rays())
      if (ray_index.emplace(r, rays.size()).second) rays.push_back(r);
  json j;
  j["ambient_dim"] = fan.ambient_dim();
  json jr = json::array();
  for (const auto& r : rays) jr.push_back(int_vec_to_json(r));
  j["rays"] = jr;
  json jc = json::array();
  std::vector<std::vector<size_t>> cone_rows;
  for (const auto& c : fan.cones()) {
    std::vector<size_t> row;
    for (const auto& r : c.rays()) row.push_back(ray_index.at(r));
    std::sort(row.begin(), row.end());
    cone_rows.push_back(std::move(row));
  }
  std::sort(cone_rows.begin(), cone_rows.end(), [](const auto& a, const auto& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  for (const auto& row : cone_rows) {
    json arr = json::array();
    for (size_t i : row) arr.push_back(i);
    jc.push_back(arr);
  }
  j["cones"] = jc;
  return j;
}

inline Fan fan_from_json(const json& j) {
  size_t dim = j.at("ambient_dim").get<size_t>();
  std::vector<IntVec> rays;
  for (const auto& r : j.at("rays")) {
    IntVec v = int_vec_from_json(r);
    check(v.size() == dim, errc::bad_input, "ray of wrong dimension");
    rays.push_back(std::move(v));
  }
  Fan fan(dim);
  for (const auto& c : j.at("cones")) {
    IntMat cone_rays;
    for (const auto& i : c) {
      size_t idx = i.get<size_t>();
      check(idx < rays.size(), errc::bad_input, "cone refers to a missing ray");
      cone_rays.push_back(rays[idx]);
    }
    Cone cone = Cone::from_rays(cone_rays, dim).canonicalized();
    for (const auto& f : cone.faces()) fan.add_cone(f);
  }
  return fan;
}

// ---------------------------------------------------------------------------
// Cycle: {ambient_dim, dim, cones: [{rays, lineality?, weight}]}

inline json cycle_to_json(const TropicalCycle& z) {
  json j;
  j["ambient_dim"] = z.ambient_dim();
  j["dim"] = z.dim();
  std::vector<std::pair<Cone, Rat>> cells = z.support();
  std::sort(cells.begin(), cells.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  json jc = json::array();
  for (const auto& [cone, w] : cells) {
    json c;
    json jr = json::array();
    for (const auto& r : cone.rays()) jr.push_back(int_vec_to_json(r));
    c["rays"] = jr;
    if (!cone.lineality().empty()) {
      json jl = json::array();
      for (const auto& l : cone.lineality()) jl.push_back(int_vec_to_json(l));
      c["lineality"] = jl;
    }
    c["weight"] = rat_to_string(w);
    jc.push_back(c);
  }
  j["cones"] = jc;
  return j;
}

inline TropicalCycle cycle_from_json(const json& j) {
  size_t dim = j.at("ambient_dim").get<size_t>();
  int k = j.at("dim").get<int>();
  TropicalCycle z(dim, k);
  for (const auto& c : j.at("cones")) {
    IntMat rays, lin;
    for (const auto& r : c.at("rays")) rays.push_back(int_vec_from_json(r));
    if (c.contains("lineality"))
      for (const auto& l : c.at("lineality")) lin.push_back(int_vec_from_json(l));
    Cone cone = Cone(rays, lin, dim).canonicalized();
    Rat w = c.at("weight").is_string() ? rat_from_string(c.at("weight").get<std::string>())
                                       : Rat(c.at("weight").get<long long>());
    check(cone.dim() == k, errc::dimension_mismatch, "cycle cone of wrong dimension");
    z.set_weight(cone, w);
  }
  return z;
}

// ---------------------------------------------------------------------------
// Gamma: {"r": int, "n": int, "contact": {"<comma list>": [c_1rho..c_rrho]}}

inline DiscreteData gamma_from_json(const json& j, int n) {
  int r = j.at("r").get<int>();
  if (j.contains("n")) {
    check(j.at("n").get<int>() == n, errc::ambient_mismatch,
          "gamma n does not match the matroid");
  }
  std::map<uint32_t, IntVec> contact;
  if (j.contains("contact")) {
    for (const auto& [key, arr] : j.at("contact").items()) {
      uint32_t mask = 0;
      std::string tok;
      for (char ch : key + std::string(",")) {
        if (ch == ',') {
          if (!tok.empty()) {
            int e = std::stoi(tok);
            check(e >= 0 && e <= n, errc::out_of_range, "contact element out of range");
            mask |= 1u << e;
            tok.clear();
          }
        } else {
          tok += ch;
        }
      }
      contact[mask] = int_vec_from_json(arr);
    }
  }
  return make_gamma(r, n, contact);
}

inline json gamma_to_json(const DiscreteData& g) {
  json j;
  j["r"] = g.r;
  j["n"] = g.n;
  json c = json::object();
  for (size_t ray = 0; ray < g.ray_masks.size(); ++ray) {
    bool any = false;
    for (int i = 0; i < g.r; ++i) any = any || g.contact[i][ray] != 0;
    if (!any) continue;
    std::string key;
    for (int e : mask_elements(g.ray_masks[ray])) {
      if (!key.empty()) key += ",";
      key += std::to_string(e);
    }
    IntVec col(g.r);
    for (int i = 0; i < g.r; ++i) col[i] = g.contact[i][ray];
    c[key] = int_vec_to_json(col);
  }
  j["contact"] = c;
  return j;
}

// ---------------------------------------------------------------------------
// Chow classes: list of {chain: [[flat]..], exponents: [..], coeff: "p/q"}

inline ChowClass chow_class_from_json(const ChowRing& ring, const json& j) {
  check(j.is_array(), errc::bad_input, "Chow class JSON is a list of terms");
  ChowClass acc;
  bool first = true;
  for (const auto& term : j) {
    std::vector<uint32_t> flats;
    std::vector<int> exps;
    for (const auto& f : term.at("chain"))
      flats.push_back(mask_from_json(f, ring.matroid().ground_size()));
    for (const auto& e : term.at("exponents")) exps.push_back(e.get<int>());
    Rat coeff = term.at("coeff").is_string()
                    ? rat_from_string(term.at("coeff").get<std::string>())
                    : Rat(term.at("coeff").get<long long>());
    ChowClass c = coeff * ring.from_monomial(flats, exps);
    acc = first ? c : acc + c;
    first = false;
  }
  check(!first, errc::bad_input, "empty Chow class JSON");
  return acc;
}

inline json chow_class_to_json(const ChowRing& ring, const ChowClass& c) {
  json out = json::array();
  for (size_t i = 0; i < c.coords().size(); ++i) {
    if (c.coords()[i] == 0) continue;
    const ChainMono& m = ring.basis_monomial(c.grade(), i);
    json term;
    json chain = json::array();
    for (int f : m.flats) chain.push_back(mask_to_json(ring.flats()[f].elements));
    json exps = json::array();
    for (int e : m.exps) exps.push_back(e);
    term["chain"] = chain;
    term["exponents"] = exps;
    term["coeff"] = rat_to_string(c.coords()[i]);
    out.push_back(term);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Moduli complex export: types plus embedded cones in the cycle schema.

inline json moduli_complex_to_json(const ModuliComplex& cx, const EmbeddedCells& cells) {
  json types = json::array();
  for (size_t i = 0; i < cx.cells().size(); ++i) {
    const ModuliCell& cell = cx.cells()[i];
    json t;
    t["id"] = i;
    t["dim"] = cell.dim();
    t["maximal"] = cx.is_maximal(i);
    t["injective_embedding"] = cell.injective();
    json splits = json::array();
    for (uint32_t s : cell.type().shape.splits) splits.push_back(mask_to_json(s));
    t["splits"] = splits;
    t["vertex_cones"] = cell.type().vertex_cone;
    t["edge_paths"] = cell.type().edge_path;
    t["leg_paths"] = cell.type().leg_path;
    const Cone& cone = cells.cone(i);
    json jr = json::array();
    for (const auto& r : cone.rays()) jr.push_back(int_vec_to_json(r));
    t["rays"] = jr;
    if (!cone.lineality().empty()) {
      json jl = json::array();
      for (const auto& l : cone.lineality()) jl.push_back(int_vec_to_json(l));
      t["lineality"] = jl;
    }
    types.push_back(std::move(t));
  }
  json j;
  j["ambient_dim"] = cx.ambient().dim;
  j["target_cones"] = fan_to_json(cx.target().fan);
  j["types"] = types;
  return j;
}

}  // namespace tropmat
