// tropmat: exact computations with Bergman fans, matroid Chow rings,
// Minkowski weights and genus-zero tropical stable map moduli.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>

#include "tropmat/chow.hpp"
#include "tropmat/cycle.hpp"
#include "tropmat/fan.hpp"
#include "tropmat/json_io.hpp"
#include "tropmat/matroid.hpp"
#include "tropmat/moduli.hpp"
#include "tropmat/newton.hpp"
#include "tropmat/virtual_weight.hpp"

namespace {

using namespace tropmat;

constexpr int kExitValidation = 2;
constexpr int kExitMathFailure = 3;

struct Options {
  std::string matroid_path;
  std::string gamma_path;
  std::string cycle_path;
  std::string cycle2_path;
  std::string fan_path;
  std::string constraints_path;
  std::string out_path;
  std::string format = "json";
  long long c1beta = 0;
  bool c1beta_set = false;
  uint64_t seed = 1;
  int max_r = 8;
  int max_n = 3;
};

void emit(const Options& opt, const json& j, const std::string& table) {
  std::string text = opt.format == "table" && !table.empty() ? table : j.dump(2) + "\n";
  if (opt.out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(opt.out_path);
    check(out.good(), errc::bad_input, "cannot write " + opt.out_path);
    out << text;
  }
}

Matroid load_matroid(const Options& opt) {
  check(!opt.matroid_path.empty(), errc::bad_input, "--matroid is required");
  return matroid_from_json(load_json_file(opt.matroid_path));
}

DiscreteData load_gamma(const Options& opt, const Matroid& m) {
  check(!opt.gamma_path.empty(), errc::bad_input, "--gamma is required");
  DiscreteData g = gamma_from_json(load_json_file(opt.gamma_path), m.n());
  check(g.r <= opt.max_r, errc::out_of_range, "r exceeds --max-r");
  check(g.n <= opt.max_n, errc::out_of_range, "n exceeds --max-n");
  return g;
}

int run_bergman(const Options& opt) {
  Matroid m = load_matroid(opt);
  Fan fan = bergman_fan(m);
  json j = fan_to_json(fan);
  std::string table = "bergman fan: ambient dim " + std::to_string(fan.ambient_dim()) +
                      ", cones " + std::to_string(fan.cones().size()) + ", dim " +
                      std::to_string(fan.dim()) + "\n";
  emit(opt, j, table);
  return 0;
}

int run_chow(const Options& opt) {
  Matroid m = load_matroid(opt);
  ChowRing ring(m);
  json dims = json::array();
  std::string table = "grade dimensions:";
  for (int k = 0; k <= ring.top_grade(); ++k) {
    dims.push_back(ring.dim(k));
    table += " " + std::to_string(ring.dim(k));
  }
  table += "\n";
  json j;
  j["top_grade"] = ring.top_grade();
  j["dimensions"] = dims;
  json fy = json::array();
  for (int k = 0; k <= ring.top_grade(); ++k) fy.push_back(ring.fy_basis(k).size());
  j["fy_basis_sizes"] = fy;
  emit(opt, j, table);
  return 0;
}

int run_chow_degree(const Options& opt) {
  Matroid m = load_matroid(opt);
  ChowRing ring(m);
  check(!opt.cycle_path.empty(), errc::bad_input, "--cycle (a Chow class file) is required");
  ChowClass c = chow_class_from_json(ring, load_json_file(opt.cycle_path));
  Rat deg = ring.degree(c);
  json j;
  j["degree"] = rat_to_string(deg);
  emit(opt, j, "degree: " + rat_to_string(deg) + "\n");
  return 0;
}

int run_curve_lattice(const Options& opt) {
  Matroid m = load_matroid(opt);
  CurveClassLattice lat = curve_class_lattice(m);
  json j;
  j["rank"] = lat.rank();
  json rays = json::array();
  for (uint32_t r : lat.rays) rays.push_back(mask_to_json(r));
  j["rays"] = rays;
  json basis = json::array();
  for (const auto& row : lat.basis) basis.push_back(int_vec_to_json(row));
  j["basis"] = basis;
  emit(opt, j, "rank A_1(M): " + std::to_string(lat.rank()) + "\n");
  return 0;
}

int run_trop_moduli(const Options& opt) {
  Matroid m = load_matroid(opt);
  DiscreteData g = load_gamma(opt, m);
  ModuliComplex cx(bergman_fan(m), g.leg_dirs);
  EmbeddedCells cells(cx);
  json j = moduli_complex_to_json(cx, cells);
  std::string table = "moduli cells: " + std::to_string(cx.cells().size()) + ", dim " +
                      std::to_string(cx.dim()) + (cx.pure() ? ", pure" : ", not pure") + "\n";
  emit(opt, j, table);
  return 0;
}

int run_balance_check(const Options& opt) {
  check(!opt.cycle_path.empty(), errc::bad_input, "--cycle is required");
  TropicalCycle z = cycle_from_json(load_json_file(opt.cycle_path));
  BalanceReport rep = z.check_balanced();
  json j;
  j["balanced"] = rep.balanced;
  if (!rep.balanced) {
    json face = json::array();
    for (const auto& r : rep.face->rays()) face.push_back(int_vec_to_json(r));
    j["offending_face_rays"] = face;
    json defect = json::array();
    for (const auto& x : rep.defect) defect.push_back(rat_to_string(x));
    j["defect"] = defect;
  }
  emit(opt, j, std::string("balanced: ") + (rep.balanced ? "yes" : "no") + "\n");
  return 0;
}

int run_intersect(const Options& opt) {
  check(!opt.cycle_path.empty() && !opt.cycle2_path.empty(), errc::bad_input,
        "--cycle and --cycle2 are required");
  TropicalCycle a = cycle_from_json(load_json_file(opt.cycle_path));
  TropicalCycle b = cycle_from_json(load_json_file(opt.cycle2_path));
  Displacement used;
  TropicalCycle st = stable_intersect(a, b, opt.seed, &used);
  json j = cycle_to_json(st);
  j["displacement"] = int_vec_to_json(used.vector);
  j["displacement_retries"] = used.retries;
  if (st.dim() == 0) j["degree"] = rat_to_string(st.degree0());
  emit(opt, j, "stable intersection: dim " + std::to_string(st.dim()) + ", cells " +
                   std::to_string(st.support().size()) + "\n");
  return 0;
}

int run_degree(const Options& opt) {
  check(!opt.cycle_path.empty(), errc::bad_input, "--cycle is required");
  TropicalCycle z = cycle_from_json(load_json_file(opt.cycle_path));
  Rat deg = z.degree0();
  json j;
  j["degree"] = rat_to_string(deg);
  emit(opt, j, "degree: " + rat_to_string(deg) + "\n");
  return 0;
}

int run_virtual_weight(const Options& opt) {
  Matroid m = load_matroid(opt);
  DiscreteData g = load_gamma(opt, m);
  check(opt.c1beta_set, errc::bad_input, "--c1beta is required");
  WeightSolution sol;
  VirtualWeight vw = virtual_weight(m, g, Int(opt.c1beta), &sol);
  json j;
  j["virtual_dimension"] = vw.dim;
  j["support_candidates"] = sol.support.size();
  j["solution_space_dim"] = sol.solution_dim;
  json support = json::array();
  for (size_t s = 0; s < sol.support.size(); ++s) {
    json cell;
    cell["type"] = vw.complex->cells()[sol.support[s]].key();
    if (sol.normalized) cell["weight"] = rat_to_string((*sol.normalized)[s]);
    support.push_back(cell);
  }
  j["support"] = support;
  if (sol.normalized) {
    j["cycle"] = cycle_to_json(vw.to_cycle());
    j["balanced"] = vw.check_balanced().balanced;
  }
  std::string table = "virtual dimension " + std::to_string(vw.dim) + ", solution space dim " +
                      std::to_string(sol.solution_dim) + "\n";
  emit(opt, j, table);
  return 0;
}

int run_reconstruct(const Options& opt) {
  Matroid m = load_matroid(opt);
  DiscreteData g = load_gamma(opt, m);
  check(!opt.constraints_path.empty(), errc::bad_input, "--constraints is required");
  json jc = load_json_file(opt.constraints_path);
  // the boolean weight when the matroid is Boolean, otherwise solve
  VirtualWeight vw;
  if (m == Matroid::boolean_matroid(m.ground_size())) {
    vw = boolean_weight(g, false);
  } else {
    check(opt.c1beta_set, errc::bad_input, "--c1beta is required for non-Boolean matroids");
    vw = virtual_weight(m, g, Int(opt.c1beta));
  }
  std::vector<EvConstraint> cons;
  for (const auto& item : jc) {
    int leg = item.at("leg").get<int>();
    if (item.contains("point") && item.at("point").get<bool>()) {
      cons.push_back(point_constraint(leg, g.n));
    } else {
      cons.push_back(EvConstraint{leg, cycle_from_json(item.at("cycle"))});
    }
  }
  Rat count = reconstruct_count(vw, cons, opt.seed);
  json j;
  j["count"] = rat_to_string(count);
  emit(opt, j, "count: " + rat_to_string(count) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact tropical computations for matroids and stable map moduli"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--matroid", opt.matroid_path, "matroid JSON file");
    sub->add_option("--gamma", opt.gamma_path, "discrete data JSON file");
    sub->add_option("--cycle", opt.cycle_path, "cycle (or Chow class) JSON file");
    sub->add_option("--cycle2", opt.cycle2_path, "second cycle JSON file");
    sub->add_option("--fan", opt.fan_path, "fan JSON file");
    sub->add_option("--constraints", opt.constraints_path, "constraint list JSON file");
    sub->add_option("--c1beta", opt.c1beta, "deg(c_1(M) cap beta), caller supplied")
        ->each([&](const std::string&) { opt.c1beta_set = true; });
    sub->add_option("--seed", opt.seed, "seed for displacements and translations");
    sub->add_option("--max-r", opt.max_r, "marked point limit");
    sub->add_option("--max-n", opt.max_n, "target dimension limit");
    sub->add_option("--out", opt.out_path, "output path (default stdout)");
    sub->add_option("--format", opt.format, "json|table")
        ->check(CLI::IsMember({"json", "table"}));
  };

  std::map<std::string, std::function<int(const Options&)>> actions = {
      {"bergman", run_bergman},
      {"chow", run_chow},
      {"chow-degree", run_chow_degree},
      {"curve-lattice", run_curve_lattice},
      {"trop-moduli", run_trop_moduli},
      {"balance-check", run_balance_check},
      {"intersect", run_intersect},
      {"degree", run_degree},
      {"virtual-weight", run_virtual_weight},
      {"reconstruct", run_reconstruct},
  };
  std::map<std::string, std::string> blurbs = {
      {"bergman", "Bergman fan of a matroid"},
      {"chow", "Chow ring grade dimension table"},
      {"chow-degree", "degree of a top-grade Chow class"},
      {"curve-lattice", "curve class lattice A_1(M)"},
      {"trop-moduli", "genus-zero tropical stable map moduli complex"},
      {"balance-check", "verify the balancing condition of a cycle"},
      {"intersect", "stable intersection of two cycles"},
      {"degree", "degree of a zero-dimensional cycle"},
      {"virtual-weight", "solve for the virtual Minkowski weight"},
      {"reconstruct", "invariants from evaluation constraints"},
  };
  for (auto& [name, fn] : actions) add_common(app.add_subcommand(name, blurbs[name]));

  CLI11_PARSE(app, argc, argv);

  std::string sub = app.get_subcommands().front()->get_name();
  try {
    return actions.at(sub)(opt);
  } catch (const tropmat::error& e) {
    nlohmann::json diag;
    diag["error"] = e.what();
    std::cerr << diag.dump() << "\n";
    return e.is_math_failure() ? kExitMathFailure : kExitValidation;
  } catch (const std::exception& e) {
    nlohmann::json diag;
    diag["error"] = std::string("BadInput: ") + e.what();
    std::cerr << diag.dump() << "\n";
    return kExitValidation;
  }
}
