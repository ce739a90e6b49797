// Command-line front end: one subcommand per library operation, artifacts
// written to an output directory together with the effective configuration.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cdiso/coeffs.hpp"
#include "cdiso/density1d.hpp"
#include "cdiso/io.hpp"
#include "cdiso/iso1d.hpp"
#include "cdiso/l1ot.hpp"
#include "cdiso/mms.hpp"
#include "cdiso/model_profiles.hpp"
#include "cdiso/needles.hpp"
#include "cdiso/numeric.hpp"
#include "cdiso/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cdiso;

namespace {

constexpr int kSchemaVersion = 1;
constexpr int kExitRegression = 1;
constexpr int kExitUsage = 2;
constexpr int kExitDomain = 3;
constexpr int kExitResource = 4;
constexpr const char* kOutputEnv = "CDISO_OUTPUT_DIR";

struct Global {
  std::string config;
  std::string out;
  unsigned threads = 0;
  std::uint64_t seed = 0;
};

// Non-finite values have no JSON literal; they are written as strings.
json number(double x) {
  if (std::isfinite(x)) return x;
  return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
}

json numbers(const std::vector<double>& xs) {
  json out = json::array();
  for (double x : xs) out.push_back(number(x));
  return out;
}

std::vector<double> unit_grid(std::size_t count) {
  if (count < 2) throw DomainError("grid needs at least 2 points");
  return linspace(0.0, 1.0, count);
}

std::map<std::string, double> parse_params(const std::vector<std::string>& items) {
  std::map<std::string, double> out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw CLI::ValidationError("--param", "expected key=value, got " + item);
    out[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
  }
  return out;
}

// Flat `key = value` lines; '#' starts a comment.
std::vector<std::pair<std::string, std::string>> read_flat_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--config", "cannot read " + path);
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw CLI::ValidationError("--config", "line without '=': " + line);
    out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return out;
}

class Runner {
 public:
  explicit Runner(const Global& g) : g_(g) {}

  fs::path out_dir() const {
    std::string dir = g_.out;
    if (dir.empty())
      if (const char* env = std::getenv(kOutputEnv)) dir = env;
    if (dir.empty()) dir = ".";
    fs::create_directories(dir);
    return dir;
  }

  std::string path(const std::string& file) const { return (out_dir() / file).string(); }

  void report(const std::string& name, const std::string& command, json parameters, json results) const {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["command"] = command;
    doc["parameters"] = std::move(parameters);
    doc["results"] = std::move(results);
    std::ofstream out(path(name + ".json"));
    out << doc.dump(2) << '\n';
    std::cout << doc.dump(2) << '\n';
  }

  // Every option of the active subcommand chain with its final value.
  void persist_config(const CLI::App& app, const std::string& name) const {
    std::ofstream out(path(name + ".config"));
    out << "# effective configuration\n";
    std::vector<const CLI::App*> chain{&app};
    while (!chain.back()->get_subcommands().empty()) chain.push_back(chain.back()->get_subcommands().front());
    for (const CLI::App* a : chain)
      for (const CLI::Option* opt : a->get_options()) {
        const std::string key = opt->get_single_name();
        if (key.empty() || key == "help" || key == "config") continue;
        std::string value;
        if (opt->count() > 0) {
          for (const auto& r : opt->results()) value += (value.empty() ? "" : " ") + r;
        } else {
          value = opt->get_default_str();
        }
        if (opt->get_type_size() == 0 && value.empty()) value = opt->count() > 0 ? "true" : "false";
        if (!value.empty()) out << key << " = " << value << '\n';
      }
  }

  const Global& global() const { return g_; }

 private:
  const Global& g_;
};

FiniteMMS load_space(const std::string& prefix) {
  FiniteMMS X = read_space(prefix);
  X.validate();
  return X;
}

Eigen::VectorXd load_f(const std::string& path, const FiniteMMS& X) {
  Eigen::VectorXd f = read_column_csv(path);
  if (static_cast<std::size_t>(f.size()) != X.size()) throw DomainError("f has " + std::to_string(f.size()) +
                                                                         " rows, the space has " + std::to_string(X.size()));
  return f;
}

}  // namespace

int main(int argc, char** argv) {
  Global g;
  CLI::App app{"Model isoperimetric profiles, 1-D CD checks and discrete needle decompositions"};
  app.require_subcommand(1);
  app.add_option("--config", g.config, "Flat key = value file; keys are long option names");
  app.add_option("--out", g.out, std::string("Output directory (default: $") + kOutputEnv + " or .)");
  app.add_option("--threads", g.threads, "Worker threads, 0 = available parallelism")->capture_default_str();
  app.add_option("--seed", g.seed, "Seed for sampled generators")->capture_default_str();
  Runner run(g);
  int status = 0;

  // model-profile
  auto* mp = app.add_subcommand("model-profile", "I_{K,N,D} on a grid of volumes");
  double mp_K = 0, mp_N = 2, mp_D = std::numeric_limits<double>::infinity();
  std::size_t mp_grid = 11;
  std::vector<double> mp_v;
  std::string mp_mode = "dispatch";
  mp->add_option("--K", mp_K, "Curvature bound")->required();
  mp->add_option("--N", mp_N, "Dimension bound")->required();
  mp->add_option("--D", mp_D, "Diameter bound (inf for none)")->capture_default_str();
  mp->add_option("--v-grid", mp_grid, "Equispaced volumes in [0, 1]")->capture_default_str();
  mp->add_option("--v", mp_v, "Explicit volumes, overriding --v-grid");
  mp->add_option("--mode", mp_mode, "dispatch or infimum")->check(CLI::IsMember({"dispatch", "infimum"}))
      ->capture_default_str();
  mp->fallthrough();
  mp->callback([&] {
    const ProfileParams params{mp_K, mp_N, mp_D};
    params.validate();
    const auto grid = mp_v.empty() ? unit_grid(mp_grid) : mp_v;
    std::vector<ModelProfileResult> values(grid.size());
    if (mp_mode == "dispatch") {
      values = profile_curve(params, grid, {}, g.threads);
    } else {
      parallel_for(grid.size(), g.threads, [&](std::size_t i) { values[i] = model_profile_infimum(params, grid[i]); });
    }
    std::ofstream csv(run.path("model_profile.csv"));
    csv << "v,value,case,argmin_params\n";
    json results = json::array();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      csv << format12(grid[i]) << ',' << format12(values[i].value) << ',' << to_string(values[i].which) << ",\""
          << values[i].argmin << "\"\n";
      results.push_back({{"v", grid[i]}, {"value", number(values[i].value)}, {"case", to_string(values[i].which)},
                         {"argmin", values[i].argmin}});
    }
    run.report("model_profile", "model-profile",
               {{"K", mp_K}, {"N", mp_N}, {"D", number(mp_D)}, {"mode", mp_mode}}, results);
    run.persist_config(app, "model_profile");
  });

  // iso1d
  auto* iso = app.add_subcommand("iso1d", "Isoperimetric profile of a 1-D density");
  std::string iso_density = "sin_power", iso_csv;
  std::vector<std::string> iso_params;
  std::size_t iso_grid = 21, iso_nodes = 81;
  bool iso_brute = false;
  double iso_K = 0, iso_N = 2, iso_cd_tol = -1;
  iso->add_option("--density", iso_density, "Named density")->capture_default_str();
  iso->add_option("--param", iso_params, "Density parameter key=value (K, N, D, xi, H, a, b, cells)");
  iso->add_option("--csv", iso_csv, "Sampled density file t,h instead of a named one");
  iso->add_option("--v-grid", iso_grid, "Equispaced volumes in [0, 1]")->capture_default_str();
  iso->add_flag("--bruteforce", iso_brute, "Also run the two-interval brute-force oracle");
  iso->add_option("--grid-nodes", iso_nodes, "Brute-force coarse grid")->capture_default_str();
  iso->add_option("--K", iso_K, "CD check curvature")->capture_default_str();
  iso->add_option("--N", iso_N, "CD check dimension")->capture_default_str();
  iso->add_option("--cd-tol", iso_cd_tol, "CD check tolerance, negative for the default")->capture_default_str();
  iso->fallthrough();
  iso->callback([&] {
    const Density1D d = [&] {
      if (iso_csv.empty()) return make_named_density(iso_density, parse_params(iso_params));
      std::ifstream in(iso_csv);
      if (!in) throw DomainError("cannot read " + iso_csv);
      return read_density_csv(in);
    }();
    const auto grid = unit_grid(iso_grid);
    std::vector<IsoResult> structured(grid.size());
    std::vector<BruteForceResult> brute(iso_brute ? grid.size() : 0);
    BruteForceOptions bo;
    bo.grid_nodes = iso_nodes;
    parallel_for(grid.size(), g.threads, [&](std::size_t i) {
      structured[i] = profile_structured(d, grid[i]);
      if (iso_brute) brute[i] = profile_bruteforce(d, grid[i], bo);
    });
    const CdCheck cd = check_cd(d, iso_K, iso_N, iso_cd_tol);
    // l, r: the interval itself, or the removed gap for a complement.
    std::ofstream csv(run.path("iso1d.csv"));
    csv << "v,value,method,l,r" << (iso_brute ? ",bruteforce,tolerance" : "") << '\n';
    json results = json::array();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const IsoResult& s = structured[i];
      json entry{{"v", grid[i]}, {"value", number(s.value)}, {"method", to_string(s.method)}};
      json comps = json::array();
      for (const auto& c : s.minimizer.components()) comps.push_back({c.lo, c.hi});
      entry["minimizer"] = comps;
      const auto& cs = s.minimizer.components();
      double l = d.lower(), r = d.lower();
      if (cs.size() == 1) l = cs[0].lo, r = cs[0].hi;
      if (cs.size() == 2) l = cs[0].hi, r = cs[1].lo;
      csv << format12(grid[i]) << ',' << format12(s.value) << ',' << to_string(s.method) << ',' << format12(l) << ','
          << format12(r);
      if (iso_brute) {
        entry["bruteforce"] = number(brute[i].best.value);
        entry["tolerance"] = brute[i].tolerance;
        csv << ',' << format12(brute[i].best.value) << ',' << format12(brute[i].tolerance);
      }
      csv << '\n';
      results.push_back(entry);
    }
    json params{{"density", iso_csv.empty() ? iso_density : iso_csv}, {"lower", d.lower()}, {"upper", d.upper()}};
    json cdj{{"K", iso_K}, {"N", iso_N}, {"pass", cd.pass}, {"tolerance", cd.tolerance}};
    if (cd.worst) cdj["worst"] = {{"t0", cd.worst->t0}, {"t1", cd.worst->t1}, {"violation", number(cd.worst->violation)}};
    run.report("iso1d", "iso1d", params, {{"profile", results}, {"cd", cdj}});
    run.persist_config(app, "iso1d");
  });

  // mms gen
  auto* mms = app.add_subcommand("mms", "Finite metric measure spaces");
  mms->require_subcommand(1);
  auto* gen = mms->add_subcommand("gen", "Generate a space and write it to <out>/<name>.*");
  std::string gen_kind = "sphere", gen_name = "space", gen_density = "uniform";
  std::vector<std::string> gen_params;
  std::size_t gen_n = 500, gen_base = 64;
  int gen_dim = 2;
  double gen_K = 0, gen_N = 1;
  gen->add_option("--kind", gen_kind, "interval, sphere or suspension")
      ->check(CLI::IsMember({"interval", "sphere", "suspension"}))
      ->capture_default_str();
  gen->add_option("--n", gen_n, "Points (suspension: heights including poles)")->capture_default_str();
  gen->add_option("--dim", gen_dim, "Sphere dimension (1, 2 or 3)")->capture_default_str();
  gen->add_option("--density", gen_density, "Interval density name")->capture_default_str();
  gen->add_option("--param", gen_params, "Interval density parameter key=value");
  gen->add_option("--K", gen_K, "Interval metadata curvature")->capture_default_str();
  gen->add_option("--N", gen_N, "Interval metadata dimension; suspension dimension")->capture_default_str();
  gen->add_option("--base-n", gen_base, "Suspension: points of the S^1 base")->capture_default_str();
  gen->add_option("--name", gen_name, "File prefix inside the output directory")->capture_default_str();
  gen->fallthrough();
  mms->fallthrough();
  gen->callback([&] {
    FiniteMMS X = [&] {
      if (gen_kind == "interval") return gen_interval(make_named_density(gen_density, parse_params(gen_params)), gen_n, gen_K, gen_N);
      if (gen_kind == "sphere") return gen_sphere(gen_dim, gen_n, g.seed);
      return gen_suspension(gen_sphere(1, gen_base, g.seed), gen_N, gen_n);
    }();
    write_space(X, run.path(gen_name));
    run.report(gen_name + ".gen", "mms gen", {{"kind", gen_kind}, {"n", gen_n}, {"seed", g.seed}},
               {{"points", X.size()}, {"diameter", X.diameter()}, {"resolution", X.resolution()},
                {"K", X.metadata().K}, {"N", X.metadata().N}, {"prefix", run.path(gen_name)}});
    run.persist_config(app, gen_name + ".gen");
  });

  // l1ot solve
  auto* l1 = app.add_subcommand("l1ot", "L1 optimal transport");
  l1->require_subcommand(1);
  auto* solve = l1->add_subcommand("solve", "Kantorovich potential of a zero-mean f");
  std::string l1_space, l1_f;
  solve->add_option("--space", l1_space, "Space prefix")->required();
  solve->add_option("--f", l1_f, "CSV column of f values")->required();
  solve->fallthrough();
  l1->fallthrough();
  solve->callback([&] {
    const FiniteMMS X = load_space(l1_space);
    const Eigen::VectorXd f = load_f(l1_f, X);
    const PotentialResult r = solve_potential(X, f);
    write_column_csv(run.path("phi.csv"), "phi", r.phi);
    std::vector<std::vector<double>> rows;
    for (const auto& e : r.plan.entries)
      rows.push_back({static_cast<double>(e.from), static_cast<double>(e.to), e.mass});
    write_table_csv(run.path("plan.csv"), {"from", "to", "mass"}, rows);
    run.report("l1ot", "l1ot solve", {{"space", l1_space}, {"f", l1_f}},
               {{"cost", r.plan.cost}, {"duality_gap", r.duality_gap}, {"potential_file", run.path("phi.csv")}, {"lipschitz_defect", r.lipschitz_defect},
                {"objective", r.objective}, {"normalized_cost", r.normalized_cost}, {"root", r.root},
                {"pivots", r.plan.pivots}, {"plan_entries", r.plan.entries.size()}});
    run.persist_config(app, "l1ot");
  });

  // needles run
  auto* nd = app.add_subcommand("needles", "Discrete needle decomposition");
  nd->require_subcommand(1);
  auto* ndrun = nd->add_subcommand("run", "Potential, transport structure, needles and their checks");
  std::string nd_space, nd_f;
  double nd_K = 0, nd_N = 1, nd_tol_sat = -1, nd_cd_tol = 0.05, nd_zero_mean = 0.02;
  std::size_t nd_samples = 10000;
  auto* nd_K_opt = ndrun->add_option("--K", nd_K, "Curvature for the checks (default: space metadata)");
  auto* nd_N_opt = ndrun->add_option("--N", nd_N, "Dimension for the checks (default: space metadata)");
  ndrun->add_option("--space", nd_space, "Space prefix")->required();
  ndrun->add_option("--f", nd_f, "CSV column of f values")->required();
  ndrun->add_option("--tol-sat", nd_tol_sat, "Saturation tolerance, negative for the default")->capture_default_str();
  ndrun->add_option("--cd-tol", nd_cd_tol, "CD check tolerance")->capture_default_str();
  ndrun->add_option("--zero-mean", nd_zero_mean, "Zero-mean threshold of a good needle")->capture_default_str();
  ndrun->add_option("--monotone-samples", nd_samples, "Sampled tuples for the d^2 test")->capture_default_str();
  ndrun->fallthrough();
  nd->fallthrough();
  ndrun->callback([&] {
    const FiniteMMS X = load_space(nd_space);
    const Eigen::VectorXd f = load_f(nd_f, X);
    const double K = nd_K_opt->count() ? nd_K : X.metadata().K;
    const double N = nd_N_opt->count() ? nd_N : X.metadata().N;
    const PotentialResult pot = solve_potential(X, f);
    const TransportStructure S = build_structure(X, pot.phi, nd_tol_sat);
    NeedleOptions no;
    no.throw_on_isometry = false;
    const NeedleDecomposition D = extract_needles(S, X, no);
    NeedleCheckOptions co;
    co.zero_mean_threshold = nd_zero_mean;
    co.threads = g.threads;
    const NeedleReport rep = check_needles(D, X, f, K, N, nd_cd_tol, co);
    const MonotoneReport mono = check_d2_monotone(S, X, nd_samples, 4, g.seed + 7);

    std::vector<std::vector<double>> rows;
    json per = json::array();
    double worst_iso = 0.0;
    for (std::size_t q = 0; q < D.needles.size(); ++q) {
      const Needle& n = D.needles[q];
      worst_iso = std::max(worst_iso, n.isometry_defect);
      for (std::size_t i = 0; i < n.chain.size(); ++i)
        rows.push_back({static_cast<double>(q), static_cast<double>(n.chain[i]), n.params[i],
                        n.density ? (*n.density)(n.params[i]) : 0.0});
      const NeedleCheck& c = rep.per_needle[q];
      per.push_back({{"points", n.chain.size()}, {"length", n.params.back()}, {"weight", n.quotient_weight},
                     {"zero_mean_defect", c.zero_mean_defect}, {"cd_pass", c.cd_pass},
                     {"cd_violation", number(c.cd_violation)}, {"mcp_violations", c.mcp_violations}});
    }
    write_table_csv(run.path("needles.csv"), {"needle", "point", "t", "h"}, rows);
    std::size_t te = 0, t = 0;
    for (std::size_t i = 0; i < X.size(); ++i) {
      te += S.transport_set_e[i];
      t += S.transport_set[i];
    }
    run.report("needles", "needles run",
               {{"space", nd_space}, {"f", nd_f}, {"K", K}, {"N", N}, {"tol_sat", S.tol_sat}, {"cd_tol", nd_cd_tol}},
               {{"duality_gap", pot.duality_gap}, {"saturated_pairs", S.pair_count()},
                {"transport_set_e", te}, {"transport_set", t}, {"branch_mass", D.branch_mass},
                {"needles", D.needles.size()}, {"needle_mass", D.needle_mass},
                {"off_transport_mass", D.off_transport_mass}, {"off_transport_f_mass", rep.off_transport_f_mass},
                {"good_fraction", rep.good_fraction}, {"worst_zero_mean", rep.worst_zero_mean},
                {"cd_failures", rep.cd_failures}, {"mcp_violations", rep.mcp_violations},
                {"worst_isometry_defect", worst_iso},
                {"d2_monotone", {{"tuples", mono.tuples}, {"violations", mono.violations},
                                 {"worst_excess", mono.worst_excess}}},
                {"per_needle", per}});
    run.persist_config(app, "needles");
  });

  // verify
  auto* ver = app.add_subcommand("verify", "End-to-end comparison harnesses");
  ver->require_subcommand(1);
  ver->fallthrough();

  auto* cmp = ver->add_subcommand("compare", "Candidate sets against the model profile");
  std::string cmp_space, cmp_estimator = "quotient";
  std::vector<double> cmp_v{0.25, 0.5, 0.75}, cmp_eps;
  std::vector<std::string> cmp_sets;
  double cmp_K = 0, cmp_N = 1;
  std::size_t cmp_centers = 32, cmp_potentials = 2;
  cmp->add_option("--space", cmp_space, "Space prefix")->required();
  auto* cmp_K_opt = cmp->add_option("--K", cmp_K, "Claimed curvature (default: metadata)");
  auto* cmp_N_opt = cmp->add_option("--N", cmp_N, "Claimed dimension (default: metadata)");
  cmp->add_option("--v", cmp_v, "Volumes")->capture_default_str();
  cmp->add_option("--eps", cmp_eps, "Eps ladder (default: 2 * resolution)");
  cmp->add_option("--estimator", cmp_estimator, "quotient or fit")->check(CLI::IsMember({"quotient", "fit"}))
      ->capture_default_str();
  cmp->add_option("--centers", cmp_centers, "Ball centers")->capture_default_str();
  cmp->add_option("--potentials", cmp_potentials, "Random potentials for sublevel sets")->capture_default_str();
  cmp->add_option("--set", cmp_sets, "Extra candidate subsets (0/1 CSV columns)");
  cmp->fallthrough();
  cmp->callback([&] {
    const FiniteMMS X = load_space(cmp_space);
    const double K = cmp_K_opt->count() ? cmp_K : X.metadata().K;
    const double N = cmp_N_opt->count() ? cmp_N : X.metadata().N;
    CompareOptions o;
    o.estimator = cmp_estimator == "fit" ? ContentEstimator::two_sided_fit : ContentEstimator::quotient;
    o.centers = cmp_centers;
    o.random_potentials = cmp_potentials;
    o.seed = g.seed + 11;
    o.threads = g.threads;
    for (const auto& s : cmp_sets) o.user_sets.push_back({s, read_subset_csv(s)});
    const CompareReport r = compare_profile(X, K, N, cmp_v, cmp_eps, o);
    auto value_json = [](const CandidateValue& c) {
      return json{{"label", c.label}, {"eps", c.eps},     {"mass", c.mass},
                  {"content", c.content}, {"model", number(c.model)}, {"slack", c.slack}};
    };
    std::vector<std::vector<double>> rows;
    json entries = json::array();
    for (const auto& e : r.entries) {
      rows.push_back({e.v, e.model, e.estimate, static_cast<double>(e.violations.size())});
      json viol = json::array();
      for (const auto& c : e.violations) viol.push_back(value_json(c));
      entries.push_back({{"v", e.v}, {"model", number(e.model)}, {"estimate", number(e.estimate)},
                         {"best", value_json(e.best)}, {"violations", viol}});
    }
    write_table_csv(run.path("compare.csv"), {"v", "model", "estimate", "violations"}, rows);
    run.report("compare", "verify compare",
               {{"space", cmp_space}, {"K", K}, {"N", N}, {"D", r.D}, {"resolution", r.resolution},
                {"estimator", cmp_estimator}},
               {{"entries", entries}, {"violations", r.violation_count()}});
    run.persist_config(app, "compare");
    if (r.violation_count() > 0) status = kExitRegression;
  });

  auto* nb = ver->add_subcommand("needle-bound", "Needle replay of the isoperimetric inequality for one set");
  std::string nb_space, nb_set;
  double nb_K = 0, nb_N = 1, nb_eps = -1;
  nb->add_option("--space", nb_space, "Space prefix")->required();
  nb->add_option("--set", nb_set, "Subset A as a 0/1 CSV column")->required();
  auto* nb_K_opt = nb->add_option("--K", nb_K, "Curvature (default: metadata)");
  auto* nb_N_opt = nb->add_option("--N", nb_N, "Dimension (default: metadata)");
  nb->add_option("--eps", nb_eps, "Eps of the measured content, non-positive for 2 * resolution")
      ->capture_default_str();
  nb->fallthrough();
  nb->callback([&] {
    const FiniteMMS X = load_space(nb_space);
    const Subset A = read_subset_csv(nb_set);
    const double K = nb_K_opt->count() ? nb_K : X.metadata().K;
    const double N = nb_N_opt->count() ? nb_N : X.metadata().N;
    const NeedleBoundReport r = needle_lower_bound(X, A, K, N, nb_eps);
    run.report("needle_bound", "verify needle-bound", {{"space", nb_space}, {"set", nb_set}, {"K", K}, {"N", N}},
               {{"v", r.v}, {"eps", r.eps}, {"measured", r.measured}, {"needle_content", r.needle_content},
                {"model_bound", number(r.model_bound)}, {"slack", r.slack}, {"needles", r.needles},
                {"off_transport_mass", r.off_transport_mass}, {"consistent", r.consistent}});
    run.persist_config(app, "needle_bound");
    if (!r.consistent) status = kExitRegression;
  });

  auto* rig = ver->add_subcommand("rigidity", "Polar cap of a spherical suspension against competitors");
  std::string rig_space;
  std::size_t rig_base = 64, rig_heights = 64;
  double rig_N = 2, rig_v = 0.5, rig_eps = -1;
  rig->add_option("--space", rig_space, "Suspension prefix (default: generate over S^1)");
  rig->add_option("--base-n", rig_base, "Generated base points")->capture_default_str();
  rig->add_option("--n-t", rig_heights, "Generated heights including poles")->capture_default_str();
  rig->add_option("--N", rig_N, "Generated suspension dimension")->capture_default_str();
  rig->add_option("--v", rig_v, "Volume")->capture_default_str();
  rig->add_option("--eps", rig_eps, "Eps, non-positive for 2 * resolution")->capture_default_str();
  rig->fallthrough();
  rig->callback([&] {
    const FiniteMMS S =
        rig_space.empty() ? gen_suspension(gen_sphere(1, rig_base, g.seed), rig_N, rig_heights) : load_space(rig_space);
    const RigidityReport r = rigidity_cap_check(S, rig_v, rig_eps);
    json comps = json::array();
    for (const auto& c : r.competitors)
      comps.push_back({{"label", c.label}, {"mass", c.mass}, {"content", c.content}, {"margin", c.margin}});
    run.report("rigidity", "verify rigidity", {{"space", rig_space.empty() ? "generated" : rig_space}, {"v", rig_v}},
               {{"N", r.N}, {"r_v", r.r_v}, {"eps", r.eps}, {"cap_mass", r.cap_mass},
                {"cap_content", r.cap_content}, {"model", r.model}, {"tolerance", r.tolerance},
                {"cap_matches_model", r.cap_matches_model}, {"competitors_above", r.competitors_above},
                {"competitors", comps}});
    run.persist_config(app, "rigidity");
    if (!r.cap_matches_model || !r.competitors_above) status = kExitRegression;
  });

  auto* dg = ver->add_subcommand("diam-gap", "Profile gain from a diameter bound");
  double dg_N = 2, dg_delta = 0, dg_D = std::numbers::pi - 0.5, dg_v = 0.5;
  dg->add_option("--N", dg_N, "Dimension")->capture_default_str();
  dg->add_option("--delta", dg_delta, "Perturbation delta")->capture_default_str();
  dg->add_option("--D", dg_D, "Diameter bound in (0, pi)")->capture_default_str();
  dg->add_option("--v", dg_v, "Volume")->capture_default_str();
  dg->fallthrough();
  dg->callback([&] {
    const DiameterGap r = diameter_gap(dg_N, dg_delta, dg_D, dg_v);
    run.report("diam_gap", "verify diam-gap", {{"N", dg_N}, {"delta", dg_delta}, {"D", dg_D}, {"v", dg_v}},
               {{"eta", r.eta}, {"bounded", r.bounded}, {"unbounded", r.unbounded}, {"positive", r.positive}});
    run.persist_config(app, "diam_gap");
    if (!r.positive) status = kExitRegression;
  });

  auto* dc = ver->add_subcommand("delta-cont", "Continuity of I_{N-1-delta, N+delta, inf}(v) in delta");
  double dc_N = 2, dc_v = 0.5, dc_max_jump = 0.1;
  std::size_t dc_grid = 11;
  dc->add_option("--N", dc_N, "Dimension")->capture_default_str();
  dc->add_option("--v", dc_v, "Volume")->capture_default_str();
  dc->add_option("--delta-grid", dc_grid, "Equispaced deltas in [0, (N-1)/2]")->capture_default_str();
  dc->add_option("--max-jump", dc_max_jump, "Largest accepted jump between grid neighbours")->capture_default_str();
  dc->fallthrough();
  dc->callback([&] {
    if (!(dc_N > 1.0)) throw DomainError("delta-cont: N must exceed 1");
    const auto grid = linspace(0.0, 0.5 * (dc_N - 1.0), dc_grid);
    const DeltaContinuity r = profile_continuity_in_delta(dc_N, dc_v, grid, g.threads);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < grid.size(); ++i) rows.push_back({grid[i], r.value[i]});
    write_table_csv(run.path("delta_cont.csv"), {"delta", "I"}, rows);
    run.report("delta_cont", "verify delta-cont", {{"N", dc_N}, {"v", dc_v}, {"points", dc_grid}},
               {{"delta", numbers(r.delta)}, {"value", numbers(r.value)}, {"max_jump", r.max_jump},
                {"fitted_constant", r.fitted_constant}, {"within", r.max_jump <= dc_max_jump}});
    run.persist_config(app, "delta_cont");
    if (r.max_jump > dc_max_jump) status = kExitRegression;
  });

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    // Config values fill only options absent from the command line; they go
    // after the subcommand path so that they bind to the active subcommand.
    std::set<std::string> given;
    std::string config;
    for (std::size_t i = 0; i < args.size(); ++i) {
      const std::string& a = args[i];
      if (a.rfind("--", 0) != 0) continue;
      const auto eq = a.find('=');
      const std::string key = a.substr(2, eq == std::string::npos ? std::string::npos : eq - 2);
      given.insert(key);
      if (key == "config") config = eq != std::string::npos ? a.substr(eq + 1) : (i + 1 < args.size() ? args[i + 1] : "");
    }
    if (!config.empty())
      for (const auto& [key, value] : read_flat_config(config)) {
        if (given.count(key)) continue;
        args.push_back("--" + key);
        std::istringstream values(value);
        for (std::string token; values >> token;) args.push_back(token);
      }
    std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const ResourceError& e) {
    std::cerr << "resource limit: " << e.what() << '\n';
    return kExitResource;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDomain;
  }
  return status;
}
