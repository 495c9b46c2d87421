// gibbslab: mean-field Glauber dynamics lab.
// Subcommands: critical, equilibrium, check, simulate, couple, mixing-exact,
// phase-diagram. Every stochastic subcommand requires an explicit --seed and
// re-runs are byte-identical for a fixed configuration.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gibbslab/coupling.hpp"
#include "gibbslab/equilibrium.hpp"
#include "gibbslab/glauber.hpp"
#include "gibbslab/io.hpp"
#include "gibbslab/model.hpp"
#include "gibbslab/numeric.hpp"
#include "gibbslab/parallel.hpp"
#include "gibbslab/path_coupling.hpp"

using ordered_json = nlohmann::ordered_json;
using namespace gibbslab;

namespace {

// ---------------------------------------------------------------------------
// output plumbing

// JSON dump with every float at 17 significant digits.
void dump_g17(const ordered_json& j, std::string& out) {
  switch (j.type()) {
    case ordered_json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += ordered_json(it.key()).dump();
        out += ':';
        dump_g17(it.value(), out);
      }
      out += '}';
      return;
    }
    case ordered_json::value_t::array: {
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ',';
        dump_g17(j[i], out);
      }
      out += ']';
      return;
    }
    case ordered_json::value_t::number_float:
      out += format_g17(j.get<double>());
      return;
    default:
      out += j.dump();
      return;
  }
}

std::string dump_g17(const ordered_json& j) {
  std::string out;
  dump_g17(j, out);
  return out;
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open output file: " + path);
  file << content;
}

std::string csv_preamble(const ordered_json& config) {
  return "# " + dump_g17(config) + "\n";
}

// ---------------------------------------------------------------------------
// configuration layering: flags > config file > defaults

struct ConfigFile {
  ordered_json data = ordered_json::object();

  template <typename T>
  void fill(const CLI::Option* opt, T& value, const char* key) const {
    if (opt != nullptr && opt->count() > 0) return;  // flag wins
    if (data.contains(key)) value = data.at(key).get<T>();
  }
};

ConfigFile load_config(const std::string& path) {
  ConfigFile cfg;
  if (path.empty()) return cfg;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  cfg.data = ordered_json::parse(in);
  if (!cfg.data.is_object())
    throw std::runtime_error("config file must hold a JSON object");
  return cfg;
}

// Numeric range "a:b:s" (inclusive, fp-tolerant) or a single value.
std::vector<double> parse_range(const std::string& text) {
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string piece;
  while (std::getline(ss, piece, ':')) parts.push_back(std::stod(piece));
  if (parts.size() == 1) return {parts[0]};
  if (parts.size() != 3 || parts[2] <= 0.0)
    throw std::runtime_error("range must be a single value or a:b:s with s > 0");
  std::vector<double> values;
  for (double v = parts[0]; v <= parts[1] + 1e-9 * parts[2]; v += parts[2])
    values.push_back(v);
  return values;
}

std::vector<std::int64_t> parse_int_range(const std::string& text) {
  std::vector<std::int64_t> values;
  for (double v : parse_range(text))
    values.push_back(static_cast<std::int64_t>(std::llround(v)));
  return values;
}

int resolve_threads(const CLI::Option* opt, int flag_value) {
  return (opt != nullptr && opt->count() > 0) ? flag_value
                                              : default_thread_count();
}

// ---------------------------------------------------------------------------
// report helpers

ordered_json report_to_json(const ConditionReport& report) {
  ordered_json j;
  j["condition"] = report.condition;
  j["holds"] = report.holds;
  j["sup_ratio"] = report.sup_ratio;
  if (report.argmax)
    j["argmax"] = *report.argmax;
  else
    j["argmax"] = nullptr;
  j["beta"] = report.beta;
  j["q"] = report.q;
  j["r"] = report.r;
  if (report.epsilon)
    j["epsilon"] = *report.epsilon;
  else
    j["epsilon"] = nullptr;
  if (report.grid_resolution)
    j["grid_resolution"] = *report.grid_resolution;
  else
    j["grid_resolution"] = nullptr;
  if (report.analytic) j["analytic"] = *report.analytic;
  return j;
}

std::string phase_name(Phase phase) {
  return phase == Phase::unique ? "unique" : "multiple";
}

// ---------------------------------------------------------------------------
// subcommands

struct CommonArgs {
  std::string config_path;
  std::string out;
  std::string format = "json";
  int threads = 1;
};

int cmd_critical(int q, double r, const CommonArgs& args) {
  const double beta_c = find_beta_c(q, r);
  const double beta_s = find_beta_s(q, r);
  const double gap = beta_c - beta_s;
  const std::string order = (std::abs(gap) > 1e-4) ? "first" : "second";

  ordered_json config;
  config["q"] = q;
  config["r"] = r;
  if (args.format == "csv") {
    std::string out = csv_preamble(config);
    out += "q,r,beta_c,beta_s,gap,order\n";
    out += std::to_string(q) + "," + format_g17(r) + "," + format_g17(beta_c) +
           "," + format_g17(beta_s) + "," + format_g17(gap) + "," + order + "\n";
    write_output(args.out, out);
  } else {
    ordered_json j;
    j["config"] = config;
    j["beta_c"] = beta_c;
    j["beta_s"] = beta_s;
    j["gap"] = gap;
    j["order"] = order;
    write_output(args.out, dump_g17(j) + "\n");
  }
  return 0;
}

int cmd_equilibrium(int q, double r, double beta, int grid, bool no_grid,
                    const CommonArgs& args) {
  const ModelSpec model = ModelSpec::gcwp(q, r, beta);
  EquilibriaOptions options;
  options.grid_cross_validate = !no_grid;
  options.grid_resolution = grid;
  options.threads = args.threads;
  const EquilibriumSolution eq = find_equilibria(model, options);

  ordered_json config;
  config["q"] = q;
  config["r"] = r;
  config["beta"] = beta;
  config["grid_resolution"] = grid;
  config["grid_cross_validate"] = !no_grid;
  if (args.format == "csv") {
    std::string out = csv_preamble(config);
    out += "q,r,beta,u,min_value,phase";
    for (int k = 1; k <= q; ++k) out += ",z_" + std::to_string(k);
    out += "\n";
    out += std::to_string(q) + "," + format_g17(r) + "," + format_g17(beta) +
           "," + format_g17(eq.u) + "," + format_g17(eq.min_value) + "," +
           phase_name(eq.phase);
    for (int k = 0; k < q; ++k) out += "," + format_g17(eq.z_beta[k]);
    out += "\n";
    write_output(args.out, out);
  } else {
    ordered_json j;
    j["config"] = config;
    j["z_beta"] = eq.z_beta.coords();
    j["u"] = eq.u;
    j["min_value"] = eq.min_value;
    j["phase"] = phase_name(eq.phase);
    write_output(args.out, dump_g17(j) + "\n");
  }
  return 0;
}

int cmd_check(int q, double r, double beta, double epsilon, int grid,
              const CommonArgs& args) {
  const ModelSpec model = ModelSpec::gcwp(q, r, beta);
  const std::vector<ConditionReport> reports{
      check_condition_contraction(model, grid, args.threads),
      check_condition_riemann(model, epsilon, grid, args.threads),
      check_condition_local(model)};

  ordered_json config;
  config["q"] = q;
  config["r"] = r;
  config["beta"] = beta;
  config["epsilon"] = epsilon;
  config["grid_resolution"] = grid;
  if (args.format == "csv") {
    std::string out = csv_preamble(config);
    out += "condition,holds,sup_ratio,beta,q,r,epsilon,grid_resolution,argmax\n";
    for (const auto& report : reports) {
      out += report.condition + "," + (report.holds ? "true" : "false") + "," +
             format_g17(report.sup_ratio) + "," + format_g17(report.beta) + "," +
             std::to_string(report.q) + "," + format_g17(report.r) + ",";
      out += report.epsilon ? format_g17(*report.epsilon) : "";
      out += ",";
      out += report.grid_resolution ? std::to_string(*report.grid_resolution) : "";
      out += ",";
      if (report.argmax) {
        std::string joined;
        for (double v : *report.argmax) {
          if (!joined.empty()) joined += ';';
          joined += format_g17(v);
        }
        out += joined;
      }
      out += "\n";
    }
    write_output(args.out, out);
  } else {
    ordered_json j;
    j["config"] = config;
    j["reports"] = ordered_json::array();
    for (const auto& report : reports) j["reports"].push_back(report_to_json(report));
    j["all_hold"] =
        reports[0].holds && reports[1].holds && reports[2].holds;
    write_output(args.out, dump_g17(j) + "\n");
  }
  return 0;
}

int cmd_simulate(int q, double r, double beta, std::int64_t n,
                 std::int64_t steps, std::int64_t stride,
                 const std::string& init, std::uint64_t seed,
                 const CommonArgs& args) {
  const ModelSpec model = ModelSpec::gcwp(q, r, beta);
  RngStream rng(seed, 0);
  Configuration config_state =
      (init == "pure") ? Configuration::constant(n, q, 0)
                       : Configuration::random_product(n, q, rng);
  std::vector<std::int64_t> counts = empirical_measure(config_state).counts();

  ordered_json config;
  config["q"] = q;
  config["r"] = r;
  config["beta"] = beta;
  config["n"] = n;
  config["steps"] = steps;
  config["stride"] = stride;
  config["init"] = init;
  config["seed"] = seed;

  std::string out = csv_preamble(config);
  out += "t";
  for (int k = 1; k <= q; ++k) out += ",count_" + std::to_string(k);
  out += "\n";
  const auto emit_row = [&](std::int64_t t) {
    out += std::to_string(t);
    for (int k = 0; k < q; ++k)
      out += "," + std::to_string(counts[static_cast<std::size_t>(k)]);
    out += "\n";
  };
  emit_row(0);
  for (std::int64_t t = 1; t <= steps; ++t) {
    glauber_step(model, config_state, counts, rng);
    if (t % stride == 0) emit_row(t);
  }
  write_output(args.out, out);
  return 0;
}

CouplingInit parse_init(const std::string& name) {
  if (name == "worst_pure_pair") return CouplingInit::worst_pure_pair;
  if (name == "random_pair") return CouplingInit::random_pair;
  if (name == "equilibrium_vs_pure") return CouplingInit::equilibrium_vs_pure;
  throw std::runtime_error("unknown coupling init: " + name);
}

int cmd_couple(int q, double r, double beta, std::int64_t n, int trials,
               std::uint64_t seed, const std::string& init, std::int64_t cap,
               std::int64_t horizon, const CommonArgs& args) {
  const ModelSpec model = ModelSpec::gcwp(q, r, beta);
  CouplingRunOptions options;
  options.cap = cap;
  options.threads = args.threads;
  if (horizon < 0 && !args.out.empty()) {
    const double ln = std::log(std::max<std::int64_t>(2, n));
    horizon = std::min<std::int64_t>(
        1'000'000, 20 * n * static_cast<std::int64_t>(std::ceil(ln) + 1));
  }
  options.curve_horizon = std::max<std::int64_t>(0, horizon);

  const CouplingRunResult result =
      run_coupling(model, n, parse_init(init), trials, seed, options);

  ordered_json config;
  config["q"] = q;
  config["r"] = r;
  config["beta"] = beta;
  config["n"] = n;
  config["trials"] = trials;
  config["seed"] = seed;
  config["init"] = init;
  config["cap"] = cap;
  config["horizon"] = options.curve_horizon;

  ordered_json summary;
  summary["config"] = config;
  summary["median"] = result.quantile(0.5);
  summary["q90"] = result.quantile(0.9);
  summary["censored_fraction"] = result.censored_fraction();
  summary["n"] = n;
  summary["beta"] = beta;
  summary["q"] = q;
  summary["r"] = r;
  summary["seed"] = seed;
  const std::string summary_text = dump_g17(summary) + "\n";

  if (!args.out.empty()) {
    std::string times = csv_preamble(config);
    times += "trial,coupling_time,censored\n";
    for (std::size_t i = 0; i < result.coupling_time.size(); ++i)
      times += std::to_string(i) + "," + std::to_string(result.coupling_time[i]) +
               "," + std::to_string(static_cast<int>(result.censored[i])) + "\n";
    write_output(args.out + ".times.csv", times);

    if (!result.mean_distance.empty()) {
      std::string curve = csv_preamble(config);
      curve += "t,mean_distance\n";
      for (std::size_t t = 0; t < result.mean_distance.size(); ++t)
        curve += std::to_string(t) + "," + format_g17(result.mean_distance[t]) +
                 "\n";
      write_output(args.out + ".distance.csv", curve);
    }
    write_output(args.out + ".summary.json", summary_text);
  }
  std::cout << summary_text;
  return 0;
}

int cmd_mixing_exact(int q, double r, double beta, const std::string& n_range,
                     double epsilon, bool all_starts, std::int64_t max_steps,
                     const CommonArgs& args) {
  const std::vector<std::int64_t> ns = parse_int_range(n_range);

  ordered_json config;
  config["q"] = q;
  config["r"] = r;
  config["beta"] = beta;
  config["n"] = n_range;
  config["eps"] = epsilon;
  config["all_starts"] = all_starts;
  config["max_steps"] = max_steps;

  ordered_json results = ordered_json::array();
  for (std::int64_t n : ns) {
    const ModelSpec model = ModelSpec::gcwp(q, r, beta);
    const LumpedKernel kernel = build_lumped_kernel(model, n, args.threads);
    MixingOptions options;
    options.epsilon = epsilon;
    options.all_starts = all_starts;
    options.max_steps = max_steps;
    const MixingResult mix = exact_mixing_time(kernel, options);

    ordered_json row;
    row["n"] = n;
    row["t_mix"] = mix.t_mix;
    row["epsilon"] = epsilon;
    row["states"] = static_cast<std::int64_t>(kernel.size());
    const double ln = std::log(static_cast<double>(std::max<std::int64_t>(2, n)));
    row["t_mix_over_nlogn"] =
        static_cast<double>(mix.t_mix) / (static_cast<double>(n) * ln);
    results.push_back(row);

    if (!args.out.empty()) {
      std::string curve = csv_preamble(config);
      curve += "t,d_tv\n";
      for (std::size_t t = 0; t < mix.d_curve.size(); ++t)
        curve += std::to_string(t) + "," + format_g17(mix.d_curve[t]) + "\n";
      write_output(args.out + ".n" + std::to_string(n) + ".csv", curve);
    }
  }

  ordered_json summary;
  summary["config"] = config;
  summary["results"] = results;
  const std::string summary_text = dump_g17(summary) + "\n";
  if (!args.out.empty()) write_output(args.out + ".summary.json", summary_text);
  std::cout << summary_text;
  return 0;
}

int cmd_phase_diagram(const std::string& q_range, const std::string& r_range,
                      const CommonArgs& args) {
  const std::vector<std::int64_t> qs = parse_int_range(q_range);
  const std::vector<double> rs = parse_range(r_range);

  ordered_json config;
  config["q"] = q_range;
  config["r"] = r_range;

  ordered_json rows = ordered_json::array();
  std::string csv = csv_preamble(config);
  csv += "q,r,beta_c,beta_s,gap,ratio,order\n";
  for (std::int64_t q : qs) {
    for (double r : rs) {
      const double beta_c = find_beta_c(static_cast<int>(q), r);
      const double beta_s = find_beta_s(static_cast<int>(q), r);
      const double gap = beta_c - beta_s;
      const std::string order = (std::abs(gap) > 1e-4) ? "first" : "second";
      csv += std::to_string(q) + "," + format_g17(r) + "," + format_g17(beta_c) +
             "," + format_g17(beta_s) + "," + format_g17(gap) + "," +
             format_g17(beta_s / beta_c) + "," + order + "\n";
      ordered_json row;
      row["q"] = q;
      row["r"] = r;
      row["beta_c"] = beta_c;
      row["beta_s"] = beta_s;
      row["gap"] = gap;
      row["ratio"] = beta_s / beta_c;
      row["order"] = order;
      rows.push_back(row);
    }
  }
  if (args.format == "csv") {
    write_output(args.out, csv);
  } else {
    ordered_json j;
    j["config"] = config;
    j["rows"] = rows;
    write_output(args.out, dump_g17(j) + "\n");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mean-field Glauber dynamics laboratory"};
  app.require_subcommand(1);

  // shared flags, registered per subcommand
  struct Shared {
    CommonArgs common;
    std::string config_path;
    CLI::Option* threads_opt = nullptr;
    int threads = 0;
  };

  const auto add_common = [](CLI::App* sub, Shared& shared,
                             const char* default_format) {
    sub->add_option("--config", shared.config_path,
                    "JSON config file (flags take precedence)");
    sub->add_option("--out", shared.common.out, "output path (or prefix)");
    shared.common.format = default_format;
    sub->add_option("--format", shared.common.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    shared.threads_opt =
        sub->add_option("--threads", shared.threads,
                        "worker pool size (default: GIBBSLAB_THREADS or cores)");
  };

  // critical -----------------------------------------------------------------
  auto* critical = app.add_subcommand("critical", "beta_c and beta_s for (q, r)");
  Shared critical_shared;
  int critical_q = 0;
  double critical_r = 2.0;
  auto* critical_q_opt = critical->add_option("--q", critical_q, "spin values");
  auto* critical_r_opt = critical->add_option("--r", critical_r, "interaction exponent");
  add_common(critical, critical_shared, "json");

  // equilibrium ---------------------------------------------------------------
  auto* equilibrium =
      app.add_subcommand("equilibrium", "equilibrium macrostate at (q, r, beta)");
  Shared eq_shared;
  int eq_q = 0;
  double eq_r = 2.0, eq_beta = 0.0;
  int eq_grid = 0;
  bool eq_no_grid = false;
  auto* eq_q_opt = equilibrium->add_option("--q", eq_q, "spin values");
  auto* eq_r_opt = equilibrium->add_option("--r", eq_r, "interaction exponent");
  auto* eq_beta_opt = equilibrium->add_option("--beta", eq_beta, "inverse temperature");
  auto* eq_grid_opt =
      equilibrium->add_option("--grid", eq_grid, "grid resolution (0 = default)");
  auto* eq_no_grid_opt = equilibrium->add_flag("--no-grid", eq_no_grid,
                                               "skip the grid cross-validation");
  add_common(equilibrium, eq_shared, "json");

  // check ----------------------------------------------------------------------
  auto* check = app.add_subcommand("check", "contraction condition reports");
  Shared check_shared;
  int check_q = 0;
  double check_r = 2.0, check_beta = 0.0, check_eps = 0.02;
  int check_grid = 0;
  auto* check_q_opt = check->add_option("--q", check_q, "spin values");
  auto* check_r_opt = check->add_option("--r", check_r, "interaction exponent");
  auto* check_beta_opt = check->add_option("--beta", check_beta, "inverse temperature");
  auto* check_eps_opt =
      check->add_option("--epsilon", check_eps, "path step scale");
  auto* check_grid_opt =
      check->add_option("--grid", check_grid, "grid resolution (0 = default)");
  add_common(check, check_shared, "json");

  // simulate --------------------------------------------------------------------
  auto* simulate = app.add_subcommand("simulate", "forward Glauber trajectory");
  Shared sim_shared;
  int sim_q = 0;
  double sim_r = 2.0, sim_beta = 0.0;
  std::int64_t sim_n = 0, sim_steps = 0, sim_stride = 1;
  std::uint64_t sim_seed = 0;
  std::string sim_init = "random";
  auto* sim_q_opt = simulate->add_option("--q", sim_q, "spin values");
  auto* sim_r_opt = simulate->add_option("--r", sim_r, "interaction exponent");
  auto* sim_beta_opt = simulate->add_option("--beta", sim_beta, "inverse temperature");
  auto* sim_n_opt = simulate->add_option("--n", sim_n, "system size");
  auto* sim_steps_opt = simulate->add_option("--steps", sim_steps, "update count");
  auto* sim_stride_opt =
      simulate->add_option("--stride", sim_stride, "rows every this many steps");
  auto* sim_init_opt = simulate->add_option("--init", sim_init, "pure or random")
                           ->check(CLI::IsMember({"pure", "random"}));
  auto* sim_seed_opt = simulate->add_option("--seed", sim_seed, "random seed");
  add_common(simulate, sim_shared, "csv");

  // couple -------------------------------------------------------------------------
  auto* couple = app.add_subcommand("couple", "greedy coupling experiment");
  Shared couple_shared;
  int couple_q = 0, couple_trials = 200;
  double couple_r = 2.0, couple_beta = 0.0;
  std::int64_t couple_n = 0, couple_cap = 1'000'000'000, couple_horizon = -1;
  std::uint64_t couple_seed = 0;
  std::string couple_init = "worst_pure_pair";
  auto* couple_q_opt = couple->add_option("--q", couple_q, "spin values");
  auto* couple_r_opt = couple->add_option("--r", couple_r, "interaction exponent");
  auto* couple_beta_opt = couple->add_option("--beta", couple_beta, "inverse temperature");
  auto* couple_n_opt = couple->add_option("--n", couple_n, "system size");
  auto* couple_trials_opt =
      couple->add_option("--trials", couple_trials, "independent pairs");
  auto* couple_seed_opt = couple->add_option("--seed", couple_seed, "random seed");
  auto* couple_init_opt =
      couple->add_option("--init", couple_init,
                         "worst_pure_pair, random_pair or equilibrium_vs_pure")
          ->check(CLI::IsMember(
              {"worst_pure_pair", "random_pair", "equilibrium_vs_pure"}));
  auto* couple_cap_opt = couple->add_option("--cap", couple_cap, "censoring cap");
  auto* couple_horizon_opt = couple->add_option(
      "--horizon", couple_horizon, "mean-distance curve length (-1 = auto)");
  add_common(couple, couple_shared, "json");

  // mixing-exact ----------------------------------------------------------------------
  auto* mixing = app.add_subcommand("mixing-exact",
                                    "exact lumped-chain mixing time");
  Shared mixing_shared;
  int mixing_q = 0;
  double mixing_r = 2.0, mixing_beta = 0.0, mixing_eps = 0.25;
  std::string mixing_n;
  bool mixing_all_starts = false;
  std::int64_t mixing_max_steps = 10'000'000;
  auto* mixing_q_opt = mixing->add_option("--q", mixing_q, "spin values");
  auto* mixing_r_opt = mixing->add_option("--r", mixing_r, "interaction exponent");
  auto* mixing_beta_opt = mixing->add_option("--beta", mixing_beta, "inverse temperature");
  auto* mixing_n_opt = mixing->add_option("--n", mixing_n, "system size or a:b:s");
  auto* mixing_eps_opt =
      mixing->add_option("--eps", mixing_eps, "mixing threshold (default 1/4)");
  auto* mixing_all_opt = mixing->add_flag("--all-starts", mixing_all_starts,
                                          "maximize over every lumped start");
  auto* mixing_max_opt =
      mixing->add_option("--max-steps", mixing_max_steps, "divergence guard");
  add_common(mixing, mixing_shared, "json");

  // phase-diagram -------------------------------------------------------------------------
  auto* phase = app.add_subcommand("phase-diagram",
                                   "beta_c / beta_s sweep over (q, r)");
  Shared phase_shared;
  std::string phase_q = "3", phase_r = "2";
  auto* phase_q_opt = phase->add_option("--q", phase_q, "q value or a:b:s");
  auto* phase_r_opt = phase->add_option("--r", phase_r, "r value or a:b:s");
  add_common(phase, phase_shared, "csv");

  CLI11_PARSE(app, argc, argv);

  try {
    const auto finish_common = [&](Shared& shared) {
      const ConfigFile cfg = load_config(shared.config_path);
      shared.common.threads = resolve_threads(shared.threads_opt, shared.threads);
      if (shared.threads_opt->count() == 0 && cfg.data.contains("threads"))
        shared.common.threads = cfg.data.at("threads").get<int>();
      return cfg;
    };

    if (critical->parsed()) {
      const ConfigFile cfg = finish_common(critical_shared);
      cfg.fill(critical_q_opt, critical_q, "q");
      cfg.fill(critical_r_opt, critical_r, "r");
      if (critical_q == 0) throw std::runtime_error("critical: --q is required");
      return cmd_critical(critical_q, critical_r, critical_shared.common);
    }
    if (equilibrium->parsed()) {
      const ConfigFile cfg = finish_common(eq_shared);
      cfg.fill(eq_q_opt, eq_q, "q");
      cfg.fill(eq_r_opt, eq_r, "r");
      cfg.fill(eq_beta_opt, eq_beta, "beta");
      cfg.fill(eq_grid_opt, eq_grid, "grid_resolution");
      cfg.fill(eq_no_grid_opt, eq_no_grid, "no_grid");
      if (eq_q == 0) throw std::runtime_error("equilibrium: --q is required");
      return cmd_equilibrium(eq_q, eq_r, eq_beta, eq_grid, eq_no_grid,
                             eq_shared.common);
    }
    if (check->parsed()) {
      const ConfigFile cfg = finish_common(check_shared);
      cfg.fill(check_q_opt, check_q, "q");
      cfg.fill(check_r_opt, check_r, "r");
      cfg.fill(check_beta_opt, check_beta, "beta");
      cfg.fill(check_eps_opt, check_eps, "epsilon");
      cfg.fill(check_grid_opt, check_grid, "grid_resolution");
      if (check_q == 0) throw std::runtime_error("check: --q is required");
      if (check_grid == 0) check_grid = (check_q <= 3) ? 200 : 60;
      return cmd_check(check_q, check_r, check_beta, check_eps, check_grid,
                       check_shared.common);
    }
    if (simulate->parsed()) {
      const ConfigFile cfg = finish_common(sim_shared);
      cfg.fill(sim_q_opt, sim_q, "q");
      cfg.fill(sim_r_opt, sim_r, "r");
      cfg.fill(sim_beta_opt, sim_beta, "beta");
      cfg.fill(sim_n_opt, sim_n, "n");
      cfg.fill(sim_steps_opt, sim_steps, "steps");
      cfg.fill(sim_stride_opt, sim_stride, "stride");
      cfg.fill(sim_init_opt, sim_init, "init");
      cfg.fill(sim_seed_opt, sim_seed, "seed");
      if (sim_q == 0 || sim_n == 0 || sim_steps == 0)
        throw std::runtime_error("simulate: --q, --n and --steps are required");
      if (sim_seed_opt->count() == 0 && !cfg.data.contains("seed"))
        throw std::runtime_error("simulate: an explicit --seed is required");
      return cmd_simulate(sim_q, sim_r, sim_beta, sim_n, sim_steps, sim_stride,
                          sim_init, sim_seed, sim_shared.common);
    }
    if (couple->parsed()) {
      const ConfigFile cfg = finish_common(couple_shared);
      cfg.fill(couple_q_opt, couple_q, "q");
      cfg.fill(couple_r_opt, couple_r, "r");
      cfg.fill(couple_beta_opt, couple_beta, "beta");
      cfg.fill(couple_n_opt, couple_n, "n");
      cfg.fill(couple_trials_opt, couple_trials, "trials");
      cfg.fill(couple_seed_opt, couple_seed, "seed");
      cfg.fill(couple_init_opt, couple_init, "init");
      cfg.fill(couple_cap_opt, couple_cap, "cap");
      cfg.fill(couple_horizon_opt, couple_horizon, "horizon");
      if (couple_q == 0 || couple_n == 0)
        throw std::runtime_error("couple: --q and --n are required");
      if (couple_seed_opt->count() == 0 && !cfg.data.contains("seed"))
        throw std::runtime_error("couple: an explicit --seed is required");
      return cmd_couple(couple_q, couple_r, couple_beta, couple_n, couple_trials,
                        couple_seed, couple_init, couple_cap, couple_horizon,
                        couple_shared.common);
    }
    if (mixing->parsed()) {
      const ConfigFile cfg = finish_common(mixing_shared);
      cfg.fill(mixing_q_opt, mixing_q, "q");
      cfg.fill(mixing_r_opt, mixing_r, "r");
      cfg.fill(mixing_beta_opt, mixing_beta, "beta");
      cfg.fill(mixing_n_opt, mixing_n, "n");
      cfg.fill(mixing_eps_opt, mixing_eps, "eps");
      cfg.fill(mixing_all_opt, mixing_all_starts, "all_starts");
      cfg.fill(mixing_max_opt, mixing_max_steps, "max_steps");
      if (mixing_q == 0 || mixing_n.empty())
        throw std::runtime_error("mixing-exact: --q and --n are required");
      return cmd_mixing_exact(mixing_q, mixing_r, mixing_beta, mixing_n,
                              mixing_eps, mixing_all_starts, mixing_max_steps,
                              mixing_shared.common);
    }
    if (phase->parsed()) {
      const ConfigFile cfg = finish_common(phase_shared);
      cfg.fill(phase_q_opt, phase_q, "q");
      cfg.fill(phase_r_opt, phase_r, "r");
      return cmd_phase_diagram(phase_q, phase_r, phase_shared.common);
    }
  } catch (const std::exception& e) {
    ordered_json diag;
    diag["error"] = std::string(e.what());
    std::cerr << diag.dump() << "\n";
    return 1;
  }
  return 1;
}
