// Command-line front end: analyze / design / sweep / pareto / simulate with
// machine-readable output. Every file-producing subcommand writes a manifest
// JSON next to its output; `rerun` replays a manifest and reproduces the
// outputs byte-for-byte.
//
// Exit codes: 0 success, 1 usage error, 2 domain error, 3 numerical failure.

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "fomcert/core.hpp"
#include "fomcert/designs.hpp"
#include "fomcert/quadratic.hpp"
#include "fomcert/sector.hpp"
#include "fomcert/simulate.hpp"
#include "fomcert/smooth.hpp"
#include "fomcert/sweep.hpp"

using json = nlohmann::ordered_json;
using namespace fomcert;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

double elapsed_ms(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                   t0)
      .count();
}

void write_manifest(const std::string& out_path, const std::string& subcommand,
                    const json& config, const std::vector<std::string>& outputs) {
  json man;
  man["tool"] = "fomcert";
  man["version"] = kVersion;
  man["subcommand"] = subcommand;
  man["timestamp"] = timestamp_utc();
  man["config"] = config;
  man["outputs"] = outputs;
  std::ofstream os(out_path + ".manifest.json");
  os << man.dump(2) << "\n";
}

FunctionClassKind parse_class(const std::string& c) {
  if (c == "Q") return FunctionClassKind::Quadratic;
  if (c == "S") return FunctionClassKind::OnePointStronglyConvex;
  if (c == "F") return FunctionClassKind::SmoothStronglyConvex;
  throw CLI::ValidationError("--class", "must be one of Q, S, F");
}

std::uint64_t fnv1a(const void* data, std::size_t bytes, std::uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string problem_hash(const QuadraticProblem& q) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  h = fnv1a(q.hessian.data(), sizeof(double) * q.hessian.size(), h);
  h = fnv1a(q.linear.data(), sizeof(double) * q.linear.size(), h);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

AlgorithmParams tuning_by_name(const std::string& name, double m, double L,
                               std::optional<double> rho) {
  if (name == "gd-l") return standard_tuning(Tuning::GD_L, m, L);
  if (name == "gd-2") return standard_tuning(Tuning::GD_2overLm, m, L);
  if (name == "hb") return standard_tuning(Tuning::HB, m, L);
  if (name == "fg") return standard_tuning(Tuning::FG, m, L);
  if (name == "tm") return standard_tuning(Tuning::TM, m, L);
  if (name == "rm") return standard_tuning(Tuning::RM, m, L, rho);
  throw CLI::ValidationError("--tuning",
                             "must be one of gd-l, gd-2, hb, fg, tm, rm");
}

// --- analyze ---------------------------------------------------------------

struct AnalyzeConfig {
  std::string klass = "Q";
  double m = 1.0, L = 10.0;
  double alpha = 0.0, beta = 0.0, eta = 0.0;
  std::string tuning;  // overrides alpha/beta/eta when set
  std::optional<double> tuning_rho;
  double sigma2 = 1.0;
  int d = 1;
  int ell_rate = 1, ell_gamma = 6;
  double tol = 1e-6;
  bool balance = true;
};

json analyze_config_json(const AnalyzeConfig& c) {
  json j;
  j["class"] = c.klass;
  j["m"] = c.m;
  j["L"] = c.L;
  j["alpha"] = c.alpha;
  j["beta"] = c.beta;
  j["eta"] = c.eta;
  if (!c.tuning.empty()) j["tuning"] = c.tuning;
  if (c.tuning_rho) j["tuning_rho"] = *c.tuning_rho;
  j["sigma2"] = c.sigma2;
  j["d"] = c.d;
  j["ell_rate"] = c.ell_rate;
  j["ell_gamma"] = c.ell_gamma;
  j["tol"] = c.tol;
  j["balance"] = c.balance;
  return j;
}

int run_analyze(const AnalyzeConfig& cfg, bool as_csv, const std::string& out_path) {
  AlgorithmParams p{cfg.alpha, cfg.beta, cfg.eta};
  if (!cfg.tuning.empty()) p = tuning_by_name(cfg.tuning, cfg.m, cfg.L, cfg.tuning_rho);
  const NoiseModel noise{cfg.sigma2, cfg.d};
  const StateSpace s = to_state_space(p);

  json rep;
  rep["class"] = cfg.klass;
  rep["m"] = cfg.m;
  rep["L"] = cfg.L;
  rep["alpha"] = p.alpha;
  rep["beta"] = p.beta;
  rep["eta"] = p.eta;
  rep["sigma2"] = cfg.sigma2;
  rep["d"] = cfg.d;

  double rho = std::numeric_limits<double>::quiet_NaN();
  std::optional<double> gamma;
  std::string gamma_error;
  json cert;
  const auto t0 = std::chrono::steady_clock::now();
  double rho_ms = 0.0;

  const auto kind = parse_class(cfg.klass);
  if (kind == FunctionClassKind::Quadratic) {
    rho = quad_rate(p, cfg.m, cfg.L);
    rho_ms = elapsed_ms(t0);
    rep["exact"] = true;
    if (rho < 1.0) {
      gamma = quad_sensitivity(p, cfg.m, cfg.L, noise);
    } else {
      gamma_error = "rate >= 1, sensitivity undefined";
    }
    cert["kind"] = "quad-endpoints";
  } else if (kind == FunctionClassKind::OnePointStronglyConvex) {
    const auto rr = sector_rate(s, cfg.m, cfg.L, cfg.tol);
    rho = rr.rho;
    rho_ms = elapsed_ms(t0);
    rep["exact"] = false;
    if (rho < 1.0) {
      const auto gg = sector_gamma(s, cfg.m, cfg.L, noise);
      gamma = gg.gamma;
      cert["kind"] = gg.certificate.kind;
      cert["residual"] = gg.certificate.residual;
    } else {
      gamma_error = "no certified rate below 1";
    }
  } else {
    SmoothOptions opts;
    opts.ell = cfg.ell_rate;
    opts.tol = cfg.tol;
    opts.balance = cfg.balance;
    const auto rr = smooth_rate(s, cfg.m, cfg.L, opts);
    rho = rr.rho;
    rho_ms = elapsed_ms(t0);
    rep["exact"] = false;
    if (rho < 1.0) {
      opts.ell = cfg.ell_gamma;
      const auto gg = smooth_gamma(s, cfg.m, cfg.L, noise, opts);
      gamma = gg.gamma;
      cert["kind"] = gg.certificate.kind;
      cert["ell"] = gg.certificate.ell;
      cert["balanced"] = gg.certificate.balanced;
      cert["residual"] = gg.certificate.residual;
    } else {
      gamma_error = "no certified rate below 1";
    }
  }

  rep["rho"] = rho;
  if (gamma) {
    rep["gamma"] = *gamma;
  } else {
    rep["gamma_error"] = gamma_error;
  }
  rep["certificate"] = cert;
  rep["timings_ms"] = {{"rho", rho_ms}, {"total", elapsed_ms(t0)}};

  std::ostringstream body;
  if (as_csv) {
    body << "class,m,L,alpha,beta,eta,rho,gamma\n"
         << cfg.klass << ',' << format_g17(cfg.m) << ',' << format_g17(cfg.L) << ','
         << format_g17(p.alpha) << ',' << format_g17(p.beta) << ','
         << format_g17(p.eta) << ',' << format_g17(rho) << ','
         << (gamma ? format_g17(*gamma) : std::string()) << "\n";
  } else {
    body << rep.dump(2) << "\n";
  }
  if (out_path.empty()) {
    std::cout << body.str();
  } else {
    std::ofstream os(out_path);
    os << body.str();
    write_manifest(out_path, "analyze", analyze_config_json(cfg), {out_path});
  }
  return gamma ? 0 : 2;
}

// --- design ----------------------------------------------------------------

struct DesignConfig {
  std::string method = "rhb";
  double rho = 0.9;
  double m = 1.0, L = 10.0;
  std::optional<double> alpha;
  bool optimize = false;
  double sigma2 = 1.0;
  int d = 1;
};

json design_config_json(const DesignConfig& c) {
  json j;
  j["method"] = c.method;
  j["rho"] = c.rho;
  j["m"] = c.m;
  j["L"] = c.L;
  if (c.alpha) j["alpha"] = *c.alpha;
  j["optimize"] = c.optimize;
  j["sigma2"] = c.sigma2;
  j["d"] = c.d;
  return j;
}

int run_design(const DesignConfig& cfg, const std::string& out_path) {
  const NoiseModel noise{cfg.sigma2, cfg.d};
  AlgorithmParams p;
  json rep;
  rep["method"] = cfg.method;
  rep["m"] = cfg.m;
  rep["L"] = cfg.L;

  if (cfg.method == "rhb") {
    const auto dsn = rhb(cfg.rho, cfg.m, cfg.L);
    p = dsn.params;
    rep["rho"] = dsn.rho;
    rep["gamma"] = dsn.gamma(noise);
    rep["exact"] = true;
  } else if (cfg.method == "gd") {
    const auto dsn = gd_rho(cfg.rho, cfg.m, cfg.L);
    p = dsn.params;
    rep["rho"] = dsn.rho;
    rep["gamma"] = dsn.gamma(noise);
    rep["exact"] = true;
  } else if (cfg.method == "rgd") {
    if (cfg.optimize) {
      const auto opt = rgd_optimize(cfg.rho, cfg.m, cfg.L, noise);
      p = opt.params;
      rep["rho"] = cfg.rho;
      rep["gamma"] = opt.gamma;
      rep["line_search_evaluations"] = opt.evaluations;
    } else {
      const double a = cfg.alpha ? *cfg.alpha : rgd_alpha_range(cfg.rho, cfg.m).lo;
      p = rgd(cfg.rho, cfg.m, cfg.L, a);
      rep["rho"] = cfg.rho;
      rep["gamma"] = sector_gamma(to_state_space(p), cfg.m, cfg.L, noise).gamma;
    }
    rep["exact"] = false;
  } else if (cfg.method == "ram") {
    p = ram(cfg.rho, cfg.m, cfg.L);
    SmoothOptions opts;
    opts.ell = 1;
    const auto rr = smooth_rate(to_state_space(p), cfg.m, cfg.L, opts);
    opts.ell = 6;
    const auto gg = smooth_gamma(to_state_space(p), cfg.m, cfg.L, noise, opts);
    rep["rho"] = rr.rho;
    rep["gamma"] = gg.gamma;
    rep["exact"] = false;
  } else if (cfg.method.rfind("table:", 0) == 0) {
    p = tuning_by_name(cfg.method.substr(6), cfg.m, cfg.L, cfg.rho);
  } else {
    throw CLI::ValidationError("--method",
                               "must be rhb, gd, rgd, ram, or table:<name>");
  }
  rep["alpha"] = format_g17(p.alpha);
  rep["beta"] = format_g17(p.beta);
  rep["eta"] = format_g17(p.eta);

  const std::string body = rep.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << body;
  } else {
    std::ofstream os(out_path);
    os << body;
    write_manifest(out_path, "design", design_config_json(cfg), {out_path});
  }
  return 0;
}

// --- sweep / pareto --------------------------------------------------------

json sweep_config_json(const SweepConfig& c) {
  json j;
  j["class"] = c.function_class.kind == FunctionClassKind::Quadratic ? "Q"
               : c.function_class.kind == FunctionClassKind::OnePointStronglyConvex
                   ? "S"
                   : "F";
  j["m"] = c.function_class.m;
  j["L"] = c.function_class.L;
  j["sigma2"] = c.noise.sigma2;
  j["d"] = c.noise.d;
  j["n_alpha"] = c.n_alpha;
  j["n_alpha_eta"] = c.n_alpha_eta;
  j["n_beta"] = c.n_beta;
  j["alpha_min"] = c.alpha_min;
  j["ell_rate"] = c.ell_rate;
  j["ell_gamma"] = c.ell_gamma;
  j["balance"] = c.balance;
  j["rate_tol"] = c.rate_tol;
  j["workers"] = c.workers;
  return j;
}

SweepConfig sweep_config_from_json(const json& j) {
  SweepConfig c;
  c.function_class.kind = parse_class(j.value("class", "Q"));
  c.function_class.m = j.value("m", 1.0);
  c.function_class.L = j.value("L", 10.0);
  c.noise.sigma2 = j.value("sigma2", 1.0);
  c.noise.d = j.value("d", 1);
  c.n_alpha = j.value("n_alpha", 40);
  c.n_alpha_eta = j.value("n_alpha_eta", 21);
  c.n_beta = j.value("n_beta", 20);
  c.alpha_min = j.value("alpha_min", 1e-5);
  c.ell_rate = j.value("ell_rate", 1);
  c.ell_gamma = j.value("ell_gamma", 6);
  c.balance = j.value("balance", true);
  c.rate_tol = j.value("rate_tol", 1e-6);
  c.workers = j.value("workers", 0);
  return c;
}

int run_sweep_cmd(const SweepConfig& cfg, const std::string& out_path, bool resume) {
  cfg.validate();
  long start = 0;
  std::ios_base::openmode mode = std::ios_base::out;
  if (resume) {
    std::ifstream existing(out_path);
    if (existing) {
      std::string line;
      long rows = 0;
      bool header = false;
      while (std::getline(existing, line)) {
        if (line.empty()) continue;
        if (!header && line.rfind("alpha,", 0) == 0) {
          header = true;
          continue;
        }
        ++rows;
      }
      if (header) {
        start = rows;
        mode = std::ios_base::app;
      }
    }
  }
  std::ofstream os(out_path, mode);
  if (!os) {
    std::cerr << "cannot open " << out_path << "\n";
    return 1;
  }
  if (start == 0) write_sweep_csv_header(os);
  // evaluate in slabs so interrupted runs can resume from the written rows
  const long total = cfg.total_points();
  const long slab = std::max(1000L, total / 64);
  for (long at = start; at < total; at += slab) {
    const auto pts = run_sweep_range(cfg, at, std::min(total, at + slab));
    for (const auto& p : pts) write_sweep_csv_row(os, p);
    os.flush();
  }
  write_manifest(out_path, "sweep", sweep_config_json(cfg), {out_path});
  return 0;
}

int run_pareto(const std::string& in_path, const std::string& out_path) {
  std::ifstream is(in_path);
  if (!is) {
    std::cerr << "cannot open " << in_path << "\n";
    return 1;
  }
  const auto pts = read_sweep_csv(is);
  const auto front = pareto_front(pts);
  std::ofstream os(out_path);
  write_sweep_csv(os, front);
  json cfgj;
  cfgj["in"] = in_path;
  write_manifest(out_path, "pareto", cfgj, {out_path});
  return 0;
}

// --- simulate ----------------------------------------------------------------

struct SimulateConfig {
  std::string method;  // empty: use explicit alpha/beta/eta
  double rho = 0.9;
  double alpha = 0.0, beta = 0.0, eta = 0.0;
  double m = 1.0, L = 10.0;
  std::string problem = "nesterov";  // or "scalar": f = (m/2) ||y||^2
  int d = 100;
  double sigma2 = 1.0;
  long T = 1000;
  int trials = 10;
  std::uint64_t seed = 0;
  double init_scale = 0.0;  // x^0 = init_scale * e_1
  int workers = 1;
};

json simulate_config_json(const SimulateConfig& c) {
  json j;
  if (!c.method.empty()) {
    j["method"] = c.method;
    j["rho"] = c.rho;
  }
  j["alpha"] = c.alpha;
  j["beta"] = c.beta;
  j["eta"] = c.eta;
  j["m"] = c.m;
  j["L"] = c.L;
  j["problem"] = c.problem;
  j["d"] = c.d;
  j["sigma2"] = c.sigma2;
  j["T"] = c.T;
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  j["init_scale"] = c.init_scale;
  j["workers"] = c.workers;
  return j;
}

int run_simulate(SimulateConfig cfg, const std::string& out_path) {
  AlgorithmParams p{cfg.alpha, cfg.beta, cfg.eta};
  if (!cfg.method.empty()) {
    if (cfg.method == "rhb") {
      p = rhb(cfg.rho, cfg.m, cfg.L).params;
    } else if (cfg.method == "gd") {
      p = gd_rho(cfg.rho, cfg.m, cfg.L).params;
    } else if (cfg.method == "ram") {
      p = ram(cfg.rho, cfg.m, cfg.L);
    } else {
      p = tuning_by_name(cfg.method, cfg.m, cfg.L, cfg.rho);
    }
    cfg.alpha = p.alpha;
    cfg.beta = p.beta;
    cfg.eta = p.eta;
  }
  QuadraticProblem prob;
  if (cfg.problem == "nesterov") {
    prob = nesterov_tridiagonal(cfg.d, cfg.m, cfg.L);
  } else if (cfg.problem == "scalar") {
    prob = make_quadratic(cfg.m * Matrix::Identity(cfg.d, cfg.d), Vector::Zero(cfg.d),
                          cfg.m, cfg.L);
  } else {
    throw CLI::ValidationError("--problem", "must be nesterov or scalar");
  }
  SimConfig sim;
  sim.T = cfg.T;
  sim.trials = cfg.trials;
  sim.seed = cfg.seed;
  sim.workers = cfg.workers;
  if (cfg.init_scale != 0.0) {
    sim.init = Vector::Zero(cfg.d);
    sim.init[0] = cfg.init_scale;
  }
  const auto stats = simulate(to_state_space(p), prob, {cfg.sigma2, cfg.d}, sim);

  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    os = &file;
  }
  *os << "t,mean_err,std_err\n";
  for (long t = 0; t < stats.T; ++t) {
    *os << t << ',' << format_g17(stats.mean_err[t]) << ','
        << format_g17(stats.std_err[t]) << '\n';
  }
  if (!out_path.empty()) {
    json cfgj = simulate_config_json(cfg);
    cfgj["problem_hash"] = problem_hash(prob);
    cfgj["diverged"] = stats.diverged;
    write_manifest(out_path, "simulate", cfgj, {out_path});
  }
  return 0;
}

// --- rerun -------------------------------------------------------------------

int run_rerun(const std::string& manifest_path);

int dispatch(const std::string& subcommand, const json& config,
             const std::string& out_path) {
  if (subcommand == "sweep") {
    return run_sweep_cmd(sweep_config_from_json(config), out_path, false);
  }
  if (subcommand == "pareto") {
    return run_pareto(config.at("in").get<std::string>(), out_path);
  }
  if (subcommand == "simulate") {
    SimulateConfig c;
    c.method = config.value("method", "");
    c.rho = config.value("rho", 0.9);
    c.alpha = config.value("alpha", 0.0);
    c.beta = config.value("beta", 0.0);
    c.eta = config.value("eta", 0.0);
    c.m = config.value("m", 1.0);
    c.L = config.value("L", 10.0);
    c.problem = config.value("problem", "nesterov");
    c.d = config.value("d", 100);
    c.sigma2 = config.value("sigma2", 1.0);
    c.T = config.value("T", 1000L);
    c.trials = config.value("trials", 10);
    c.seed = config.value("seed", std::uint64_t{0});
    c.init_scale = config.value("init_scale", 0.0);
    c.workers = config.value("workers", 1);
    if (!c.method.empty()) c.method = config.value("method", "");
    return run_simulate(c, out_path);
  }
  if (subcommand == "analyze") {
    AnalyzeConfig c;
    c.klass = config.value("class", "Q");
    c.m = config.value("m", 1.0);
    c.L = config.value("L", 10.0);
    c.alpha = config.value("alpha", 0.0);
    c.beta = config.value("beta", 0.0);
    c.eta = config.value("eta", 0.0);
    c.tuning = config.value("tuning", "");
    if (config.contains("tuning_rho")) c.tuning_rho = config["tuning_rho"].get<double>();
    c.sigma2 = config.value("sigma2", 1.0);
    c.d = config.value("d", 1);
    c.ell_rate = config.value("ell_rate", 1);
    c.ell_gamma = config.value("ell_gamma", 6);
    c.tol = config.value("tol", 1e-6);
    c.balance = config.value("balance", true);
    return run_analyze(c, false, out_path);
  }
  if (subcommand == "design") {
    DesignConfig c;
    c.method = config.value("method", "rhb");
    c.rho = config.value("rho", 0.9);
    c.m = config.value("m", 1.0);
    c.L = config.value("L", 10.0);
    if (config.contains("alpha")) c.alpha = config["alpha"].get<double>();
    c.optimize = config.value("optimize", false);
    c.sigma2 = config.value("sigma2", 1.0);
    c.d = config.value("d", 1);
    return run_design(c, out_path);
  }
  std::cerr << "rerun: unsupported subcommand " << subcommand << "\n";
  return 1;
}

int run_rerun(const std::string& manifest_path) {
  std::ifstream is(manifest_path);
  if (!is) {
    std::cerr << "cannot open " << manifest_path << "\n";
    return 1;
  }
  json man = json::parse(is);
  const std::string sub = man.at("subcommand").get<std::string>();
  const auto outputs = man.at("outputs").get<std::vector<std::string>>();
  return dispatch(sub, man.at("config"), outputs.empty() ? "" : outputs.front());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified convergence-rate and noise-sensitivity toolkit for "
               "first-order methods"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  // analyze
  AnalyzeConfig ac;
  bool as_csv = false, as_json = true;
  std::string out_path;
  auto* analyze = app.add_subcommand("analyze", "Certify (rho, gamma) for a method");
  analyze->add_option("--class", ac.klass, "Function class: Q, S, or F")->required();
  analyze->add_option("--m", ac.m, "Lower curvature")->required();
  analyze->add_option("--L", ac.L, "Upper curvature")->required();
  analyze->add_option("--alpha", ac.alpha, "Stepsize");
  analyze->add_option("--beta", ac.beta, "Momentum");
  analyze->add_option("--eta", ac.eta, "Extrapolation");
  analyze->add_option("--tuning", ac.tuning, "Standard tuning (gd-l, gd-2, hb, fg, tm, rm)");
  analyze->add_option("--tuning-rho", [&ac](const CLI::results_t& r) {
    ac.tuning_rho = std::stod(r[0]);
    return true;
  }, "Rate parameter for --tuning rm");
  analyze->add_option("--sigma2", ac.sigma2, "Noise variance bound");
  analyze->add_option("--d", ac.d, "Domain dimension");
  analyze->add_option("--ell-rate", ac.ell_rate, "Lifting dimension for rho (F class)");
  analyze->add_option("--ell-gamma", ac.ell_gamma, "Lifting dimension for gamma (F class)");
  analyze->add_option("--tol", ac.tol, "Bisection tolerance");
  analyze->add_flag("!--no-balance", ac.balance, "Disable the balancing transform");
  analyze->add_flag("--csv", as_csv, "CSV output");
  analyze->add_flag("--json", as_json, "JSON output (default)");
  analyze->add_option("--out", out_path, "Write the report to a file (with manifest)");

  // design
  DesignConfig dc;
  double design_alpha = std::numeric_limits<double>::quiet_NaN();
  auto* design = app.add_subcommand("design", "Construct a tunable design");
  design->add_option("--method", dc.method, "rhb, gd, rgd, ram, or table:<name>")
      ->required();
  design->add_option("--rho", dc.rho, "Target convergence rate");
  design->add_option("--m", dc.m, "Lower curvature")->required();
  design->add_option("--L", dc.L, "Upper curvature")->required();
  design->add_option("--alpha", design_alpha, "Stepsize (rgd only)");
  design->add_flag("--optimize", dc.optimize, "Line-search alpha to minimize gamma (rgd)");
  design->add_option("--sigma2", dc.sigma2, "Noise variance bound");
  design->add_option("--d", dc.d, "Domain dimension");
  design->add_option("--out", out_path, "Write the report to a file (with manifest)");

  // sweep
  SweepConfig swc;
  swc.n_alpha = 40;
  swc.n_alpha_eta = 21;
  swc.n_beta = 20;
  std::string sweep_class = "Q", sweep_config_path, sweep_out;
  bool sweep_resume = false;
  auto* sweep = app.add_subcommand("sweep", "Grid the parameter box and certify each point");
  sweep->add_option("--config", sweep_config_path, "JSON config file");
  sweep->add_option("--class", sweep_class, "Function class: Q, S, or F");
  sweep->add_option("--m", swc.function_class.m, "Lower curvature");
  sweep->add_option("--L", swc.function_class.L, "Upper curvature");
  sweep->add_option("--sigma2", swc.noise.sigma2, "Noise variance bound");
  sweep->add_option("--d", swc.noise.d, "Domain dimension");
  sweep->add_option("--n-alpha", swc.n_alpha, "Grid points in alpha (log spaced)");
  sweep->add_option("--n-alpha-eta", swc.n_alpha_eta, "Grid points in alpha*eta");
  sweep->add_option("--n-beta", swc.n_beta, "Grid points in beta");
  sweep->add_option("--alpha-min", swc.alpha_min, "Smallest alpha sample");
  sweep->add_option("--ell-rate", swc.ell_rate, "Lifting dimension for rho (F class)");
  sweep->add_option("--ell-gamma", swc.ell_gamma, "Lifting dimension for gamma (F class)");
  sweep->add_option("--workers", swc.workers, "Worker threads (0: auto)");
  sweep->add_flag("--resume", sweep_resume, "Append to an interrupted sweep CSV");
  sweep->add_option("--out", sweep_out, "Output CSV path")->required();

  // pareto
  std::string pareto_in, pareto_out;
  auto* pareto = app.add_subcommand("pareto", "Extract the Pareto front from a sweep CSV");
  pareto->add_option("--in", pareto_in, "Sweep CSV")->required();
  pareto->add_option("--out", pareto_out, "Front CSV")->required();

  // simulate
  SimulateConfig sc;
  std::string sim_out;
  auto* sim = app.add_subcommand("simulate", "Simulate noisy trajectories on a quadratic");
  sim->add_option("--method", sc.method, "rhb, gd, ram, hb, fg, tm, gd-l, gd-2, rm");
  sim->add_option("--rho", sc.rho, "Rate parameter for tunable methods");
  sim->add_option("--alpha", sc.alpha, "Stepsize (explicit parameterization)");
  sim->add_option("--beta", sc.beta, "Momentum");
  sim->add_option("--eta", sc.eta, "Extrapolation");
  sim->add_option("--m", sc.m, "Lower curvature");
  sim->add_option("--L", sc.L, "Upper curvature");
  sim->add_option("--problem", sc.problem, "nesterov or scalar");
  sim->add_option("--d", sc.d, "Problem dimension");
  sim->add_option("--sigma2", sc.sigma2, "Noise variance");
  sim->add_option("--T", sc.T, "Steps per trajectory");
  sim->add_option("--trials", sc.trials, "Independent trials");
  sim->add_option("--seed", sc.seed, "RNG seed");
  sim->add_option("--init-scale", sc.init_scale, "Initial point x^0 = scale * e_1");
  sim->add_option("--workers", sc.workers, "Worker threads");
  sim->add_option("--out", sim_out, "Trajectory CSV path");

  // rerun
  std::string manifest_path;
  auto* rerun = app.add_subcommand("rerun", "Replay a manifest to reproduce outputs");
  rerun->add_option("manifest", manifest_path, "Path to a .manifest.json")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (analyze->parsed()) return run_analyze(ac, as_csv, out_path);
    if (design->parsed()) {
      if (!std::isnan(design_alpha)) dc.alpha = design_alpha;
      return run_design(dc, out_path);
    }
    if (sweep->parsed()) {
      SweepConfig cfg = swc;
      if (!sweep_config_path.empty()) {
        std::ifstream is(sweep_config_path);
        if (!is) {
          std::cerr << "cannot open " << sweep_config_path << "\n";
          return 1;
        }
        cfg = sweep_config_from_json(json::parse(is));
      } else {
        cfg.function_class.kind = parse_class(sweep_class);
      }
      return run_sweep_cmd(cfg, sweep_out, sweep_resume);
    }
    if (pareto->parsed()) return run_pareto(pareto_in, pareto_out);
    if (sim->parsed()) return run_simulate(sc, sim_out);
    if (rerun->parsed()) return run_rerun(manifest_path);
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::domain_error& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 2;
  } catch (const shape_error& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
