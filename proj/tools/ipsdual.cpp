// Reproducible experiment runner: parses a run spec (flags or config file),
// dispatches to the library, cross-compares routes, and emits CSV reports
// with one-line verdicts.

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "ipsdual/duality.hpp"
#include "ipsdual/gdcp.hpp"
#include "ipsdual/generator.hpp"
#include "ipsdual/mc.hpp"
#include "ipsdual/report.hpp"
#include "ipsdual/sir.hpp"
#include "ipsdual/solver.hpp"

using namespace ipsdual;

namespace {

struct CommonOpts {
  std::string out_dir = default_output_dir();
  std::uint64_t seed = 1;
  double tol = 1e-10;
  int threads = 4;
};

struct ModelOpts {
  std::string model = "dcp";
  int n = 3;
  double alpha = 1.0, beta = 1.0, gamma = 1.0, delta = 1.0;
  double lambda = 1.0, diffusion = 1.0;
  double mu1 = 0.5, mu2 = 0.5;

  DcpParams dcp() const {
    DcpParams p;
    p.alpha = alpha;
    p.beta = beta;
    p.gamma = gamma;
    p.delta = delta;
    p.lambda = lambda;
    p.diffusion = diffusion;
    return p;
  }
  GdcpParams gdcp() const {
    GdcpParams p;
    p.alpha = alpha;
    p.beta = beta;
    p.gamma = gamma;
    p.delta = delta;
    p.lambda = lambda;
    p.diffusion = diffusion;
    p.mu1 = mu1;
    p.mu2 = mu2;
    return p;
  }
};

void add_model_flags(CLI::App* cmd, ModelOpts& m, bool with_model = true) {
  if (with_model) cmd->add_option("--model", m.model, "dcp or gdcp");
  cmd->add_option("--n", m.n, "lattice size");
  cmd->add_option("--alpha", m.alpha);
  cmd->add_option("--beta", m.beta);
  cmd->add_option("--gamma", m.gamma);
  cmd->add_option("--delta", m.delta);
  cmd->add_option("--lambda", m.lambda);
  cmd->add_option("--diffusion", m.diffusion);
  cmd->add_option("--mu1", m.mu1);
  cmd->add_option("--mu2", m.mu2);
}

void fill_spec(RunSpec& spec, const CommonOpts& c, const ModelOpts& m) {
  spec.set("model", m.model);
  spec.set("n", static_cast<long long>(m.n));
  spec.set("alpha", m.alpha);
  spec.set("beta", m.beta);
  spec.set("gamma", m.gamma);
  spec.set("delta", m.delta);
  spec.set("lambda", m.lambda);
  spec.set("diffusion", m.diffusion);
  if (m.model == "gdcp") {
    spec.set("mu1", m.mu1);
    spec.set("mu2", m.mu2);
  }
  spec.set("seed", static_cast<long long>(c.seed));
  spec.set("tol", c.tol);
}

std::string params_hash(const ModelOpts& m) {
  // stable textual fingerprint of the parameter point
  std::ostringstream os;
  os.precision(17);
  os << m.model << ":" << m.alpha << "," << m.beta << "," << m.gamma << ","
     << m.delta << "," << m.lambda << "," << m.diffusion << "," << m.mu1 << ","
     << m.mu2;
  return std::to_string(std::hash<std::string>{}(os.str()));
}

int verdict_line(const std::string& what, bool pass, const std::string& detail) {
  std::cout << (pass ? "PASS " : "FAIL ") << what << " " << detail << "\n";
  return pass ? 0 : 1;
}

[[noreturn]] void fail_with_record(const std::string& command,
                                   const std::string& message, int code) {
  nlohmann::json rec;
  rec["error"] = message;
  rec["command"] = command;
  std::cerr << rec.dump() << std::endl;
  std::exit(code);
}

ModelOpts randomized(const ModelOpts& base, SplitRng& rng) {
  ModelOpts m = base;
  auto u = [&](double lo, double hi) { return lo + (hi - lo) * rng.uniform(); };
  m.alpha = u(0.05, 2.0);
  m.beta = u(0.05, 2.0);
  m.gamma = u(0.05, 2.0);
  m.delta = u(0.05, 2.0);
  m.lambda = u(0.05, 2.0);
  m.diffusion = u(0.05, 2.0);
  if (base.model == "gdcp") {  // keep the dual-theorem hypotheses
    m.mu2 = u(0.05, 1.5);
    m.mu1 = m.mu2 + u(0.0, 1.0) * m.lambda;
  }
  return m;
}

// --------------------------------------------------------------------------

int run_duality_check(const CommonOpts& c, const ModelOpts& base, int draws,
                      int sink_cap) {
  RunSpec spec;
  spec.command = "duality-check";
  fill_spec(spec, c, base);
  spec.set("draws", static_cast<long long>(draws));
  spec.set("sink_cap", static_cast<long long>(sink_cap));
  CsvReport csv(c.out_dir + "/duality_check.csv", spec,
                {"model", "n", "params_hash", "residual", "cap_mass"});
  SplitRng rng(c.seed, 0);
  double worst = 0.0;
  for (int draw = 0; draw < draws; ++draw) {
    const ModelOpts m = randomized(base, rng);
    double residual = 0.0;
    Index truncated = 0;
    Index total_cols = 1;
    if (base.model == "dcp") {
      const auto p = m.dcp();
      const auto dual = build_dual(p, m.n, sink_cap);
      residual = check_matrix_duality(build_dcp(p, m.n), dual,
                                      duality_matrix(p, m.n, sink_cap));
      truncated = static_cast<Index>(dual.truncated_rows.size());
      total_cols = dual.space.dim();
    } else {
      const auto p = m.gdcp();
      const auto dual = build_dual(p, m.n, sink_cap);
      residual = check_matrix_duality(build_gdcp(p, m.n), dual,
                                      duality_matrix(p, m.n, sink_cap));
      truncated = static_cast<Index>(dual.truncated_rows.size());
      total_cols = dual.space.dim();
    }
    worst = std::max(worst, residual);
    csv.row({base.model, std::to_string(m.n), params_hash(m),
             CsvReport::format(residual),
             CsvReport::format(static_cast<double>(truncated) /
                               static_cast<double>(total_cols))});
  }
  std::ostringstream d;
  d << "max_residual=" << worst << " tol=1e-12 report=" << csv.path();
  return verdict_line("duality-check", worst < 1e-12, d.str());
}

int run_stationary(const CommonOpts& c, const ModelOpts& m) {
  RunSpec spec;
  spec.command = "stationary";
  fill_spec(spec, c, m);
  const SparseGenerator gen =
      m.model == "dcp" ? build_dcp(m.dcp(), m.n) : build_gdcp(m.gdcp(), m.n);
  const auto measure = stationary(gen);
  CsvReport csv(c.out_dir + "/stationary.csv", spec,
                {"index", "configuration", "probability"});
  for (Index i = 0; i < measure.probabilities.size(); ++i)
    csv.row({std::to_string(i + 1), config_of(i + 1, m.n).to_string(),
             CsvReport::format(measure.probabilities[i])});
  const double sum_err = std::abs(measure.probabilities.sum() - 1.0);
  std::ostringstream d;
  d << "normalization_error=" << sum_err << (measure.dirac ? " dirac=true" : "")
    << " report=" << csv.path();
  return verdict_line("stationary", sum_err < 1e-12, d.str());
}

int run_absorption(const CommonOpts& c, const ModelOpts& m,
                   const std::string& init_bits, int k_max) {
  RunSpec spec;
  spec.command = "absorption";
  fill_spec(spec, c, m);
  spec.set("init", init_bits);
  spec.set("k_max", static_cast<long long>(k_max));
  if (static_cast<int>(init_bits.size()) != m.n)
    throw std::invalid_argument("init word length must equal n");
  Configuration init(m.n);
  for (int x = 1; x <= m.n; ++x)
    init.set(x, init_bits[static_cast<std::size_t>(x - 1)] == '1' ? 1 : 0);
  const DualModelSpec dual =
      m.model == "dcp" ? dual_of(m.dcp(), m.n) : dual_of(m.gdcp(), m.n);
  const DualConfiguration d0{0, init, 0};
  const auto a = absorption_law(dual, d0, k_max);
  const auto b = absorption_law_via_transient(dual, d0, k_max);
  CsvReport csv(c.out_dir + "/absorption.csv", spec,
                {"m", "n", "p_linear_system", "p_transient"});
  double tv = 0.0;
  for (int mm = 0; mm <= k_max; ++mm)
    for (int nn = 0; nn <= k_max; ++nn) {
      tv += std::abs(a.joint(mm, nn) - b.joint(mm, nn));
      if (a.joint(mm, nn) != 0.0 || b.joint(mm, nn) != 0.0)
        csv.row({std::to_string(mm), std::to_string(nn),
                 CsvReport::format(a.joint(mm, nn)),
                 CsvReport::format(b.joint(mm, nn))});
    }
  tv /= 2.0;
  std::ostringstream d;
  d << "tv_distance=" << tv << " tail=" << a.tail
    << " t_linear=" << a.solve_seconds << "s t_transient=" << b.solve_seconds
    << "s report=" << csv.path();
  return verdict_line("absorption", tv < 1e-9, d.str());
}

int run_correlate(const CommonOpts& c, const ModelOpts& m,
                  const std::vector<int>& sites, int mc_replicas) {
  RunSpec spec;
  spec.command = "correlate";
  fill_spec(spec, c, m);
  std::ostringstream ss;
  for (std::size_t i = 0; i < sites.size(); ++i) ss << (i ? "," : "") << sites[i];
  spec.set("sites", ss.str());
  spec.set("mc_replicas", static_cast<long long>(mc_replicas));

  const SparseGenerator gen =
      m.model == "dcp" ? build_dcp(m.dcp(), m.n) : build_gdcp(m.gdcp(), m.n);
  const auto direct = correlation_direct(stationary(gen), m.n, sites);
  const auto dual = m.model == "dcp"
                        ? correlation_via_duality(m.dcp(), m.n, sites, c.tol)
                        : correlation_via_duality(m.gdcp(), m.n, sites, c.tol);

  CsvReport csv(c.out_dir + "/correlate.csv", spec,
                {"route", "sites", "value", "error_bound"});
  csv.row({"direct", ss.str(), CsvReport::format(direct.value), "0"});
  csv.row({"duality", ss.str(), CsvReport::format(dual.value),
           CsvReport::format(dual.error_bound)});

  bool mc_pass = true;
  if (mc_replicas > 0) {
    const auto chain =
        m.model == "dcp" ? chain_of(m.dcp(), m.n) : chain_of(m.gdcp(), m.n);
    const double gap = spectral_gap(gen);
    const double t_burn = 10.0 / gap;
    const Estimate e = estimate(
        mc_replicas, c.seed, c.threads, [&](std::uint64_t stream, SplitRng&) {
          const auto out = simulate(chain, Configuration(m.n), t_burn, c.seed, stream);
          for (int x : sites)
            if (!out.final_state.at(x)) return 0.0;
          return 1.0;
        });
    csv.row({"monte-carlo", ss.str(), CsvReport::format(e.mean),
             CsvReport::format(3.0 * e.std_error)});
    mc_pass = std::abs(e.mean - direct.value) <= 3.0 * e.std_error;
  }
  const double route_gap = std::abs(direct.value - dual.value);
  std::ostringstream d;
  d << "direct=" << direct.value << " duality=" << dual.value
    << " |diff|=" << route_gap << " report=" << csv.path();
  return verdict_line("correlate", route_gap < 1e-8 && mc_pass, d.str());
}

int run_gdcp_profile(const CommonOpts& c, const ModelOpts& m) {
  RunSpec spec;
  spec.command = "gdcp-profile";
  ModelOpts g = m;
  g.model = "gdcp";
  g.mu1 = g.lambda + g.mu2;  // annihilating regime, enforced exactly
  fill_spec(spec, c, g);
  const auto cf = one_point_closed_form(g.gdcp(), g.n);
  CsvReport csv(c.out_dir + "/gdcp_profile.csv", spec, {"x", "u", "v", "rho1"});
  for (int x = 1; x <= g.n; ++x)
    csv.row({std::to_string(x),
             CsvReport::format(cf.u[static_cast<std::size_t>(x - 1)]),
             CsvReport::format(cf.v[static_cast<std::size_t>(x - 1)]),
             CsvReport::format(cf.rho1[static_cast<std::size_t>(x - 1)])});

  double worst = 0.0;
  if (g.n <= 12) {  // cross-check against the annihilating-dual absorption solve
    AbsorptionSolver solver(dual_of(g.gdcp(), g.n), 2);
    for (int x = 1; x <= g.n; ++x) {
      worst = std::max(worst, std::abs(cf.u[static_cast<std::size_t>(x - 1)] -
                                       solver.left_only(x)));
      worst = std::max(worst, std::abs(cf.v[static_cast<std::size_t>(x - 1)] -
                                       solver.right_only(x)));
    }
  }
  std::ostringstream d;
  d << "max_error_vs_dual_solve=" << worst << " boundary_case=" << cf.boundary_case
    << " report=" << csv.path();
  return verdict_line("gdcp-profile", worst < 1e-10, d.str());
}

int run_gdcp_evolve(const CommonOpts& c, const ModelOpts& m,
                    const std::vector<double>& init, double t, double dt) {
  RunSpec spec;
  spec.command = "gdcp-evolve";
  ModelOpts g = m;
  g.model = "gdcp";
  g.mu1 = g.lambda + g.mu2;
  g.n = static_cast<int>(init.size());
  fill_spec(spec, c, g);
  spec.set("t", t);
  spec.set("dt", dt);
  const auto res = evolve_one_point(g.gdcp(), init, t, dt);
  CsvReport csv(c.out_dir + "/gdcp_evolve.csv", spec, {"t", "x", "profile"});
  for (const auto& [time, prof] : res.trajectory)
    for (int x = 1; x <= g.n; ++x)
      csv.row({CsvReport::format(time), std::to_string(x),
               CsvReport::format(prof[static_cast<std::size_t>(x - 1)])});

  double worst = 0.0;
  if (g.n <= 10) {  // oracle: full 2^N transient from the product measure
    const auto gen = build_gdcp(g.gdcp(), g.n);
    Eigen::VectorXd p0 = Eigen::VectorXd::Zero(gen.dim);
    for (Index i = 0; i < gen.dim; ++i) {
      const Configuration cfg = config_of(i + 1, g.n);
      double w = 1.0;
      for (int x = 1; x <= g.n; ++x)
        w *= cfg.at(x) ? init[static_cast<std::size_t>(x - 1)]
                       : 1.0 - init[static_cast<std::size_t>(x - 1)];
      p0[i] = w;
    }
    const Eigen::VectorXd pt = transient(gen, p0, t);
    for (int x = 1; x <= g.n; ++x) {
      double marginal = 0.0;
      for (Index i = 0; i < gen.dim; ++i)
        if (config_of(i + 1, g.n).at(x)) marginal += pt[i];
      worst = std::max(
          worst, std::abs(res.profile[static_cast<std::size_t>(x - 1)] - marginal));
    }
  }
  std::ostringstream d;
  d << "max_error_vs_transient=" << worst
    << " ssep_diffusion=" << res.mapping.diffusion_hat
    << " left_sum=" << res.mapping.left_sum
    << " right_sum=" << res.mapping.right_sum
    << (res.note.empty() ? "" : " note=\"" + res.note + "\"")
    << " report=" << csv.path();
  return verdict_line("gdcp-evolve", worst < 1e-8, d.str());
}

int run_fast_stirring(const CommonOpts& c, const ModelOpts& m,
                      const std::string& convention) {
  RunSpec spec;
  spec.command = "fast-stirring";
  fill_spec(spec, c, m);
  spec.set("convention", convention);
  const DcpParams p = m.dcp();
  const auto paper = fast_stirring_chain(p, m.n, StirringConvention::paper);
  const auto corrected = fast_stirring_chain(p, m.n, StirringConvention::corrected);
  const auto [pi_paper, dirac_p] = paper.stationary();
  const auto [pi_corr, dirac_c] = corrected.stationary();
  (void)dirac_p;
  (void)dirac_c;

  // occupancy law of the exact N=2 stationary measure in the D -> inf limit
  std::vector<double> exact;
  if (m.n == 2) {
    const double s = p.alpha + p.beta + p.gamma + p.delta + 2.0;
    const double cinf = s * s + 2.0 * p.lambda * (p.alpha + p.delta);
    exact = {(p.beta + p.gamma + 2.0) * (p.beta + p.gamma + 2.0) / cinf,
             2.0 * (2.0 + p.beta + p.gamma) * (p.alpha + p.delta) / cinf,
             (p.alpha + p.delta) * (p.alpha + p.delta + 2.0 * p.lambda) / cinf};
  }
  CsvReport csv(c.out_dir + "/fast_stirring.csv", spec,
                {"particles", "pi_paper", "pi_corrected", "pi_exact_limit"});
  double worst_corr = 0.0, worst_paper = 0.0;
  for (int k = 0; k <= m.n; ++k) {
    std::string ex;
    if (!exact.empty()) {
      ex = CsvReport::format(exact[static_cast<std::size_t>(k)]);
      worst_corr =
          std::max(worst_corr, std::abs(pi_corr[static_cast<std::size_t>(k)] -
                                        exact[static_cast<std::size_t>(k)]));
      worst_paper =
          std::max(worst_paper, std::abs(pi_paper[static_cast<std::size_t>(k)] -
                                         exact[static_cast<std::size_t>(k)]));
    }
    csv.row({std::to_string(k),
             CsvReport::format(pi_paper[static_cast<std::size_t>(k)]),
             CsvReport::format(pi_corr[static_cast<std::size_t>(k)]), ex});
  }
  std::ostringstream d;
  if (!exact.empty())
    d << "corrected_vs_exact=" << worst_corr << " paper_vs_exact=" << worst_paper
      << " (paper deviation expected) ";
  d << "report=" << csv.path();
  const bool pass = exact.empty() ? true : worst_corr < 1e-12;
  return verdict_line("fast-stirring", pass, d.str());
}

int run_sir_cluster(const CommonOpts& c, const std::string& fixture, double beta,
                    double gamma, const std::vector<double>& times,
                    int mc_replicas) {
  RunSpec spec;
  spec.command = "sir-cluster";
  spec.set("fixture", fixture);
  spec.set("beta", beta);
  spec.set("gamma", gamma);
  spec.set("seed", static_cast<long long>(c.seed));
  SirParams p;
  p.beta = beta;
  p.gamma = gamma;

  const double horizon = *std::max_element(times.begin(), times.end());
  const int guard = light_cone_guard(p.beta, horizon);
  const int half = guard + 2;
  SirConfiguration eta;
  eta.lo = -half;
  ClusterKind kind = ClusterKind::G;
  double decay = 0.0;  // closed-form exponent
  if (fixture == "single-s") {
    eta.states.assign(static_cast<std::size_t>(2 * half + 1), SirState::I);
    eta.outside = SirState::I;
    eta.set(0, SirState::S);
    kind = ClusterKind::G;
    decay = 2.0 * (beta + gamma);
  } else if (fixture == "r-s-i") {
    eta.states.assign(static_cast<std::size_t>(2 * half + 1), SirState::R);
    eta.outside = SirState::R;
    eta.set(0, SirState::S);
    eta.set(1, SirState::I);
    kind = ClusterKind::J;
    decay = beta + gamma;
  } else {
    throw std::invalid_argument("unknown fixture: " + fixture);
  }
  const auto init = clusters_of(eta);

  CsvReport csv(c.out_dir + "/sir_cluster.csv", spec,
                {"kind", "r", "n", "t", "value", "error", "route"});
  const std::string kind_name = kind == ClusterKind::G ? "G" : "J";
  bool pass = true;
  for (double t : times) {
    const auto series = kind == ClusterKind::G
                            ? g_cluster(init, p, 0, 1, t, c.tol)
                            : j_cluster(init, p, 0, 1, t, c.tol);
    const double closed = std::exp(-decay * t);
    csv.row({kind_name, "0", "1", CsvReport::format(t),
             CsvReport::format(series.value),
             CsvReport::format(series.truncation_error), "series"});
    csv.row({kind_name, "0", "1", CsvReport::format(t), CsvReport::format(closed),
             "0", "closed-form"});
    pass = pass && std::abs(series.value - closed) < 1e-9;
    if (mc_replicas > 0) {
      const Estimate e = estimate(
          mc_replicas, c.seed, c.threads, [&](std::uint64_t stream, SplitRng&) {
            const auto out = simulate_sir(p, eta, t, c.seed, stream);
            if (out.edge_touched)
              throw std::runtime_error("SIR trajectory touched the window edge");
            return static_cast<double>(
                cluster_indicator(out.final_state, 0, 1, kind));
          });
      csv.row({kind_name, "0", "1", CsvReport::format(t), CsvReport::format(e.mean),
               CsvReport::format(3.0 * e.std_error), "monte-carlo"});
      pass = pass && std::abs(e.mean - closed) <= 3.0 * e.std_error;
    }
  }
  std::ostringstream d;
  d << "fixture=" << fixture << " report=" << csv.path();
  return verdict_line("sir-cluster", pass, d.str());
}

int run_simulate(const CommonOpts& c, const ModelOpts& m, const std::string& model,
                 double t_end, int replicas, const std::string& observable,
                 const std::string& init_bits, const std::string& trajectory_path) {
  RunSpec spec;
  spec.command = "simulate";
  fill_spec(spec, c, m);
  spec.set("chain", model);
  spec.set("t_end", t_end);
  spec.set("replicas", static_cast<long long>(replicas));
  spec.set("observable", observable);
  spec.set("init", init_bits);

  ChainSpec chain;
  if (model == "dcp")
    chain = chain_of(m.dcp(), m.n);
  else if (model == "gdcp")
    chain = chain_of(m.gdcp(), m.n);
  else if (model == "dcp-dual")
    chain = chain_of(dual_of(m.dcp(), m.n));
  else if (model == "gdcp-dual")
    chain = chain_of(dual_of(m.gdcp(), m.n));
  else
    throw std::invalid_argument("unknown chain: " + model);

  Configuration init(m.n);
  if (!init_bits.empty()) {
    if (static_cast<int>(init_bits.size()) != m.n)
      throw std::invalid_argument("init word length must equal n");
    for (int x = 1; x <= m.n; ++x)
      init.set(x, init_bits[static_cast<std::size_t>(x - 1)] == '1' ? 1 : 0);
  }

  int obs_site = 1;
  if (observable.rfind("occupancy:", 0) == 0)
    obs_site = std::stoi(observable.substr(10));
  if (obs_site < 1 || obs_site > m.n)
    throw std::invalid_argument("observable site outside the lattice");

  const Estimate e =
      estimate(replicas, c.seed, c.threads, [&](std::uint64_t stream, SplitRng&) {
        const auto out = simulate(chain, init, t_end, c.seed, stream);
        if (observable == "particles")
          return static_cast<double>(out.final_state.particle_count());
        if (observable == "absorbed")
          return static_cast<double>(out.absorbed_left + out.absorbed_right);
        return static_cast<double>(out.final_state.at(obs_site));
      });
  CsvReport csv(c.out_dir + "/simulate.csv", spec,
                {"observable", "mean", "stderr", "replicas", "seed"});
  csv.row({observable, CsvReport::format(e.mean), CsvReport::format(e.std_error),
           std::to_string(e.replicas), std::to_string(c.seed)});

  if (!trajectory_path.empty()) {
    RunSpec tspec = spec;
    tspec.command = "simulate-trajectory";
    CsvReport traj(trajectory_path, tspec, {"t", "event", "state_index"});
    simulate_logged(chain, init, t_end, c.seed, 0,
                    [&](double t, long long event, const Configuration& state) {
                      traj.row({CsvReport::format(t), std::to_string(event),
                                std::to_string(index_of(state))});
                    });
  }
  std::ostringstream d;
  d << "mean=" << e.mean << " stderr=" << e.std_error << " report=" << csv.path();
  return verdict_line("simulate", true, d.str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ipsdual: duality and absorption toolkit for open contact processes"};
  app.set_config("--config", "",
                 "flat key = value run spec with per-command sections");
  app.require_subcommand(1);

  CommonOpts common;
  app.add_option("--out", common.out_dir, "output directory for CSV reports");
  app.add_option("--seed", common.seed, "master seed");
  app.add_option("--tol", common.tol, "series / comparison tolerance");
  app.add_option("--threads", common.threads, "worker threads for replicas");

  ModelOpts model;

  auto* duality = app.add_subcommand("duality-check", "matrix duality residuals");
  int draws = 50;
  int sink_cap = 8;
  add_model_flags(duality, model);
  duality->add_option("--draws", draws);
  duality->add_option("--sink-cap", sink_cap);

  auto* stat = app.add_subcommand("stationary", "exact stationary measure");
  add_model_flags(stat, model);

  auto* absorption = app.add_subcommand("absorption", "dual absorbed-count law");
  std::string init_bits = "1";
  int k_max = 8;
  add_model_flags(absorption, model);
  absorption->add_option("--init", init_bits, "initial dual word, e.g. 101");
  absorption->add_option("--k-max", k_max);

  auto* correlate = app.add_subcommand("correlate", "direct vs duality vs MC");
  std::vector<int> sites{1};
  int mc_replicas = 0;
  add_model_flags(correlate, model);
  correlate->add_option("--sites", sites)->delimiter(',');
  correlate->add_option("--mc-replicas", mc_replicas);

  auto* profile = app.add_subcommand("gdcp-profile", "annihilating-dual closed form");
  add_model_flags(profile, model, false);

  auto* evolve = app.add_subcommand("gdcp-evolve", "one-point time dependence");
  std::vector<double> init_profile{0.5, 0.5, 0.5, 0.5};
  double t_evolve = 1.0, dt = 0.25;
  add_model_flags(evolve, model, false);
  evolve->add_option("--init", init_profile, "initial profile")->delimiter(',');
  evolve->add_option("--t", t_evolve);
  evolve->add_option("--dt", dt);

  auto* stirring = app.add_subcommand("fast-stirring", "birth-death chain limit");
  std::string convention = "both";
  add_model_flags(stirring, model, false);
  stirring->add_option("--convention", convention, "paper, corrected or both");

  auto* sir = app.add_subcommand("sir-cluster", "SIR cluster evaluations");
  std::string fixture = "single-s";
  double sir_beta = 1.0, sir_gamma = 1.0;
  std::vector<double> times{1.0};
  int sir_mc = 0;
  sir->add_option("--fixture", fixture, "single-s or r-s-i");
  sir->add_option("--beta", sir_beta);
  sir->add_option("--gamma", sir_gamma);
  sir->add_option("--t", times)->delimiter(',');
  sir->add_option("--mc-replicas", sir_mc);

  auto* simulate_cmd = app.add_subcommand("simulate", "Gillespie estimates");
  std::string chain_name = "dcp";
  std::string observable = "occupancy:1";
  std::string sim_init;
  std::string trajectory_path;
  double t_end = 1.0;
  int replicas = 10000;
  add_model_flags(simulate_cmd, model, false);
  simulate_cmd->add_option("--chain", chain_name, "dcp, gdcp, dcp-dual, gdcp-dual");
  simulate_cmd->add_option("--t-end", t_end);
  simulate_cmd->add_option("--replicas", replicas);
  simulate_cmd->add_option("--observable", observable,
                           "occupancy:<site>, particles or absorbed");
  simulate_cmd->add_option("--init", sim_init, "initial word, e.g. 010");
  simulate_cmd->add_option("--trajectory", trajectory_path, "event log CSV path");

  CLI11_PARSE(app, argc, argv);

  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    if (duality->parsed()) return run_duality_check(common, model, draws, sink_cap);
    if (stat->parsed()) return run_stationary(common, model);
    if (absorption->parsed()) return run_absorption(common, model, init_bits, k_max);
    if (correlate->parsed()) return run_correlate(common, model, sites, mc_replicas);
    if (profile->parsed()) return run_gdcp_profile(common, model);
    if (evolve->parsed())
      return run_gdcp_evolve(common, model, init_profile, t_evolve, dt);
    if (stirring->parsed()) return run_fast_stirring(common, model, convention);
    if (sir->parsed())
      return run_sir_cluster(common, fixture, sir_beta, sir_gamma, times, sir_mc);
    if (simulate_cmd->parsed())
      return run_simulate(common, model, chain_name, t_end, replicas, observable,
                          sim_init, trajectory_path);
  } catch (const std::invalid_argument& e) {
    fail_with_record(cmd, e.what(), 2);
  } catch (const std::exception& e) {
    fail_with_record(cmd, e.what(), 1);
  }
  return 0;
}
