#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ddv/bisect.hpp"
#include "ddv/io.hpp"
#include "ddv/lti.hpp"
#include "ddv/verify_io.hpp"
#include "ddv/verify_state.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using namespace ddv;

struct Options {
  std::string data;
  std::string kind = "auto";
  std::string property = "gain";
  double level = std::numeric_limits<double>::quiet_NaN();
  double gamma = std::numeric_limits<double>::quiet_NaN();
  double rho = std::numeric_limits<double>::quiet_NaN();
  std::string supply_file;
  double noise_bound = 0.0;
  std::string noise_file;
  std::string bw_file;
  std::string cd_file;
  int lag = 1;
  int order_bound = 0;
  bool eps = false;
  bool enforce_sign = false;
  std::string out;

  // simulate
  std::string system_file;
  std::vector<int> random_dims;
  int steps = 0;
  std::uint64_t seed = 0;
  std::string noise_target = "state";
  double margin = 0.1;

  // sweep
  std::vector<double> noise_grid;
  std::vector<int> length_grid;
  bool serial = false;
};

std::string one_line(std::string s) {
  for (char& c : s)
    if (c == '\n') c = ';';
  while (!s.empty() && (s.back() == ';' || s.back() == ' ')) s.pop_back();
  return s;
}

Matrix load_plain_matrix(const std::string& path) {
  std::ifstream f(path);
  if (!f)
    throw std::invalid_argument("cannot open matrix file " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(f, line)) {
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::vector<double> row;
    double v;
    while (ss >> v) row.push_back(v);
    if (row.empty()) continue;
    if (!rows.empty() && rows.front().size() != row.size())
      throw std::invalid_argument("ragged matrix file " + path);
    rows.push_back(std::move(row));
  }
  if (rows.empty())
    throw std::invalid_argument("empty matrix file " + path);
  Matrix M(rows.size(), rows.front().size());
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows[i].size(); ++j) M(i, j) = rows[i][j];
  return M;
}

VerifyConfig make_config(const Options& o) {
  VerifyConfig cfg;
  if (o.eps) cfg.storage = StorageMode::StrictPd;
  cfg.enforce_inverse_sign = o.enforce_sign;
  return cfg;
}

// --gamma / --rho are shorthands that pin both the property and the level
void resolve_property(Options& o) {
  if (std::isfinite(o.gamma)) {
    o.property = "gain";
    o.level = o.gamma;
  } else if (std::isfinite(o.rho)) {
    o.property = "passivity";
    o.level = o.rho;
  }
}

SupplyRate make_supply(const Options& o, int m, int p) {
  if (o.property == "custom") {
    if (o.supply_file.empty())
      throw std::invalid_argument("custom supply needs --supply FILE");
    SupplyRate s = load_supply_file(o.supply_file);
    if (s.m() != m || s.p() != p)
      throw std::invalid_argument("supply file dimensions do not match the "
                                  "data channel");
    return s;
  }
  if (!std::isfinite(o.level))
    throw std::invalid_argument(
        "a level is required: --level VALUE (or --gamma/--rho)");
  if (o.property == "gain") return gain_supply(o.level, m, p);
  if (p != m)
    throw std::invalid_argument("passivity needs a square channel");
  return passivity_supply(o.level, m);
}

bool state_kind(const Options& o, const Trajectory& t) {
  if (o.kind == "state") return true;
  if (o.kind == "io") return false;
  return t.has_states();
}

void output_maps(const Options& o, int n, int m, Matrix& C, Matrix& D) {
  if (o.cd_file.empty()) {
    C = Matrix::Identity(n, n);
    D = Matrix::Zero(n, m);
  } else {
    SystemFile sf = load_system_file(o.cd_file);
    C = sf.sys.C;
    D = sf.sys.D;
  }
}

void add_verdict(Report& rep, const Verdict& v) {
  rep.add("verdict", to_string(v.status));
  if (!v.notes.empty()) rep.add("notes", one_line(v.notes));
  if (std::isfinite(v.worst_margin)) rep.add("worst_margin", v.worst_margin);
  if (v.achieved_rank >= 0) {
    rep.add("achieved_rank", std::to_string(v.achieved_rank));
    rep.add("required_rank", std::to_string(v.required_rank));
  }
  if (v.certificate) {
    const Certificate& c = *v.certificate;
    if (std::isfinite(c.tau)) rep.add("tau", c.tau);
    Eigen::SelfAdjointEigenSolver<Matrix> es(c.P);
    std::ostringstream eigs;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.17g", es.eigenvalues()(i));
      eigs << (i ? " " : "") << buf;
    }
    rep.add("P_eigenvalues", eigs.str());
  }
}

void emit(const Report& rep, const std::string& out) {
  std::cout << rep.to_text();
  if (!out.empty()) rep.write(out);
}

// ball-uniform noise column: gaussian direction, radius r * U^(1/dim)
Vector ball_sample(std::mt19937_64& rng, int dim, double radius) {
  std::normal_distribution<double> G(0.0, 1.0);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  Vector d(dim);
  for (int i = 0; i < dim; ++i) d(i) = G(rng);
  double nrm = d.norm();
  if (nrm == 0.0) nrm = 1.0;
  return d * (radius * std::pow(U(rng), 1.0 / dim) / nrm);
}

int cmd_simulate(const Options& o) {
  LtiSystem sys = [&] {
    if (!o.system_file.empty()) return load_system_file(o.system_file).sys;
    if (o.random_dims.size() == 3)
      return random_system(o.random_dims[0], o.random_dims[1],
                           o.random_dims[2], o.margin, o.seed);
    throw std::invalid_argument("simulate needs --system FILE or --random n m p");
  }();
  if (o.steps < 1) throw std::invalid_argument("simulate needs --steps >= 1");

  const int n = sys.n(), m = sys.m(), p = sys.p(), N = o.steps;
  std::mt19937_64 rng(o.seed ^ 0x9e3779b97f4a7c15ull);
  std::uniform_real_distribution<double> U(-1.0, 1.0);

  Trajectory t;
  t.u.resize(m, N);
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < N; ++k) t.u(i, k) = U(rng);
  t.x.resize(n, N + 1);
  t.y.resize(p, N);
  t.x.col(0).setZero();
  const bool output_noise = o.noise_target == "output";
  for (int k = 0; k < N; ++k) {
    t.y.col(k) = sys.C * t.x.col(k) + sys.D * t.u.col(k);
    t.x.col(k + 1) = sys.A * t.x.col(k) + sys.B * t.u.col(k);
    if (o.noise_bound > 0.0) {
      if (output_noise)
        t.y.col(k) += ball_sample(rng, p, o.noise_bound);
      else
        t.x.col(k + 1) += ball_sample(rng, n, o.noise_bound);
    }
  }
  save_trajectory_csv(t, o.out);

  std::vector<std::pair<std::string, double>> meta;
  meta.emplace_back("seed", static_cast<double>(o.seed));
  meta.emplace_back("noise_bound", o.noise_bound);
  try {
    meta.emplace_back("gamma_true", hinf_oracle(sys));
  } catch (const std::exception&) {
    // unstable systems have no finite gain; the sidecar still records them
  }
  if (m == p) {
    try {
      meta.emplace_back("rho_true", passivity_oracle(sys));
    } catch (const std::exception&) {
    }
  }
  save_system_file(sys, o.out + ".truth", meta);
  std::cout << "wrote " << o.out << " and " << o.out << ".truth\n";
  return 0;
}

int cmd_checkdata(const Options& o) {
  Trajectory t = load_trajectory_csv(o.data);
  const int N = t.N();
  const int m = static_cast<int>(t.u.rows());
  Report rep;
  rep.add("data", o.data);
  rep.add("samples", std::to_string(N));
  rep.add("inputs", std::to_string(m));
  if (t.has_states()) rep.add("states", std::to_string(t.x.rows()));
  if (t.has_outputs()) rep.add("outputs", std::to_string(t.y.rows()));

  int pe = 0;
  while (is_persistently_exciting(t.u, pe + 1)) ++pe;
  rep.add("pe_order_achieved", std::to_string(pe));
  rep.add("pe_order_length_limit", std::to_string((N + 1) / (m + 1)));
  if (o.order_bound > 0)
    rep.add("pe_at_order_bound",
            is_persistently_exciting(t.u, o.order_bound) ? "yes" : "no");

  if (t.has_states() && t.x.cols() == N + 1) {
    StateDataMatrices d = build_state_data(t);
    rep.add("stack_rank_achieved", std::to_string(achieved_stack_rank(d)));
    rep.add("stack_rank_required", std::to_string(d.n() + d.m()));
    rep.add("rank_condition", check_rank_condition(d) ? "satisfied" : "violated");
  } else if (t.has_states()) {
    rep.add("note", "state block lacks the terminal sample; rank check skipped");
  }
  emit(rep, o.out);
  return 0;
}

// shared assembly of the robust problem inputs for verify/estimate/sweep
struct StateProblem {
  StateDataMatrices d;
  Matrix C, D;
};

struct IoProblem {
  ExtendedData ed;
  Matrix A1, B1;
};

QuadraticMatrixSet state_set(const Options& o, const StateProblem& sp) {
  Matrix Bw = o.bw_file.empty()
                  ? Matrix(Matrix::Identity(sp.d.n(), sp.d.n()))
                  : load_plain_matrix(o.bw_file);
  NoiseBoundQuadratic nb =
      o.noise_file.empty()
          ? norm_bound_noise_set(o.noise_bound, sp.d.N(),
                                 static_cast<int>(Bw.cols()),
                                 NoiseTarget::ProcessState)
          : load_noise_file(o.noise_file, NoiseTarget::ProcessState);
  return sigma_xu_quadratic(sp.d, nb, Bw);
}

QuadraticMatrixSet io_set(const Options& o, const IoProblem& ip, int N) {
  Matrix bv = o.bw_file.empty()
                  ? Matrix(Matrix::Identity(ip.ed.p(), ip.ed.p()))
                  : load_plain_matrix(o.bw_file);
  NoiseBoundQuadratic nb =
      o.noise_file.empty()
          ? io_noise_set(o.noise_bound, N, o.lag, static_cast<int>(bv.cols()))
          : load_noise_file(o.noise_file, NoiseTarget::ProcessOutput);
  return sigma_uy_quadratic(ip.ed, nb, bv);
}

int cmd_verify(Options& o) {
  resolve_property(o);
  Trajectory t = load_trajectory_csv(o.data);
  const bool robust = o.noise_bound > 0.0 || !o.noise_file.empty();
  VerifyConfig cfg = make_config(o);

  Report rep;
  rep.add("command", "verify");
  rep.add("data", o.data);
  rep.add("property", o.property);
  if (std::isfinite(o.level)) rep.add("level", o.level);
  rep.add("noise_bound", o.noise_bound);

  Verdict v;
  if (state_kind(o, t)) {
    rep.add("kind", "state");
    StateProblem sp;
    sp.d = build_state_data(t);
    output_maps(o, sp.d.n(), sp.d.m(), sp.C, sp.D);
    SupplyRate Pi = make_supply(o, sp.d.m(), static_cast<int>(sp.C.rows()));
    v = robust ? verify_robust(state_set(o, sp), sp.C, sp.D, Pi, cfg)
               : verify_noisefree(sp.d, sp.C, sp.D, Pi, cfg);
  } else {
    rep.add("kind", "io");
    rep.add("lag", std::to_string(o.lag));
    IoProblem ip;
    ip.ed = build_extended_data(t, o.lag);
    std::tie(ip.A1, ip.B1) =
        extended_shift_structure(o.lag, ip.ed.m(), ip.ed.p());
    SupplyRate Pi = make_supply(o, ip.ed.m(), ip.ed.p());
    if (robust) {
      v = verify_io_robust(io_set(o, ip, t.N()), ip.A1, ip.B1, Pi, cfg);
    } else {
      const bool pe =
          o.order_bound > 0 && is_persistently_exciting(t.u, o.order_bound);
      rep.add("pe_order_asserted", std::to_string(o.order_bound));
      rep.add("pe_checked", pe ? "yes" : "no");
      v = verify_io_noisefree(ip.ed, Pi, pe, cfg);
    }
  }
  add_verdict(rep, v);
  emit(rep, o.out);
  return exit_code(v.status);
}

int cmd_estimate(Options& o) {
  resolve_property(o);
  if (o.property != "gain" && o.property != "passivity")
    throw std::invalid_argument("estimate supports --property gain|passivity");
  const bool is_gain = o.property == "gain";
  Trajectory t = load_trajectory_csv(o.data);
  const bool robust = o.noise_bound > 0.0 || !o.noise_file.empty();
  VerifyConfig cfg = make_config(o);

  Report rep;
  rep.add("command", "estimate");
  rep.add("data", o.data);
  rep.add("property", o.property);
  rep.add("noise_bound", o.noise_bound);

  Verdict v;
  double value = std::numeric_limits<double>::quiet_NaN();
  if (state_kind(o, t)) {
    rep.add("kind", "state");
    StateProblem sp;
    sp.d = build_state_data(t);
    output_maps(o, sp.d.n(), sp.d.m(), sp.C, sp.D);
    const int m = sp.d.m(), p = static_cast<int>(sp.C.rows());
    if (robust) {
      QuadraticMatrixSet set = state_set(o, sp);
      v = is_gain ? optimize_gain_robust(set, sp.C, sp.D, cfg)
                  : optimize_passivity_robust(set, sp.C, sp.D, cfg);
      if (v.certificate) value = v.certificate->performance;
    } else {
      auto feasible = [&](double lvl) {
        SupplyRate Pi =
            is_gain ? gain_supply(lvl, m, p) : passivity_supply(lvl, m);
        Status st = verify_noisefree(sp.d, sp.C, sp.D, Pi, cfg).status;
        return st == Status::Dissipative;
      };
      if (!is_gain && p != m)
        throw std::invalid_argument("passivity needs a square channel");
      value = is_gain ? min_accepted(feasible, 1e-6, 1.0, 1e-4)
                      : max_accepted(feasible, -1.0, 0.0, 1e-4);
      if (std::isfinite(value)) {
        SupplyRate Pi =
            is_gain ? gain_supply(value, m, p) : passivity_supply(value, m);
        v = verify_noisefree(sp.d, sp.C, sp.D, Pi, cfg);
      }
    }
  } else {
    rep.add("kind", "io");
    rep.add("lag", std::to_string(o.lag));
    IoProblem ip;
    ip.ed = build_extended_data(t, o.lag);
    std::tie(ip.A1, ip.B1) =
        extended_shift_structure(o.lag, ip.ed.m(), ip.ed.p());
    const int m = ip.ed.m(), p = ip.ed.p();
    if (robust) {
      QuadraticMatrixSet set = io_set(o, ip, t.N());
      v = is_gain ? optimize_gain_io_robust(set, ip.A1, ip.B1, cfg)
                  : optimize_passivity_io_robust(set, ip.A1, ip.B1, cfg);
      if (v.certificate) value = v.certificate->performance;
    } else {
      const bool pe =
          o.order_bound > 0 && is_persistently_exciting(t.u, o.order_bound);
      if (!is_gain && p != m)
        throw std::invalid_argument("passivity needs a square channel");
      auto feasible = [&](double lvl) {
        SupplyRate Pi =
            is_gain ? gain_supply(lvl, m, p) : passivity_supply(lvl, m);
        Status st = verify_io_noisefree(ip.ed, Pi, pe, cfg).status;
        return st == Status::Dissipative || st == Status::Inconclusive;
      };
      value = is_gain ? min_accepted(feasible, 1e-6, 1.0, 1e-4)
                      : max_accepted(feasible, -1.0, 0.0, 1e-4);
      if (std::isfinite(value)) {
        SupplyRate Pi =
            is_gain ? gain_supply(value, m, p) : passivity_supply(value, m);
        v = verify_io_noisefree(ip.ed, Pi, pe, cfg);
      }
    }
  }

  const bool certified = v.status == Status::Dissipative &&
                         std::isfinite(value);
  if (std::isfinite(value))
    rep.add(is_gain ? "gamma_hat" : "rho_hat", value);
  else
    rep.add("notes", std::string("no ") + o.property + " bound certifiable");
  add_verdict(rep, v);
  emit(rep, o.out);
  return certified ? 0 : 2;
}

int cmd_sweep(Options& o) {
  resolve_property(o);
  if (o.property != "gain" && o.property != "passivity")
    throw std::invalid_argument("sweep supports --property gain|passivity");
  if (o.noise_grid.empty())
    throw std::invalid_argument("sweep needs --noise-grid with at least one value");
  const bool is_gain = o.property == "gain";
  Trajectory t = load_trajectory_csv(o.data);
  const bool state = state_kind(o, t);
  VerifyConfig cfg = make_config(o);

  std::vector<int> lengths =
      o.length_grid.empty() ? std::vector<int>{t.N()} : o.length_grid;
  for (int Ni : lengths)
    if (Ni < 2 || Ni > t.N())
      throw std::invalid_argument("length grid entry outside the record");

  struct Cell {
    int N = 0;
    double bound = 0.0;
    double value = std::numeric_limits<double>::quiet_NaN();
    std::string status = "unknown";
  };
  const int W = static_cast<int>(o.noise_grid.size());
  std::vector<Cell> cells(lengths.size() * o.noise_grid.size());
  for (size_t i = 0; i < lengths.size(); ++i)
    for (int j = 0; j < W; ++j) {
      cells[i * W + j].N = lengths[i];
      cells[i * W + j].bound = o.noise_grid[j];
    }

  // cells are independent; each builds and solves its own problem, and the
  // sink is ordered by index so the parallel and serial runs emit the same file
  const int total = static_cast<int>(cells.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (!o.serial)
#endif
  for (int c = 0; c < total; ++c) {
    Cell& cell = cells[c];
    try {
      Trajectory part;
      part.u = t.u.leftCols(cell.N);
      if (t.has_outputs()) part.y = t.y.leftCols(cell.N);
      Verdict v;
      if (state) {
        part.x = t.x.leftCols(cell.N + 1);
        StateProblem sp;
        sp.d = build_state_data(part);
        output_maps(o, sp.d.n(), sp.d.m(), sp.C, sp.D);
        Matrix Bw = Matrix::Identity(sp.d.n(), sp.d.n());
        QuadraticMatrixSet set = sigma_xu_quadratic(
            sp.d,
            norm_bound_noise_set(cell.bound, sp.d.N(), sp.d.n(),
                                 NoiseTarget::ProcessState),
            Bw);
        v = is_gain ? optimize_gain_robust(set, sp.C, sp.D, cfg)
                    : optimize_passivity_robust(set, sp.C, sp.D, cfg);
      } else {
        ExtendedData ed = build_extended_data(part, o.lag);
        auto [A1, B1] = extended_shift_structure(o.lag, ed.m(), ed.p());
        QuadraticMatrixSet set = sigma_uy_quadratic(
            ed, io_noise_set(cell.bound, cell.N, o.lag, ed.p()));
        v = is_gain ? optimize_gain_io_robust(set, A1, B1, cfg)
                    : optimize_passivity_io_robust(set, A1, B1, cfg);
      }
      cell.status = to_string(v.status);
      if (v.certificate) cell.value = v.certificate->performance;
    } catch (const std::exception&) {
      cell.status = "error";
    }
  }

  std::ofstream f(o.out);
  if (!f) throw std::invalid_argument("sweep: cannot write " + o.out);
  f << "N,noise_bound,value,status\n";
  for (const Cell& cell : cells) {
    char bound[32], value[32];
    std::snprintf(bound, sizeof(bound), "%.17g", cell.bound);
    std::snprintf(value, sizeof(value), "%.17g", cell.value);
    f << cell.N << ',' << bound << ',' << value << ',' << cell.status << '\n';
  }
  std::cout << "sweep: " << total << " cells -> " << o.out << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dissipativity verification from measured trajectories"};
  app.require_subcommand(1);
  Options o;

  auto add_property_flags = [&](CLI::App* cmd, bool with_custom) {
    cmd->add_option("--property", o.property,
                    with_custom ? "gain|passivity|custom"
                                : "gain|passivity")
        ->check(CLI::IsMember(with_custom
                                  ? std::vector<std::string>{"gain",
                                                             "passivity",
                                                             "custom"}
                                  : std::vector<std::string>{"gain",
                                                             "passivity"}));
    auto* lvl = cmd->add_option("--level", o.level,
                                "gain gamma or passivity index to test");
    auto* g = cmd->add_option("--gamma", o.gamma, "shorthand for gain level");
    auto* r = cmd->add_option("--rho", o.rho,
                              "shorthand for passivity level");
    g->excludes(r)->excludes(lvl);
    r->excludes(lvl);
    if (with_custom)
      cmd->add_option("--supply", o.supply_file,
                      "custom supply rate file (Q, S, R blocks)");
  };
  auto add_data_flags = [&](CLI::App* cmd) {
    cmd->add_option("--data", o.data, "trajectory csv")->required();
    cmd->add_option("--kind", o.kind, "state|io|auto")
        ->check(CLI::IsMember({"auto", "state", "io"}));
    cmd->add_option("--noise-bound", o.noise_bound,
                    "norm-ball noise radius (0 = noise-free)");
    cmd->add_option("--noise-file", o.noise_file,
                    "raw quadratic noise bound file");
    cmd->add_option("--bw", o.bw_file,
                    "noise channel matrix file (default identity)");
    cmd->add_option("--cd", o.cd_file,
                    "system file supplying known C, D for state data");
    cmd->add_option("--lag", o.lag, "window length for io lifting");
    cmd->add_option("--order-bound", o.order_bound,
                    "excitation order to assert (n + l + 1)");
    cmd->add_flag("--eps", o.eps, "require strict LMIs and P > 0");
    cmd->add_flag("--enforce-sign", o.enforce_sign,
                  "reject supplies violating the inverse sign hypothesis");
    cmd->add_option("--out", o.out, "report path");
  };

  CLI::App* sim = app.add_subcommand("simulate", "generate a trajectory csv");
  sim->add_option("--system", o.system_file, "system matrix file");
  sim->add_option("--random", o.random_dims, "random system dims: n m p")
      ->expected(3);
  sim->add_option("--steps", o.steps, "number of samples")->required();
  sim->add_option("--seed", o.seed, "rng seed");
  sim->add_option("--noise-bound", o.noise_bound,
                  "per-step noise ball radius");
  sim->add_option("--noise-target", o.noise_target, "state|output")
      ->check(CLI::IsMember({"state", "output"}));
  sim->add_option("--margin", o.margin, "stability margin of random systems");
  sim->add_option("--out", o.out, "trajectory csv path")->required();

  CLI::App* chk = app.add_subcommand("checkdata", "excitation and rank "
                                                  "diagnostics");
  chk->add_option("--data", o.data, "trajectory csv")->required();
  chk->add_option("--order-bound", o.order_bound,
                  "also test excitation of this order");
  chk->add_option("--out", o.out, "report path");

  CLI::App* ver = app.add_subcommand("verify", "test a dissipativity "
                                               "property at a fixed level");
  add_data_flags(ver);
  add_property_flags(ver, true);

  CLI::App* est = app.add_subcommand("estimate", "optimize the certified "
                                                 "gain or passivity index");
  add_data_flags(est);
  add_property_flags(est, false);

  CLI::App* sw = app.add_subcommand("sweep", "grid of estimates over noise "
                                             "bounds and record lengths");
  sw->add_option("--data", o.data, "trajectory csv")->required();
  sw->add_option("--kind", o.kind, "state|io|auto")
      ->check(CLI::IsMember({"auto", "state", "io"}));
  sw->add_option("--property", o.property, "gain|passivity")
      ->check(CLI::IsMember({"gain", "passivity"}));
  sw->add_option("--noise-grid", o.noise_grid, "noise bounds to sweep");
  sw->add_option("--length-grid", o.length_grid, "record lengths to sweep");
  sw->add_option("--lag", o.lag, "window length for io lifting");
  sw->add_flag("--serial", o.serial, "disable the parallel cell runner");
  sw->add_option("--out", o.out, "sweep csv path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 3;
  }

  try {
    if (sim->parsed()) return cmd_simulate(o);
    if (chk->parsed()) return cmd_checkdata(o);
    if (ver->parsed()) return cmd_verify(o);
    if (est->parsed()) return cmd_estimate(o);
    return cmd_sweep(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
