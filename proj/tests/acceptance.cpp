// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Usage: acceptance <path-to-mzdmd-cli> [work-dir] [--survey] [--report]
// With --report the exit status only says whether every criterion was evaluated.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mzdmd/experiment.hpp"
#include "mzdmd/memory_kernel.hpp"
#include "mzdmd/models.hpp"
#include "mzdmd/oscillator.hpp"
#include "mzdmd/random.hpp"
#include "mzdmd/spectral.hpp"

using namespace mzdmd;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;
using cd = std::complex<double>;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
  std::cout << (ok ? "PASS" : "FAIL") << "  AC" << id << "  " << name << "  " << detail << std::endl;
  if (!ok) ++failures;
}

void info(const std::string& line) { std::cout << "info  " << line << std::endl; }

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(4);
  s << x;
  return s.str();
}

Rng stream(std::uint64_t index) { return make_stream(20240611, StreamDomain::test, 1000 + index); }

RealMatrix gaussian(Rng& rng, Eigen::Index r, Eigen::Index c, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  RealMatrix m(r, c);
  for (Eigen::Index j = 0; j < c; ++j) {
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = normal(rng);
  }
  return m;
}

double max_abs_over(const Trajectory& traj, int col, double lo, double hi) {
  double m = 0.0;
  for (Eigen::Index k = 0; k < traj.size(); ++k) {
    const double t = traj.times(k);
    if (t >= lo - 1e-9 && t <= hi + 1e-9) m = std::max(m, std::abs(traj.states(k, col)));
  }
  return m;
}

double decay_ratio(const Trajectory& traj) { return max_abs_over(traj, 0, 40.0, 50.0) / max_abs_over(traj, 0, 0.0, 10.0); }

// Smallest and largest windowed amplitude of y1 relative to the first window.
std::pair<double, double> amplitude_band(const Trajectory& traj) {
  const double t_end = traj.times(traj.size() - 1);
  const double first = max_abs_over(traj, 0, 0.0, 10.0);
  double lo = 1e300, hi = 0.0;
  for (double start = 0.0; start + 10.0 <= t_end + 1e-9; start += 1.0) {
    const double r = max_abs_over(traj, 0, start, start + 10.0) / first;
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  return {lo, hi};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void ac1() {
  const auto t0 = Clock::now();
  const double angle = 0.1;
  RealMatrix a(2, 2);
  a << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  RealMatrix data(2, 50);
  data.col(0) = Eigen::Vector2d(1.0, 0.3);
  for (Eigen::Index k = 1; k < 50; ++k) data.col(k) = a * data.col(k - 1);
  const double err = (dmd_fit(make_snapshots(data, 0.1)) - a).norm();
  const double secs = seconds_since(t0);
  report(1, "exact recovery", err <= 1e-8 && secs < 1.0, "err=" + fmt(err) + " time=" + fmt(secs) + "s");
}

void ac2() {
  const auto t0 = Clock::now();
  Rng rng = stream(2);
  double worst = 0.0;
  for (const auto kind : {ObjectiveKind::plain_dmd, ObjectiveKind::mz_dmd, ObjectiveKind::t_model}) {
    for (int trial = 0; trial < 25; ++trial) {
      const Eigen::Index d = trial < 20 ? 2 : 4;
      const SnapshotPair s = make_snapshots(gaussian(rng, d, 30), 0.1);
      const RealMatrix a = 0.6 * RealMatrix::Identity(d, d) + gaussian(rng, d, d, 0.25 / std::sqrt(double(d)));
      const Objective obj{kind, s, MemoryInit{gaussian(rng, d, 1).col(0), 1.0}};
      const RealMatrix g = objective_gradient(obj, a);
      const RealMatrix fd = fd_gradient(obj, a, 1e-6);
      worst = std::max(worst, (g - fd).norm() / fd.norm());
    }
  }
  const double secs = seconds_since(t0);
  report(2, "gradient correctness", worst <= 1e-5 && secs < 10.0,
         "max_rel_err=" + fmt(worst) + " over 75 instances time=" + fmt(secs) + "s");
}

Eigen::VectorXcd random_diag(Rng& rng, Eigen::Index d) {
  std::uniform_real_distribution<double> re(-1.0, 0.2), im(-3.0, 3.0);
  Eigen::VectorXcd v(d);
  for (Eigen::Index i = 0; i < d; ++i) v(i) = cd(re(rng), im(rng));
  return v;
}

void ac3() {
  Rng rng = stream(3);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::VectorXcd lambda = random_diag(rng, 4);
    const Eigen::VectorXcd m0 = random_diag(rng, 4);
    const auto closed = memory_kernel_closed(lambda, m0, 50, 0.1);
    const auto trap = memory_kernel_trapezoid(lambda, m0, 50, 0.1);
    for (std::size_t k = 0; k < closed.size(); ++k) {
      worst = std::max(worst, (closed[k] - trap[k]).cwiseAbs().maxCoeff());
    }
  }
  report(3, "memory-kernel equivalence", worst <= 1e-10, "max_abs_diff=" + fmt(worst));
}

void ac4() {
  Rng rng = stream(4);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::VectorXcd lambda = random_diag(rng, 4);
    for (int n = 1; n <= 50; ++n) {
      const Eigen::VectorXcd sum = memory_power_sum(lambda, 0.1, n);
      const Eigen::VectorXcd tele = memory_power_sum_telescoped(lambda, 0.1, n);
      worst = std::max(worst, (sum - tele).cwiseAbs().maxCoeff() / std::max(1.0, sum.cwiseAbs().maxCoeff()));
    }
  }
  report(4, "telescoping identity", worst <= 1e-10, "max_rel_diff=" + fmt(worst));
}

void ac5() {
  Rng rng = stream(5);
  std::normal_distribution<double> normal(0.0, 1.0);
  const SimConfig cfg;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const OscillatorState s0(normal(rng), normal(rng), normal(rng), normal(rng));
    const Trajectory traj = integrate_oscillator(s0, cfg);
    const double h0 = oscillator_energy(s0);
    for (Eigen::Index k = 0; k < traj.size(); ++k) {
      const OscillatorState s = traj.states.row(k).transpose();
      worst = std::max(worst, std::abs(oscillator_energy(s) - h0) / h0);
    }
  }
  report(5, "energy conservation", worst <= 1e-6, "max_rel_drift=" + fmt(worst));
}

struct DefaultRun {
  ExperimentConfig cfg;
  Trajectory measurement;
};

void ac6(const DefaultRun& run) {
  const auto t0 = Clock::now();
  const MethodResult proj = run_projection(run.cfg);
  const MethodResult dmd = run_dmd(run.measurement);
  const double secs = seconds_since(t0);
  const double ratio = decay_ratio(proj.mean);
  const auto [lo, hi] = amplitude_band(dmd.mean);
  const bool a_ok = ratio <= 0.5;
  const bool b_ok = lo >= 0.8 && hi <= 1.2;
  report(6, "figure-1 trends", a_ok && b_ok && secs < 120.0,
         std::string("(a) projection decay ratio=") + fmt(ratio) + (a_ok ? " ok" : " FAILS <=0.5") +
             "; (b) dmd amplitude in [" + fmt(lo) + ", " + fmt(hi) + "]" + (b_ok ? " ok" : " FAILS [0.8,1.2]") +
             " time=" + fmt(secs) + "s");
}

void ac7_8(const DefaultRun& run) {
  const auto t0 = Clock::now();
  const MethodResult mz = run_ensemble(ObjectiveKind::mz_dmd, run.cfg, run.measurement);
  const MethodResult tm = run_ensemble(ObjectiveKind::t_model, run.cfg, run.measurement);
  const double secs = seconds_since(t0);
  const double mz_ratio = decay_ratio(mz.mean);
  const double t_ratio = decay_ratio(tm.mean);
  const double mz_var = mz.variance->states.maxCoeff();
  const double t_var = tm.variance->states.maxCoeff();
  const bool ok = mz_ratio <= 0.7 && t_ratio <= 0.7 && mz_var < 0.1 && t_var < 0.1 && secs < 600.0;
  report(7, "figure-2/3 trends", ok,
         "mz-dmd decay=" + fmt(mz_ratio) + " max_var=" + fmt(mz_var) + "; t-model decay=" + fmt(t_ratio) +
             " max_var=" + fmt(t_var) + " time=" + fmt(secs) + "s");

  // Best of three single-threaded fits to keep scheduler noise out of the ordering.
  const SnapshotPair s = measure(run.measurement);
  auto best_fit_time = [&](ObjectiveKind kind) {
    double best = 1e300;
    for (int rep = 0; rep < 3; ++rep) {
      const auto f0 = Clock::now();
      fit_ensemble(kind, s, run.cfg.sim.sigma, run.cfg.n_u, run.cfg.adam, run.cfg.sim.seed, 1);
      best = std::min(best, seconds_since(f0));
    }
    return best;
  };
  const double mz_time = best_fit_time(ObjectiveKind::mz_dmd);
  const double t_time = best_fit_time(ObjectiveKind::t_model);
  report(8, "relative runtime", t_time < mz_time,
         "t-model fit=" + fmt(t_time) + "s mz-dmd fit=" + fmt(mz_time) + "s (best of 3, 1 thread)");
}

void ac9(const DefaultRun& run) {
  // Zero memory on the default measurement, and the fully decoupled system.
  double worst = 0.0;
  for (const double measurement_sigma : {1.0, 0.0}) {
    ExperimentConfig cfg = run.cfg;
    cfg.sim.sigma = measurement_sigma;
    const Trajectory meas = measurement_sigma == 1.0 ? run.measurement : resolved_part(simulate_measurement(cfg.sim, cfg.resolved_init));
    cfg.sim.sigma = 0.0;
    const MethodResult dmd = run_dmd(meas);
    const MethodResult mz = run_ensemble(ObjectiveKind::mz_dmd, cfg, meas);
    const MethodResult tm = run_ensemble(ObjectiveKind::t_model, cfg, meas);
    worst = std::max({worst, (mz.mean.states - dmd.mean.states).cwiseAbs().maxCoeff(),
                      (tm.mean.states - dmd.mean.states).cwiseAbs().maxCoeff()});
  }
  report(9, "zero-memory reduction", worst <= 1e-6, "max_pointwise_diff=" + fmt(worst));
}

void ac10(const std::string& cli, const fs::path& work) {
  const fs::path a = work / "run_a", b = work / "run_b";
  fs::remove_all(a);
  fs::remove_all(b);
  const std::string base = "\"" + cli + "\" run --method all --seed 1234 --out ";
  const int ra = std::system((base + "\"" + a.string() + "\" > /dev/null").c_str());
  const int rb = std::system((base + "\"" + b.string() + "\" > /dev/null").c_str());
  int compared = 0, differing = 0;
  if (ra == 0 && rb == 0) {
    for (const auto& entry : fs::directory_iterator(a)) {
      if (entry.path().extension() != ".csv") continue;
      ++compared;
      const fs::path other = b / entry.path().filename();
      if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) ++differing;
    }
  }
  report(10, "determinism", ra == 0 && rb == 0 && compared >= 6 && differing == 0,
         "exit=" + std::to_string(ra) + "," + std::to_string(rb) + " csv_files=" + std::to_string(compared) +
             " differing=" + std::to_string(differing));
}

// Not gating: how often the single-draw criteria hold across measurement draws.
void draw_survey(const ExperimentConfig& base) {
  const int draws = 101;
  int dmd_ok = 0, mz_decay = 0, t_decay = 0, mz_var = 0, t_var = 0;
  for (int i = 0; i < draws; ++i) {
    ExperimentConfig cfg = base;
    cfg.sim.seed = std::uint64_t(i) * 7919 + 17;
    const Trajectory meas = resolved_part(simulate_measurement(cfg.sim, cfg.resolved_init));
    const auto [lo, hi] = amplitude_band(run_dmd(meas).mean);
    dmd_ok += lo >= 0.8 && hi <= 1.2;
    const MethodResult mz = run_ensemble(ObjectiveKind::mz_dmd, cfg, meas);
    const MethodResult tm = run_ensemble(ObjectiveKind::t_model, cfg, meas);
    mz_decay += decay_ratio(mz.mean) <= 0.7;
    t_decay += decay_ratio(tm.mean) <= 0.7;
    mz_var += mz.variance->states.maxCoeff() < 0.1;
    t_var += tm.variance->states.maxCoeff() < 0.1;
  }
  const auto frac = [&](int k) { return std::to_string(k) + "/" + std::to_string(draws); };
  info("survey over " + std::to_string(draws) + " measurement seeds (not gating):");
  info("  6(b) dmd non-decay " + frac(dmd_ok));
  info("  7 decay: mz-dmd " + frac(mz_decay) + ", t-model " + frac(t_decay));
  info("  7 variance < 0.1: mz-dmd " + frac(mz_var) + ", t-model " + frac(t_var));
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <mzdmd-cli> [work-dir] [--survey] [--report]\n";
    return 2;
  }
  const std::string cli = argv[1];
  fs::path work = fs::temp_directory_path() / "mzdmd_acceptance";
  bool survey = false, report_only = false;
  for (int i = 2; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--survey") {
      survey = true;
    } else if (arg == "--report") {
      report_only = true;
    } else {
      work = arg;
    }
  }
  fs::create_directories(work);

  try {
    DefaultRun run;
    run.cfg.output_dir = work / "default";
    run.measurement = resolved_part(simulate_measurement(run.cfg.sim, run.cfg.resolved_init));
    info("default configuration: dt=0.1 t_max=50 sigma=1 n_mc=1000 n_u=100 lr=1e-3 iterations=5 seed=" +
         std::to_string(run.cfg.sim.seed));

    ac1();
    ac2();
    ac3();
    ac4();
    ac5();
    ac6(run);
    ac7_8(run);
    ac9(run);
    ac10(cli, work);
    if (survey) draw_survey(run.cfg);
  } catch (const std::exception& e) {
    std::cout << "FAIL  aborted: " << e.what() << std::endl;
    return 1;
  }

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criterion(s) failed") << std::endl;
  return failures == 0 || report_only ? 0 : 1;
}
