#pragma once
// Piecewise-constant coupling optimization against the Gaussian engine.
// Quasi-Newton descent (central differences, BFGS inverse-Hessian, Armijo
// backtracking with disc projection) alternates with simulated-annealing
// batches; every candidate is propagated exactly per segment, so the only
// stochastic element is the seeded proposal stream and runs are repeatable
// bit for bit.

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "optopulse/bch.hpp"
#include "optopulse/covariance.hpp"
#include "optopulse/drive.hpp"
#include "optopulse/gaussian.hpp"
#include "optopulse/params.hpp"

namespace optopulse {

struct ControlVector {
  Eigen::VectorXd g_re;  // one entry per segment
  Eigen::VectorXd g_im;
  double dt = 0.0;       // common segment duration
  double g_max = 0.0;
  bool phase_locked = false;  // partial coupling: the x_c x_m quadrature only

  int n_segments() const { return static_cast<int>(g_re.size()); }
  double total_time() const { return dt * n_segments(); }
  std::vector<CouplingSegment> segments() const;
  // radial clip of every (g_re, g_im) pair onto the |G| <= g_max disc;
  // phase-locked controls also have g_im forced to zero
  void project();
  void validate() const;
};

ControlVector zero_control(int n, double total_time, double g_max);
ControlVector random_control(int n, double total_time, double g_max,
                             std::uint64_t seed);
// time-weighted average of a compiled coupling schedule over the uniform grid
ControlVector sample_schedule(const PulseSchedule& s, int n, double g_max);

enum class ObjectiveKind { final_phonon, min_over_time };

struct OptimizeScenario {
  SystemParams params;
  GaussianState initial;
  // the search needs the completely positive bath: the reduced model can
  // report occupations below zero at kappa > 0, which an optimizer exploits
  BathModel bath = BathModel::extended;
  ObjectiveKind kind = ObjectiveKind::final_phonon;
  bool partial_coupling = false;  // strategies start phase-locked controls
  int samples_per_segment = 6;    // trajectory sampling for min_over_time
};

// Mechanical occupation after (or, for min_over_time, anywhere along) the
// exact propagation of the control. Propagation failures do not throw here:
// the value is +infinity and, when `diagnostic` is given, the reason lands
// there. That keeps annealing proposals free to wander into bad corners.
double objective(const ControlVector& c, const OptimizeScenario& sc,
                 std::string* diagnostic = nullptr);

// The optimizer searches a smooth unconstrained chart of the disc-bounded
// control space (a radial algebraic squash u -> u/sqrt(1+|u|^2)), so the
// |G| <= g_max bound holds strictly on every iterate and the descent never
// hits a constraint kink. Step and proposal scales below are in chart units
// (roughly units of g_max near the disc center).
struct OptimizerConfig {
  long budget = 20000;          // total objective evaluations allowed
  std::uint64_t seed = 0;
  int bfgs_iters = 60;          // per descent stage
  // The final occupation splits into a fluctuation share and a coherent
  // displacement share. The first descent ignores the displacement for this
  // many iterations, reaching the deep-exchange region before the mean cost
  // shapes the landscape; 0 disables the warmup.
  int warmup_descent_iters = 20;
  // After the warmup, zero final mean is enforced as an equality constraint
  // (augmented Lagrangian): this many multiplier updates, each running a
  // descent of constraint_iters iterations. 0 skips straight to descent on
  // the plain total.
  int constraint_rounds = 5;
  int constraint_iters = 15;
  int anneal_batches = 4;       // per hop stage
  int anneal_batch = 50;        // proposals per batch, evaluated concurrently
  double anneal_decay = 0.95;   // temperature factor per batch
  double anneal_sigma_rel = 0.25;  // proposal spread, tapered with temperature
  double fd_step_rel = 1e-6;    // central-difference step
  int workers = 0;              // 0: honor OPTOPULSE_WORKERS, else as given
};

struct StageLogEntry {
  std::string stage;
  long evaluations = 0;
  double best = 0.0;         // objective after the stage
  double walker_fluct = 0.0; // thermal share at the stage's end point
  double walker_disp = 0.0;  // coherent displacement share there
};

struct OptimizationReport {
  ControlVector best;
  double best_objective = 0.0;
  double final_phonon = 0.0;        // objective(best)
  double schedule_periods = 0.0;    // total control time in units of 2 pi / nu
  std::uint64_t seed = 0;
  long evaluations = 0;
  std::vector<double> history;      // best-so-far after every accepted step
  std::vector<StageLogEntry> stages;
  long unstable_evaluations = 0;    // propagation failures mapped to +inf
};

// Alternating descent/annealing loop from an explicit starting point. The
// initial evaluation counts against the budget; best-found always comes back
// (budget 1 returns the evaluated start).
OptimizationReport optimize(const ControlVector& init, const OptimizeScenario& sc,
                            const OptimizerConfig& cfg);

enum class Strategy {
  amplitude_then_phase,  // random start, amplitude-only first, then both
  analytic_seed,         // compiled-schedule seed on the grid
  continuation,          // warm start from a previous solution
  random_restart         // several seeded random starts, best of all
};

const char* strategy_name(Strategy s);

// The analytic starting point: the compiled exchange cycle trotterized onto
// the n-slot grid competes against a small family of flat resonant drives
// (the continuous limit of the same exchange at several strengths); the best
// scorer wins. `evals_used` reports how many objective evaluations the
// selection spent.
ControlVector analytic_seed(const OptimizeScenario& sc, int n, double total_time,
                            double g_max, long* evals_used = nullptr);

// Strategy driver. `warm` is the continuation seed (required for
// Strategy::continuation, ignored otherwise). Seed construction costs for
// strategy b are charged against cfg.budget.
OptimizationReport run_strategy(Strategy s, const OptimizeScenario& sc,
                                int n_segments, double total_time, double g_max,
                                const OptimizerConfig& cfg,
                                const ControlVector* warm = nullptr);

struct SweepRow {
  double kappa = 0.0;
  std::string strategy;
  double seed_objective = 0.0;  // before optimization
  double optimized = 0.0;       // after
};

// One row per (kappa, strategy): each cell runs with cfg.budget evaluations
// and a seed derived from cfg.seed, the strategy index and the kappa index.
// Continuation cells chain: the first kappa starts from the analytic seed,
// later ones from the previous kappa's best control.
std::vector<SweepRow> kappa_sweep(const OptimizeScenario& base,
                                  const std::vector<double>& kappas,
                                  const std::vector<Strategy>& strategies,
                                  int n_segments, double total_time, double g_max,
                                  const OptimizerConfig& cfg);

}  // namespace optopulse
