#include "optopulse/optimize.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "optopulse/errors.hpp"

namespace optopulse {

namespace {

constexpr double k_pi = 3.14159265358979323846;
constexpr double k_sqrt2 = 1.4142135623730951;
constexpr double k_inf = std::numeric_limits<double>::infinity();

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("OPTOPULSE_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0 && v < 1024) return static_cast<int>(v);
  }
  return 1;
}

// Index-sharded map. Work items must not throw; the objective maps failures
// to +inf before they reach here.
void parallel_for(int jobs, int workers, const std::function<void(int)>& fn) {
  if (workers <= 1 || jobs <= 1) {
    for (int i = 0; i < jobs; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  auto drain = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= jobs) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  const int n = std::min(workers, jobs);
  pool.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) pool.emplace_back(drain);
  for (auto& t : pool) t.join();
}

int pack_dim(const ControlVector& c) {
  return c.phase_locked ? c.n_segments() : 2 * c.n_segments();
}

// The search runs in a smooth unconstrained chart of the disc-bounded control
// space: each complex coupling is u * g_max / sqrt(1 + |u|^2). The bound holds
// strictly by construction, so no iterate ever needs clipping and the line
// search faces no constraint kinks. The algebraic squash is deliberate: its
// sensitivity decays only polynomially toward the rim, so slots parked near
// full strength stay responsive to the gradient (a tanh squash freezes them).
constexpr double k_u_cap = 10.0;

double squash_radius(double u) { return u / std::sqrt(1.0 + u * u); }
double unsquash_radius(double rho) { return rho / std::sqrt(1.0 - rho * rho); }

Eigen::VectorXd to_chart(const ControlVector& c) {
  const int n = c.n_segments();
  const double rmax = squash_radius(k_u_cap);
  Eigen::VectorXd u(pack_dim(c));
  if (c.phase_locked) {
    for (int i = 0; i < n; ++i) {
      const double rho = std::clamp(c.g_re(i) / c.g_max, -rmax, rmax);
      u(i) = unsquash_radius(rho);
    }
  } else {
    for (int i = 0; i < n; ++i) {
      const double re = c.g_re(i) / c.g_max;
      const double im = c.g_im(i) / c.g_max;
      const double r = std::hypot(re, im);
      double s = 1.0;
      if (r > 0.0) {
        const double rc = std::min(r, rmax);
        s = unsquash_radius(rc) / r;
      }
      u(i) = re * s;
      u(n + i) = im * s;
    }
  }
  return u;
}

ControlVector from_chart(const Eigen::VectorXd& u, const ControlVector& like) {
  ControlVector c = like;
  const int n = like.n_segments();
  if (like.phase_locked) {
    for (int i = 0; i < n; ++i) c.g_re(i) = like.g_max * squash_radius(u(i));
    c.g_im.setZero();
  } else {
    for (int i = 0; i < n; ++i) {
      const double r = std::hypot(u(i), u(n + i));
      const double s = (r > 0.0) ? squash_radius(r) / r : 1.0;
      c.g_re(i) = like.g_max * u(i) * s;
      c.g_im(i) = like.g_max * u(n + i) * s;
    }
  }
  return c;
}

void clamp_chart(Eigen::VectorXd& u) {
  u = u.cwiseMax(-k_u_cap).cwiseMin(k_u_cap);
}

struct EvalCount {
  long evals = 0;
  long unstable = 0;
};

// fluctuation share, coherent displacement share, and the signed final
// mechanical mean behind the latter: disp = (mx^2 + mp^2)/2. Stages search
// different functionals of these; the report always ranks by total().
struct Parts {
  double fluct = 0.0;
  double disp = 0.0;
  double mx = 0.0;
  double mp = 0.0;
  double total() const { return fluct + disp; }
};

// what a descent stage minimizes, as a function of the evaluation parts
using StageValue = std::function<double(const Parts&)>;

// uncounted evaluation, safe to call concurrently; callers settle the
// bookkeeping afterwards
Parts raw_parts(const ControlVector& c, const OptimizeScenario& sc, bool& finite) {
  PropagateOptions opt;
  opt.bath = sc.bath;
  finite = true;
  try {
    if (sc.kind == ObjectiveKind::min_over_time) {
      CovarianceTrajectory traj;
      propagate_segments(sc.initial, sc.params, c.segments(), opt, &traj,
                         std::max(1, sc.samples_per_segment));
      const double v = traj.min_phonon();
      if (!std::isfinite(v)) {
        finite = false;
        return {k_inf, 0.0};
      }
      // the split is not defined at the argmin time; fold it into one share
      return {v, 0.0};
    }
    const GaussianState fin =
        propagate_segments(sc.initial, sc.params, c.segments(), opt);
    const double total = phonon_number(fin);
    if (!std::isfinite(total)) {
      finite = false;
      return {k_inf, 0.0};
    }
    const double mx = fin.mean(ix_m);
    const double mp = fin.mean(ip_m);
    const double disp = 0.5 * (mx * mx + mp * mp);
    return {total - disp, disp, mx, mp};
  } catch (const NumericsError&) {
    finite = false;
    return {k_inf, 0.0};
  }
}

Parts eval_parts(const ControlVector& c, const OptimizeScenario& sc, EvalCount& ct) {
  bool finite = true;
  const Parts p = raw_parts(c, sc, finite);
  ++ct.evals;
  if (!finite) ++ct.unstable;
  return p;
}

// final mechanical mean (x_m, p_m) under the same propagation the objective
// uses; its energy |m|^2/2 is the displacement share of the occupation
Eigen::Vector2d final_mech_mean(const ControlVector& c, const OptimizeScenario& sc,
                                EvalCount& ct, bool& ok) {
  ++ct.evals;
  PropagateOptions opt;
  opt.bath = sc.bath;
  try {
    const GaussianState fin =
        propagate_segments(sc.initial, sc.params, c.segments(), opt);
    Eigen::Vector2d m(fin.mean(2), fin.mean(3));
    if (!m.allFinite()) {
      ++ct.unstable;
      ok = false;
      return Eigen::Vector2d::Zero();
    }
    ok = true;
    return m;
  } catch (const NumericsError&) {
    ++ct.unstable;
    ok = false;
    return Eigen::Vector2d::Zero();
  }
}

// one-tone quadrature modulation of the real coupling, sampled at slot
// midpoints and clipped back into the disc
ControlVector apply_recenter(const ControlVector& base, double bx, double by,
                             double nu) {
  ControlVector c = base;
  const int n = c.n_segments();
  for (int i = 0; i < n; ++i) {
    const double t = (static_cast<double>(i) + 0.5) * c.dt;
    c.g_re(i) += bx * std::cos(nu * t) + by * std::sin(nu * t);
  }
  c.project();
  return c;
}

// Damped Newton in the two tone amplitudes, driving the final mechanical
// mean to zero. A descent basin often pins a sizable displacement because
// cancelling it takes a coordinated move of every slot at once; this solve
// is that move, at a handful of evaluations. Returns true and fills `out`
// when the residual mean actually shrank.
bool recenter_control(const ControlVector& base, const OptimizeScenario& sc,
                      EvalCount& ct, long eval_cap, ControlVector& out) {
  const double nu = 1.0;  // mechanical frequency in internal units
  if (ct.evals + 1 > eval_cap) return false;
  bool ok = false;
  Eigen::Vector2d m = final_mech_mean(base, sc, ct, ok);
  if (!ok || m.norm() < 1e-9) return false;
  double bx = 0.0, by = 0.0;
  double best_norm = m.norm();
  double best_bx = 0.0, best_by = 0.0;
  const double delta = 1e-3;
  for (int it = 0; it < 5; ++it) {
    if (ct.evals + 4 > eval_cap) break;
    bool ok1 = false, ok2 = false, ok3 = false, ok4 = false;
    const Eigen::Vector2d mxp =
        final_mech_mean(apply_recenter(base, bx + delta, by, nu), sc, ct, ok1);
    const Eigen::Vector2d mxm =
        final_mech_mean(apply_recenter(base, bx - delta, by, nu), sc, ct, ok2);
    const Eigen::Vector2d myp =
        final_mech_mean(apply_recenter(base, bx, by + delta, nu), sc, ct, ok3);
    const Eigen::Vector2d mym =
        final_mech_mean(apply_recenter(base, bx, by - delta, nu), sc, ct, ok4);
    if (!(ok1 && ok2 && ok3 && ok4)) break;
    Eigen::Matrix2d J;
    J.col(0) = (mxp - mxm) / (2.0 * delta);
    J.col(1) = (myp - mym) / (2.0 * delta);
    if (!J.allFinite() || std::abs(J.determinant()) < 1e-12) break;
    const Eigen::Vector2d step = J.partialPivLu().solve(-m);
    if (!step.allFinite()) break;
    bool moved = false;
    double t = 1.0;
    for (int ls = 0; ls < 6 && ct.evals + 1 <= eval_cap; ++ls, t *= 0.5) {
      const Eigen::Vector2d mt = final_mech_mean(
          apply_recenter(base, bx + t * step(0), by + t * step(1), nu), sc, ct, ok);
      if (ok && mt.norm() < m.norm()) {
        bx += t * step(0);
        by += t * step(1);
        m = mt;
        moved = true;
        break;
      }
    }
    if (!moved) break;
    if (m.norm() < best_norm) {
      best_norm = m.norm();
      best_bx = bx;
      best_by = by;
    }
    if (m.norm() < 1e-8) break;
  }
  if (best_bx == 0.0 && best_by == 0.0) return false;
  out = apply_recenter(base, best_bx, best_by, nu);
  return true;
}

void record_best(OptimizationReport& rep, const ControlVector& c, double f);

// Central differences on the weighted objective, slot-indexed writes, safe to
// shard over workers. Coordinates whose probes blow up contribute no
// direction. A probe can happen to be the best point seen so far; elitist
// reporting keeps it.
Eigen::VectorXd fd_gradient(const Eigen::VectorXd& x, const ControlVector& like,
                            const OptimizeScenario& sc, double h, int workers,
                            const StageValue& val, OptimizationReport& rep,
                            EvalCount& ct) {
  const int d = static_cast<int>(x.size());
  std::vector<Parts> vals(static_cast<size_t>(2 * d));
  std::vector<char> okv(static_cast<size_t>(2 * d), 1);
  auto probe_point = [&](int j) {
    const int i = j / 2;
    const double sgn = (j % 2 == 0) ? 1.0 : -1.0;
    Eigen::VectorXd xp = x;
    xp(i) += sgn * h;
    return xp;
  };
  parallel_for(2 * d, workers, [&](int j) {
    bool finite = true;
    vals[static_cast<size_t>(j)] = raw_parts(from_chart(probe_point(j), like), sc, finite);
    okv[static_cast<size_t>(j)] = finite ? 1 : 0;
  });
  ct.evals += 2 * d;
  for (int j = 0; j < 2 * d; ++j) {
    if (!okv[static_cast<size_t>(j)]) ++ct.unstable;
    if (vals[static_cast<size_t>(j)].total() < rep.best_objective)
      record_best(rep, from_chart(probe_point(j), like),
                  vals[static_cast<size_t>(j)].total());
  }
  Eigen::VectorXd g(d);
  for (int i = 0; i < d; ++i) {
    const double fp = val(vals[static_cast<size_t>(2 * i)]);
    const double fm = val(vals[static_cast<size_t>(2 * i + 1)]);
    const double der = (fp - fm) / (2.0 * h);
    g(i) = std::isfinite(der) ? der : 0.0;
  }
  return g;
}

void record_best(OptimizationReport& rep, const ControlVector& c, double f) {
  if (f < rep.best_objective) {
    rep.best_objective = f;
    rep.best = c;
    rep.history.push_back(f);
  }
}

}  // namespace

std::vector<CouplingSegment> ControlVector::segments() const {
  validate();
  std::vector<CouplingSegment> out;
  out.reserve(static_cast<size_t>(n_segments()));
  for (int i = 0; i < n_segments(); ++i)
    out.push_back({complexd(g_re(i), phase_locked ? 0.0 : g_im(i)), dt});
  return out;
}

void ControlVector::project() {
  if (phase_locked) g_im.setZero();
  for (int i = 0; i < n_segments(); ++i) {
    const double r = std::hypot(g_re(i), g_im(i));
    if (r <= g_max || r == 0.0) continue;
    const double f = g_max / r;
    g_re(i) *= f;
    g_im(i) *= f;
    // the rescale may round half an ulp outside the disc
    while (std::hypot(g_re(i), g_im(i)) > g_max) {
      g_re(i) = std::nextafter(g_re(i), 0.0);
      g_im(i) = std::nextafter(g_im(i), 0.0);
    }
  }
}

void ControlVector::validate() const {
  if (g_re.size() < 1) throw ConfigError("control needs at least one segment");
  if (g_im.size() != g_re.size())
    throw ConfigError("control quadrature arrays disagree in length");
  if (!(dt > 0.0)) throw ConfigError("control segment duration must be positive");
  if (!(g_max > 0.0)) throw ConfigError("control coupling bound must be positive");
  if (!g_re.allFinite() || !g_im.allFinite())
    throw ConfigError("control has non-finite entries");
}

ControlVector zero_control(int n, double total_time, double g_max) {
  if (n < 1) throw ConfigError("control needs at least one segment");
  if (!(total_time > 0.0)) throw ConfigError("control time must be positive");
  if (!(g_max > 0.0)) throw ConfigError("control coupling bound must be positive");
  ControlVector c;
  c.g_re = Eigen::VectorXd::Zero(n);
  c.g_im = Eigen::VectorXd::Zero(n);
  c.dt = total_time / n;
  c.g_max = g_max;
  return c;
}

ControlVector random_control(int n, double total_time, double g_max,
                             std::uint64_t seed) {
  ControlVector c = zero_control(n, total_time, g_max);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  for (int i = 0; i < n; ++i) {
    // uniform over the coupling disc
    const double r = g_max * std::sqrt(ud(rng));
    const double th = 2.0 * k_pi * ud(rng);
    c.g_re(i) = r * std::cos(th);
    c.g_im(i) = r * std::sin(th);
  }
  return c;
}

ControlVector sample_schedule(const PulseSchedule& s, int n, double g_max) {
  const std::vector<CouplingSegment> segs = to_coupling_segments(s);
  double total = 0.0;
  for (const auto& seg : segs) total += seg.duration;
  if (!(total > 0.0)) throw ConfigError("cannot sample a schedule of zero duration");
  ControlVector c = zero_control(n, total, g_max);

  size_t j = 0;
  double seg_start = 0.0;
  for (int k = 0; k < n; ++k) {
    const double t0 = k * c.dt;
    const double t1 = (k + 1 == n) ? total : (k + 1) * c.dt;
    complexd area(0.0, 0.0);
    while (j < segs.size()) {
      const double seg_end = seg_start + segs[j].duration;
      const double lo = std::max(seg_start, t0);
      const double hi = std::min(seg_end, t1);
      if (hi > lo) area += segs[j].g * (hi - lo);
      if (seg_end <= t1 + 1e-15 * total) {
        seg_start = seg_end;
        ++j;
      } else {
        break;
      }
    }
    const complexd mean = area / (t1 - t0);
    c.g_re(k) = mean.real();
    c.g_im(k) = mean.imag();
  }
  c.project();
  return c;
}

double objective(const ControlVector& c, const OptimizeScenario& sc,
                 std::string* diagnostic) {
  c.validate();
  PropagateOptions opt;
  opt.bath = sc.bath;
  try {
    double v = 0.0;
    if (sc.kind == ObjectiveKind::min_over_time) {
      CovarianceTrajectory traj;
      propagate_segments(sc.initial, sc.params, c.segments(), opt, &traj,
                         std::max(1, sc.samples_per_segment));
      v = traj.min_phonon();
    } else {
      const GaussianState fin =
          propagate_segments(sc.initial, sc.params, c.segments(), opt);
      v = phonon_number(fin);
    }
    if (!std::isfinite(v)) {
      if (diagnostic) *diagnostic = "propagation produced a non-finite occupation";
      return k_inf;
    }
    return v;
  } catch (const NumericsError& e) {
    if (diagnostic) *diagnostic = e.what();
    return k_inf;
  }
}

OptimizationReport optimize(const ControlVector& init, const OptimizeScenario& sc,
                            const OptimizerConfig& cfg) {
  if (cfg.budget < 1) throw ConfigError("optimizer budget must be at least 1");
  const int workers = resolve_workers(cfg.workers);

  ControlVector start = init;
  if (sc.partial_coupling) start.phase_locked = true;
  start.validate();
  start.project();
  // settle onto the chart so every evaluated point, the start included, is
  // exactly representable by the search
  start = from_chart(to_chart(start), start);

  EvalCount ct;
  OptimizationReport rep;
  rep.seed = cfg.seed;
  rep.best = start;
  Parts walk_p = eval_parts(start, sc, ct);
  rep.best_objective = walk_p.total();
  rep.history.push_back(rep.best_objective);
  rep.schedule_periods = start.total_time() / (2.0 * k_pi);

  std::mt19937_64 rng(cfg.seed);
  // chart units: the squash makes the search coordinates dimensionless
  const double h = cfg.fd_step_rel;
  const double sigma0 = cfg.anneal_sigma_rel;
  auto remaining = [&]() { return cfg.budget - ct.evals; };

  // the loop is basin hopping with elitist reporting: a walker alternates
  // between quasi-Newton descent and a Metropolis burst, and descent resumes
  // from wherever the burst left the walker rather than snapping back to the
  // incumbent, so one sticky basin cannot capture the whole budget. rep.best
  // still tracks the best point ever evaluated.
  const int dim = pack_dim(start);
  Eigen::MatrixXd hess_inv = Eigen::MatrixXd::Identity(dim, dim);
  Eigen::VectorXd walk_x = to_chart(start);
  bool walker_hopped = false;

  auto run_descent = [&](const StageValue& val, int iters, const char* label) {
    const long stage_start = ct.evals;
    if (walker_hopped) {
      // the walker jumped basins; the curvature model refers to the old one
      hess_inv.setIdentity();
      walker_hopped = false;
    }
    Eigen::VectorXd x = walk_x;
    const int d = dim;
    Parts p = walk_p;
    double f = val(p);
    Eigen::VectorXd g;
    bool have_grad = false;
    bool scaled_h0 = false;
    for (int it = 0; it < iters; ++it) {
      if (remaining() < 2 * d + 2) break;
      if (!have_grad) {
        g = fd_gradient(x, rep.best, sc, h, workers, val, rep, ct);
        have_grad = true;
      }
      if (g.norm() == 0.0) break;
      Eigen::VectorXd dir = -(hess_inv * g);
      if (g.dot(dir) >= 0.0) {
        hess_inv.setIdentity();
        dir = -g;
      }
      double t = 1.0;
      bool accepted = false;
      Eigen::VectorXd x_new;
      Parts p_new = p;
      double f_new = f;
      for (int ls = 0; ls < 20 && remaining() > 0; ++ls, t *= 0.5) {
        Eigen::VectorXd xc = x + t * dir;
        clamp_chart(xc);
        const double pred = g.dot(xc - x);
        if (pred >= 0.0) continue;
        const ControlVector cand = from_chart(xc, rep.best);
        const Parts pc = eval_parts(cand, sc, ct);
        record_best(rep, cand, pc.total());
        if (val(pc) < f + 1e-4 * pred) {
          x_new = xc;
          p_new = pc;
          f_new = val(pc);
          accepted = true;
          break;
        }
      }
      if (!accepted) break;
      if (remaining() < 2 * d) {
        x = x_new;
        p = p_new;
        f = f_new;
        break;
      }
      const Eigen::VectorXd g_new =
          fd_gradient(x_new, rep.best, sc, h, workers, val, rep, ct);
      const Eigen::VectorXd step = x_new - x;
      const Eigen::VectorXd dg = g_new - g;
      const double ys = dg.dot(step);
      if (ys > 1e-12 * dg.norm() * step.norm()) {
        if (!scaled_h0 && hess_inv.isIdentity(0.0)) {
          // seed the curvature scale before the first update so unit steps
          // land in the right order of magnitude
          hess_inv *= ys / dg.squaredNorm();
          scaled_h0 = true;
        }
        const double rho = 1.0 / ys;
        const Eigen::MatrixXd ident = Eigen::MatrixXd::Identity(d, d);
        hess_inv = (ident - rho * step * dg.transpose()) * hess_inv *
                       (ident - rho * dg * step.transpose()) +
                   rho * step * step.transpose();
      }
      x = x_new;
      p = p_new;
      f = f_new;
      g = g_new;
    }
    walk_x = x;
    walk_p = p;
    rep.stages.push_back({label, ct.evals - stage_start, rep.best_objective,
                          walk_p.fluct, walk_p.disp});
  };

  // displacement removal: descent can converge with a pinned final mean whose
  // energy dominates the occupation; solve for the tone that cancels it and
  // take the move when the total improves
  auto run_recenter = [&]() {
    if (sc.kind != ObjectiveKind::final_phonon || remaining() <= 6) return;
    const long stage_start = ct.evals;
    const ControlVector base = from_chart(walk_x, rep.best);
    ControlVector shifted = base;
    if (recenter_control(base, sc, ct, cfg.budget - 1, shifted)) {
      Eigen::VectorXd xs = to_chart(shifted);
      clamp_chart(xs);
      shifted = from_chart(xs, shifted);
      const Parts ps = eval_parts(shifted, sc, ct);
      record_best(rep, shifted, ps.total());
      if (ps.total() < walk_p.total()) {
        walk_x = xs;
        walk_p = ps;
        walker_hopped = true;
      }
    }
    rep.stages.push_back({"recenter", ct.evals - stage_start, rep.best_objective,
                          walk_p.fluct, walk_p.disp});
  };

  const StageValue fluct_only = [](const Parts& p) { return p.fluct; };
  const StageValue plain_total = [](const Parts& p) { return p.total(); };

  bool anneal_enabled = cfg.anneal_batches > 0 && cfg.anneal_batch > 0;
  int anneal_fail_streak = 0;
  int stagnant_rounds = 0;
  bool warmed_up = false;
  // hopping is allowed to spend the whole budget; only pure descent with
  // nothing left to try ends the run early
  while (remaining() > 0 && (anneal_enabled || stagnant_rounds < 2)) {
    const double round_start_best = rep.best_objective;

    if (!warmed_up) {
      warmed_up = true;
      if (cfg.warmup_descent_iters > 0 && sc.kind == ObjectiveKind::final_phonon) {
        run_descent(fluct_only, cfg.warmup_descent_iters, "warmup descent");
        run_recenter();
        // the weight change invalidates the curvature model
        walker_hopped = true;
      }
      // The total re-balances every basin at the same displacement shoulder,
      // so zero final mean is enforced as an explicit constraint instead:
      // minimize the fluctuation share subject to m = 0 by augmented
      // Lagrangian, multipliers giving exact constraint satisfaction without
      // the conditioning blowup of a bare quadratic penalty.
      if (cfg.constraint_rounds > 0 && sc.kind == ObjectiveKind::final_phonon) {
        Eigen::Vector2d y = Eigen::Vector2d::Zero();
        double mu = 4.0;
        double m_prev = k_inf;
        for (int r = 0; r < cfg.constraint_rounds && remaining() > 2 * dim + 2;
             ++r) {
          const StageValue al = [y, mu](const Parts& p) {
            return p.fluct + y(0) * p.mx + y(1) * p.mp +
                   0.5 * mu * (p.mx * p.mx + p.mp * p.mp);
          };
          run_descent(al, cfg.constraint_iters, "constrained descent");
          walker_hopped = true;
          const Eigen::Vector2d m(walk_p.mx, walk_p.mp);
          if (!m.allFinite()) break;
          y += mu * m;
          if (m.norm() > 0.25 * m_prev) mu *= 4.0;
          m_prev = m.norm();
          if (m.norm() < 1e-6) break;
        }
      }
    }
    run_descent(plain_total, cfg.bfgs_iters, "descent");
    run_recenter();

    // Metropolis burst from the walker; an accepted uphill move is the hop
    // that lets the next descent explore a different basin
    if (anneal_enabled && remaining() > 0) {
      const long stage_start = ct.evals;
      const double stage_best = rep.best_objective;
      Eigen::VectorXd current = walk_x;
      Parts p_cur = walk_p;
      const double temp0 =
          std::isfinite(p_cur.total()) ? std::max(p_cur.total(), 1e-12) : 1.0;
      double temp = temp0;
      std::uniform_real_distribution<double> ud(0.0, 1.0);
      for (int b = 0; b < cfg.anneal_batches && remaining() > 0; ++b) {
        // proposals shrink as the temperature drops, so late batches refine
        // instead of rattling the incumbent loose
        const double sigma = std::max(sigma0 * std::sqrt(temp / temp0), 1e-4);
        std::normal_distribution<double> nd(0.0, sigma);
        const int m = static_cast<int>(
            std::min<long>(cfg.anneal_batch, remaining()));
        std::vector<Eigen::VectorXd> props;
        props.reserve(static_cast<size_t>(m));
        for (int k = 0; k < m; ++k) {
          Eigen::VectorXd xp = current;
          for (int i = 0; i < xp.size(); ++i) xp(i) += nd(rng);
          clamp_chart(xp);
          props.push_back(std::move(xp));
        }
        std::vector<Parts> fv(static_cast<size_t>(m));
        std::vector<char> okv(static_cast<size_t>(m), 1);
        parallel_for(m, workers, [&](int k) {
          bool finite = true;
          fv[static_cast<size_t>(k)] =
              raw_parts(from_chart(props[static_cast<size_t>(k)], rep.best), sc, finite);
          okv[static_cast<size_t>(k)] = finite ? 1 : 0;
        });
        ct.evals += m;
        for (int k = 0; k < m; ++k)
          if (!okv[static_cast<size_t>(k)]) ++ct.unstable;
        // proposals were drawn around one point; accept/reject replays them
        // in order so the walk stays reproducible
        for (int k = 0; k < m; ++k) {
          const double fk = fv[static_cast<size_t>(k)].total();
          bool take = fk <= p_cur.total();
          if (!take && std::isfinite(fk)) {
            const double u = ud(rng);
            take = u < std::exp(-(fk - p_cur.total()) / temp);
          }
          if (take) {
            current = props[static_cast<size_t>(k)];
            p_cur = fv[static_cast<size_t>(k)];
            record_best(rep, from_chart(current, rep.best), fk);
            walker_hopped = true;
          }
        }
        temp *= cfg.anneal_decay;
      }
      walk_x = current;
      walk_p = p_cur;
      rep.stages.push_back({"anneal", ct.evals - stage_start, rep.best_objective,
                            walk_p.fluct, walk_p.disp});
      if (rep.best_objective < stage_best) {
        anneal_fail_streak = 0;
      } else if (++anneal_fail_streak >= 2) {
        // exploration has stopped paying; park the walker on the incumbent
        // and let descent spend what is left polishing it
        anneal_enabled = false;
        if (remaining() > 0) {
          walk_x = to_chart(rep.best);
          const ControlVector parked = from_chart(walk_x, rep.best);
          walk_p = eval_parts(parked, sc, ct);
          record_best(rep, parked, walk_p.total());
          walker_hopped = true;
        }
      }
    }

    const double gain = round_start_best - rep.best_objective;
    if (std::isfinite(round_start_best) &&
        !(gain > 1e-15 * (1.0 + std::abs(round_start_best))))
      ++stagnant_rounds;
    else
      stagnant_rounds = 0;
  }

  rep.final_phonon = rep.best_objective;
  rep.evaluations = ct.evals;
  rep.unstable_evaluations = ct.unstable;
  return rep;
}

const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::amplitude_then_phase:
      return "amplitude-then-phase";
    case Strategy::analytic_seed:
      return "analytic-seed";
    case Strategy::continuation:
      return "continuation";
    case Strategy::random_restart:
      return "random-restart";
  }
  return "unknown";
}

ControlVector analytic_seed(const OptimizeScenario& sc, int n, double total_time,
                            double g_max, long* evals_used) {
  if (n < 1) throw ConfigError("control needs at least one segment");
  if (!(total_time > 0.0)) throw ConfigError("control time must be positive");
  if (!(g_max > 0.0)) throw ConfigError("control coupling bound must be positive");

  std::vector<ControlVector> candidates;

  // Stroboscopic candidate: one compiled exchange cycle spanning the whole
  // window, trotterized so every sub-segment lands on a grid slot. The cycle
  // is compiled at a small reference amplitude (the per-cycle model only has
  // a principal branch for modest pulse areas) and the sampled control is
  // scaled linearly to the full-swap strength; if that violates the disc
  // bound the projection trims it to a partial swap.
  if (n >= 4) {
    try {
      const double t_quarter = total_time / 4.0;
      const double g_cycle = k_pi * n / (total_time * total_time);
      const double g_ref = 0.01 / t_quarter;
      PulseSchedule cycle =
          compile_linear_beamsplitter(sc.params, g_ref, t_quarter, t_quarter);
      ControlVector strobe = sample_schedule(trotterize(cycle, n / 4.0), n, g_max);
      const double scale = g_cycle / g_ref;
      strobe.g_re *= scale;
      strobe.g_im *= scale;
      strobe.project();
      candidates.push_back(std::move(strobe));
    } catch (const NumericsError&) {
      // cycle geometry outside the compiler's domain; flat candidates only
    }
  }

  // Flat candidates: resonant constant coupling until the secular exchange
  // reaches a quarter rotation, then off. Strong drives swap faster but heat
  // through the counter-rotating terms and the radiation-pressure shift, so a
  // few strengths compete, including the one that finishes exactly on time.
  const double fit = (k_pi / 2.0) * k_sqrt2 / total_time;
  std::vector<double> amps = {0.25, 0.35, 0.5, 0.7, 1.0, fit};
  for (double& a : amps) a = std::min(a, g_max);
  std::sort(amps.begin(), amps.end());
  amps.erase(std::unique(amps.begin(), amps.end()), amps.end());
  auto flat_candidate = [&](double a) {
    ControlVector flat = zero_control(n, total_time, g_max);
    const double slot_angle = (a / k_sqrt2) * flat.dt;
    double remaining_angle = k_pi / 2.0;
    for (int k = 0; k < n && remaining_angle > 0.0; ++k) {
      if (slot_angle <= remaining_angle) {
        flat.g_re(k) = a;
        remaining_angle -= slot_angle;
      } else {
        flat.g_re(k) = a * remaining_angle / slot_angle;
        remaining_angle = 0.0;
      }
    }
    return flat;
  };
  for (const double a : amps) candidates.push_back(flat_candidate(a));

  // Phase-chirped variants. The dynamics are invariant under conjugating the
  // coupling (a cavity reflection), so purely real candidates sit on a
  // symmetry slice where every gradient into the imaginary directions
  // vanishes; descent can only use the coupling phase if the seed already
  // breaks the symmetry. A chirp also winds the phase under which amplitude
  // parked in the cavity returns to the mechanics, which is what lets the
  // radiation-pressure kicks cancel.
  if (!sc.partial_coupling) {
    const double a_chirp = std::min(g_max, std::max(fit, 0.5 * g_max));
    for (const double turns : {0.25, -0.25, 0.5, -0.5, 1.0, -1.0}) {
      ControlVector c = flat_candidate(a_chirp);
      for (int k = 0; k < n; ++k) {
        const double amp = c.g_re(k);
        const double chi = 2.0 * k_pi * turns * (k + 0.5) / n;
        c.g_re(k) = amp * std::cos(chi);
        c.g_im(k) = amp * std::sin(chi);
      }
      candidates.push_back(std::move(c));
    }
  }

  long used = 0;
  ControlVector best;
  double f_best = k_inf;
  for (auto& cand : candidates) {
    if (sc.partial_coupling) {
      cand.phase_locked = true;
      cand.project();
    }
    const double f = objective(cand, sc, nullptr);
    ++used;
    if (f < f_best || used == 1) {
      f_best = f;
      best = std::move(cand);
    }
  }

  // a purely real winner sits on the conjugation-symmetry slice (see above);
  // tilt it so the descent that follows can reach the coupling phase at all
  if (!sc.partial_coupling && best.g_im.isZero(0.0)) {
    ControlVector tilted = best;
    for (int k = 0; k < n; ++k)
      tilted.g_im(k) +=
          0.01 * g_max * std::sin(2.0 * k_pi * (k + 0.5) / static_cast<double>(n));
    tilted.project();
    const double f = objective(tilted, sc, nullptr);
    ++used;
    if (std::isfinite(f)) {
      best = std::move(tilted);
      f_best = f;
    }
  }

  // the bare candidates all carry the radiation-pressure kick; cancel the
  // final mean when that makes the seed strictly better
  if (sc.kind == ObjectiveKind::final_phonon && std::isfinite(f_best)) {
    EvalCount ct;
    ControlVector shifted = best;
    if (recenter_control(best, sc, ct, 64, shifted)) {
      const double f = objective(shifted, sc, nullptr);
      ++ct.evals;
      if (f < f_best) best = std::move(shifted);
    }
    used += ct.evals;
  }

  if (evals_used) *evals_used = used;
  return best;
}

namespace {

void prefix_stage_labels(OptimizationReport& rep, const std::string& prefix) {
  for (auto& st : rep.stages) st.stage = prefix + st.stage;
}

// Appends follower results onto a leader report; the follower is assumed to
// have started from the leader's best point, so histories concatenate without
// breaking monotonicity.
void chain_reports(OptimizationReport& lead, const OptimizationReport& next) {
  lead.evaluations += next.evaluations;
  lead.unstable_evaluations += next.unstable_evaluations;
  for (size_t i = 0; i < next.history.size(); ++i) {
    // the follower's starting value reprises the leader's best
    if (i == 0 && !lead.history.empty() && next.history[i] >= lead.best_objective)
      continue;
    lead.history.push_back(next.history[i]);
  }
  lead.stages.insert(lead.stages.end(), next.stages.begin(), next.stages.end());
  if (next.best_objective < lead.best_objective) {
    lead.best_objective = next.best_objective;
    lead.best = next.best;
  }
  lead.final_phonon = lead.best_objective;
}

}  // namespace

OptimizationReport run_strategy(Strategy s, const OptimizeScenario& sc,
                                int n_segments, double total_time, double g_max,
                                const OptimizerConfig& cfg,
                                const ControlVector* warm) {
  switch (s) {
    case Strategy::amplitude_then_phase: {
      ControlVector start = random_control(n_segments, total_time, g_max, cfg.seed);
      start.phase_locked = true;
      start.project();
      OptimizerConfig first = cfg;
      first.budget = std::max<long>(1, cfg.budget / 2);
      OptimizationReport rep = optimize(start, sc, first);
      prefix_stage_labels(rep, "amplitude ");
      const long left = cfg.budget - rep.evaluations;
      if (left >= 1) {
        ControlVector mid = rep.best;
        if (!sc.partial_coupling) mid.phase_locked = false;
        OptimizerConfig second = cfg;
        second.budget = left;
        second.seed = cfg.seed ^ 0x9e3779b97f4a7c15ull;
        OptimizationReport rep2 = optimize(mid, sc, second);
        prefix_stage_labels(rep2, "full ");
        chain_reports(rep, rep2);
      }
      rep.seed = cfg.seed;
      rep.final_phonon = rep.best_objective;
      return rep;
    }
    case Strategy::analytic_seed: {
      long seed_evals = 0;
      ControlVector seed =
          analytic_seed(sc, n_segments, total_time, g_max, &seed_evals);
      OptimizerConfig inner = cfg;
      inner.budget = std::max<long>(1, cfg.budget - seed_evals);
      OptimizationReport rep = optimize(seed, sc, inner);
      // the candidate evaluations behind the seed count too
      rep.evaluations += seed_evals;
      rep.stages.insert(rep.stages.begin(),
                        {"seed selection", seed_evals, rep.history.front()});
      return rep;
    }
    case Strategy::continuation: {
      if (warm == nullptr)
        throw ConfigError("continuation needs a warm-start control");
      if (warm->n_segments() != n_segments)
        throw ConfigError("warm start has the wrong segment count");
      ControlVector start = *warm;
      start.dt = total_time / n_segments;
      start.g_max = g_max;
      if (sc.partial_coupling) start.phase_locked = true;
      start.project();
      return optimize(start, sc, cfg);
    }
    case Strategy::random_restart: {
      const int restarts = 3;
      OptimizationReport merged;
      bool have = false;
      long spent = 0;
      for (int r = 0; r < restarts; ++r) {
        const long share = (r + 1 == restarts) ? cfg.budget - spent
                                               : cfg.budget / restarts;
        if (share < 1) break;
        ControlVector start = random_control(n_segments, total_time, g_max,
                                             cfg.seed + 1000003ull * r);
        if (sc.partial_coupling) start.phase_locked = true;
        OptimizerConfig inner = cfg;
        inner.budget = share;
        inner.seed = cfg.seed + 7919ull * (r + 1);
        OptimizationReport rep = optimize(start, sc, inner);
        prefix_stage_labels(rep, "restart " + std::to_string(r) + " ");
        spent += rep.evaluations;
        if (!have) {
          merged = rep;
          have = true;
        } else {
          // keep the merged history a best-so-far record across restarts
          merged.evaluations += rep.evaluations;
          merged.unstable_evaluations += rep.unstable_evaluations;
          merged.stages.insert(merged.stages.end(), rep.stages.begin(),
                               rep.stages.end());
          for (double v : rep.history)
            if (v < merged.best_objective) merged.history.push_back(v);
          if (rep.best_objective < merged.best_objective) {
            merged.best_objective = rep.best_objective;
            merged.best = rep.best;
          }
        }
      }
      merged.seed = cfg.seed;
      merged.final_phonon = merged.best_objective;
      return merged;
    }
  }
  throw ConfigError("unknown strategy");
}

std::vector<SweepRow> kappa_sweep(const OptimizeScenario& base,
                                  const std::vector<double>& kappas,
                                  const std::vector<Strategy>& strategies,
                                  int n_segments, double total_time, double g_max,
                                  const OptimizerConfig& cfg) {
  if (kappas.empty()) throw ConfigError("sweep needs at least one kappa");
  std::vector<SweepRow> rows;
  rows.reserve(kappas.size() * strategies.size());
  for (size_t si = 0; si < strategies.size(); ++si) {
    const Strategy s = strategies[si];
    ControlVector carry;
    bool have_carry = false;
    for (size_t ki = 0; ki < kappas.size(); ++ki) {
      OptimizeScenario sc = base;
      sc.params.kappa = kappas[ki];
      sc.params.validate();
      OptimizerConfig cell = cfg;
      cell.seed = cfg.seed + 1013904223ull * (si + 1) + 69069ull * ki;
      const ControlVector* warm = nullptr;
      if (s == Strategy::continuation) {
        if (!have_carry) {
          long seed_evals = 0;
          carry = analytic_seed(sc, n_segments, total_time, g_max, &seed_evals);
          have_carry = true;
          cell.budget = std::max<long>(1, cell.budget - seed_evals);
        }
        warm = &carry;
      }
      OptimizationReport rep =
          run_strategy(s, sc, n_segments, total_time, g_max, cell, warm);
      rows.push_back({kappas[ki], strategy_name(s), rep.history.front(),
                      rep.best_objective});
      if (s == Strategy::continuation) carry = rep.best;
    }
  }
  return rows;
}

}  // namespace optopulse
