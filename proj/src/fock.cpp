#include "optopulse/fock.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include <unsupported/Eigen/KroneckerProduct>

namespace optopulse {

namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

const complexd k_i(0.0, 1.0);

MatrixXcd ladder_dense(int d) {
  MatrixXcd a = MatrixXcd::Zero(d, d);
  for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

MatrixXcd factor_dense(int d, FactorKind kind, int power) {
  MatrixXcd a = ladder_dense(d);
  MatrixXcd base;
  switch (kind) {
    case FactorKind::position:
      base = (a + a.adjoint()) / std::sqrt(2.0);
      break;
    case FactorKind::momentum:
      base = k_i * (a.adjoint() - a) / std::sqrt(2.0);
      break;
    case FactorKind::number:
      // exact integer diagonal, not sqrt(n)^2
      base = MatrixXcd::Zero(d, d);
      for (int n = 0; n < d; ++n) base(n, n) = complexd(n, 0.0);
      break;
  }
  MatrixXcd out = base;
  for (int k = 1; k < power; ++k) out = out * base;
  return out;
}

SparseXcd sparse_identity(int d) {
  SparseXcd id(d, d);
  id.setIdentity();
  return id;
}

// spectral-norm estimate by deterministic power iteration (Hermitian h)
double estimate_norm(const SparseXcd& h) {
  const long n = h.rows();
  if (h.nonZeros() == 0) return 0.0;
  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  VectorXcd v(n);
  for (long i = 0; i < n; ++i) v(i) = complexd(u(rng), u(rng));
  v.normalize();
  double nrm = 0.0;
  for (int it = 0; it < 20; ++it) {
    VectorXcd w = h * v;
    nrm = w.norm();
    if (nrm < 1e-300) return 0.0;
    v = w / nrm;
  }
  return 1.1 * nrm;
}

// one Lanczos application psi <- exp(-i h dt) psi; returns a local error
// estimate from the first discarded Krylov direction
double lanczos_apply(const SparseXcd& h, double dt, VectorXcd& psi, int m,
                     double hscale) {
  const long n = psi.size();
  m = std::min<long>(m, n);
  const double beta0 = psi.norm();
  if (beta0 == 0.0) return 0.0;

  MatrixXcd basis(n, m);
  VectorXd diag(m), off(m);
  basis.col(0) = psi / beta0;
  int k = m;
  double bnext = 0.0;
  for (int j = 0; j < m; ++j) {
    VectorXcd w = h * basis.col(j);
    double alpha = basis.col(j).dot(w).real();
    w -= alpha * basis.col(j);
    if (j > 0) w -= off(j - 1) * basis.col(j - 1);
    // full reorthogonalization keeps the basis clean over long schedules
    VectorXcd proj = basis.leftCols(j + 1).adjoint() * w;
    w -= basis.leftCols(j + 1) * proj;
    diag(j) = alpha + proj(j).real();
    double beta = w.norm();
    if (j + 1 < m) {
      if (beta < 1e-13 * std::max(1.0, hscale)) {
        k = j + 1;  // Krylov space is invariant; the result is exact
        bnext = 0.0;
        break;
      }
      off(j) = beta;
      basis.col(j + 1) = w / beta;
    } else {
      bnext = beta;
    }
  }

  MatrixXd t = MatrixXd::Zero(k, k);
  for (int j = 0; j < k; ++j) {
    t(j, j) = diag(j);
    if (j + 1 < k) t(j, j + 1) = t(j + 1, j) = off(j);
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(t);
  VectorXcd phases(k);
  for (int j = 0; j < k; ++j)
    phases(j) = std::exp(-k_i * es.eigenvalues()(j) * dt);
  VectorXcd u = es.eigenvectors().cast<complexd>() *
                (phases.array() * es.eigenvectors().row(0).transpose().cast<complexd>().array()).matrix();
  psi = beta0 * (basis.leftCols(k) * u);
  return beta0 * bnext * std::abs(u(k - 1)) * std::abs(dt);
}

long occupation_at(const FockConfig& cfg, long index, int mode) {
  return (index / cfg.stride(mode)) % cfg.dims[mode];
}

std::vector<double> state_energies(const FockState& s) {
  std::vector<double> e(s.config.n_modes(), 0.0);
  for (long i = 0; i < s.psi.size(); ++i) {
    double w = std::norm(s.psi(i));
    if (w == 0.0) continue;
    for (int m = 0; m < s.config.n_modes(); ++m)
      e[m] += w * static_cast<double>(occupation_at(s.config, i, m));
  }
  return e;
}

std::vector<double> rho_energies(const DensityMatrix& r) {
  std::vector<double> e(r.config.n_modes(), 0.0);
  for (long i = 0; i < r.rho.rows(); ++i) {
    double w = r.rho(i, i).real();
    for (int m = 0; m < r.config.n_modes(); ++m)
      e[m] += w * static_cast<double>(occupation_at(r.config, i, m));
  }
  return e;
}

}  // namespace

long FockConfig::total() const {
  long t = 1;
  for (int d : dims) t *= d;
  return t;
}

long FockConfig::stride(int mode) const {
  long s = 1;
  for (std::size_t j = mode + 1; j < dims.size(); ++j) s *= dims[j];
  return s;
}

void FockConfig::validate() const {
  if (dims.empty()) throw ConfigError("FockConfig: no modes");
  for (int d : dims)
    if (d < 2) throw ConfigError("FockConfig: every mode dimension must be >= 2");
  if (!labels.empty() && labels.size() != dims.size())
    throw ConfigError("FockConfig: labels must be empty or one per mode");
  if (total() > max_total)
    throw ConfigError("FockConfig: product basis exceeds the configured budget");
}

FockState vacuum_state(const FockConfig& cfg) {
  cfg.validate();
  FockState s;
  s.config = cfg;
  s.psi = VectorXcd::Zero(cfg.total());
  s.psi(0) = 1.0;
  return s;
}

FockState number_state(const FockConfig& cfg, const std::vector<int>& n) {
  cfg.validate();
  if (static_cast<int>(n.size()) != cfg.n_modes())
    throw ConfigError("number_state: one occupation per mode required");
  long index = 0;
  for (int m = 0; m < cfg.n_modes(); ++m) {
    if (n[m] < 0 || n[m] >= cfg.dims[m])
      throw ConfigError("number_state: occupation outside the truncation");
    index += n[m] * cfg.stride(m);
  }
  FockState s;
  s.config = cfg;
  s.psi = VectorXcd::Zero(cfg.total());
  s.psi(index) = 1.0;
  return s;
}

FockState coherent_state(const FockConfig& cfg, const std::vector<complexd>& alpha) {
  cfg.validate();
  if (static_cast<int>(alpha.size()) != cfg.n_modes())
    throw ConfigError("coherent_state: one amplitude per mode required");
  VectorXcd acc = VectorXcd::Ones(1);
  for (int m = 0; m < cfg.n_modes(); ++m) {
    const int d = cfg.dims[m];
    VectorXcd mode(d);
    mode(0) = std::exp(-0.5 * std::norm(alpha[m]));
    for (int n = 1; n < d; ++n)
      mode(n) = mode(n - 1) * alpha[m] / std::sqrt(static_cast<double>(n));
    VectorXcd next(acc.size() * d);
    for (long i = 0; i < acc.size(); ++i)
      next.segment(i * d, d) = acc(i) * mode;
    acc = std::move(next);
  }
  FockState s;
  s.config = cfg;
  s.psi = std::move(acc);
  const double nrm = s.psi.norm();
  // renormalizing is only honest while the truncation holds nearly all the
  // weight; below 99% the state is not the requested coherent state
  if (nrm * nrm < 0.99)
    throw ConfigError("coherent_state: amplitude too large for the truncation");
  s.psi /= nrm;
  return s;
}

double mode_energy(const FockState& s, int mode) {
  if (mode < 0 || mode >= s.config.n_modes())
    throw ConfigError("mode_energy: mode index out of range");
  return state_energies(s)[mode];
}

complexd mode_amplitude(const FockState& s, int mode) {
  if (mode < 0 || mode >= s.config.n_modes())
    throw ConfigError("mode_amplitude: mode index out of range");
  const long stride = s.config.stride(mode);
  const int d = s.config.dims[mode];
  complexd acc(0.0, 0.0);
  for (long i = 0; i < s.psi.size(); ++i) {
    long n = occupation_at(s.config, i, mode);
    if (n + 1 >= d) continue;
    // <psi| a |psi>: a lowers the ket, so pair i with i + stride
    acc += std::conj(s.psi(i)) * std::sqrt(static_cast<double>(n + 1)) *
           s.psi(i + stride);
  }
  return acc;
}

SparseXcd mode_annihilation(const FockConfig& cfg, int mode) {
  cfg.validate();
  if (mode < 0 || mode >= cfg.n_modes())
    throw ConfigError("mode_annihilation: mode index out of range");
  SparseXcd op = (mode == 0) ? SparseXcd(ladder_dense(cfg.dims[0]).sparseView())
                             : sparse_identity(cfg.dims[0]);
  for (int m = 1; m < cfg.n_modes(); ++m) {
    SparseXcd f = (m == mode) ? SparseXcd(ladder_dense(cfg.dims[m]).sparseView())
                              : sparse_identity(cfg.dims[m]);
    op = Eigen::kroneckerProduct(op, f).eval();
  }
  return op;
}

SparseXcd build_hamiltonian(const std::vector<HamiltonianTerm>& terms,
                            const FockConfig& cfg) {
  cfg.validate();
  const long n = cfg.total();
  SparseXcd h(n, n);
  for (const auto& term : terms) {
    std::vector<MatrixXcd> factor;
    factor.reserve(cfg.n_modes());
    for (int m = 0; m < cfg.n_modes(); ++m)
      factor.push_back(MatrixXcd::Identity(cfg.dims[m], cfg.dims[m]));
    int degree = 0;
    for (const auto& f : term.factors) {
      if (f.mode < 0 || f.mode >= cfg.n_modes())
        throw ConfigError("hamiltonian term touches a mode outside the configuration");
      factor[f.mode] = factor[f.mode] * factor_dense(cfg.dims[f.mode], f.kind, f.power);
      degree += (f.kind == FactorKind::number) ? 2 * f.power : f.power;
    }
    if (degree > k_poly_degree_cap)
      throw ConfigError("hamiltonian term exceeds the degree-3 cap");
    for (const auto& f : factor)
      if ((f - f.adjoint()).cwiseAbs().maxCoeff() != 0.0)
        throw ConfigError("non-Hermitian term: mixed quadratures on one mode");
    SparseXcd op = SparseXcd(factor[0].sparseView());
    for (int m = 1; m < cfg.n_modes(); ++m)
      op = Eigen::kroneckerProduct(op, SparseXcd(factor[m].sparseView())).eval();
    h += complexd(term.coeff, 0.0) * op;
  }
  h.makeCompressed();
  return h;
}

SparseXcd build_hamiltonian(const Polynomial& h, const FockConfig& cfg) {
  return build_hamiltonian(to_operator_terms(h), cfg);
}

void apply_exponential(const SparseXcd& h, double t, VectorXcd& psi,
                       const EvolveOptions& opt) {
  if (h.rows() != psi.size() || h.cols() != psi.size())
    throw ConfigError("apply_exponential: operator and state sizes differ");
  if (t == 0.0 || h.nonZeros() == 0) return;
  const double norm0 = psi.norm();
  const double hnorm = estimate_norm(h);
  long nsub = std::max<long>(1, static_cast<long>(std::ceil(hnorm * std::abs(t) / 10.0)));
  if (nsub > 50000000)
    throw NumericsError("apply_exponential: segment needs an unreasonable substep count");

  const std::function<void(double, int)> step = [&](double dt, int depth) {
    if (depth > 40)
      throw NumericsError("apply_exponential: local error will not converge");
    VectorXcd backup = psi;
    double err = lanczos_apply(h, dt, psi, opt.krylov_dim, hnorm);
    if (err > opt.step_tol) {
      psi = backup;
      step(0.5 * dt, depth + 1);
      step(0.5 * dt, depth + 1);
    }
  };
  const double dt = t / static_cast<double>(nsub);
  for (long i = 0; i < nsub; ++i) step(dt, 0);

  if (std::abs(psi.norm() - norm0) > opt.norm_tol * std::max(1.0, norm0))
    throw NumericsError("apply_exponential: norm drift exceeds tolerance");
}

double FockTrajectory::final_energy(int mode) const {
  if (samples.empty()) throw ConfigError("empty trajectory");
  return samples.back().energy.at(mode);
}

double FockTrajectory::min_energy(int mode) const {
  if (samples.empty()) throw ConfigError("empty trajectory");
  double m = samples.front().energy.at(mode);
  for (const auto& s : samples) m = std::min(m, s.energy.at(mode));
  return m;
}

FockTrajectory evolve_segments(const FockState& psi0,
                               const std::vector<std::pair<Polynomial, double>>& segments,
                               const EvolveOptions& opt) {
  psi0.config.validate();
  if (std::abs(psi0.norm() - 1.0) > 1e-8)
    throw ConfigError("evolve_segments: initial state must be normalized");

  FockTrajectory out;
  FockState s = psi0;
  double t = 0.0;
  auto record = [&]() {
    FockSample smp;
    smp.t = t;
    smp.energy = state_energies(s);
    smp.norm = s.norm();
    out.samples.push_back(std::move(smp));
  };
  record();

  for (const auto& [poly, duration] : segments) {
    if (duration < 0.0) throw ConfigError("evolve_segments: negative duration");
    if (duration == 0.0) continue;
    SparseXcd h = build_hamiltonian(poly, s.config);
    double left = duration;
    while (left > 1e-12 * duration) {
      double chunk = (opt.sample_dt > 0.0) ? std::min(left, opt.sample_dt) : left;
      apply_exponential(h, chunk, s.psi, opt);
      t += chunk;
      left -= chunk;
      record();
    }
  }
  out.final_state = std::move(s);
  return out;
}

std::vector<std::pair<Polynomial, double>> linear_coupling_polynomials(
    const SystemParams& p, const std::vector<CouplingSegment>& segments) {
  p.validate();
  Polynomial h0;
  h0.set({2, 0, 0, 0, 0, 0}, p.delta / 2);
  h0.set({0, 2, 0, 0, 0, 0}, p.delta / 2);
  h0.set({0, 0, 2, 0, 0, 0}, 0.5);
  h0.set({0, 0, 0, 2, 0, 0}, 0.5);
  std::vector<std::pair<Polynomial, double>> out;
  out.reserve(segments.size());
  for (const auto& seg : segments) {
    Polynomial h = h0;
    if (seg.g != complexd(0.0, 0.0)) {
      h.set({1, 0, 1, 0, 0, 0}, std::sqrt(2.0) * seg.g.real());
      h.set({0, 1, 1, 0, 0, 0}, -std::sqrt(2.0) * seg.g.imag());
      h.set({0, 0, 1, 0, 0, 0}, std::norm(seg.g));
    }
    out.emplace_back(std::move(h), seg.duration);
  }
  return out;
}

double DensityMatrix::occupation(int mode) const {
  if (mode < 0 || mode >= config.n_modes())
    throw ConfigError("occupation: mode index out of range");
  return rho_energies(*this)[mode];
}

DensityMatrix pure_density(const FockState& s) {
  DensityMatrix r;
  r.config = s.config;
  r.rho = s.psi * s.psi.adjoint();
  return r;
}

DensityMatrix thermal_product(const FockConfig& cfg, const std::vector<double>& nbar) {
  cfg.validate();
  if (static_cast<int>(nbar.size()) != cfg.n_modes())
    throw ConfigError("thermal_product: one occupation per mode required");
  VectorXd weights = VectorXd::Ones(1);
  for (int m = 0; m < cfg.n_modes(); ++m) {
    if (nbar[m] < 0.0) throw ConfigError("thermal_product: nbar must be >= 0");
    const int d = cfg.dims[m];
    VectorXd w(d);
    const double ratio = nbar[m] / (nbar[m] + 1.0);
    w(0) = 1.0;
    for (int n = 1; n < d; ++n) w(n) = w(n - 1) * ratio;
    w /= w.sum();
    VectorXd next(weights.size() * d);
    for (long i = 0; i < weights.size(); ++i) next.segment(i * d, d) = weights(i) * w;
    weights = std::move(next);
  }
  DensityMatrix r;
  r.config = cfg;
  r.rho = weights.cast<complexd>().asDiagonal();
  return r;
}

double LindbladTrajectory::final_occupation(int mode) const {
  if (samples.empty()) throw ConfigError("empty trajectory");
  return samples.back().energy.at(mode);
}

LindbladTrajectory lindblad_evolve(const DensityMatrix& rho0,
                                   const std::vector<std::pair<Polynomial, double>>& segments,
                                   const std::vector<double>& kappa,
                                   const LindbladOptions& opt) {
  rho0.config.validate();
  if (rho0.config.total() > opt.max_total)
    throw ConfigError("lindblad_evolve: basis exceeds the density-matrix budget");
  if (static_cast<int>(kappa.size()) != rho0.config.n_modes())
    throw ConfigError("lindblad_evolve: one decay rate per mode required");
  if (!(opt.dt > 0.0)) throw ConfigError("lindblad_evolve: dt must be positive");

  std::vector<SparseXcd> lower, number_op;
  for (int m = 0; m < rho0.config.n_modes(); ++m) {
    if (kappa[m] < 0.0) throw ConfigError("lindblad_evolve: decay rates must be >= 0");
    lower.push_back(mode_annihilation(rho0.config, m));
    number_op.push_back(SparseXcd((lower.back().adjoint() * lower.back()).pruned()));
  }

  LindbladTrajectory out;
  DensityMatrix r = rho0;
  double t = 0.0;
  auto record = [&]() {
    FockSample smp;
    smp.t = t;
    smp.energy = rho_energies(r);
    smp.norm = r.trace_real();
    out.samples.push_back(std::move(smp));
  };
  record();

  for (const auto& [poly, duration] : segments) {
    if (duration < 0.0) throw ConfigError("lindblad_evolve: negative duration");
    if (duration == 0.0) continue;
    SparseXcd h = build_hamiltonian(poly, r.config);
    auto deriv = [&](const Eigen::MatrixXcd& rho) {
      Eigen::MatrixXcd d = -k_i * (h * rho - rho * h);
      for (int m = 0; m < r.config.n_modes(); ++m) {
        if (kappa[m] == 0.0) continue;
        d += 2.0 * kappa[m] * (lower[m] * rho * lower[m].adjoint());
        Eigen::MatrixXcd nr = number_op[m] * rho;
        d -= kappa[m] * (nr + nr.adjoint());
      }
      return d;
    };

    double next_sample = (opt.sample_dt > 0.0) ? opt.sample_dt : duration;
    double left = duration;
    double since_sample = 0.0;
    while (left > 1e-15 * duration) {
      double step = std::min({opt.dt, left, next_sample - since_sample});
      Eigen::MatrixXcd k1 = deriv(r.rho);
      Eigen::MatrixXcd k2 = deriv(r.rho + 0.5 * step * k1);
      Eigen::MatrixXcd k3 = deriv(r.rho + 0.5 * step * k2);
      Eigen::MatrixXcd k4 = deriv(r.rho + step * k3);
      r.rho += (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      t += step;
      left -= step;
      since_sample += step;
      if (since_sample >= next_sample - 1e-15 && left > 1e-15 * duration) {
        record();
        since_sample = 0.0;
      }
    }
    record();
    if (std::abs(r.trace_real() - 1.0) > 1e-6)
      throw NumericsError("lindblad_evolve: trace drift exceeds tolerance");
  }
  out.final_state = std::move(r);
  return out;
}

}  // namespace optopulse
