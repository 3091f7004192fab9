#pragma once
// Truncated number-basis engine for the full nonlinear Hamiltonians. Pure
// states are dense complex vectors over the product basis with sparse
// Hamiltonians; density matrices appear only in the master-equation path at
// reduced dimensions. The symmetric/antisymmetric cavity basis is built
// directly as its own modes, never by rotating a two-cavity tensor product.

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "optopulse/drive.hpp"
#include "optopulse/params.hpp"
#include "optopulse/poly.hpp"
#include "optopulse/terms.hpp"

namespace optopulse {

enum class ModeLabel { cavity, symmetric_mode, antisymmetric_mode, mechanical };

struct FockConfig {
  std::vector<int> dims;
  std::vector<ModeLabel> labels;  // empty, or one label per mode
  long max_total = 200000;        // product-basis budget

  int n_modes() const { return static_cast<int>(dims.size()); }
  long total() const;
  long stride(int mode) const;  // index stride of `mode` (last mode is fastest)
  void validate() const;
};

using SparseXcd = Eigen::SparseMatrix<complexd>;

struct FockState {
  FockConfig config;
  Eigen::VectorXcd psi;
  double norm() const { return psi.norm(); }
};

FockState vacuum_state(const FockConfig& cfg);
FockState number_state(const FockConfig& cfg, const std::vector<int>& n);
// truncated coherent product state, renormalized after truncation
FockState coherent_state(const FockConfig& cfg, const std::vector<complexd>& alpha);

// <n_mode> of a pure state
double mode_energy(const FockState& s, int mode);
complexd mode_amplitude(const FockState& s, int mode);  // <a_mode>

// ladder operator of one mode embedded in the full product space
SparseXcd mode_annihilation(const FockConfig& cfg, int mode);

// sparse Hermitian assembly; exact Hermiticity since every factor is
SparseXcd build_hamiltonian(const std::vector<HamiltonianTerm>& terms,
                            const FockConfig& cfg);
SparseXcd build_hamiltonian(const Polynomial& h, const FockConfig& cfg);

struct EvolveOptions {
  int krylov_dim = 25;     // Lanczos basis size per substep
  double step_tol = 1e-9;  // local error target per substep
  double norm_tol = 1e-6;  // drift beyond this is a step-size failure
  double sample_dt = 0.0;  // extra uniform sampling inside segments; 0 = off
};

// psi <- exp(-i h t) psi via Lanczos with full reorthogonalization and
// adaptive substepping. Throws NumericsError when the local error cannot be
// brought under step_tol or the norm drifts past norm_tol.
void apply_exponential(const SparseXcd& h, double t, Eigen::VectorXcd& psi,
                       const EvolveOptions& opt = {});

struct FockSample {
  double t = 0.0;
  std::vector<double> energy;  // <n> per mode
  double norm = 1.0;           // state norm, or trace in the dissipative path
};

struct FockTrajectory {
  std::vector<FockSample> samples;
  FockState final_state;
  double final_energy(int mode) const;
  double min_energy(int mode) const;
};

// piecewise-constant evolution; observables sampled at every segment
// boundary and, when opt.sample_dt > 0, on a uniform grid inside segments
FockTrajectory evolve_segments(const FockState& psi0,
                               const std::vector<std::pair<Polynomial, double>>& segments,
                               const EvolveOptions& opt = {});

// two-mode linearized coupling run (vars 0,1 = cavity; vars 2,3 = mechanics):
// H = delta/2 (x_c^2 + p_c^2) + 1/2 (x_m^2 + p_m^2)
//     + sqrt2 (Re G x_c - Im G p_c) x_m + |G|^2 x_m
std::vector<std::pair<Polynomial, double>> linear_coupling_polynomials(
    const SystemParams& p, const std::vector<CouplingSegment>& segments);

struct DensityMatrix {
  FockConfig config;
  Eigen::MatrixXcd rho;
  double occupation(int mode) const;
  double trace_real() const { return rho.trace().real(); }
};

DensityMatrix pure_density(const FockState& s);
DensityMatrix thermal_product(const FockConfig& cfg, const std::vector<double>& nbar);

struct LindbladOptions {
  double dt = 1e-3;        // RK4 step (clipped at segment boundaries)
  double sample_dt = 0.0;  // extra uniform sampling inside segments; 0 = off
  long max_total = 1000;   // density-matrix basis budget
};

struct LindbladTrajectory {
  std::vector<FockSample> samples;
  DensityMatrix final_state;
  double final_occupation(int mode) const;
};

// fixed-step RK4 master equation. kappa holds one amplitude-decay rate per
// mode; each contributes 2 kappa_m D[a_m], so <a_m> decays as exp(-kappa_m t)
// (the convention shared with the Gaussian engine).
LindbladTrajectory lindblad_evolve(const DensityMatrix& rho0,
                                   const std::vector<std::pair<Polynomial, double>>& segments,
                                   const std::vector<double>& kappa,
                                   const LindbladOptions& opt = {});

}  // namespace optopulse
