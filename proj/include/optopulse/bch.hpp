#pragma once
// Analytical pulse-schedule compilers. Each compiler emits a time-ordered
// segment list plus a predicted effective Hamiltonian for the free window,
// derived with the exact conjugation machinery rather than a first-order
// commutator, so the only mismatch against the composed schedule is the
// finite pulse width (vanishing as the pulse amplitude grows at fixed area).
//
// Sign bookkeeping, fixed once here: a time-ordered sandwich
// {[-A](first), mid, [+A](last)} acts on mid as exp(-iA) mid exp(+iA), which
// in phase space is the substitution R -> Lam R + d with Lam = exp(-sigma V_A)
// (areas folded into V_A, c_A).

#include <string>
#include <utility>
#include <vector>

#include "optopulse/drive.hpp"
#include "optopulse/poly.hpp"
#include "optopulse/quadratic.hpp"
#include "optopulse/symplectic.hpp"

namespace optopulse {

enum class ControlTarget { g_real, g_imag, drive_x_a, drive_p_a, drive_x_s, drive_p_s };

struct PulseSegment {
  ControlTarget target = ControlTarget::g_real;
  double amplitude = 0.0;
  double duration = 0.0;
  std::string label;
};

enum class ScheduleSpace { two_mode_linear, three_mode };

struct ScheduleMetadata {
  std::vector<std::string> warnings;
  double strong_pulse_ratio = 0.0;   // max |amplitude| in units of nu
  double displacement_area = 0.0;    // sum |G|^2 duration over coupling segments
  double swap_rate = 0.0;            // exchange coefficient per window time (0: n/a)
  double swap_time = 0.0;            // wall time to a full quantum swap (0: n/a)
};

struct PulseSchedule {
  ScheduleSpace space = ScheduleSpace::two_mode_linear;
  std::vector<PulseSegment> segments;
  QuadraticHamiltonian predicted_effective;  // two-mode schedules
  Polynomial predicted_terms;                // three-mode schedules
  double effective_window = 0.0;             // window the prediction refers to
  ScheduleMetadata metadata;

  double total_duration() const;
  std::vector<double> time_vector() const;  // cumulative segment end times
};

// Four segments {pulse(t1), window(tf), counter(t1), compensator(t1)}: the
// +-sqrt(2)G coupling pulses bracket the window and the real-quadrature
// compensator flips the sign of the x_c x_m term so the window carries
// 2 G t1 nu (x_c x_m + p_c p_m) at delta = nu. Off-resonance compiles with a
// warning in the metadata, never a hard error.
PulseSchedule compile_linear_beamsplitter(const SystemParams& p, double g, double t1,
                                          double tf);

// Same bracket with inverted pulse order and no compensator; the window
// carries 2 G t1 (delta x_c x_m - nu p_c p_m), a two-mode squeezer at
// delta = nu.
PulseSchedule compile_linear_blue_sideband(const SystemParams& p, double g, double t1,
                                           double tf);

// Nested three-mode schedule: two mirrored {x_a pulse, p_a shear, x_a pulse}
// triples bracket the swap window tf_prime, plus a per-cycle x_a counter
// pulse. The shear amplitude (alpha+2) delta Omega t1 / 2 tunes the p_a
// leftover so the window Hamiltonian gains
//   (alpha-2)/2 delta g0 tau1 x_s x_m + nu g0 tau1 p_s p_m,
// tau1 = Omega t1 (2 t1 + tf), an exchange at delta = 2 nu / (alpha - 2).
// A full swap needs the modes degenerate too (delta = nu), so alpha = 4 is
// the swap point. predicted_terms is the window generator inside one cycle's
// pulse frame, closed by the counter pulse; evolving it alone across many
// windows is not a model of the repeated cycle (its drive term parks the
// a mode off-center and the retained cubic then skews the exchange).
PulseSchedule compile_nonlinear_swap(const SystemParams& p, double omega, double t1,
                                     double tf, double tf_prime, double alpha);

// Concatenates copies of the schedule with durations scaled by 1/repetitions
// and amplitudes unchanged, truncating the final partial cycle at the exact
// original duration. repetitions = 1 returns the schedule unchanged;
// otherwise the effective-Hamiltonian prediction is dropped (recompile for a
// per-cycle model) and a note is added to the metadata.
PulseSchedule trotterize(const PulseSchedule& s, double repetitions);

// Coupling-space view of a two-mode schedule; throws for three-mode targets.
std::vector<CouplingSegment> to_coupling_segments(const PulseSchedule& s);

// H = delta (n_a + n_s) + nu n_m + g0 (x_a x_s + p_a p_s) x_m as a polynomial
// over (x_a, p_a, x_s, p_s, x_m, p_m), constants dropped.
Polynomial three_mode_hamiltonian(const SystemParams& p);

// Per-segment Hamiltonians of a three-mode schedule, ready for the
// number-state engine; throws for two-mode coupling targets.
std::vector<std::pair<Polynomial, double>> segment_polynomials(
    const SystemParams& p, const PulseSchedule& s);

// Static report for the single-cavity nonlinear sequence: the subsequence
// with pulse area omega * t_p generates a p_c x_m pulse of strength
// sqrt(2) g0 omega t_p together with an uncounterable x_m driving; nesting
// that pulse for t1 yields an exchange plus quadratic leftovers that a
// Bogoliubov change of frame absorbs into shifted frequencies. Cavity lives
// on the (x_a, p_a) slots of the polynomial, mechanics on (x_m, p_m).
// Diagnostic only; the two-cavity schedule is the one meant to be run.
struct SingleCavityDiagnostic {
  double pulse_strength = 0.0;  // generated p_c x_m coefficient
  double mech_drive = 0.0;      // x_m driving coefficient (frame bookkeeping)
  Polynomial effective;         // exact window Hamiltonian
  BogoliubovParams cavity_absorption;
  BogoliubovParams mech_absorption;
};
SingleCavityDiagnostic single_cavity_diagnostic(const SystemParams& p, double omega,
                                                double t_p, double t1);

}  // namespace optopulse
