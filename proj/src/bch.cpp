#include "optopulse/bch.hpp"

#include <cmath>
#include <cstdio>

#include <unsupported/Eigen/MatrixFunctions>

namespace optopulse {

namespace {

constexpr double k_nu = 1.0;
const double k_sqrt2 = std::sqrt(2.0);

std::string format_msg(const char* fmt, double a, double b = 0.0, double c = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), fmt, a, b, c);
  return buf;
}

// exp of an area generator: V and c already carry the pulse areas
AffinePropagator impulsive_factor(const QuadraticHamiltonian& area) {
  return segment_propagator(area, 1.0);
}

// h with exp over `window` equal to the affine map. The principal log needs
// the rotation to stay short of a half turn.
QuadraticHamiltonian hamiltonian_log(const AffinePropagator& prop, double window) {
  Eigen::EigenSolver<Eigen::Matrix4d> es(prop.S);
  for (int i = 0; i < 4; ++i) {
    auto ev = es.eigenvalues()(i);
    if (ev.real() < 0.0 && std::abs(ev.imag()) < 1e-9 * std::abs(ev))
      throw NumericsError("window propagator reaches a half turn; no principal log");
  }
  Eigen::Matrix<double, 5, 5> aug = Eigen::Matrix<double, 5, 5>::Identity();
  aug.topLeftCorner<4, 4>() = prop.S;
  aug.topRightCorner<4, 1>() = prop.d;
  Eigen::Matrix<double, 5, 5> lg = aug.log();
  if ((lg.exp() - aug).norm() > 1e-9 * (1.0 + aug.norm()))
    throw NumericsError("matrix log of the window propagator failed to round-trip");
  Eigen::Matrix4d sig = symplectic_form4();
  QuadraticHamiltonian h;
  Eigen::Matrix4d v = -sig * lg.topLeftCorner<4, 4>() / window;
  h.V = 0.5 * (v + v.transpose());
  if ((v - h.V).norm() > 1e-8 * (1.0 + h.V.norm()))
    throw NumericsError("window log generator is not a quadrature Hamiltonian");
  h.c = -sig * lg.topRightCorner<4, 1>() / window;
  return h;
}

double max_abs_amplitude(const std::vector<PulseSegment>& segs) {
  double m = 0.0;
  for (const auto& s : segs) m = std::max(m, std::abs(s.amplitude));
  return m;
}

void check_linear_inputs(const SystemParams& p, double g, double t1, double tf) {
  p.validate();
  if (!(t1 > 0.0) || !(tf > 0.0))
    throw ConfigError("pulse and window durations must be positive");
  if (!std::isfinite(g)) throw ConfigError("pulse strength must be finite");
}

}  // namespace

double PulseSchedule::total_duration() const {
  double t = 0.0;
  for (const auto& s : segments) t += s.duration;
  return t;
}

std::vector<double> PulseSchedule::time_vector() const {
  std::vector<double> t;
  t.reserve(segments.size());
  double acc = 0.0;
  for (const auto& s : segments) t.push_back(acc += s.duration);
  return t;
}

PulseSchedule compile_linear_beamsplitter(const SystemParams& p, double g, double t1,
                                          double tf) {
  check_linear_inputs(p, g, t1, tf);
  const double s = 2.0 * g * t1;              // exchange pulse area
  const double comp = 2.0 * k_sqrt2 * g * p.delta * tf;

  PulseSchedule out;
  out.space = ScheduleSpace::two_mode_linear;
  out.segments = {
      {ControlTarget::g_imag, k_sqrt2 * g, t1, "pulse"},
      {ControlTarget::g_imag, 0.0, tf, "window"},
      {ControlTarget::g_imag, -k_sqrt2 * g, t1, "counter"},
      {ControlTarget::g_real, comp, t1, "compensator"},
  };

  // Impulsive design product: area exponentials for the pulses around the
  // bare window. The pulse factors conjugate the window on their own, so the
  // window factor carries H0, not a pre-conjugated Hamiltonian.
  QuadraticHamiltonian h0 = build_linear_hamiltonian(p, complexd(0.0, 0.0));
  AffinePropagator window = segment_propagator(h0, tf);

  const double kick = 2.0 * g * g * t1;  // |G|^2 area of each coupling pulse
  QuadraticHamiltonian a1, a3, a4;
  a1.V(1, 2) = a1.V(2, 1) = -s;
  a1.c(2) = kick;
  a3.V(1, 2) = a3.V(2, 1) = s;
  a3.c(2) = kick;
  a4.V(0, 2) = a4.V(2, 0) = 2.0 * s * p.delta * tf;
  a4.c(2) = comp * comp * t1;

  AffinePropagator design = compose({impulsive_factor(a4), impulsive_factor(a3),
                                     window, impulsive_factor(a1)});
  out.predicted_effective = hamiltonian_log(design, tf);
  out.effective_window = tf;

  out.metadata.strong_pulse_ratio = max_abs_amplitude(out.segments) / k_nu;
  out.metadata.displacement_area = 2.0 * kick + comp * comp * t1;
  if (std::abs(p.delta - k_nu) > 1e-9)
    out.metadata.warnings.push_back(
        format_msg("detuning %.6g is off the exchange resonance (nu); window terms "
                   "are unbalanced",
                   p.delta));
  if (t1 >= tf)
    out.metadata.warnings.push_back("pulse width is not small against the window");
  if (s != 0.0) {
    out.metadata.swap_rate = std::abs(s) * k_nu;
    out.metadata.swap_time =
        0.5 * M_PI / (out.metadata.swap_rate * tf) * out.total_duration();
  }
  return out;
}

PulseSchedule compile_linear_blue_sideband(const SystemParams& p, double g, double t1,
                                           double tf) {
  check_linear_inputs(p, g, t1, tf);
  const double s = 2.0 * g * t1;

  PulseSchedule out;
  out.space = ScheduleSpace::two_mode_linear;
  out.segments = {
      {ControlTarget::g_imag, -k_sqrt2 * g, t1, "pulse"},
      {ControlTarget::g_imag, 0.0, tf, "window"},
      {ControlTarget::g_imag, k_sqrt2 * g, t1, "counter"},
  };

  QuadraticHamiltonian h0 = build_linear_hamiltonian(p, complexd(0.0, 0.0));
  AffinePropagator window = segment_propagator(h0, tf);

  const double kick = 2.0 * g * g * t1;
  QuadraticHamiltonian a1, a3;
  a1.V(1, 2) = a1.V(2, 1) = s;
  a1.c(2) = kick;
  a3.V(1, 2) = a3.V(2, 1) = -s;
  a3.c(2) = kick;

  AffinePropagator design =
      compose({impulsive_factor(a3), window, impulsive_factor(a1)});
  out.predicted_effective = hamiltonian_log(design, tf);
  out.effective_window = tf;

  out.metadata.strong_pulse_ratio = max_abs_amplitude(out.segments) / k_nu;
  out.metadata.displacement_area = 2.0 * kick;
  if (std::abs(p.delta - k_nu) > 1e-9)
    out.metadata.warnings.push_back(
        format_msg("detuning %.6g is off the two-mode resonance (nu)", p.delta));
  if (t1 >= tf)
    out.metadata.warnings.push_back("pulse width is not small against the window");
  return out;
}

PulseSchedule compile_nonlinear_swap(const SystemParams& p, double omega, double t1,
                                     double tf, double tf_prime, double alpha) {
  p.validate();
  if (!(t1 > 0.0) || !(tf > 0.0) || !(tf_prime > 0.0))
    throw ConfigError("all nested-schedule durations must be positive");
  if (!std::isfinite(omega) || !std::isfinite(alpha))
    throw ConfigError("pulse strength and alpha must be finite");
  if (std::abs(alpha - 2.0) < 1e-12)
    throw ConfigError("alpha = 2 puts the exchange resonance at infinite detuning");

  const double q = omega * t1;                          // inner pulse area
  const double shear = (alpha + 2.0) * p.delta * q / 2.0;
  const double t2 = 2.0 * t1 + tf;
  const double tau1 = q * t2;
  const double counter =
      -(alpha / 2.0) * p.delta * p.delta * tau1 * tf_prime / t1;

  PulseSchedule out;
  out.space = ScheduleSpace::three_mode;
  out.segments = {
      {ControlTarget::drive_x_a, omega, t1, "inner+"},
      {ControlTarget::drive_p_a, shear, tf, "shear+"},
      {ControlTarget::drive_x_a, -omega, t1, "inner-"},
      {ControlTarget::drive_x_a, 0.0, tf_prime, "swap window"},
      {ControlTarget::drive_x_a, -omega, t1, "inner-"},
      {ControlTarget::drive_p_a, -shear, tf, "shear-"},
      {ControlTarget::drive_x_a, omega, t1, "inner+"},
      {ControlTarget::drive_x_a, counter, t1, "counter"},
  };

  Matrix6d v2 = Matrix6d::Zero();
  v2(3, 4) = v2(4, 3) = p.g0 * q;          // p_s x_m
  Vector6d c2 = Vector6d::Zero();
  c2(1) = -(alpha / 2.0) * p.delta * q;    // p_a
  out.predicted_terms = conjugate_by_quadratic(three_mode_hamiltonian(p), v2, c2, t2);
  out.effective_window = tf_prime;

  const double required = 2.0 * k_nu / (alpha - 2.0);
  if (std::abs(p.delta - required) > 1e-9 * std::max(1.0, std::abs(required)))
    out.metadata.warnings.push_back(
        format_msg("detuning %.6g is off the exchange resonance %.6g for alpha = %.3g",
                   p.delta, required, alpha));
  if (std::abs(q) < 10.0)
    out.metadata.warnings.push_back(
        format_msg("strong-pulse figure Omega t1 = %.3g is below 10", std::abs(q)));
  out.metadata.strong_pulse_ratio = max_abs_amplitude(out.segments) / k_nu;
  out.metadata.swap_rate = k_nu * p.g0 * std::abs(tau1);
  if (out.metadata.swap_rate > 0.0)
    out.metadata.swap_time =
        0.5 * M_PI / (out.metadata.swap_rate * tf_prime) * out.total_duration();
  return out;
}

PulseSchedule trotterize(const PulseSchedule& s, double repetitions) {
  if (!std::isfinite(repetitions) || repetitions < 1.0)
    throw ConfigError("repetitions must be a finite value >= 1");
  if (repetitions == 1.0) return s;
  const double budget = s.total_duration();
  if (!(budget > 0.0)) throw ConfigError("cannot trotterize an empty schedule");

  PulseSchedule out;
  out.space = s.space;
  out.metadata = s.metadata;
  out.metadata.warnings.push_back(
      "trotterized; effective-model prediction dropped, recompile for a per-cycle model");

  const double eps = 1e-9 * budget;
  double spent = 0.0;
  std::size_t i = 0;
  while (budget - spent > eps) {
    const PulseSegment& seg = s.segments[i % s.segments.size()];
    double take = std::min(seg.duration / repetitions, budget - spent);
    if (take > 0.0)
      out.segments.push_back({seg.target, seg.amplitude, take, seg.label});
    spent += take;
    ++i;
    if (out.segments.size() > 1000000)
      throw NumericsError("trotterization produced an unreasonable segment count");
  }
  return out;
}

std::vector<CouplingSegment> to_coupling_segments(const PulseSchedule& s) {
  std::vector<CouplingSegment> out;
  out.reserve(s.segments.size());
  for (const auto& seg : s.segments) {
    switch (seg.target) {
      case ControlTarget::g_real:
        out.push_back({complexd(seg.amplitude, 0.0), seg.duration});
        break;
      case ControlTarget::g_imag:
        out.push_back({complexd(0.0, seg.amplitude), seg.duration});
        break;
      default:
        throw ConfigError("drive targets have no two-mode coupling representation");
    }
  }
  return out;
}

Polynomial three_mode_hamiltonian(const SystemParams& p) {
  Polynomial h;
  h.set({2, 0, 0, 0, 0, 0}, p.delta / 2);
  h.set({0, 2, 0, 0, 0, 0}, p.delta / 2);
  h.set({0, 0, 2, 0, 0, 0}, p.delta / 2);
  h.set({0, 0, 0, 2, 0, 0}, p.delta / 2);
  h.set({0, 0, 0, 0, 2, 0}, k_nu / 2);
  h.set({0, 0, 0, 0, 0, 2}, k_nu / 2);
  h.set({1, 0, 1, 0, 1, 0}, p.g0);
  h.set({0, 1, 0, 1, 1, 0}, p.g0);
  return h;
}

std::vector<std::pair<Polynomial, double>> segment_polynomials(
    const SystemParams& p, const PulseSchedule& s) {
  Polynomial h0 = three_mode_hamiltonian(p);
  std::vector<std::pair<Polynomial, double>> out;
  out.reserve(s.segments.size());
  for (const auto& seg : s.segments) {
    int var;
    switch (seg.target) {
      case ControlTarget::drive_x_a: var = 0; break;
      case ControlTarget::drive_p_a: var = 1; break;
      case ControlTarget::drive_x_s: var = 2; break;
      case ControlTarget::drive_p_s: var = 3; break;
      default:
        throw ConfigError("coupling targets have no three-mode drive representation");
    }
    Polynomial h = h0;
    if (seg.amplitude != 0.0) h += seg.amplitude * Polynomial::variable(var);
    out.emplace_back(std::move(h), seg.duration);
  }
  return out;
}

SingleCavityDiagnostic single_cavity_diagnostic(const SystemParams& p, double omega,
                                                double t_p, double t1) {
  p.validate();
  if (!(t_p > 0.0) || !(t1 > 0.0)) throw ConfigError("pulse durations must be positive");
  if (!std::isfinite(omega)) throw ConfigError("pulse strength must be finite");

  const double q0 = omega * t_p;
  SingleCavityDiagnostic d;
  d.pulse_strength = k_sqrt2 * p.g0 * q0;
  d.mech_drive = p.g0 / k_sqrt2 * q0 * q0;

  // cavity on (x_a, p_a), mechanics on (x_m, p_m); coupling g0 n_c (b + b^dag)
  Polynomial h;
  h.set({2, 0, 0, 0, 0, 0}, p.delta / 2);
  h.set({0, 2, 0, 0, 0, 0}, p.delta / 2);
  h.set({0, 0, 0, 0, 2, 0}, k_nu / 2);
  h.set({0, 0, 0, 0, 0, 2}, k_nu / 2);
  h.set({2, 0, 0, 0, 1, 0}, p.g0 / k_sqrt2);
  h.set({0, 2, 0, 0, 1, 0}, p.g0 / k_sqrt2);
  h.set({0, 0, 0, 0, 1, 0}, -p.g0 / k_sqrt2);

  Matrix6d v = Matrix6d::Zero();
  v(1, 4) = v(4, 1) = d.pulse_strength;  // p_c x_m
  d.effective = conjugate_by_quadratic(h, v, Vector6d::Zero(), t1);

  const double acx = d.effective.coefficient({2, 0, 0, 0, 0, 0});
  const double acp = d.effective.coefficient({0, 2, 0, 0, 0, 0});
  const double amx = d.effective.coefficient({0, 0, 0, 0, 2, 0});
  const double amp = d.effective.coefficient({0, 0, 0, 0, 0, 2});
  if (acx <= 0.0 || acp <= 0.0 || amx <= 0.0 || amp <= 0.0)
    throw ConfigError("quadratic absorption needs positive coefficients on both modes");
  d.cavity_absorption = bogoliubov_from_quadratic(acx, acp);
  d.mech_absorption = bogoliubov_from_quadratic(amx, amp);
  return d;
}

}  // namespace optopulse
