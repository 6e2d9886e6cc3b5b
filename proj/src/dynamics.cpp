#include "qqm/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "qqm/diagnostics.hpp"
#include "qqm/errors.hpp"

namespace qqm {

namespace {

const Quaternion kI = Quaternion::i();

double min_spacing(const Grid& g) {
  double h = g.spacing(0);
  for (int a = 1; a < g.dims(); ++a) h = std::min(h, g.spacing(a));
  return h;
}

double cfl_limit(const Grid& g, const Units& u) {
  const double h = min_spacing(g);
  return 0.5 * u.mass * h * h / u.hbar;
}

void check_cfl(const Grid& g, double dt, const Units& u) {
  const double limit = cfl_limit(g, u);
  if (dt > limit) {
    std::ostringstream os;
    os << "dt = " << dt << " exceeds m h^2 / (2 hbar) = " << limit
       << "; RK4 may be unstable at this resolution";
    warn(os.str());
  }
}

EvolutionState rk4(const EvolutionState& s) {
  const double dt = s.dt;
  const LinearOp h0 = s.hamiltonian(s.t);
  const LinearOp h1 = s.hamiltonian(s.t + 0.5 * dt);
  const LinearOp h2 = s.hamiltonian(s.t + dt);
  const QField k1 = time_derivative(h0, s.psi, s.equation, s.units);
  const QField k2 = time_derivative(h1, s.psi + (0.5 * dt) * k1, s.equation, s.units);
  const QField k3 = time_derivative(h1, s.psi + (0.5 * dt) * k2, s.equation, s.units);
  const QField k4 = time_derivative(h2, s.psi + dt * k3, s.equation, s.units);

  EvolutionState out = s;
  out.psi = s.psi + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  out.t = s.t + dt;
  const double nrm = out.psi.all_finite() ? norm(out.psi) : NAN;
  if (!std::isfinite(nrm)) {
    double last = s.norm_history.empty() ? norm(s.psi) : s.norm_history.back().second;
    std::ostringstream os;
    os << "evolution diverged at t = " << out.t << " (last finite norm " << last << ")";
    throw DivergenceError(os.str(), out.t, last);
  }
  out.norm_history.emplace_back(out.t, nrm);
  return out;
}

double hermite(int n, double x) {
  double h0 = 1.0, h1 = 2.0 * x;
  if (n == 0) return h0;
  for (int k = 1; k < n; ++k) {
    const double h2 = 2.0 * x * h1 - 2.0 * k * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

void require_snapshots(const ObservationSeries& s, const char* what) {
  if (s.snapshots.size() < 3 || s.snapshots.size() != s.times.size())
    throw ConfigError(std::string(what) +
                      ": series needs stored snapshots at three or more records");
}

/// field sum_a x_a d_a f over active axes.
QField r_dot_grad(const QField& f) {
  const Grid& g = f.grid();
  QField out(g);
  for (int a = 0; a < g.dims(); ++a) {
    const QField d = gradient(f, a);
    for (std::size_t n = 0; n < g.size(); ++n) out[n] = out[n] + g.position(n)[static_cast<std::size_t>(a)] * d[n];
  }
  return out;
}

QField partial_or_zero(const QField& f, int axis) {
  if (axis >= f.grid().dims()) return QField(f.grid());
  return gradient(f, axis);
}

double ex(const LinearOp& op, const QField& psi) { return expect(op, psi, ExpectMode::raw); }

}  // namespace

HamiltonianFn constant_hamiltonian(LinearOp h) {
  return [h = std::move(h)](double) { return h; };
}

QField time_derivative(const LinearOp& h, const QField& psi, Equation eq, const Units& units) {
  const QField hpsi = h(psi);
  const double c = -1.0 / units.hbar;
  return eq == Equation::right ? c * (hpsi * kI) : c * (kI * hpsi);
}

EvolutionState step(const EvolutionState& state) {
  if (!(state.dt > 0.0)) throw PreconditionError("step: dt must be positive");
  check_cfl(state.psi.grid(), state.dt, state.units);
  return rk4(state);
}

double eigen_residual(const LinearOp& h, const QField& psi, double energy) {
  return l2_norm(h(psi) - energy * psi) / l2_norm(psi);
}

StateFactory stationary_state(const QField& phi, double energy, const Quaternion& q0,
                              const LinearOp& h, const Units& units, Equation eq) {
  if (std::abs(abs(q0) - 1.0) > 1e-12)
    throw PreconditionError("stationary_state: |q0| must be 1");
  const double r = eigen_residual(h, phi, energy);
  if (r >= 1e-3) {
    std::ostringstream os;
    os << "stationary_state: ||H phi - E phi|| / ||phi|| = " << r << " (limit 1e-3)";
    throw PreconditionError(os.str());
  }
  const QField base = phi * q0;
  const double hbar = units.hbar;
  return [base, energy, hbar, eq](double t) {
    const Quaternion phase(std::cos(energy * t / hbar), -std::sin(energy * t / hbar), 0.0, 0.0);
    return eq == Equation::right ? base * phase : phase * base;
  };
}

// ---------------------------------------------------------------------------

QField ho_eigenfunction(const Grid& grid, int n, double omega, const Units& units) {
  if (n < 0) throw ConfigError("ho_eigenfunction: n must be non-negative");
  const double a = std::sqrt(units.mass * omega / units.hbar);
  const double c0 = std::pow(units.mass * omega / (std::numbers::pi * units.hbar), 0.25);
  const int dims = grid.dims();
  auto one = [&](int k, double x) {
    const double xi = a * x;
    return c0 / std::sqrt(std::pow(2.0, k) * factorial(k)) * hermite(k, xi) *
           std::exp(-0.5 * xi * xi);
  };
  return QField::sample(grid, [&](double x, double y, double z) {
    double v = one(n, x);
    if (dims > 1) v *= one(0, y);
    if (dims > 2) v *= one(0, z);
    return Quaternion(v);
  });
}

double ho_energy(const Grid& grid, int n, double omega, const Units& units) {
  return units.hbar * omega * (n + 0.5 * grid.dims());
}

QField gaussian_packet(const Grid& grid, std::array<double, 3> x0, std::array<double, 3> k0,
                       double sigma) {
  if (!(sigma > 0.0)) throw ConfigError("sigma: must be positive");
  const int dims = grid.dims();
  const double c = std::pow(2.0 * std::numbers::pi * sigma * sigma, -0.25);
  return QField::sample(grid, [&](double x, double y, double z) {
    const double r[3] = {x, y, z};
    Complex v = 1.0;
    for (int a = 0; a < dims; ++a) {
      const auto u = static_cast<std::size_t>(a);
      const double d = r[a] - x0[u];
      v *= c * std::exp(Complex(-d * d / (4.0 * sigma * sigma), k0[u] * r[a]));
    }
    return Quaternion(v);
  });
}

QField plane_wave(const Grid& grid, std::array<double, 3> k) {
  double vol = 1.0;
  for (int a = 0; a < grid.dims(); ++a) vol *= grid.length(a);
  const double c = 1.0 / std::sqrt(vol);
  return QField::sample(grid, [&](double x, double y, double z) {
    const double phase = k[0] * x + k[1] * y + k[2] * z;
    return Quaternion(c * std::cos(phase), c * std::sin(phase), 0.0, 0.0);
  });
}

QField random_smooth_field(const Grid& grid, unsigned long long seed, int max_mode, int n_modes) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> mode(-max_mode, max_mode);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  struct Mode {
    std::array<double, 3> k;
    double phase;
    Quaternion amp;
  };
  std::vector<Mode> modes;
  for (int m = 0; m < n_modes; ++m) {
    Mode md{{0, 0, 0}, 0, {}};
    for (int a = 0; a < 3; ++a) {
      const int ma = mode(rng);
      if (a < grid.dims())
        md.k[static_cast<std::size_t>(a)] = 2.0 * std::numbers::pi * ma / grid.length(a);
    }
    md.phase = angle(rng);
    const double c0 = unit(rng), c1 = unit(rng), c2 = unit(rng), c3 = unit(rng);
    md.amp = Quaternion(c0, c1, c2, c3);
    modes.push_back(md);
  }
  return QField::sample(grid, [&](double x, double y, double z) {
    Quaternion v;
    for (const auto& md : modes)
      v = v + std::cos(md.k[0] * x + md.k[1] * y + md.k[2] * z + md.phase) * md.amp;
    return v;
  });
}

// ---------------------------------------------------------------------------

double ObservationSeries::interval() const {
  if (times.size() < 2) throw PreconditionError("series has fewer than two records");
  return times[1] - times[0];
}

const std::vector<double>& ObservationSeries::channel(const std::string& name) const {
  for (std::size_t c = 0; c < channels.size(); ++c)
    if (channels[c] == name) return values[c];
  throw ConfigError(name + ": no such channel in series");
}

ObservationSeries evolve(const QField& psi0, const HamiltonianFn& h, double t_final, double dt,
                         const std::vector<Observer>& observers, const EvolveOptions& opts) {
  if (!(dt > 0.0)) throw ConfigError("dt: must be positive");
  if (!(t_final >= 0.0)) throw ConfigError("t_final: must be non-negative");
  if (opts.record_every < 1) throw ConfigError("record_every: must be at least 1");
  const long long steps = std::llround(t_final / dt);
  if (std::abs(steps * dt - t_final) > 1e-9 * std::max(1.0, t_final))
    throw ConfigError("t_final: must be an integer multiple of dt");

  ObservationSeries out;
  out.equation = opts.equation;
  out.units = opts.units;
  for (const auto& o : observers) out.channels.push_back(o.name);
  out.values.resize(observers.size());

  EvolutionState s{0.0, psi0, h, dt, opts.equation, opts.units, {}};
  auto record = [&] {
    out.times.push_back(s.t);
    for (std::size_t c = 0; c < observers.size(); ++c)
      out.values[c].push_back(observers[c].fn(s.t, s.psi));
    if (opts.store_snapshots) out.snapshots.push_back(s.psi);
  };

  if (steps > 0) check_cfl(psi0.grid(), dt, opts.units);
  record();
  for (long long k = 1; k <= steps; ++k) {
    s = rk4(s);
    s.t = k * dt;  // avoid drift from repeated addition
    if (k % opts.record_every == 0) record();
  }
  return out;
}

std::vector<double> centered_rate(const std::vector<double>& v, double interval) {
  std::vector<double> out;
  for (std::size_t k = 1; k + 1 < v.size(); ++k)
    out.push_back((v[k + 1] - v[k - 1]) / (2.0 * interval));
  return out;
}

double ResidualSeries::max_abs() const {
  double m = 0.0;
  for (double r : residual) m = std::max(m, std::abs(r));
  return m;
}

// ---------------------------------------------------------------------------

double ContinuityResidual::max_abs(double margin) const {
  double m = 0.0;
  for (const auto& r : residual)
    for (std::size_t n = 0; n < r.values.size(); ++n)
      if (margin <= 0.0 || r.grid.is_interior(n, margin)) m = std::max(m, std::abs(r.values[n]));
  return m;
}

ContinuityResidual continuity_residual(const ObservationSeries& series, const GaugePotential& g,
                                       const ScalarPotential& u) {
  require_snapshots(series, "continuity_residual");
  const double dt = series.interval();
  ContinuityResidual out;
  std::vector<ContinuityFields> f;
  for (const auto& psi : series.snapshots) f.push_back(continuity_fields(psi, g, u, series.units));
  for (std::size_t k = 1; k + 1 < f.size(); ++k) {
    const RealField div = f[k].div_j();
    RealField r{div.grid, std::vector<double>(div.values.size())};
    for (std::size_t n = 0; n < r.values.size(); ++n) {
      const double drho = (f[k + 1].rho.values[n] - f[k - 1].rho.values[n]) / (2.0 * dt);
      r.values[n] = drho + div.values[n] - f[k].g.values[n];
    }
    out.times.push_back(series.times[k]);
    out.residual.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------

double momentum_force_integral(const QField& psi, const ScalarPotential& u, int axis) {
  const QField d = partial_or_zero(psi, axis);
  const QField& U = u.field();
  const QField integrand = U * psi * conj(d) + d * conj(psi) * conj(U);
  return integrate(integrand).x0();
}

double momentum_force_expectation(const QField& psi, const ScalarPotential& u, int axis) {
  const QField& U = u.field();
  const LinearOp du = multiply_left(-partial_or_zero(U, axis), "-dU");
  const LinearOp ud = compose(multiply_left(-U, "-U"), derivative(axis));
  return 2.0 * ex(du, psi) + 2.0 * ex(ud, psi);
}

EhrenfestReport ehrenfest_check(const ObservationSeries& series, const GaugePotential& g,
                                const ScalarPotential& u) {
  require_snapshots(series, "ehrenfest_check");
  const Grid& grid = series.snapshots.front().grid();
  const Units& units = series.units;
  const double dt = series.interval();
  const std::size_t nrec = series.snapshots.size();
  EhrenfestReport out;
  for (std::size_t k = 1; k + 1 < nrec; ++k) out.times.push_back(series.times[k]);

  for (int a = 0; a < grid.dims(); ++a) {
    const auto ua = static_cast<std::size_t>(a);
    const LinearOp x = position(grid, a);
    const LinearOp pi = generalized_momentum(g, a, units);
    const LinearOp p = momentum(a, units);
    const LinearOp ux = bar_i(compose(multiply_left(u.field(), "U"), x));
    std::vector<double> xs, ps;
    for (const auto& psi : series.snapshots) {
      xs.push_back(ex(x, psi));
      ps.push_back(ex(p, psi));
    }
    out.dx_dt[ua] = centered_rate(xs, dt);
    out.dp_dt[ua] = centered_rate(ps, dt);
    for (std::size_t k = 1; k + 1 < nrec; ++k) {
      const QField& psi = series.snapshots[k];
      const double pim = ex(pi, psi) / units.mass;
      const double corr = -(2.0 / units.hbar) * ex(ux, psi);
      out.pi_over_m[ua].push_back(pim);
      out.source_correction[ua].push_back(corr);
      out.position_residual[ua].push_back(out.dx_dt[ua][k - 1] - pim - corr);
      const double fi = momentum_force_integral(psi, u, a);
      const double fe = momentum_force_expectation(psi, u, a);
      out.integral_form[ua].push_back(fi);
      out.expectation_form[ua].push_back(fe);
      out.integral_residual[ua].push_back(out.dp_dt[ua][k - 1] - fi);
      out.expectation_residual[ua].push_back(out.dp_dt[ua][k - 1] - fe);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

DynamicsForm parse_dynamics_form(const std::string& tag) {
  if (tag == "bar") return DynamicsForm::bar;
  if (tag == "plain") return DynamicsForm::plain;
  if (tag == "physical") return DynamicsForm::physical;
  throw ConfigError("form: unknown expectation-dynamics form '" + tag +
                    "' (allowed: bar, plain, physical)");
}

ResidualSeries expectation_dynamics_residual(const LinearOp& op, const ObservationSeries& series,
                                             const LinearOp& h, DynamicsForm form,
                                             const std::optional<LinearOp>& d_op_dt) {
  require_snapshots(series, "expectation_dynamics_residual");
  if (series.equation != Equation::right)
    throw PreconditionError("expectation_dynamics_residual: series was evolved with the left form");
  const double inv_hbar = 1.0 / series.units.hbar;
  const LinearOp obar = bar_i(op);

  LinearOp tracked = obar, rhs_op = commutator(op, h);
  if (form == DynamicsForm::plain) {
    tracked = op;
    rhs_op = commutator(h, obar);
  } else if (form == DynamicsForm::physical) {
    tracked = op + obar;
    rhs_op = commutator(op - obar, h);
  }
  std::optional<LinearOp> explicit_op;
  if (d_op_dt) {
    if (form == DynamicsForm::bar) explicit_op = bar_i(*d_op_dt);
    else if (form == DynamicsForm::plain) explicit_op = *d_op_dt;
    else explicit_op = *d_op_dt + bar_i(*d_op_dt);
  }

  std::vector<double> track;
  for (const auto& psi : series.snapshots) track.push_back(ex(tracked, psi));
  ResidualSeries out;
  out.lhs = centered_rate(track, series.interval());
  for (std::size_t k = 1; k + 1 < series.snapshots.size(); ++k) {
    const QField& psi = series.snapshots[k];
    double rhs = inv_hbar * ex(rhs_op, psi);
    if (explicit_op) rhs += ex(*explicit_op, psi);
    out.times.push_back(series.times[k]);
    out.rhs.push_back(rhs);
    out.residual.push_back(out.lhs[k - 1] - rhs);
  }
  return out;
}

// ---------------------------------------------------------------------------

VirialReport virial_report(const QField& psi, const ScalarPotential& u, const Units& units,
                           Stationarity check) {
  const Grid& grid = psi.grid();
  const GaugePotential zero(grid);
  const LinearOp h = hamiltonian(zero, u, units);
  VirialReport r;

  const double nrm = norm(psi);
  const double energy = ex(h, psi) / nrm;
  r.eigen_residual = eigen_residual(h, psi, energy);
  if (check == Stationarity::require && r.eigen_residual >= 1e-3) {
    std::ostringstream os;
    os << "virial_report: state is not stationary (||H psi - E psi|| / ||psi|| = "
       << r.eigen_residual << ")";
    throw PreconditionError(os.str());
  }

  const QField& U = u.field();
  const QField rgu = r_dot_grad(U);
  const QField rgu_c = r_dot_grad(conj(U));
  r.kinetic = ex(momentum_squared(units), psi) / units.mass;
  r.real_grad = ex(multiply_left(0.5 * (rgu + rgu_c), "r.grad Re U"), psi);
  r.imag_grad = ex(bar_i(multiply_left(0.5 * (rgu - rgu_c), "r.grad Im U")), psi);

  const LinearOp rp = r_dot_p(grid, units);
  const LinearOp tracked = rp + bar_i(rp);
  const double dt = std::min(1e-3, 0.25 * units.mass * std::pow(min_spacing(grid), 2) / units.hbar);
  const ObservationSeries s =
      evolve(psi, constant_hamiltonian(h), 2.0 * dt, dt,
             {{"rp", [&](double, const QField& f) { return ex(tracked, f); }}},
             {1, false, Equation::right, units});
  r.lhs_rate = centered_rate(s.values[0], dt).front();
  r.residual = r.lhs_rate - r.kinetic + r.real_grad - r.imag_grad;

  double peak = 0.0, edge = 0.0;
  double margin = 0.0;
  for (int a = 0; a < grid.dims(); ++a) margin = std::max(margin, 2.0 * grid.spacing(a));
  for (std::size_t n = 0; n < psi.size(); ++n) {
    const double v = abs(psi[n]);
    peak = std::max(peak, v);
    if (!grid.is_interior(n, margin)) edge = std::max(edge, v);
  }
  r.degenerate = edge > 1e-6 * peak;
  return r;
}

// ---------------------------------------------------------------------------

GaugeSchedule GaugeSchedule::fixed(const GaugePotential& g) {
  return {[g](double) { return g; }, {}};
}

double LorentzReport::max_abs_residual() const {
  double m = 0.0;
  for (const auto& v : residual)
    for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double LorentzReport::max_abs_residual_pi() const {
  double m = 0.0;
  for (const auto& v : residual_pi)
    for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

LorentzReport lorentz_report(const ObservationSeries& series, const GaugePotential& g,
                             const ScalarPotential& u) {
  return lorentz_report(series, GaugeSchedule::fixed(g), u);
}

LorentzReport lorentz_report(const ObservationSeries& series, const GaugeSchedule& gauge,
                             const ScalarPotential& u) {
  require_snapshots(series, "lorentz_report");
  const Grid& grid = series.snapshots.front().grid();
  grid.require_3d("lorentz_report");
  const Units& units = series.units;
  const double hbar = units.hbar, m = units.mass;
  const double dt = series.interval();
  const std::size_t nrec = series.snapshots.size();
  LorentzReport out;

  std::array<std::vector<double>, 3> pis, pibars;
  for (std::size_t k = 0; k < nrec; ++k) {
    const GaugePotential g = gauge.at(series.times[k]);
    for (int c = 0; c < 3; ++c) {
      const LinearOp pi = generalized_momentum(g, c, units);
      pis[static_cast<std::size_t>(c)].push_back(ex(pi, series.snapshots[k]));
      pibars[static_cast<std::size_t>(c)].push_back(ex(bar_i(pi), series.snapshots[k]));
    }
  }
  for (int c = 0; c < 3; ++c) {
    const auto uc = static_cast<std::size_t>(c);
    out.d_pi[uc] = centered_rate(pis[uc], dt);
    out.d_pi_bar[uc] = centered_rate(pibars[uc], dt);
    for (std::size_t k = 0; k < out.d_pi[uc].size(); ++k)
      out.force[uc].push_back(out.d_pi[uc][k] + out.d_pi_bar[uc][k]);
  }

  const QField& U = u.field();
  const QField u_re = 0.5 * (U + conj(U));
  const QField u_im = 0.5 * (U - conj(U));
  std::array<QField, 3> d_re, d_im;
  for (int c = 0; c < 3; ++c) {
    d_re[static_cast<std::size_t>(c)] = partial_or_zero(u_re, c);
    d_im[static_cast<std::size_t>(c)] = partial_or_zero(u_im, c);
  }
  // Without a rate the schedule is static: B and curl B are computed once.
  std::optional<MagneticField> mag;
  std::optional<QVectorField> curl_b;

  for (std::size_t k = 1; k + 1 < nrec; ++k) {
    const QField& psi = series.snapshots[k];
    const double t = series.times[k];
    out.times.push_back(t);
    const GaugePotential g = gauge.at(t);
    if (!mag || gauge.rate) {
      mag = magnetic_field(g);
      curl_b = curl(mag->field);
    }
    const QVectorField& A = g.field();
    const QVectorField& B = mag->field;
    std::optional<QVectorField> a_dot;
    if (gauge.rate) a_dot = gauge.rate(t);

    std::array<LinearOp, 3> pi_ops{generalized_momentum(g, 0, units), generalized_momentum(g, 1, units),
                                   generalized_momentum(g, 2, units)};
    auto pi2 = [&pi_ops](const QField& f) {
      QField acc(f.grid());
      for (const auto& pi : pi_ops) acc = acc + pi(pi(f));
      return acc;
    };
    std::array<QField, 3> p_psi, b_psi_i, pi_psi;
    for (std::size_t a = 0; a < 3; ++a) {
      p_psi[a] = momentum(static_cast<int>(a), units)(psi);
      b_psi_i[a] = B[static_cast<int>(a)] * psi * kI;
      pi_psi[a] = pi_ops[a](psi);
    }
    const QField pi2_psi = pi2(psi);
    const QField u_psi_i = U * psi * kI;

    for (int c = 0; c < 3; ++c) {
      const auto uc = static_cast<std::size_t>(c);
      // (B_a|i) p_b - p_a (B_b|i) and A_a B_b - B_a A_b, contracted with eps_cab.
      QField mag_img(grid), ab(grid);
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
          const int e = levi_civita(c, a, b);
          if (e == 0) continue;
          const double sgn = e;
          const auto ub = static_cast<std::size_t>(b);
          mag_img = mag_img + sgn * (B[a] * p_psi[ub] * kI - momentum(a, units)(b_psi_i[ub]));
          ab = ab + sgn * (A[a] * B[b] - B[a] * A[b]);
        }
      const double magnetic = hbar / (2.0 * m) * expect_image(mag_img, psi, "magnetic");
      const double gauge_cross = hbar * hbar / (2.0 * m) * expect_image(ab * psi, psi, "AxB-BxA");
      const double a_rate = a_dot ? hbar * expect_image((*a_dot)[c] * psi * kI, psi, "dA/dt") : 0.0;
      const double real_grad = -expect_image(d_re[uc] * psi, psi, "d Re U");
      const double imag_grad = expect_image(d_im[uc] * psi * kI, psi, "d Im U");
      // [U, (A_c|i)] Psi = U A_c Psi i - A_c U Psi i
      const double u_a_bar = expect_image(U * (A[c] * psi * kI) - A[c] * u_psi_i, psi, "[U,(A|i)]");

      out.magnetic[uc].push_back(magnetic);
      out.gauge_cross[uc].push_back(gauge_cross);
      out.a_rate[uc].push_back(a_rate);
      out.real_grad[uc].push_back(real_grad);
      out.imag_grad[uc].push_back(imag_grad);
      out.u_a_bar[uc].push_back(u_a_bar);
      const std::size_t j = k - 1;
      out.residual[uc].push_back(out.force[uc][j] - (magnetic + gauge_cross + a_rate + real_grad +
                                                     imag_grad + u_a_bar));
      out.residual_pi[uc].push_back(out.d_pi[uc][j] - (gauge_cross + real_grad + a_rate));
      out.residual_pi_bar[uc].push_back(out.d_pi_bar[uc][j] - (magnetic + imag_grad + u_a_bar));
      // Pi commutes with the right i, so [Pi^2, (Pi_c|i)] Psi = (Pi^2 Pi_c Psi - Pi_c Pi^2 Psi) i.
      const QField comm = (pi2(pi_psi[uc]) - pi_ops[uc](pi2_psi)) * kI;
      out.commutator_raw[uc].push_back(expect_image(comm, psi, "[Pi^2,(Pi|i)]") / (2.0 * m * hbar));
      out.curl_b[uc].push_back(expect_image((*curl_b)[c] * psi, psi, "curl B"));
    }
  }
  return out;
}

}  // namespace qqm
