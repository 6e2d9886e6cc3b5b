#include "qqm/left_variant.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qqm/errors.hpp"

namespace qqm {

namespace {

const Quaternion kI = Quaternion::i();

QField partial(const QField& f, int axis) {
  if (axis >= f.grid().dims()) return QField(f.grid());
  return gradient(f, axis);
}

double ex(const LinearOp& op, const QField& psi) { return expect(op, psi, ExpectMode::raw); }

/// i A i as a field.
QField sandwich(const QField& a) { return kI * a * kI; }

QField r_dot_grad(const QField& f) {
  const Grid& g = f.grid();
  QField out(g);
  for (int a = 0; a < g.dims(); ++a) {
    const QField d = gradient(f, a);
    for (std::size_t n = 0; n < g.size(); ++n)
      out[n] = out[n] + g.position(n)[static_cast<std::size_t>(a)] * d[n];
  }
  return out;
}

}  // namespace

LinearOp hamiltonian_left(const GaugePotential& g, const ScalarPotential& u, const Units& units) {
  if (!g.grid().same_as(u.grid())) throw ConfigError("hamiltonian_left: potentials on different grids");
  const double c = units.hbar * units.hbar / (2.0 * units.mass);
  QField iaia(g.grid());
  std::array<QField, 3> iai;
  for (int a = 0; a < 3; ++a) {
    iai[static_cast<std::size_t>(a)] = sandwich(g.field()[a]);
    if (!g.is_zero()) iaia = iaia + iai[static_cast<std::size_t>(a)] * g.field()[a];
  }
  return {[g, u, c, iaia, iai](const QField& psi) {
            if (!g.grid().same_as(psi.grid())) throw ConfigError("hamiltonian_left: grid mismatch");
            QField kin = -laplacian(psi);
            if (!g.is_zero()) {
              for (int a = 0; a < psi.grid().dims(); ++a) {
                kin = kin + gradient(g.field()[a] * psi, a) -
                      iai[static_cast<std::size_t>(a)] * gradient(psi, a);
              }
              kin = kin + iaia * psi;
            }
            return c * kin + u.field() * psi;
          },
          "H_left"};
}

LinearOp generalized_momentum_left(const GaugePotential& g, int axis, const Units& units) {
  const double hbar = units.hbar;
  std::optional<QField> a;
  if (!g.is_zero()) a = g.field()[axis];
  return {[a, axis, hbar](const QField& psi) {
            QField d = partial(psi, axis);
            if (a) d = d - *a * psi;
            return (-hbar) * (kI * d);
          },
          std::string("PiL") + "xyz"[axis], Locality::differential};
}

LinearOp momentum_left(int axis, const Units& units) {
  const double hbar = units.hbar;
  return {[axis, hbar](const QField& psi) {
            psi.grid().require_differentiable(axis);
            return (-hbar) * (kI * gradient(psi, axis));
          },
          std::string("pL") + "xyz"[axis], Locality::differential};
}

ContinuityFields continuity_left(const QField& psi, const GaugePotential& g,
                                 const ScalarPotential& u, const Units& units) {
  if (!psi.grid().same_as(g.grid()) || !psi.grid().same_as(u.grid()))
    throw ConfigError("continuity_left: grid mismatch");
  const Grid& grid = psi.grid();
  const QField psi_c = conj(psi);
  const QField& U = u.field();
  const QField kernel = (1.0 / units.hbar) * (conj(U) * kI - kI * U);
  ContinuityFields out{project_real(psi_c * psi, 1e-12, "rho"),
                       project_real(psi_c * kernel * psi, 1e-12, "g"),
                       {}};
  for (int a = 0; a < 3; ++a) {
    const auto ua = static_cast<std::size_t>(a);
    if (a >= grid.dims()) {
      out.j[ua] = RealField{grid, std::vector<double>(grid.size(), 0.0)};
      continue;
    }
    const QField pi = generalized_momentum_left(g, a, units)(psi);
    out.j[ua] = project_real((0.5 / units.mass) * (psi_c * pi + conj(pi) * psi), 1e-12, "J");
  }
  return out;
}

ContinuityResidual continuity_residual_left(const ObservationSeries& series,
                                            const GaugePotential& g, const ScalarPotential& u) {
  if (series.snapshots.size() < 3)
    throw ConfigError("continuity_residual_left: series needs stored snapshots at three or more records");
  const double dt = series.interval();
  std::vector<ContinuityFields> f;
  for (const auto& psi : series.snapshots) f.push_back(continuity_left(psi, g, u, series.units));
  ContinuityResidual out;
  for (std::size_t k = 1; k + 1 < f.size(); ++k) {
    const RealField div = f[k].div_j();
    RealField r{div.grid, std::vector<double>(div.values.size())};
    for (std::size_t n = 0; n < r.values.size(); ++n)
      r.values[n] = (f[k + 1].rho.values[n] - f[k - 1].rho.values[n]) / (2.0 * dt) +
                    div.values[n] - f[k].g.values[n];
    out.times.push_back(series.times[k]);
    out.residual.push_back(std::move(r));
  }
  return out;
}

LeftForm parse_left_form(const std::string& tag) {
  if (tag == "minus-sandwich") return LeftForm::minus_sandwich;
  if (tag == "cross-sum") return LeftForm::cross_sum;
  if (tag == "plus-sandwich") return LeftForm::plus_sandwich;
  if (tag == "cross-difference") return LeftForm::cross_difference;
  throw ConfigError("form: unknown left dynamics form '" + tag + "' (allowed: minus-sandwich, cross-sum, plus-sandwich, cross-difference)");
}

ResidualSeries expectation_dynamics_left(const LinearOp& op, const ObservationSeries& series,
                                         const LinearOp& h, LeftForm form,
                                         const std::optional<LinearOp>& d_op_dt) {
  if (series.snapshots.size() < 3)
    throw ConfigError("expectation_dynamics_left: series needs stored snapshots at three or more records");
  if (series.equation != Equation::left)
    throw PreconditionError("expectation_dynamics_left: series was evolved with the right form");
  const double inv_hbar = 1.0 / series.units.hbar;

  auto combos = [](const LinearOp& o) {
    const LinearOp oi = right_of_left_i(o);  // O(i Psi)
    const LinearOp io = left_i(o);           // i(O Psi)
    const LinearOp ioi = left_i(oi);         // i O(i Psi)
    return std::array<LinearOp, 4>{o - ioi, oi + io, o + ioi, oi - io};
  };
  const auto c = combos(op);
  // c[0] = O - iOi, c[1] = Oi + iO, c[2] = O + iOi, c[3] = Oi - iO.
  std::size_t tracked = 0;
  LinearOp rhs_op = zero_op();
  switch (form) {
    case LeftForm::minus_sandwich:
      tracked = 0;
      rhs_op = inv_hbar * commutator(h, c[1]);
      break;
    case LeftForm::cross_sum:
      tracked = 1;
      rhs_op = -inv_hbar * commutator(h, c[0]);
      break;
    case LeftForm::plus_sandwich:
      tracked = 2;
      rhs_op = -inv_hbar * anticommutator(h, c[3]);
      break;
    case LeftForm::cross_difference:
      tracked = 3;
      rhs_op = inv_hbar * anticommutator(h, c[2]);
      break;
  }
  std::optional<LinearOp> explicit_op;
  if (d_op_dt) explicit_op = combos(*d_op_dt)[tracked];

  std::vector<double> track;
  for (const auto& psi : series.snapshots) track.push_back(ex(c[tracked], psi));
  ResidualSeries out;
  out.lhs = centered_rate(track, series.interval());
  for (std::size_t k = 1; k + 1 < series.snapshots.size(); ++k) {
    const QField& psi = series.snapshots[k];
    double rhs = ex(rhs_op, psi);
    if (explicit_op) rhs += ex(*explicit_op, psi);
    out.times.push_back(series.times[k]);
    out.rhs.push_back(rhs);
    out.residual.push_back(out.lhs[k - 1] - rhs);
  }
  return out;
}

VirialReport virial_left(const QField& psi, const ScalarPotential& u, const Units& units,
                         Stationarity check) {
  const Grid& grid = psi.grid();
  const GaugePotential zero(grid);
  const LinearOp h = hamiltonian_left(zero, u, units);
  VirialReport r;
  const double energy = ex(h, psi) / norm(psi);
  r.eigen_residual = eigen_residual(h, psi, energy);
  if (check == Stationarity::require && r.eigen_residual >= 1e-3) {
    std::ostringstream os;
    os << "virial_left: state is not stationary (||H psi - E psi|| / ||psi|| = " << r.eigen_residual
       << ")";
    throw PreconditionError(os.str());
  }

  const QField& U = u.field();
  const QField rgu = r_dot_grad(U), rgu_c = r_dot_grad(conj(U));
  r.kinetic = ex(momentum_squared(units), psi) / units.mass;
  r.real_grad = ex(multiply_left(0.5 * (rgu + rgu_c), "r.grad Re U"), psi);
  r.imag_grad = ex(multiply_left(0.5 * (kI * rgu - rgu_c * kI), "r.grad(iU - U*i)"), psi);

  LinearOp rp = zero_op();
  for (int a = 0; a < grid.dims(); ++a) rp = rp + compose(position(grid, a), momentum_left(a, units));
  r.extra = ex(compose(multiply_left(2.0 * u.w(), "2W"), rp), psi);

  const LinearOp tracked = rp + bar_i(rp);
  const double h_min = [&grid] {
    double m = grid.spacing(0);
    for (int a = 1; a < grid.dims(); ++a) m = std::min(m, grid.spacing(a));
    return m;
  }();
  const double dt = std::min(1e-3, 0.25 * units.mass * h_min * h_min / units.hbar);
  const ObservationSeries s =
      evolve(psi, constant_hamiltonian(h), 2.0 * dt, dt,
             {{"rp", [&](double, const QField& f) { return ex(tracked, f); }}},
             {1, false, Equation::left, units});
  r.lhs_rate = centered_rate(s.values[0], dt).front();
  r.residual = r.lhs_rate - r.kinetic + r.real_grad - r.imag_grad - r.extra;

  double peak = 0.0, edge = 0.0;
  for (std::size_t n = 0; n < psi.size(); ++n) {
    const double v = abs(psi[n]);
    peak = std::max(peak, v);
    if (!grid.is_interior(n, 2.0 * h_min)) edge = std::max(edge, v);
  }
  r.degenerate = edge > 1e-6 * peak;
  return r;
}

LeftBracketResiduals commutators_left(const GaugePotential& g, const QField& psi, double margin,
                                      const Units& units) {
  const Grid& grid = psi.grid();
  grid.require_3d("commutators_left");
  const double h2 = units.hbar * units.hbar;
  const QVectorField& A = g.field();
  // dA[a][b] = d_a A_b
  std::array<std::array<QField, 3>, 3> dA;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) dA[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = partial(A[b], a);
  std::array<LinearOp, 3> pi_op{generalized_momentum_left(g, 0, units), generalized_momentum_left(g, 1, units),
                                generalized_momentum_left(g, 2, units)};
  const LinearOp left = left_i(identity_op());

  auto keep = [&grid, margin](std::size_t n) { return grid.is_interior(n, margin); };
  LeftBracketResiduals out;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      const auto ua = static_cast<std::size_t>(a), ub = static_cast<std::size_t>(b);
      const LinearOp& pa = pi_op[ua];
      const LinearOp& pb = pi_op[ub];
      const QField& Aa = A[a];
      const QField& Ab = A[b];
      const QField iAai = sandwich(Aa), iAbi = sandwich(Ab);
      const QField dab = dA[ua][ub], dba = dA[ub][ua];
      const QField ipsi = kI * psi;
      const QField da_psi = partial(psi, a), db_psi = partial(psi, b);

      const std::array<QField, 4> lhs{
          commutator(pa, pb)(psi),
          commutator(pa, compose(pb, left))(psi),
          commutator(pa, compose(left, pb))(psi),
          commutator(pa, compose(left, compose(pb, left)))(psi),
      };
      const std::array<QField, 4> rhs{
          h2 * ((dab - dba) * psi - ((Aa + iAai) * db_psi - (Ab + iAbi) * da_psi) +
                iAai * Ab * psi - iAbi * Aa * psi),
          h2 * (dab * ipsi - kI * dba * psi + (Ab * kI - kI * Ab) * da_psi + iAai * Ab * ipsi +
                kI * Ab * Aa * psi),
          h2 * (kI * (dab - dba) * psi - (Ab * kI - kI * Ab) * da_psi - kI * Aa * Ab * psi +
                Ab * kI * Aa * psi),
          h2 * (kI * dab * ipsi + dba * psi + (Aa + iAai) * db_psi + (Ab + iAbi) * da_psi -
                kI * Aa * Ab * ipsi - Ab * Aa * psi),
      };
      for (std::size_t k = 0; k < 4; ++k) {
        out.residual[k] = std::max(out.residual[k], max_abs(lhs[k] - rhs[k], keep));
        out.scale[k] = std::max(out.scale[k], max_abs(lhs[k], keep));
      }
    }
  }
  return out;
}

}  // namespace qqm
