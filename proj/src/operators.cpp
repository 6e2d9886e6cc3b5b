#include "qqm/operators.hpp"

#include <cmath>
#include <optional>
#include <sstream>

#include "qqm/errors.hpp"

namespace qqm {

namespace {

const Quaternion kI = Quaternion::i();

void require_grid(const Grid& expected, const QField& psi, const char* what) {
  if (!expected.same_as(psi.grid()))
    throw ConfigError(std::string(what) + ": grid mismatch between operator and field");
}

/// d_a Psi on active axes, zero on inactive ones.
QField partial(const QField& psi, int axis) {
  if (axis >= psi.grid().dims()) return QField(psi.grid());
  return gradient(psi, axis);
}

}  // namespace

LinearOp identity_op() {
  return {[](const QField& psi) { return psi; }, "1", Locality::multiplicative};
}

LinearOp zero_op() {
  return {[](const QField& psi) { return QField(psi.grid()); }, "0", Locality::multiplicative};
}

LinearOp multiply_left(QField f, std::string label) {
  return {[f = std::move(f), label](const QField& psi) {
            require_grid(f.grid(), psi, "multiply_left");
            return f * psi;
          },
          label, Locality::multiplicative};
}

LinearOp multiply_right(Quaternion q, std::string label) {
  return {[q](const QField& psi) { return psi * q; }, std::move(label), Locality::multiplicative};
}

LinearOp position(const Grid& grid, int axis) {
  QField x = QField::sample(grid, [axis](double a, double b, double c) {
    const double r[3] = {a, b, c};
    return Quaternion(r[axis]);
  });
  return multiply_left(std::move(x), std::string("r") + "xyz"[axis]);
}

LinearOp derivative(int axis) {
  return {[axis](const QField& psi) { return partial(psi, axis); },
          std::string("d") + "xyz"[axis], Locality::differential};
}

LinearOp compose(const LinearOp& a, const LinearOp& b) {
  return {[a, b](const QField& psi) { return a(b(psi)); }, a.label() + "*" + b.label()};
}

LinearOp operator+(const LinearOp& a, const LinearOp& b) {
  return {[a, b](const QField& psi) { return a(psi) + b(psi); },
          "(" + a.label() + "+" + b.label() + ")"};
}

LinearOp operator-(const LinearOp& a, const LinearOp& b) {
  return {[a, b](const QField& psi) { return a(psi) - b(psi); },
          "(" + a.label() + "-" + b.label() + ")"};
}

LinearOp operator*(double s, const LinearOp& a) {
  std::ostringstream os;
  os << s << "*" << a.label();
  return {[s, a](const QField& psi) { return s * a(psi); }, os.str(), a.locality()};
}

LinearOp bar_i(const LinearOp& op) {
  return {[op](const QField& psi) { return op(psi) * kI; }, "(" + op.label() + "|i)",
          op.locality()};
}

LinearOp left_i(const LinearOp& op) {
  return {[op](const QField& psi) { return kI * op(psi); }, "i" + op.label(), op.locality()};
}

LinearOp right_of_left_i(const LinearOp& op) {
  return {[op](const QField& psi) { return op(kI * psi); }, op.label() + "i", op.locality()};
}

LinearOp commutator(const LinearOp& a, const LinearOp& b) {
  return {[a, b](const QField& psi) { return a(b(psi)) - b(a(psi)); },
          "[" + a.label() + "," + b.label() + "]"};
}

LinearOp anticommutator(const LinearOp& a, const LinearOp& b) {
  return {[a, b](const QField& psi) { return a(b(psi)) + b(a(psi)); },
          "{" + a.label() + "," + b.label() + "}"};
}

LinearOp momentum(int axis, const Units& units) {
  const double hbar = units.hbar;
  return {[axis, hbar](const QField& psi) {
            psi.grid().require_differentiable(axis);
            return (-hbar) * (gradient(psi, axis) * kI);
          },
          std::string("p") + "xyz"[axis], Locality::differential};
}

LinearOp momentum_squared(const Units& units) {
  const double c = -units.hbar * units.hbar;
  return {[c](const QField& psi) { return c * laplacian(psi); }, "p^2", Locality::differential};
}

LinearOp r_dot_p(const Grid& grid, const Units& units) {
  LinearOp sum = zero_op();
  for (int a = 0; a < grid.dims(); ++a) sum = sum + compose(position(grid, a), momentum(a, units));
  return {[sum](const QField& psi) { return sum(psi); }, "r.p", Locality::differential};
}

LinearOp generalized_momentum(const GaugePotential& g, int axis, const Units& units) {
  const double hbar = units.hbar;
  std::optional<QField> a;
  if (!g.is_zero()) a = g.field()[axis];
  return {[grid = g.grid(), a, axis, hbar](const QField& psi) {
            require_grid(grid, psi, "generalized_momentum");
            // -hbar (d_a Psi - A_a Psi) i in one pass over the gradient.
            QField d = partial(psi, axis);
            for (std::size_t n = 0; n < d.size(); ++n) {
              const Quaternion dn = a ? d[n] - (*a)[n] * psi[n] : d[n];
              d[n] = (-hbar) * (dn * kI);
            }
            return d;
          },
          std::string("Pi") + "xyz"[axis], Locality::differential};
}

LinearOp generalized_momentum_squared(const GaugePotential& g, const Units& units) {
  LinearOp sum = zero_op();
  for (int a = 0; a < 3; ++a) {
    const LinearOp pi = generalized_momentum(g, a, units);
    sum = sum + compose(pi, pi);
  }
  return {[sum](const QField& psi) { return sum(psi); }, "Pi^2"};
}

LinearOp hamiltonian(const GaugePotential& g, const ScalarPotential& u, const Units& units) {
  if (!g.grid().same_as(u.grid())) throw ConfigError("hamiltonian: potentials on different grids");
  const double c = -units.hbar * units.hbar / (2.0 * units.mass);
  QField a_dot_a(g.grid());
  if (!g.is_zero())
    for (int a = 0; a < 3; ++a) a_dot_a = a_dot_a + g.field()[a] * g.field()[a];
  return {[g, u, c, a_dot_a](const QField& psi) {
            require_grid(g.grid(), psi, "hamiltonian");
            QField kin = laplacian(psi);
            if (!g.is_zero()) {
              for (int a = 0; a < psi.grid().dims(); ++a) {
                const QField& A = g.field()[a];
                kin = kin - gradient(A * psi, a) - A * gradient(psi, a);
              }
              kin = kin + a_dot_a * psi;
            }
            return c * kin + u.field() * psi;
          },
          "H"};
}

// ---------------------------------------------------------------------------

double norm(const QField& psi) {
  double s = 0.0;
  for (std::size_t n = 0; n < psi.size(); ++n) s += psi.grid().weight(n) * norm2(psi[n]);
  return s;
}

Quaternion overlap(const QField& a, const QField& b) { return integrate(conj(a) * b); }

double expect(const LinearOp& op, const QField& psi, ExpectMode mode) {
  if (mode == ExpectMode::strict) {
    const double nrm = norm(psi);
    if (std::abs(nrm - 1.0) > 1e-6) {
      std::ostringstream os;
      os << "expect(" << op.label() << "): state is not normalized (integral rho = " << nrm
         << ")";
      throw PreconditionError(os.str());
    }
  }
  return expect_image(op(psi), psi, op.label());
}

double expect_image(const QField& o, const QField& psi, const std::string& label) {
  require_grid(psi.grid(), o, "expect");
  QField integrand(psi.grid());
  double scale = 0.0;
  for (std::size_t n = 0; n < psi.size(); ++n) {
    const Quaternion a = o[n] * qconj(psi[n]);
    const Quaternion b = psi[n] * qconj(o[n]);
    integrand[n] = 0.5 * (a + b);
    scale += psi.grid().weight(n) * std::abs(a.x0());
  }
  const Quaternion total = integrate(integrand);
  const double residue = std::max({std::abs(total.x1()), std::abs(total.x2()), std::abs(total.x3())});
  if (residue > 1e-10 * (1.0 + scale)) {
    std::ostringstream os;
    os << "expect(" << label << "): symmetrized integrand is not real (residue " << residue
       << ")";
    throw std::logic_error(os.str());
  }
  return total.x0();
}

double expect_physical(const LinearOp& op, const QField& psi, ExpectMode mode) {
  return expect(op, psi, mode) + expect(bar_i(op), psi, mode);
}

RealField project_real(const QField& f, double tol, const std::string& what) {
  double scale = 0.0, residue = 0.0;
  RealField out{f.grid(), std::vector<double>(f.size())};
  for (std::size_t n = 0; n < f.size(); ++n) {
    scale = std::max(scale, std::abs(f[n].x0()));
    residue = std::max({residue, std::abs(f[n].x1()), std::abs(f[n].x2()), std::abs(f[n].x3())});
    out.values[n] = f[n].x0();
  }
  if (residue > tol * (1.0 + scale)) {
    std::ostringstream os;
    os << what << ": imaginary residue " << residue << " exceeds tolerance";
    throw std::logic_error(os.str());
  }
  return out;
}

QField to_qfield(const RealField& f) {
  QField out(f.grid);
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = Quaternion(f.values[n]);
  return out;
}

RealField ContinuityFields::div_j() const {
  QVectorField jq{{to_qfield(j[0]), to_qfield(j[1]), to_qfield(j[2])}};
  return project_real(divergence_active(jq), 1e-12, "div J");
}

ContinuityFields continuity_fields(const QField& psi, const GaugePotential& g,
                                   const ScalarPotential& u, const Units& units) {
  require_grid(g.grid(), psi, "continuity_fields");
  require_grid(u.grid(), psi, "continuity_fields");
  const Grid& grid = psi.grid();
  const QField psi_c = conj(psi);
  const QField rho = psi * psi_c;
  const QField s = (psi * kI) * psi_c;  // Psi i Psi*
  const QField src = (1.0 / units.hbar) * (s * conj(u.field()) - u.field() * s);

  ContinuityFields out{project_real(rho, 1e-12, "rho"), project_real(src, 1e-12, "g"), {}};
  for (int a = 0; a < 3; ++a) {
    if (a >= grid.dims()) {
      out.j[static_cast<std::size_t>(a)] = RealField{grid, std::vector<double>(grid.size(), 0.0)};
      continue;
    }
    const QField pi = generalized_momentum(g, a, units)(psi);
    const QField j = (0.5 / units.mass) * (pi * psi_c + psi * conj(pi));
    out.j[static_cast<std::size_t>(a)] = project_real(j, 1e-12, "J");
  }
  return out;
}

MonopolePair monopole_expectations(const MagneticField& b, const QField& psi) {
  const QField div = divergence(b.field);
  const LinearOp op = multiply_left(div, "div B");
  return {expect(op, psi, ExpectMode::raw), expect(bar_i(op), psi, ExpectMode::raw)};
}

}  // namespace qqm
