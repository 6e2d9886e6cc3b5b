#include "qqm/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "qqm/diagnostics.hpp"
#include "qqm/errors.hpp"
#include "qqm/left_variant.hpp"

#ifndef QQM_VERSION
#define QQM_VERSION "0.0.0"
#endif

namespace qqm {

using nlohmann::ordered_json;

namespace {

const Quaternion kI = Quaternion::i();

const std::set<std::string> kGaugeFamilies{"uniform-b", "const-beta", "monopole-demo"};
const std::set<std::string> kScalarFamilies{"none", "harmonic", "quartic", "absorber", "complex-w"};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

std::optional<double> to_double(const std::string& s) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  const char* first = s.data();
  if (first != end && *first == '+') ++first;
  const auto r = std::from_chars(first, end, v);
  if (r.ec != std::errc() || r.ptr != end || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<int> to_int(const std::string& s) {
  int v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

/// "a", "bi", "a+bi", "a-bi" (spaces allowed).
std::optional<Complex> to_complex(std::string s) {
  s.erase(std::remove(s.begin(), s.end(), ' '), s.end());
  if (s.empty()) return std::nullopt;
  if (s.back() != 'i') {
    if (auto re = to_double(s)) return Complex(*re, 0.0);
    return std::nullopt;
  }
  s.pop_back();
  // Split at the last sign that is not an exponent sign or the leading one.
  std::size_t cut = std::string::npos;
  for (std::size_t p = s.size(); p-- > 1;)
    if ((s[p] == '+' || s[p] == '-') && s[p - 1] != 'e' && s[p - 1] != 'E') {
      cut = p;
      break;
    }
  auto imag_of = [](std::string t) -> std::optional<double> {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    return to_double(t);
  };
  if (cut == std::string::npos) {
    if (auto im = imag_of(s)) return Complex(0.0, *im);
    return std::nullopt;
  }
  const auto re = to_double(s.substr(0, cut));
  const auto im = imag_of(s.substr(cut));
  if (!re || !im) return std::nullopt;
  return Complex(*re, *im);
}

std::string join(const std::vector<std::string>& v, const char* sep = ", ") {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : sep) + s;
  return out;
}

std::string format_complex(Complex z) {
  if (z.imag() == 0.0) return format_double(z.real());
  std::string im = format_double(std::abs(z.imag()));
  return format_double(z.real()) + (z.imag() < 0 ? " - " : " + ") + im + "i";
}

struct SpecBlock {
  std::string section;  // potential | gauge
  int line = 0;
  PotentialSpec spec;
  std::map<std::string, int> key_lines;
  bool has_family = false;
};

class Parser {
 public:
  ParseResult run(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
      ++line;
      if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
      const std::string s = trim(raw);
      if (s.empty()) continue;
      if (s.front() == '[') {
        section_line(s, line);
        continue;
      }
      const auto eq = s.find('=');
      if (eq == std::string::npos) {
        error(line, "syntax error: expected 'key = value' or '[section]', got '" + s + "'");
        continue;
      }
      const std::string key = trim(s.substr(0, eq));
      const std::string value = trim(s.substr(eq + 1));
      if (key.empty()) {
        error(line, "syntax error: missing key before '='");
        continue;
      }
      if (value.empty()) {
        error(line, qualified(key) + ": missing value");
        continue;
      }
      assign(key, value, line);
    }
    finish();
    ParseResult r;
    r.errors = errors_;
    r.warnings = warnings_;
    if (errors_.empty()) r.config = cfg_;
    return r;
  }

 private:
  ScenarioConfig cfg_;
  std::string section_;  // "" is the top level
  std::set<std::string> seen_;
  std::vector<SpecBlock> blocks_;
  std::vector<std::string> errors_, warnings_;
  std::map<std::string, int> lines_;  // qualified key -> line

  void error(int line, const std::string& msg) {
    errors_.push_back("line " + std::to_string(line) + ": " + msg);
  }

  std::string qualified(const std::string& key) const {
    return section_.empty() ? key : section_ + "." + key;
  }

  void section_line(const std::string& s, int line) {
    if (s.back() != ']') {
      error(line, "syntax error: unterminated section header '" + s + "'");
      return;
    }
    const std::string name = trim(s.substr(1, s.size() - 2));
    static const std::set<std::string> sections{"grid",  "units",  "potential", "gauge",
                                                "state", "evolve", "checks",    "output"};
    if (!sections.contains(name)) {
      error(line, "unknown section [" + name + "] (allowed: grid, units, potential, gauge, state, evolve, checks, output)");
      section_ = "?";
      return;
    }
    section_ = name;
    if (name == "potential" || name == "gauge") {
      blocks_.push_back({name, line, {}, {}, false});
    } else if (seen_.contains("[" + name + "]")) {
      error(line, "section [" + name + "] appears twice");
    }
    seen_.insert("[" + name + "]");
  }

  // --- typed setters -------------------------------------------------------

  template <class T, class F>
  void set(const std::string& key, const std::string& value, int line, T& target, F parse,
           const char* expected) {
    if (auto v = parse(value)) {
      target = *v;
    } else {
      error(line, qualified(key) + ": expected " + expected + ", got '" + value + "'");
    }
  }
  void set_double(const std::string& k, const std::string& v, int line, double& t) {
    set(k, v, line, t, to_double, "a finite number");
  }
  void set_int(const std::string& k, const std::string& v, int line, int& t) {
    set(k, v, line, t, to_int, "an integer");
  }
  void set_vec3(const std::string& k, const std::string& v, int line, std::array<double, 3>& t) {
    const auto parts = split_list(v);
    if (parts.empty() || parts.size() > 3) {
      error(line, qualified(k) + ": expected 1 to 3 comma-separated numbers, got '" + v + "'");
      return;
    }
    std::array<double, 3> out{};
    for (std::size_t a = 0; a < parts.size(); ++a) {
      const auto d = to_double(parts[a]);
      if (!d) {
        error(line, qualified(k) + ": expected a finite number, got '" + parts[a] + "'");
        return;
      }
      out[a] = *d;
    }
    t = out;
  }
  void set_choice(const std::string& k, const std::string& v, int line,
                  const std::vector<std::string>& allowed, std::string& t) {
    if (std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
      error(line, qualified(k) + ": '" + v + "' is not one of " + join(allowed));
      return;
    }
    t = v;
  }

  void unknown(const std::string& key, int line, const std::vector<std::string>& allowed) {
    error(line, "unknown key '" + qualified(key) + "'" +
                    (allowed.empty() ? std::string() : " (allowed: " + join(allowed) + ")"));
  }

  void assign(const std::string& key, const std::string& value, int line) {
    if (section_ == "?") return;  // already reported
    if (section_ == "potential" || section_ == "gauge") {
      assign_spec(key, value, line);
      return;
    }
    const std::string q = qualified(key);
    if (lines_.contains(q)) {
      error(line, q + ": duplicate key (first set on line " + std::to_string(lines_[q]) + ")");
      return;
    }
    lines_[q] = line;

    if (section_.empty()) {
      if (key == "name") {
        cfg_.name = value;
      } else if (key == "equation") {
        std::string eq;
        set_choice(key, value, line, {"right", "left"}, eq);
        if (!eq.empty()) cfg_.equation = eq == "left" ? Equation::left : Equation::right;
      } else {
        unknown(key, line, {"name", "equation"});
      }
    } else if (section_ == "grid") {
      if (key == "dims") set_int(key, value, line, cfg_.grid.dims);
      else if (key == "n") set_int(key, value, line, cfg_.grid.n);
      else if (key == "length") set_double(key, value, line, cfg_.grid.length);
      else if (key == "boundary") {
        std::string b;
        set_choice(key, value, line, {"periodic", "dirichlet-zero"}, b);
        if (!b.empty()) cfg_.grid.boundary = b == "periodic" ? Boundary::periodic : Boundary::dirichlet_zero;
      } else unknown(key, line, {"dims", "n", "length", "boundary"});
    } else if (section_ == "units") {
      if (key == "hbar") set_double(key, value, line, cfg_.units.hbar);
      else if (key == "mass") set_double(key, value, line, cfg_.units.mass);
      else unknown(key, line, {"hbar", "mass"});
    } else if (section_ == "state") {
      StateConfig& st = cfg_.state;
      if (key == "kind") set_choice(key, value, line, {"gaussian", "plane-wave", "ho-eigenstate"}, st.kind);
      else if (key == "x0") set_vec3(key, value, line, st.x0);
      else if (key == "k0") set_vec3(key, value, line, st.k0);
      else if (key == "k") set_vec3(key, value, line, st.k);
      else if (key == "sigma") set_double(key, value, line, st.sigma);
      else if (key == "n") set_int(key, value, line, st.n);
      else if (key == "omega") set_double(key, value, line, st.omega);
      else if (key == "q0") set_q0(value, line);
      else unknown(key, line, {"kind", "x0", "k0", "sigma", "k", "n", "omega", "q0"});
    } else if (section_ == "evolve") {
      if (key == "dt") set_double(key, value, line, cfg_.evolve.dt);
      else if (key == "t_final") set_double(key, value, line, cfg_.evolve.t_final);
      else if (key == "record_every") set_int(key, value, line, cfg_.evolve.record_every);
      else unknown(key, line, {"dt", "t_final", "record_every"});
    } else if (section_ == "checks") {
      if (key == "suites") {
        cfg_.checks.suites.clear();
        for (const auto& s : split_list(value)) {
          const auto& known = known_suites();
          if (std::find(known.begin(), known.end(), s) == known.end())
            error(line, q + ": unknown suite '" + s + "' (allowed: " + join(known) + ")");
          else if (std::find(cfg_.checks.suites.begin(), cfg_.checks.suites.end(), s) == cfg_.checks.suites.end())
            cfg_.checks.suites.push_back(s);
        }
      } else if (key == "virial_stationarity") {
        std::string v;
        set_choice(key, value, line, {"require", "skip"}, v);
        if (!v.empty()) cfg_.checks.virial_stationarity = v == "skip" ? Stationarity::skip : Stationarity::require;
      } else if (key == "continuity_margin") {
        set_double(key, value, line, cfg_.checks.continuity_margin);
      } else {
        unknown(key, line, {"suites", "virial_stationarity", "continuity_margin"});
      }
    } else if (section_ == "output") {
      if (key == "directory") {
        cfg_.output.directory = value;
      } else if (key == "formats") {
        cfg_.output.formats.clear();
        for (const auto& f : split_list(value)) {
          if (f != "csv" && f != "json" && f != "fields")
            error(line, q + ": '" + f + "' is not one of csv, json, fields");
          else cfg_.output.formats.push_back(f);
        }
      } else {
        unknown(key, line, {"directory", "formats"});
      }
    }
  }

  void set_q0(const std::string& value, int line) {
    const auto parts = split_list(value);
    if (parts.size() != 4) {
      error(line, "state.q0: expected four comma-separated reals, got '" + value + "'");
      return;
    }
    std::array<double, 4> c{};
    for (std::size_t a = 0; a < 4; ++a) {
      const auto d = to_double(parts[a]);
      if (!d) {
        error(line, "state.q0: expected a finite number, got '" + parts[a] + "'");
        return;
      }
      c[a] = *d;
    }
    const Quaternion q(c[0], c[1], c[2], c[3]);
    const double len = abs(q);
    if (len == 0.0) {
      error(line, "state.q0: must be nonzero");
      return;
    }
    cfg_.state.q0 = (1.0 / len) * q;
    if (std::abs(len - 1.0) > 1e-9)
      warnings_.push_back("line " + std::to_string(line) + ": state.q0: |q0| = " + format_double(len) +
                          ", normalized to (" + format_double(cfg_.state.q0.x0()) + ", " +
                          format_double(cfg_.state.q0.x1()) + ", " + format_double(cfg_.state.q0.x2()) +
                          ", " + format_double(cfg_.state.q0.x3()) + ")");
  }

  void assign_spec(const std::string& key, const std::string& value, int line) {
    SpecBlock& b = blocks_.back();
    if (b.key_lines.contains(key)) {
      error(line, qualified(key) + ": duplicate key (first set on line " + std::to_string(b.key_lines[key]) + ")");
      return;
    }
    b.key_lines[key] = line;
    if (key == "family") {
      const auto& fam = section_ == "gauge" ? kGaugeFamilies : kScalarFamilies;
      if (!fam.contains(value)) {
        std::vector<std::string> allowed(fam.begin(), fam.end());
        error(line, qualified(key) + ": '" + value + "' is not one of " + join(allowed));
        return;
      }
      b.spec.family = value;
      b.has_family = true;
      return;
    }
    const auto z = to_complex(value);
    if (!z) {
      error(line, qualified(key) + ": expected a number such as 0.5 or 0.1+0.2i, got '" + value + "'");
      return;
    }
    b.spec.params[key] = *z;
  }

  // --- cross-field validation ---------------------------------------------

  int line_of(const std::string& q) const {
    const auto it = lines_.find(q);
    return it == lines_.end() ? 0 : it->second;
  }
  void range(bool ok, const std::string& q, const std::string& msg) {
    if (ok) return;
    const int l = line_of(q);
    errors_.push_back((l ? "line " + std::to_string(l) + ": " : std::string()) + q + ": " + msg);
  }

  void finish() {
    for (auto& b : blocks_) {
      if (!b.has_family) {
        if (!b.key_lines.contains("family"))
          error(b.line, b.section + ".family: missing (every [" + b.section + "] needs one)");
        continue;
      }
      try {
        validate(b.spec);
      } catch (const ConfigError& e) {
        // Messages start with the offending parameter name.
        const std::string msg = e.what();
        const std::string key = msg.substr(0, msg.find(':'));
        const auto it = b.key_lines.find(key);
        error(it == b.key_lines.end() ? b.line : it->second, b.section + "." + msg);
        continue;
      }
      (b.section == "gauge" ? cfg_.gauges : cfg_.potentials).push_back(b.spec);
    }

    const GridConfig& g = cfg_.grid;
    range(g.dims >= 1 && g.dims <= 3, "grid.dims", "must be 1, 2 or 3");
    range(g.n >= 4, "grid.n", "must be at least 4");
    range(g.length > 0.0, "grid.length", "must be positive");
    range(cfg_.units.hbar > 0.0, "units.hbar", "must be positive");
    range(cfg_.units.mass > 0.0, "units.mass", "must be positive");
    if (!cfg_.gauges.empty() && g.dims != 3)
      errors_.push_back("gauge: a gauge potential needs grid.dims = 3");

    const StateConfig& st = cfg_.state;
    range(st.sigma > 0.0, "state.sigma", "must be positive");
    range(st.n >= 0, "state.n", "must be non-negative");
    range(st.omega > 0.0, "state.omega", "must be positive");

    const EvolveConfig& ev = cfg_.evolve;
    range(ev.dt > 0.0, "evolve.dt", "must be positive");
    range(ev.t_final >= 0.0, "evolve.t_final", "must be non-negative");
    range(ev.record_every >= 1, "evolve.record_every", "must be at least 1");
    if (ev.dt > 0.0 && ev.t_final >= 0.0) {
      const double steps = ev.t_final / ev.dt;
      range(std::abs(steps - std::round(steps)) <= 1e-9 * std::max(1.0, steps), "evolve.t_final",
            "must be an integer multiple of evolve.dt");
    }

    for (const auto& s : cfg_.checks.suites) {
      if ((s == "lorentz" || s == "monopole") && g.dims != 3)
        range(false, "checks.suites", s + " needs grid.dims = 3");
      if ((s == "lorentz" || s == "ehrenfest") && cfg_.equation != Equation::right)
        range(false, "checks.suites", s + " needs equation = right");
      if (s == "virial" && !cfg_.gauges.empty())
        range(false, "checks.suites", "virial needs a scenario without [gauge]");
      if (s == "monopole" && cfg_.gauges.empty())
        range(false, "checks.suites", "monopole needs a [gauge] section");
    }
  }
};

Grid make_grid(const GridConfig& g) {
  std::array<int, 3> n{g.n, 1, 1};
  std::array<double, 3> len{g.length, 1.0, 1.0};
  for (int a = 1; a < g.dims; ++a) {
    n[static_cast<std::size_t>(a)] = g.n;
    len[static_cast<std::size_t>(a)] = g.length;
  }
  return Grid(g.dims, n, len, g.boundary);
}

std::string vec3_text(const std::array<double, 3>& v) {
  return format_double(v[0]) + ", " + format_double(v[1]) + ", " + format_double(v[2]);
}

const char* axis_name(int a) { return a == 0 ? "x" : a == 1 ? "y" : "z"; }

ordered_json axes_json(const std::array<std::vector<double>, 3>& v) {
  return ordered_json{{"x", v[0]}, {"y", v[1]}, {"z", v[2]}};
}

double max_abs_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double max_abs_of(const std::array<std::vector<double>, 3>& v) {
  return std::max({max_abs_of(v[0]), max_abs_of(v[1]), max_abs_of(v[2])});
}

/// Everything a suite needs about the run.
struct RunContext {
  const ScenarioConfig& cfg;
  Grid grid;
  Potentials pot;
  LinearOp h;
  QField psi0;
  const ObservationSeries& series;
};

LinearOp build_hamiltonian(Equation eq, const Potentials& p, const Units& u) {
  return eq == Equation::left ? hamiltonian_left(p.gauge, p.scalar, u) : hamiltonian(p.gauge, p.scalar, u);
}

QField initial_state(const ScenarioConfig& cfg, const Grid& grid) {
  const StateConfig& st = cfg.state;
  QField base;
  if (st.kind == "gaussian") base = gaussian_packet(grid, st.x0, st.k0, st.sigma);
  else if (st.kind == "plane-wave") base = plane_wave(grid, st.k);
  else base = ho_eigenfunction(grid, st.n, st.omega, cfg.units);
  return base * st.q0;
}

double margin_of(const RunContext& c) {
  return c.cfg.checks.continuity_margin >= 0.0 ? c.cfg.checks.continuity_margin : 0.1 * c.cfg.grid.length;
}

ordered_json suite_norm(const RunContext& c) {
  const auto& norm_ch = c.series.channel("norm");
  const double n0 = norm_ch.front();
  double gamma = 0.0;
  for (const auto& p : c.cfg.potentials)
    if (p.family == "absorber") gamma += p.params.at("gamma").real();
  double drift = 0.0, decay_err = 0.0;
  for (std::size_t k = 0; k < norm_ch.size(); ++k) {
    drift = std::max(drift, std::abs(norm_ch[k] - n0));
    const double oracle = std::exp(-gamma * c.series.times[k] / c.cfg.units.hbar);
    decay_err = std::max(decay_err, std::abs(norm_ch[k] / n0 / oracle - 1.0));
  }
  return {{"initial", n0}, {"final", norm_ch.back()}, {"max_drift", drift},
          {"decay_gamma", gamma}, {"decay_max_rel_error", decay_err}};
}

ordered_json suite_virial(const RunContext& c) {
  const VirialReport r = c.cfg.equation == Equation::left
                             ? virial_left(c.psi0, c.pot.scalar, c.cfg.units, c.cfg.checks.virial_stationarity)
                             : virial_report(c.psi0, c.pot.scalar, c.cfg.units, c.cfg.checks.virial_stationarity);
  return {{"lhs_rate", r.lhs_rate},
          {"kinetic", r.kinetic},
          {"real_grad", r.real_grad},
          {"imag_grad", r.imag_grad},
          {"extra", r.extra},
          {"residual", r.residual},
          {"relative_residual", r.kinetic != 0.0 ? r.residual / r.kinetic : r.residual},
          {"eigen_residual", r.eigen_residual},
          {"degenerate", r.degenerate}};
}

ordered_json suite_continuity(const RunContext& c) {
  const ContinuityResidual r = c.cfg.equation == Equation::left
                                   ? continuity_residual_left(c.series, c.pot.gauge, c.pot.scalar)
                                   : continuity_residual(c.series, c.pot.gauge, c.pot.scalar);
  std::vector<double> per_record;
  const double margin = margin_of(c);
  for (const auto& f : r.residual) {
    double m = 0.0;
    for (std::size_t n = 0; n < f.values.size(); ++n)
      if (f.grid.is_interior(n, margin)) m = std::max(m, std::abs(f.values[n]));
    per_record.push_back(m);
  }
  return {{"margin", margin}, {"max_residual", r.max_abs(margin)}, {"times", r.times},
          {"residual", per_record}};
}

ordered_json suite_ehrenfest(const RunContext& c) {
  const EhrenfestReport r = ehrenfest_check(c.series, c.pot.gauge, c.pot.scalar);
  const int dims = c.cfg.grid.dims;
  ordered_json out{{"times", r.times}};
  for (int a = 0; a < dims; ++a) {
    const auto ua = static_cast<std::size_t>(a);
    out[axis_name(a)] = {{"max_position_residual", max_abs_of(r.position_residual[ua])},
                         {"max_integral_residual", max_abs_of(r.integral_residual[ua])},
                         {"max_expectation_residual", max_abs_of(r.expectation_residual[ua])},
                         {"dx_dt", r.dx_dt[ua]},
                         {"pi_over_m", r.pi_over_m[ua]},
                         {"source_correction", r.source_correction[ua]},
                         {"dp_dt", r.dp_dt[ua]},
                         {"integral_form", r.integral_form[ua]},
                         {"expectation_form", r.expectation_form[ua]}};
  }
  return out;
}

ordered_json suite_dynamics(const RunContext& c) {
  const Units& u = c.cfg.units;
  ordered_json out;
  const bool left = c.cfg.equation == Equation::left;
  const std::vector<std::pair<std::string, LinearOp>> ops{
      {"x", position(c.grid, 0)},
      {"p", left ? momentum_left(0, u) : momentum(0, u)},
      {"r.p", left ? [&] {
         LinearOp s = zero_op();
         for (int a = 0; a < c.grid.dims(); ++a) s = s + compose(position(c.grid, a), momentum_left(a, u));
         return s;
       }()
                   : r_dot_p(c.grid, u)}};
  for (const auto& [name, op] : ops) {
    ordered_json entry;
    if (left) {
      const std::array<std::pair<const char*, LeftForm>, 4> forms{
          {{"minus_sandwich", LeftForm::minus_sandwich},
           {"cross_sum", LeftForm::cross_sum},
           {"plus_sandwich", LeftForm::plus_sandwich},
           {"cross_difference", LeftForm::cross_difference}}};
      for (const auto& [tag, form] : forms) {
        const ResidualSeries r = expectation_dynamics_left(op, c.series, c.h, form);
        entry[tag] = {{"max_residual", r.max_abs()}, {"residual", r.residual}};
      }
    } else {
      const ResidualSeries bar = expectation_dynamics_residual(op, c.series, c.h, DynamicsForm::bar);
      const ResidualSeries plain = expectation_dynamics_residual(op, c.series, c.h, DynamicsForm::plain);
      const ResidualSeries phys = expectation_dynamics_residual(op, c.series, c.h, DynamicsForm::physical);
      double mismatch = 0.0;
      for (std::size_t k = 0; k < phys.residual.size(); ++k)
        mismatch = std::max(mismatch, std::abs(phys.residual[k] - (bar.residual[k] + plain.residual[k])));
      entry["bar"] = {{"max_residual", bar.max_abs()}, {"residual", bar.residual}};
      entry["plain"] = {{"max_residual", plain.max_abs()}, {"residual", plain.residual}};
      entry["physical"] = {{"max_residual", phys.max_abs()}, {"residual", phys.residual}};
      entry["sum_mismatch"] = mismatch;
    }
    out[name] = entry;
  }
  out["times"] = c.series.times.size() > 2
                     ? std::vector<double>(c.series.times.begin() + 1, c.series.times.end() - 1)
                     : std::vector<double>{};
  return out;
}

ordered_json suite_lorentz(const RunContext& c) {
  const LorentzReport r = lorentz_report(c.series, c.pot.gauge, c.pot.scalar);
  double bar_max = max_abs_of(r.residual_pi_bar);
  return {{"max_residual", r.max_abs_residual()},
          {"max_residual_pi", r.max_abs_residual_pi()},
          {"max_residual_pi_bar", bar_max},
          {"times", r.times},
          {"force", axes_json(r.force)},
          {"d_pi", axes_json(r.d_pi)},
          {"d_pi_bar", axes_json(r.d_pi_bar)},
          {"B_cross_p", axes_json(r.magnetic)},
          {"A_cross_B", axes_json(r.gauge_cross)},
          {"A_rate", axes_json(r.a_rate)},
          {"real_grad", axes_json(r.real_grad)},
          {"imag_grad", axes_json(r.imag_grad)},
          {"U_A_bar_commutator", axes_json(r.u_a_bar)},
          {"residual", axes_json(r.residual)},
          {"residual_pi", axes_json(r.residual_pi)},
          {"residual_pi_bar", axes_json(r.residual_pi_bar)},
          {"Pi2_Pibar_commutator", axes_json(r.commutator_raw)},
          {"curl_B", axes_json(r.curl_b)}};
}

ordered_json suite_monopole(const RunContext& c) {
  const MagneticField b = magnetic_field(c.pot.gauge);
  const MonopoleDensity d = monopole_density(b);
  const MonopolePair m = monopole_expectations(b, c.psi0);
  ordered_json out{{"real_divergence_integral", integrate(d.real_part).x0()},
                   {"i_projected_integral", integrate(d.i_projected).x0()},
                   {"real_part", m.real_part},
                   {"i_projected", m.i_projected}};
  // Analytic div(beta x beta*) = 2 i s^2 k cos(k y) for a lone monopole-demo gauge.
  if (c.cfg.gauges.size() == 1 && c.cfg.gauges[0].family == "monopole-demo") {
    const double s = c.cfg.gauges[0].params.at("scale").real();
    const double k = 2.0 * std::numbers::pi / c.grid.length(1);
    const QField oracle = QField::sample(c.grid, [s, k](double, double y, double) {
      return Quaternion(0.0, 2.0 * s * s * k * std::cos(k * y), 0.0, 0.0);
    });
    const double expected = expect_image(oracle * c.psi0 * kI, c.psi0, "oracle");
    out["i_projected_oracle"] = expected;
    out["noise_floor"] = std::max(1e-12, std::abs(m.i_projected - expected));
  } else {
    out["i_projected_oracle"] = nullptr;
    out["noise_floor"] = std::max(1e-12, std::abs(m.i_projected));
  }
  return out;
}

ordered_json suite_left_right(const RunContext& c) {
  const ScenarioConfig& cfg = c.cfg;
  const Equation other = cfg.equation == Equation::left ? Equation::right : Equation::left;
  const std::vector<Observer> obs{{"x", [](double, const QField& psi) {
                                     return expect(position(psi.grid(), 0), psi, ExpectMode::raw) / norm(psi);
                                   }}};
  EvolveOptions o;
  o.equation = other;
  o.units = cfg.units;
  o.record_every = cfg.evolve.record_every;
  const ObservationSeries alt =
      evolve(c.psi0, constant_hamiltonian(build_hamiltonian(other, c.pot, cfg.units)), cfg.evolve.t_final,
             cfg.evolve.dt, obs, o);
  // Step-halving estimate of the solver error on the configured equation.
  EvolveOptions half = o;
  half.equation = cfg.equation;
  half.record_every = 2 * cfg.evolve.record_every;
  const ObservationSeries fine =
      evolve(c.psi0, constant_hamiltonian(c.h), cfg.evolve.t_final, 0.5 * cfg.evolve.dt, obs, half);

  const auto& x_here = c.series.channel("x");
  const auto& x_alt = alt.channel("x");
  const auto& x_fine = fine.channel("x");
  double sep = 0.0, tol = 0.0;
  for (std::size_t k = 0; k < x_here.size(); ++k) {
    sep = std::max(sep, std::abs(x_here[k] - x_alt[k]));
    tol = std::max(tol, std::abs(x_here[k] - x_fine[k]));
  }
  return {{"other_equation", other == Equation::left ? "left" : "right"},
          {"max_x_separation", sep},
          {"solver_tolerance", tol},
          {"x_other", x_alt}};
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const std::vector<std::string>& known_suites() {
  static const std::vector<std::string> s{"norm",       "virial",  "continuity", "ehrenfest",
                                          "expectation-dynamics", "lorentz", "monopole", "left-right"};
  return s;
}

ParseResult parse_config(std::string_view text) { return Parser().run(text); }

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open scenario file");
  std::stringstream ss;
  ss << in.rdbuf();
  ParseResult r = parse_config(ss.str());
  for (const auto& w : r.warnings) warn(path.string() + ": " + w);
  if (!r.errors.empty()) {
    std::string msg = path.string() + ": " + std::to_string(r.errors.size()) + " error(s)";
    for (const auto& e : r.errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  return *r.config;
}

std::string format_config(const ScenarioConfig& c) {
  std::ostringstream o;
  o << "name = " << c.name << "\n";
  o << "equation = " << (c.equation == Equation::left ? "left" : "right") << "\n\n";
  o << "[grid]\ndims = " << c.grid.dims << "\nn = " << c.grid.n << "\nlength = " << format_double(c.grid.length)
    << "\nboundary = " << (c.grid.boundary == Boundary::periodic ? "periodic" : "dirichlet-zero") << "\n\n";
  o << "[units]\nhbar = " << format_double(c.units.hbar) << "\nmass = " << format_double(c.units.mass) << "\n\n";
  auto specs = [&o](const char* section, const std::vector<PotentialSpec>& v) {
    for (const auto& s : v) {
      o << "[" << section << "]\nfamily = " << s.family << "\n";
      for (const auto& [k, z] : s.params) o << k << " = " << format_complex(z) << "\n";
      o << "\n";
    }
  };
  specs("potential", c.potentials);
  specs("gauge", c.gauges);
  const StateConfig& st = c.state;
  o << "[state]\nkind = " << st.kind << "\n";
  if (st.kind == "gaussian")
    o << "x0 = " << vec3_text(st.x0) << "\nk0 = " << vec3_text(st.k0) << "\nsigma = " << format_double(st.sigma) << "\n";
  else if (st.kind == "plane-wave")
    o << "k = " << vec3_text(st.k) << "\n";
  else
    o << "n = " << st.n << "\nomega = " << format_double(st.omega) << "\n";
  o << "q0 = " << format_double(st.q0.x0()) << ", " << format_double(st.q0.x1()) << ", "
    << format_double(st.q0.x2()) << ", " << format_double(st.q0.x3()) << "\n\n";
  o << "[evolve]\ndt = " << format_double(c.evolve.dt) << "\nt_final = " << format_double(c.evolve.t_final)
    << "\nrecord_every = " << c.evolve.record_every << "\n\n";
  o << "[checks]\n";
  if (!c.checks.suites.empty()) o << "suites = " << join(c.checks.suites) << "\n";
  o << "virial_stationarity = " << (c.checks.virial_stationarity == Stationarity::skip ? "skip" : "require") << "\n";
  o << "continuity_margin = " << format_double(c.checks.continuity_margin) << "\n\n";
  o << "[output]\ndirectory = " << c.output.directory << "\nformats = " << join(c.output.formats) << "\n";
  return o.str();
}

ScenarioConfig scaled(const ScenarioConfig& config, int factor) {
  if (factor < 1) throw ConfigError("resolution-scale: must be a positive integer");
  ScenarioConfig c = config;
  c.grid.n *= factor;
  c.evolve.dt /= factor;
  c.resolution_scale *= factor;
  return c;
}

ScenarioResult run_scenario(const ScenarioConfig& cfg) {
  const Grid grid = make_grid(cfg.grid);
  std::vector<PotentialSpec> all = cfg.potentials;
  all.insert(all.end(), cfg.gauges.begin(), cfg.gauges.end());
  const Potentials pot = sample_potentials(all, grid, cfg.units);
  const LinearOp h = build_hamiltonian(cfg.equation, pot, cfg.units);
  const QField psi0 = initial_state(cfg, grid);
  const Units u = cfg.units;
  const bool left = cfg.equation == Equation::left;

  // Channel order: norm, energy, <r_a>, <p_a>, then <Pi_a>, <(Pi_a|i)> for
  // right-form gauge scenarios. Expectations are divided by the norm.
  std::vector<Observer> obs;
  obs.push_back({"norm", [](double, const QField& psi) { return norm(psi); }});
  obs.push_back({"energy", [h](double, const QField& psi) { return expect(h, psi, ExpectMode::raw) / norm(psi); }});
  for (int a = 0; a < grid.dims(); ++a)
    obs.push_back({axis_name(a), [a](double, const QField& psi) {
                     return expect(position(psi.grid(), a), psi, ExpectMode::raw) / norm(psi);
                   }});
  for (int a = 0; a < grid.dims(); ++a) {
    const LinearOp p = left ? momentum_left(a, u) : momentum(a, u);
    obs.push_back({std::string("p_") + axis_name(a),
                   [p](double, const QField& psi) { return expect(p, psi, ExpectMode::raw) / norm(psi); }});
  }
  if (!cfg.gauges.empty() && !left) {
    for (int a = 0; a < 3; ++a) {
      const LinearOp pi = generalized_momentum(pot.gauge, a, u);
      obs.push_back({std::string("pi_") + axis_name(a),
                     [pi](double, const QField& psi) { return expect(pi, psi, ExpectMode::raw) / norm(psi); }});
    }
    for (int a = 0; a < 3; ++a) {
      const LinearOp pib = bar_i(generalized_momentum(pot.gauge, a, u));
      obs.push_back({std::string("pibar_") + axis_name(a),
                     [pib](double, const QField& psi) { return expect(pib, psi, ExpectMode::raw) / norm(psi); }});
    }
  }

  const auto& suites = cfg.checks.suites;
  auto wants = [&suites](const char* s) { return std::find(suites.begin(), suites.end(), s) != suites.end(); };
  EvolveOptions opts;
  opts.equation = cfg.equation;
  opts.units = u;
  opts.record_every = cfg.evolve.record_every;
  const auto& fmts = cfg.output.formats;
  const bool export_field = std::find(fmts.begin(), fmts.end(), "fields") != fmts.end();
  opts.store_snapshots = export_field || wants("continuity") || wants("ehrenfest") ||
                         wants("expectation-dynamics") || wants("lorentz");

  ScenarioResult res;
  res.series = evolve(psi0, constant_hamiltonian(h), cfg.evolve.t_final, cfg.evolve.dt, obs, opts);

  std::ostringstream csv;
  csv << "t";
  for (const auto& ch : res.series.channels) csv << "," << ch;
  csv << "\n";
  for (std::size_t k = 0; k < res.series.times.size(); ++k) {
    csv << format_double(res.series.times[k]);
    for (const auto& col : res.series.values) csv << "," << format_double(col[k]);
    csv << "\n";
  }
  res.csv = csv.str();

  const RunContext ctx{cfg, grid, pot, h, psi0, res.series};
  ordered_json report{{"scenario", cfg.name}, {"equation", left ? "left" : "right"}};
  for (const auto& s : suites) {
    if (s == "norm") report["norm"] = suite_norm(ctx);
    else if (s == "virial") report["virial"] = suite_virial(ctx);
    else if (s == "continuity") report["continuity"] = suite_continuity(ctx);
    else if (s == "ehrenfest") report["ehrenfest"] = suite_ehrenfest(ctx);
    else if (s == "expectation-dynamics") report["expectation_dynamics"] = suite_dynamics(ctx);
    else if (s == "lorentz") report["lorentz"] = suite_lorentz(ctx);
    else if (s == "monopole") report["monopole"] = suite_monopole(ctx);
    else if (s == "left-right") report["left_right"] = suite_left_right(ctx);
  }
  res.report = std::move(report);
  if (export_field) res.field_table = field_table(res.series.snapshots.back());
  // Snapshots are only needed by the suites.
  res.series.snapshots.clear();

  res.meta = {{"name", cfg.name},
              {"code_version", QQM_VERSION},
              {"resolution",
               {{"dims", cfg.grid.dims},
                {"n", cfg.grid.n},
                {"length", cfg.grid.length},
                {"h", grid.spacing(0)},
                {"dt", cfg.evolve.dt},
                {"record_every", cfg.evolve.record_every},
                {"resolution_scale", cfg.resolution_scale}}},
              {"channels", res.series.channels},
              {"config", format_config(cfg)}};
  return res;
}

void write_outputs(const ScenarioResult& result, const ScenarioConfig& config,
                   const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&dir](const char* name, const std::string& body) {
    const auto path = dir / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::filesystem::filesystem_error("cannot open for writing", path,
                                                      std::error_code(errno, std::generic_category()));
    out << body;
    out.flush();
    if (!out) throw std::filesystem::filesystem_error("write failed", path,
                                                      std::error_code(errno, std::generic_category()));
  };
  const auto& f = config.output.formats;
  if (std::find(f.begin(), f.end(), "csv") != f.end()) write("series.csv", result.csv);
  if (std::find(f.begin(), f.end(), "json") != f.end()) {
    write("report.json", result.report.dump(2) + "\n");
    write("meta.json", result.meta.dump(2) + "\n");
  }
  if (std::find(f.begin(), f.end(), "fields") != f.end()) write("field_final.csv", result.field_table);
}

}  // namespace qqm
