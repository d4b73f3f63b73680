#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>

#include "CLI11.hpp"

#include "hyperksh/acceptance.hpp"
#include "hyperksh/gaussian_states.hpp"
#include "hyperksh/transforms.hpp"
#include "hyperksh/verify.hpp"

namespace hyperksh::cli {

using nlohmann::json;

namespace {

const Cell kEmpty = std::monostate{};

struct TimePoint {
  double t = 0.0;
  std::optional<PiRational> exact;

  Cell label() const {
    if (!exact) return kEmpty;
    return std::to_string(exact->k) + "/" + std::to_string(exact->d);
  }
};

std::vector<TimePoint> resolve_times(const RunConfig& cfg, double alpha,
                                     const std::vector<double>& defaults) {
  std::vector<TimePoint> out;
  if (!cfg.t_pi.empty()) {
    for (const auto& r : cfg.t_pi) out.push_back({r.time(alpha), r});
  } else if (cfg.t_grid) {
    for (double t : cfg.t_grid->values()) out.push_back({t, std::nullopt});
  } else {
    for (double t : defaults) out.push_back({t, std::nullopt});
  }
  return out;
}

std::vector<Center> y_points(const RunConfig& cfg) {
  std::vector<Center> ys;
  for (double P : cfg.p_grid.values()) {
    for (double Q : cfg.q_grid.values()) ys.push_back({P, Q});
  }
  return ys;
}

bool is_canonical(const QuadraticHamiltonian& H) { return H.h11 == 1.0 && H.h12 == 0.0; }

// (h11 / 2 alpha) sin(2 alpha t), exactly zero at exact boundary times.
double density_at(const QuadraticHamiltonian& H, const TimePoint& tp) {
  if (!tp.exact) return kahler_density(H, tp.t);
  return H.h11 * tp.exact->sin_alpha_t() * tp.exact->cos_alpha_t() / H.alpha();
}

HolomorphicCoordinate coordinate_at(const QuadraticHamiltonian& H, const TimePoint& tp) {
  return tp.exact ? holomorphic_coordinate(H, *tp.exact) : holomorphic_coordinate(H, tp.t);
}

PhaseSpaceGaussian transform_at(const QuadraticHamiltonian& H, const TimePoint& tp, Center Y) {
  if (is_canonical(H)) {
    const CanonicalHyperbolic C(H.alpha());
    return tp.exact ? ksh_transform(C, *tp.exact, Y) : ksh_transform(C, tp.t, Y);
  }
  return ksh_conjugated(H, tp.t, Y);
}

std::vector<PhasePoint> square_grid(double lo, double hi, int n) {
  std::vector<PhasePoint> pts;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      pts.push_back({lo + (hi - lo) * i / (n - 1), lo + (hi - lo) * j / (n - 1)});
    }
  }
  return pts;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const Cell& c) {
  struct Visitor {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(double v) const { return format_double(v); }
    std::string operator()(long v) const { return std::to_string(v); }
    std::string operator()(const std::string& s) const {
      if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
      std::string q = "\"";
      for (char ch : s) {
        if (ch == '"') q += '"';
        q += ch;
      }
      return q + "\"";
    }
  };
  return std::visit(Visitor{}, c);
}

json json_cell(const Cell& c) {
  struct Visitor {
    json operator()(std::monostate) const { return nullptr; }
    json operator()(double v) const { return std::isfinite(v) ? json(v) : json(nullptr); }
    json operator()(long v) const { return v; }
    json operator()(const std::string& s) const { return s; }
  };
  return std::visit(Visitor{}, c);
}

}  // namespace

// ---------------------------------------------------------------------------

CommandResult cmd_classify(const RunConfig& cfg) {
  const QuadraticHamiltonian& H = cfg.hamiltonian;
  const double alpha = H.alpha();
  std::vector<double> defaults = Range{0.0, kPi / alpha, 9}.values();
  CommandResult r;
  r.table.columns = {"t",       "t_pi",    "class",   "kahler_density", "w_a_re",     "w_a_im",
                     "w_b_re",  "w_b_im",  "direction_x", "direction_p"};
  std::map<std::string, long> counts;
  for (const TimePoint& tp : resolve_times(cfg, alpha, defaults)) {
    const PolarizationClass c =
        tp.exact ? classify_polarization(H, *tp.exact) : classify_polarization(H, tp.t);
    const HolomorphicCoordinate w = coordinate_at(H, tp);
    std::vector<Cell> row = {tp.t,          tp.label(),   to_string(c.tag), density_at(H, tp),
                             w.a.real(),    w.a.imag(),   w.b.real(),       w.b.imag()};
    if (c.direction) {
      row.emplace_back(c.direction->first);
      row.emplace_back(c.direction->second);
    } else {
      row.push_back(kEmpty);
      row.push_back(kEmpty);
    }
    r.table.rows.push_back(std::move(row));
    ++counts[to_string(c.tag)];
  }
  r.summary["rows"] = r.table.rows.size();
  r.summary["classes"] = counts;
  return r;
}

CommandResult cmd_unitarity(const RunConfig& cfg) {
  const QuadraticHamiltonian& H = cfg.hamiltonian;
  if (!is_canonical(H) && H.h11 == 0.0) {
    throw ConfigError("hamiltonian", "unitarity needs h11 != 0");
  }
  const double alpha = H.alpha();
  std::vector<double> defaults;
  for (int k = 1; k <= 9; ++k) defaults.push_back(k * kPi / (20.0 * alpha));
  const double tol_closed = cfg.tolerance("norm_closed");
  const double tol_quad = cfg.tolerance("norm_quad");
  const double tol_gram = cfg.tolerance("gram");
  const std::vector<Center> ys = y_points(cfg);

  CommandResult r;
  r.table.columns = {"t",          "t_pi",   "P",           "Q", "status", "closed_form_norm",
                     "quadrature_norm", "gram_defect"};
  long ok = 0, divergent = 0, failed = 0, singular = 0;
  double worst_closed = 0.0, worst_quad = 0.0, worst_gram = 0.0;
  for (const TimePoint& tp : resolve_times(cfg, alpha, defaults)) {
    const double density = density_at(H, tp);
    std::vector<PhaseSpaceGaussian> images;
    std::string singular_reason;
    try {
      for (const Center& Y : ys) images.push_back(transform_at(H, tp, Y));
    } catch (const SingularTimeError& e) {
      singular_reason = e.what();
    }
    const bool anti = density < -kClassEps;
    Cell gram = kEmpty;
    if (singular_reason.empty() && !anti) {
      double g = 0.0;
      bool gram_divergent = false;
      for (std::size_t i = 0; i < ys.size() && !gram_divergent; ++i) {
        for (std::size_t j = 0; j < ys.size(); ++j) {
          const IntegralResult pol = polarized_inner(images[i], images[j], density);
          if (pol.divergent) {
            gram_divergent = true;
            break;
          }
          const cplx sch = schrodinger_inner(coherent_state(ys[i]), coherent_state(ys[j]));
          g = std::max(g, std::abs(pol.value - sch));
        }
      }
      if (!gram_divergent) {
        gram = g;
        worst_gram = std::max(worst_gram, g);
      }
    }
    for (std::size_t i = 0; i < ys.size(); ++i) {
      std::vector<Cell> row = {tp.t, tp.label(), ys[i].P, ys[i].Q};
      if (!singular_reason.empty()) {
        row.insert(row.end(), {std::string("singular"), kEmpty, kEmpty, kEmpty});
        ++singular;
      } else if (anti) {
        row.insert(row.end(), {std::string("divergent"), kEmpty, kEmpty, kEmpty});
        ++divergent;
      } else {
        const IntegralResult closed = polarized_inner(images[i], images[i], density);
        verify::QuadratureSpec spec;
        spec.rel_tol = std::min(1e-10, 0.01 * tol_quad);
        verify::NormResult quad{0.0, true};
        std::string status;
        try {
          quad = verify::quad_norm_polarized(images[i], density, spec);
        } catch (const ToleranceNotMetError&) {
          status = "fail";
        }
        if (closed.divergent || quad.divergent) {
          row.insert(row.end(), {std::string("divergent"), kEmpty, kEmpty, gram});
          ++divergent;
        } else {
          const double dc = std::abs(closed.value - 1.0), dq = std::abs(quad.value - 1.0);
          worst_closed = std::max(worst_closed, dc);
          worst_quad = std::max(worst_quad, dq);
          const bool gram_ok = std::holds_alternative<double>(gram) &&
                               std::get<double>(gram) <= tol_gram;
          if (status.empty()) status = dc <= tol_closed && dq <= tol_quad && gram_ok ? "ok" : "fail";
          (status == "ok" ? ok : failed)++;
          row.insert(row.end(), {status, closed.value.real(), quad.value, gram});
        }
      }
      r.table.rows.push_back(std::move(row));
    }
  }
  r.summary = {{"ok", ok},
               {"divergent", divergent},
               {"singular", singular},
               {"failed", failed},
               {"max_closed_form_deviation", worst_closed},
               {"max_quadrature_deviation", worst_quad},
               {"max_gram_defect", worst_gram}};
  r.exit_code = failed == 0 ? kOk : kFailure;
  return r;
}

CommandResult cmd_endpoints(const RunConfig& cfg) {
  const double alpha = cfg.hamiltonian.alpha();
  const CanonicalHyperbolic H(alpha);
  const QuadraticHamiltonian Hq = H.hamiltonian();
  const double tol_fourier = cfg.tolerance("fourier");
  const double tol_sb = cfg.tolerance("sb");
  const double tol_const = cfg.tolerance("sb_constant");
  const auto pts = square_grid(-3.0, 3.0, 11);
  const std::vector<Center> ys = y_points(cfg);

  CommandResult r;
  r.table.columns = {"kind",          "t",           "t_pi",        "t_tilde",
                     "P",             "Q",           "max_deviation", "constant_re",
                     "constant_im",   "constant_deviation", "status"};
  long failed = 0;
  double worst_fourier = 0.0, worst_sb = 0.0, worst_const = 0.0;

  const cplx sqrt_i = std::exp(kI * kPi / 4.0);
  const TimePoint endpoint{PiRational{1, 2}.time(alpha), PiRational{1, 2}};
  for (const Center& Y : ys) {
    const PhaseSpaceGaussian U = halfform_convert(ksh_transform(H, *endpoint.exact, Y),
                                                  HalfFormFrame::dp());
    const LineGaussian F = fourier_on_gaussian(coherent_state(Y));
    double dev = 0.0;
    for (const auto& z : pts) {
      dev = std::max(dev, std::abs(U(z.x, z.p) - sqrt_i * momentum_gauge_factor(z.x, z.p) * F(z.p)));
    }
    worst_fourier = std::max(worst_fourier, dev);
    const bool ok = dev <= tol_fourier;
    failed += ok ? 0 : 1;
    r.table.rows.push_back({std::string("fourier"), endpoint.t, endpoint.label(), kEmpty, Y.P, Y.Q,
                            dev, kEmpty, kEmpty, kEmpty, std::string(ok ? "ok" : "fail")});
  }

  std::vector<double> defaults;
  for (double a : {kPi / 8.0, kPi / 6.0, kPi / 4.0, kPi / 3.0}) defaults.push_back(a / alpha);
  for (const TimePoint& tp : resolve_times(cfg, alpha, defaults)) {
    const double cos_at = tp.exact ? tp.exact->cos_alpha_t() : std::cos(alpha * tp.t);
    const double sin_at = tp.exact ? tp.exact->sin_alpha_t() : std::sin(alpha * tp.t);
    if (!(tp.t >= 0.0) || !(cos_at > 0.0) || !(sin_at >= 0.0)) {
      throw ConfigError("t_grid", "Segal-Bargmann comparison needs 0 <= t < pi/(2 alpha)");
    }
    const double t_tilde = sin_at / cos_at / alpha;
    const double expected = std::sqrt(cos_at);
    for (const Center& Y : ys) {
      const PhaseSpaceGaussian sb = segal_bargmann(t_tilde, Y);
      const PhaseSpaceGaussian U = transform_at(Hq, tp, Y);
      const PhaseSpaceGaussian U_sb = halfform_convert(U, sb.frame);
      double dev = 0.0, den = 0.0;
      cplx num = 0.0;
      for (const auto& z : pts) {
        const cplx s = sb(z.x, z.p), u = U(z.x, z.p);
        dev = std::max(dev, std::abs(s - U_sb(z.x, z.p)));
        num += std::conj(u) * s;
        den += std::norm(u);
      }
      const cplx c = num / den;
      const double cdev = std::abs(c - expected);
      worst_sb = std::max(worst_sb, dev);
      worst_const = std::max(worst_const, cdev);
      const bool ok = dev <= tol_sb && cdev <= tol_const;
      failed += ok ? 0 : 1;
      r.table.rows.push_back({std::string("segal_bargmann"), tp.t, tp.label(), t_tilde, Y.P, Y.Q,
                              dev, c.real(), c.imag(), cdev, std::string(ok ? "ok" : "fail")});
    }
  }
  r.summary = {{"alpha", alpha},
               {"max_fourier_deviation", worst_fourier},
               {"max_sb_deviation", worst_sb},
               {"max_constant_deviation", worst_const},
               {"failed", failed}};
  r.exit_code = failed == 0 ? kOk : kFailure;
  return r;
}

CommandResult cmd_accept(const RunConfig& cfg, bool mutate) {
  acceptance::Options opt;
  opt.seed = cfg.seed;
  opt.flip_width_sign = mutate;
  CommandResult r;
  r.table.columns = {"id", "status", "seconds", "detail"};
  long failed = 0;
  for (const auto& res : acceptance::run_all(opt)) {
    failed += res.passed ? 0 : 1;
    r.table.rows.push_back(
        {res.id, std::string(res.passed ? "PASS" : "FAIL"), res.seconds, res.detail});
  }
  r.summary = {{"criteria", r.table.rows.size()}, {"failed", failed}, {"mutation", mutate}};
  r.exit_code = failed == 0 ? kOk : kFailure;
  return r;
}

void write_csv(const Table& t, std::ostream& out) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_field(row[i]);
    out << '\n';
  }
}

json to_json(const CommandResult& r, const RunConfig& cfg) {
  json rows = json::array();
  for (const auto& row : r.table.rows) {
    json obj = json::object();
    for (std::size_t i = 0; i < row.size(); ++i) obj[r.table.columns[i]] = json_cell(row[i]);
    rows.push_back(std::move(obj));
  }
  return {{"config", to_json(cfg)}, {"rows", rows}, {"summary", r.summary}};
}

// ---------------------------------------------------------------------------

namespace {

void emit(const CommandResult& r, const RunConfig& cfg, std::ostream& out) {
  std::ofstream file;
  std::ostream* dest = &out;
  if (cfg.output_path != "-") {
    file.open(cfg.output_path, std::ios::binary | std::ios::trunc);
    if (!file) throw ConfigError("--out", "cannot open '" + cfg.output_path + "' for writing");
    dest = &file;
  }
  if (cfg.format == OutputFormat::Csv) {
    write_csv(r.table, *dest);
  } else {
    *dest << to_json(r, cfg).dump(2) << '\n';
  }
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot read '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("--config", e.what());
  }
  return from_json(j);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Imaginary-time KSH transforms of Gaussian coherent states", "hyperksh"};
  app.require_subcommand(1);

  std::optional<double> h11, h12, h22, alpha, t_single;
  std::string t_grid, t_pi, y_grid, out_path, format, config_path;
  std::vector<std::string> tols;
  std::optional<std::uint64_t> seed;
  bool list = false, mutate = false;

  app.add_option("--h11", h11, "coefficient of p^2 / 2");
  app.add_option("--h12", h12, "coefficient of p x");
  app.add_option("--h22", h22, "coefficient of x^2 / 2");
  app.add_option("--alpha", alpha, "canonical H = (p^2 - alpha^2 x^2) / 2, or a check on --h*");
  auto* opt_t = app.add_option("--t", t_single, "single time");
  auto* opt_grid = app.add_option("--t-grid", t_grid, "start:stop:count");
  auto* opt_pi = app.add_option("--t-pi", t_pi, "k/d[,k/d...], alpha t = k pi / d");
  opt_t->excludes(opt_grid)->excludes(opt_pi);
  opt_grid->excludes(opt_pi);
  app.add_option("--y-grid", y_grid, "pmin:pmax:n,qmin:qmax:n");
  app.add_option("--out", out_path, "output path, - for stdout");
  app.add_option("--format", format, "csv or json");
  app.add_option("--tol", tols, "NAME=VALUE tolerance override")->take_all();
  app.add_option("--seed", seed, "seed for random sampling");
  app.add_option("--config", config_path, "JSON run configuration");

  auto* classify = app.add_subcommand("classify", "polarization phase diagram over t")->fallthrough();
  auto* unitarity = app.add_subcommand("unitarity", "norms and Gram defects of U_t psi_Y")->fallthrough();
  auto* endpoints = app.add_subcommand("endpoints", "Fourier endpoint and Segal-Bargmann checks")->fallthrough();
  auto* accept = app.add_subcommand("accept", "run the acceptance suite")->fallthrough();
  accept->add_flag("--list", list, "print criterion ids only");
  accept->add_flag("--mutate", mutate, "flip the sign of the closed-form width (detector check)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kConfigError;
  }

  try {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config_file(config_path);
    if (alpha) {
      if (!(*alpha > 0.0) || !std::isfinite(*alpha)) throw ConfigError("--alpha", "must be positive");
      if (!h11 && !h12 && !h22) cfg.hamiltonian = QuadraticHamiltonian::canonical(*alpha);
    }
    if (h11) cfg.hamiltonian.h11 = *h11;
    if (h12) cfg.hamiltonian.h12 = *h12;
    if (h22) cfg.hamiltonian.h22 = *h22;
    if (alpha && (h11 || h12 || h22)) {
      const double disc = cfg.hamiltonian.disc();
      if (!(disc < 0.0) || std::abs(std::sqrt(-disc) - *alpha) > 1e-12 * *alpha) {
        throw ConfigError("--alpha", "inconsistent with --h11/--h12/--h22");
      }
    }
    if (t_single) {
      cfg.t_pi.clear();
      cfg.t_grid = Range{*t_single, *t_single, 1};
    }
    if (!t_grid.empty()) {
      cfg.t_pi.clear();
      cfg.t_grid = parse_range(t_grid, "--t-grid");
    }
    if (!t_pi.empty()) {
      cfg.t_grid.reset();
      cfg.t_pi = parse_pi_list(t_pi, "--t-pi");
    }
    if (!y_grid.empty()) std::tie(cfg.p_grid, cfg.q_grid) = parse_y_grid(y_grid);
    for (const auto& t : tols) {
      const auto [name, value] = parse_tolerance(t);
      cfg.tolerances.insert_or_assign(name, value);
    }
    if (!out_path.empty()) cfg.output_path = out_path;
    if (!format.empty()) cfg.format = parse_format(format);
    if (seed) cfg.seed = *seed;
    validate(cfg);

    if (accept->parsed() && list) {
      for (const auto& id : acceptance::criterion_ids()) {
        out << id << "  " << acceptance::criterion_title(id) << '\n';
      }
      return kOk;
    }

    CommandResult r;
    if (classify->parsed()) r = cmd_classify(cfg);
    if (unitarity->parsed()) r = cmd_unitarity(cfg);
    if (endpoints->parsed()) r = cmd_endpoints(cfg);
    if (accept->parsed()) {
      r = cmd_accept(cfg, mutate);
      for (const auto& row : r.table.rows) {
        out << std::get<std::string>(row[1]) << ' ' << std::get<std::string>(row[0]) << ": "
            << std::get<std::string>(row[3]) << '\n';
      }
      out << (r.exit_code == kOk ? "all criteria passed" : "acceptance FAILED") << '\n';
      if (cfg.output_path != "-") emit(r, cfg, out);
      return r.exit_code;
    }
    emit(r, cfg, out);
    if (r.exit_code != kOk) err << "hyperksh: " << r.summary.dump() << '\n';
    return r.exit_code;
  } catch (const ConfigError& e) {
    err << "hyperksh: configuration error in " << e.what() << '\n';
    return kConfigError;
  } catch (const Error& e) {
    err << "hyperksh: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace hyperksh::cli
