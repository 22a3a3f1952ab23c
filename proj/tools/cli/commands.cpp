#include "cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "kfp/analysis.hpp"
#include "kfp/errors.hpp"
#include "kfp/kernels.hpp"
#include "kfp/phase_space.hpp"
#include "kfp/propagator.hpp"
#include "kfp/spectral.hpp"

namespace kfp::cli {
namespace {

const Schema kGridKeys = {
    {"n", "1", "dimension (1..3)"},
    {"x_half_width", "16", "position box half-width"},
    {"x_points", "128", "points per position axis (even, >= 16)"},
    {"v_half_width", "10", "velocity box half-width"},
    {"v_points", "128", "points per velocity axis (even, >= 16)"},
};

const Schema kPotentialKeys = {
    {"potential", "zero", "zero | inverse_power"},
    {"c", "0.5", "potential amplitude"},
    {"rho", "2", "potential decay exponent"},
};

const Schema kPlanKeys = {
    {"backend", "fourier_factorized", "direct_kernel | fourier_factorized"},
    {"splitting", "strang", "strang | lie"},
    {"dt", "0.01", "time step"},
    {"interpolation", "linear", "linear | cubic"},
};

Schema concat(std::initializer_list<Schema> parts) {
  Schema out;
  for (const Schema& s : parts) out.insert(out.end(), s.begin(), s.end());
  return out;
}

const std::map<std::string, Schema>& schemas() {
  static const std::map<std::string, Schema> s = {
      {"kernel-eval",
       {{"times", "0.001,0.01,0.1,1,10", "comma-separated times"}, {"n", "1", "dimension for the 1->inf norm"}}},
      {"decay-scan",
       concat({{{"mode", "analytic", "analytic | empirical"},
                {"pq", "1:inf", "comma-separated p:q pairs"},
                {"regime", "long_time", "long_time | short_time"},
                {"t_min", "", "window start (default from regime)"},
                {"t_max", "", "window end (default from regime)"},
                {"samples", "12", "log-spaced sample count"},
                {"tolerance", "", "fail when |fitted - expected| exceeds this"},
                {"spikes", "1", "add single-cell spikes to the empirical family (0 | 1)"},
                {"seed", "20240917", "test-family jitter seed"}},
               kGridKeys, kPotentialKeys, kPlanKeys})},
      {"spectral-check",
       {{"n", "1", "dimension"},
        {"max_degree", "6", "largest |alpha|"},
        {"xis", "0,0.5,1", "shift magnitudes, applied along the first axis"},
        {"v_half_width", "12", "velocity half-width"},
        {"v_points", "480", "velocity points per axis"},
        {"fd_order", "8", "finite-difference order for the Laplacian"},
        {"eigen_threshold", "1e-5", "max eigenrelation residual"},
        {"biorth_threshold", "1e-8", "max biorthogonality deviation"}}},
      {"evolve",
       concat({kGridKeys, kPotentialKeys, kPlanKeys,
               {{"t_total", "2", "final time"},
                {"sample_times", "0.5,1,1.5,2", "snapshot times (multiples of dt)"},
                {"initial", "gaussian", "gaussian | maxwellian | file"},
                {"initial_file", "", "field file for initial=file"},
                {"snapshot_prefix", "", "snapshot path prefix (default: output path without extension)"},
                {"max_mass_drift", "", "fail when the relative mass drift exceeds this"}}})},
      {"bootstrap", {{"rhos", "1.01,1.1,1.2,1.5", "comma-separated rho > 1"}, {"max_iter", "10000", "iteration cap"}}},
  };
  return s;
}

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(15) << v;
  return os.str();
}

class Csv {
 public:
  Csv(const std::string& command, const Config& cfg, const std::string& columns) {
    os_ << "# schema_version=" << kSchemaVersion << "\n# command=" << command << "\n";
    for (const std::string& kv : cfg.resolved()) os_ << "# " << kv << "\n";
    os_ << columns << "\n";
  }
  template <class... T>
  void row(const T&... cells) {
    bool first = true;
    ((os_ << (first ? "" : ",") << cell(cells), first = false), ...);
    os_ << "\n";
  }
  void comment(const std::string& s) { os_ << "# " << s << "\n"; }
  std::string str() const { return os_.str(); }

 private:
  static std::string cell(double v) { return fmt(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(std::size_t v) { return std::to_string(v); }
  static std::string cell(const std::string& v) { return v; }
  static std::string cell(const char* v) { return v; }
  std::ostringstream os_;
};

void emit(const Csv& csv, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << csv.str();
  } else {
    write_atomic(path, csv.str());
  }
}

PhaseGrid grid_from(const Config& cfg) {
  const long long n = cfg.integer("n");
  if (n < 1 || n > 3) throw ConfigError("n must be 1, 2 or 3");
  const long long xp = cfg.integer("x_points"), vp = cfg.integer("v_points");
  if (xp <= 0 || vp <= 0) throw ConfigError("point counts must be positive");
  return PhaseGrid(static_cast<int>(n), Axis{cfg.num("x_half_width"), static_cast<std::size_t>(xp)},
                   Axis{cfg.num("v_half_width"), static_cast<std::size_t>(vp)});
}

Potential potential_from(const Config& cfg) {
  return Potential::from_name(cfg.str("potential"), cfg.num("c"), cfg.num("rho"));
}

PropagatorPlan plan_from(const Config& cfg) {
  PropagatorPlan p;
  p.backend = parse_backend(cfg.str("backend"));
  p.splitting = parse_splitting(cfg.str("splitting"));
  p.interpolation = parse_interpolation(cfg.str("interpolation"));
  p.dt = cfg.num("dt");
  return p;
}

int cmd_kernel_eval(const Config& cfg, const std::string& path, std::ostream& out, std::ostream&) {
  const std::vector<double> times = cfg.num_list("times");
  if (times.empty()) throw ConfigError("times: at least one time is required");
  const long long n = cfg.integer("n");
  if (n < 1 || n > 3) throw ConfigError("n must be 1, 2 or 3");
  Csv csv("kernel-eval", cfg, "t,sigma,theta,gamma,omega,norm_1_to_inf");
  for (double t : times) {
    const kernels::TimeProfile p = kernels::time_profiles(t);
    csv.row(t, p.sigma, p.theta, p.gamma, p.omega, analysis::free_norm_1_to_inf(t, static_cast<int>(n)));
  }
  emit(csv, path, out);
  return kExitSuccess;
}

std::vector<std::pair<double, double>> parse_pq(const Config& cfg) {
  std::vector<std::pair<double, double>> out;
  for (const std::string& item : cfg.str_list("pq")) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ConfigError("pq: expected p:q, got '" + item + "'");
    const double p = parse_number(item.substr(0, colon), "pq"), q = parse_number(item.substr(colon + 1), "pq");
    if (!(p >= 1.0) || p > q) throw ConfigError("pq: need 1 <= p <= q, got '" + item + "'");
    out.emplace_back(p, q);
  }
  if (out.empty()) throw ConfigError("pq: at least one pair is required");
  return out;
}

int cmd_decay_scan(const Config& cfg, const std::string& path, std::ostream& out, std::ostream& log) {
  const std::string mode = cfg.str("mode");
  if (mode != "analytic" && mode != "empirical") throw ConfigError("mode must be analytic or empirical");
  const analysis::Regime regime = analysis::parse_regime(cfg.str("regime"));
  const double t_min = cfg.has_value("t_min") ? cfg.num("t_min") : (regime == analysis::Regime::long_time ? 20.0 : 1e-3);
  const double t_max = cfg.has_value("t_max") ? cfg.num("t_max") : (regime == analysis::Regime::long_time ? 50.0 : 1e-2);
  const long long samples = cfg.integer("samples");
  if (samples < 2) throw ConfigError("samples must be >= 2");
  const auto pqs = parse_pq(cfg);
  const long long n = cfg.integer("n");
  if (n < 1 || n > 3) throw ConfigError("n must be 1, 2 or 3");
  const Potential V = potential_from(cfg);
  std::vector<double> times = analysis::log_spaced(t_min, t_max, static_cast<std::size_t>(samples));

  Csv csv("decay-scan", cfg, "t,p,q,norm_est,bound,regime");
  const std::string reg = analysis::to_string(regime);
  auto bound = [&](double t, double p, double q) {
    const double a = 0.5 * n * (1.0 / p - (std::isinf(q) ? 0.0 : 1.0 / q));
    return std::pow(4.0 * std::acos(-1.0) * kernels::time_profiles(t).gamma, -a);
  };

  std::map<std::pair<double, double>, std::vector<analysis::NormRecord>> records;
  std::optional<std::string> failure;
  if (mode == "analytic") {
    for (const auto& [p, q] : pqs)
      if (p != 1.0 || !std::isinf(q)) throw ConfigError("analytic mode provides the exact norm for pq=1:inf only");
    if (!V.is_zero()) throw ConfigError("analytic mode requires potential=zero");
    for (double t : times) {
      const double v = analysis::free_norm_1_to_inf(t, static_cast<int>(n));
      records[{1.0, kInfinity}].push_back({t, 1.0, kInfinity, v, analysis::NormKind::operator_norm_exact});
    }
  } else {
    const PhaseGrid grid = grid_from(cfg);
    const PropagatorPlan plan = plan_from(cfg);
    plan.validate(grid);
    const auto family = analysis::default_test_family(grid, cfg.integer("spikes") != 0,
                                                      static_cast<std::uint64_t>(cfg.integer("seed")));
    try {
      if (V.is_zero()) {
        for (double t : times) {
          const FreePropagator P(grid, t, plan.backend);
          for (const auto& [p, q] : pqs)
            records[{p, q}].push_back(analysis::norm_lower_bound([&](const Field& f) { return P.apply(f); }, t, p, q, family));
        }
      } else {
        // perturbed flow: sample times rounded to multiples of dt
        for (double& t : times) t = std::max(1.0, std::round(t / plan.dt)) * plan.dt;
        times.erase(std::unique(times.begin(), times.end()), times.end());
        std::map<std::pair<double, double>, std::vector<double>> best;
        for (const auto& pq : pqs) best[pq].assign(times.size(), 0.0);
        for (const Field& f : family) {
          const auto snaps = evolve(f, times.back(), V, plan, times);
          for (const auto& [p, q] : pqs) {
            const double np = lp_norm(f, p);
            if (!(np > 0.0)) continue;
            for (std::size_t i = 0; i < times.size(); ++i) best[{p, q}][i] = std::max(best[{p, q}][i], lp_norm(snaps[i], q) / np);
          }
        }
        for (const auto& [pq, vals] : best)
          for (std::size_t i = 0; i < times.size(); ++i)
            records[pq].push_back({times[i], pq.first, pq.second, vals[i], analysis::NormKind::operator_norm_lower_bound});
      }
    } catch (const std::exception& e) {
      failure = e.what();
    }
  }

  for (const auto& [pq, recs] : records)
    for (const auto& r : recs) csv.row(r.t, r.p, r.q, r.value, bound(r.t, r.p, r.q), reg);

  if (failure) {
    csv.comment("error: " + *failure);
    emit(csv, path, out);
    log << "decay-scan: propagation failed: " << *failure << "\n";
    return kExitThreshold;
  }

  int code = kExitSuccess;
  for (const auto& [pq, recs] : records) {
    try {
      const analysis::DecayFit fit = analysis::fit_decay_exponent(recs, {t_min * (1 - 1e-12), t_max * (1 + 1e-12)}, regime, static_cast<int>(n));
      std::ostringstream s;
      s << "fit p=" << fmt(pq.first) << " q=" << fmt(pq.second) << " regime=" << reg << " fitted=" << fmt(fit.fitted_exponent)
        << " expected=" << fmt(fit.expected_exponent) << " r2=" << fmt(fit.r2) << " samples=" << fit.samples;
      csv.comment(s.str());
      log << s.str() << "\n";
      if (cfg.has_value("tolerance") && std::abs(fit.fitted_exponent - fit.expected_exponent) > cfg.num("tolerance")) {
        log << "decay-scan: fitted exponent outside tolerance\n";
        code = kExitThreshold;
      }
    } catch (const InputError& e) {
      csv.comment(std::string("fit unavailable: ") + e.what());
      if (cfg.has_value("tolerance")) code = kExitThreshold;
    }
  }
  emit(csv, path, out);
  return code;
}

std::string alpha_str(const spectral::HermiteIndex& a) {
  std::string s = "(";
  for (std::size_t i = 0; i < a.alpha.size(); ++i) s += (i ? " " : "") + std::to_string(a.alpha[i]);
  return s + ")";
}

int cmd_spectral_check(const Config& cfg, const std::string& path, std::ostream& out, std::ostream& log) {
  const long long n = cfg.integer("n");
  if (n < 1 || n > 3) throw ConfigError("n must be 1, 2 or 3");
  const long long deg = cfg.integer("max_degree"), fd = cfg.integer("fd_order");
  if (deg < 0) throw ConfigError("max_degree must be >= 0");
  const std::vector<double> xis = cfg.num_list("xis");
  if (xis.empty()) throw ConfigError("xis: at least one shift is required");
  const double eig_thr = cfg.num("eigen_threshold"), bio_thr = cfg.num("biorth_threshold");
  const long long vp = cfg.integer("v_points");
  if (vp <= 0) throw ConfigError("v_points must be positive");
  const VelocityGrid grid(static_cast<int>(n), Axis{cfg.num("v_half_width"), static_cast<std::size_t>(vp)});

  Csv csv("spectral-check", cfg, "check,xi,alpha,beta,value");
  double worst_eig = 0.0, worst_bio = 0.0;
  std::string eig_where, bio_where;
  try {
    for (double x : xis) {
      std::vector<double> xi(static_cast<std::size_t>(n), 0.0);
      xi[0] = x;
      for (const auto& a : spectral::multi_indices(static_cast<int>(n), static_cast<int>(deg))) {
        const double r = spectral::eigen_residual(spectral::shifted_eigenfunction(a, xi, grid), static_cast<int>(fd));
        csv.row("eigen_residual", x, alpha_str(a), std::string(""), r);
        if (r >= worst_eig) {
          worst_eig = r;
          eig_where = "alpha=" + alpha_str(a) + " xi=" + fmt(x);
        }
      }
      const auto m = spectral::biorthogonality_matrix(xi, static_cast<int>(deg), grid);
      const std::string ra = alpha_str(m.indices[m.worst_row]), cb = alpha_str(m.indices[m.worst_col]);
      csv.row("biorthogonality", x, ra, cb, m.max_deviation);
      if (m.max_deviation >= worst_bio) {
        worst_bio = m.max_deviation;
        bio_where = "alpha=" + ra + " beta=" + cb + " xi=" + fmt(x);
      }
    }
  } catch (const GridError& e) {
    csv.comment(std::string("refused: ") + e.what());
    emit(csv, path, out);
    log << "spectral-check: " << e.what() << "\n";
    return kExitThreshold;
  }
  const bool ok = worst_eig < eig_thr && worst_bio < bio_thr;
  std::ostringstream s;
  s << "max eigen residual " << fmt(worst_eig) << " at " << eig_where << "; max biorthogonality deviation "
    << fmt(worst_bio) << " at " << bio_where << "; " << (ok ? "PASS" : "FAIL");
  csv.comment(s.str());
  log << s.str() << "\n";
  emit(csv, path, out);
  return ok ? kExitSuccess : kExitThreshold;
}

int cmd_evolve(const Config& cfg, const std::string& path, std::ostream& out, std::ostream& log) {
  const PhaseGrid grid = grid_from(cfg);  // memory guard fires here, before any field exists
  const Potential V = potential_from(cfg);
  const PropagatorPlan plan = plan_from(cfg);
  plan.validate(grid);
  const double t_total = cfg.num("t_total");
  const std::vector<double> ts = cfg.num_list("sample_times");
  if (ts.empty()) throw ConfigError("sample_times: at least one time is required");

  Field f;
  const std::string init = cfg.str("initial");
  if (init == "gaussian") {
    const int n = grid.dim();
    f = Field::sample(grid, [n](std::span<const double> z) {
      double e = 0.0;
      for (int j = 0; j < n; ++j) e += z[j] * z[j] / 2 + z[n + j] * z[n + j] / 4;
      return std::exp(-e);
    });
  } else if (init == "maxwellian") {
    f = maxwellian_field(grid, V);
  } else if (init == "file") {
    f = read_field_binary(cfg.str("initial_file"));
    if (!(f.grid() == grid)) throw ConfigError("initial_file grid does not match the configured grid");
  } else {
    throw ConfigError("initial must be gaussian, maxwellian or file");
  }

  std::string prefix = cfg.str("snapshot_prefix");
  if (prefix.empty()) prefix = path.empty() ? "snapshot" : (std::filesystem::path(path).replace_extension("")).string();

  Diagnostics diag;
  const std::vector<Field> snaps = evolve(f, t_total, V, plan, ts, &diag);
  const Field m = maxwellian_field(grid, V);
  const double m0 = pairing(m, f).real();

  Csv csv("evolve", cfg, "t,mass_functional,l1,l2,linf,positivity_min");
  auto row = [&](double t, const Field& u) {
    csv.row(t, pairing(m, u).real(), lp_norm(u, 1), lp_norm(u, 2), lp_norm(u, kInfinity), u.min_real());
  };
  row(0.0, f);
  double drift = 0.0;
  for (std::size_t i = 0; i < snaps.size(); ++i) {
    row(ts[i], snaps[i]);
    const std::string snap_path = prefix + ".t" + fmt(ts[i]) + ".bin";
    write_field_binary(snaps[i], snap_path);
    csv.comment("snapshot t=" + fmt(ts[i]) + " " + snap_path);
    if (m0 != 0.0) drift = std::max(drift, std::abs(pairing(m, snaps[i]).real() - m0) / std::abs(m0));
  }
  for (const std::string& w : diag.warnings) {
    csv.comment("warning: " + w);
    log << "evolve: " << w << "\n";
  }
  csv.comment("shifted_out_mass=" + fmt(diag.shifted_out_mass) + " max_relative_mass_drift=" + fmt(drift));
  emit(csv, path, out);
  if (cfg.has_value("max_mass_drift") && drift > cfg.num("max_mass_drift")) {
    log << "evolve: mass functional drift " << fmt(drift) << " exceeds max_mass_drift\n";
    return kExitThreshold;
  }
  return kExitSuccess;
}

int cmd_bootstrap(const Config& cfg, const std::string& path, std::ostream& out, std::ostream&) {
  const std::vector<double> rhos = cfg.num_list("rhos");
  if (rhos.empty()) throw ConfigError("rhos: at least one value is required");
  for (double r : rhos)
    if (!(r > 1.0)) throw ConfigError("rhos: rho must exceed 1, got " + fmt(r));
  const long long max_iter = cfg.integer("max_iter");
  if (max_iter < 1) throw ConfigError("max_iter must be >= 1");
  Csv csv("bootstrap", cfg, "rho,k,r_k,terminated,fixed_point");
  for (double rho : rhos) {
    const analysis::BootstrapTrace tr = analysis::bootstrap_exponents(rho, static_cast<std::size_t>(max_iter));
    const std::string fp = tr.fixed_point ? fmt(*tr.fixed_point) : "";
    for (std::size_t k = 0; k < tr.sequence.size(); ++k) {
      const bool last = k + 1 == tr.sequence.size();
      const std::string state = last ? (tr.terminated_at ? "yes" : "diverged") : "no";
      csv.row(rho, k + 1, tr.sequence[k], state, fp);
    }
  }
  emit(csv, path, out);
  return kExitSuccess;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"kernel-eval", "decay-scan", "spectral-check", "evolve", "bootstrap"};
  return names;
}

const Schema& schema_for(const std::string& command) {
  auto it = schemas().find(command);
  if (it == schemas().end()) throw ConfigError("unknown command '" + command + "'");
  return it->second;
}

void write_atomic(const std::string& path, const std::string& content) {
  const std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream o(tmp, std::ios::binary | std::ios::trunc);
    if (!o) throw ConfigError("cannot open " + tmp.string() + " for writing");
    o << content;
    if (!o) throw ConfigError("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
}

int run_command(const std::string& command, const Config& cfg, const std::string& out_path, std::ostream& out,
                std::ostream& log) {
  if (command == "kernel-eval") return cmd_kernel_eval(cfg, out_path, out, log);
  if (command == "decay-scan") return cmd_decay_scan(cfg, out_path, out, log);
  if (command == "spectral-check") return cmd_spectral_check(cfg, out_path, out, log);
  if (command == "evolve") return cmd_evolve(cfg, out_path, out, log);
  if (command == "bootstrap") return cmd_bootstrap(cfg, out_path, out, log);
  throw ConfigError("unknown command '" + command + "'");
}

int run_cli(const std::string& command, const std::string& config_path, const std::vector<std::string>& overrides,
            const std::string& out_path, std::ostream& out, std::ostream& log) {
  auto report = [&](const std::exception& e, int code) {
    log << "kfp " << command << ": " << e.what() << "\n";
    return code;
  };
  try {
    Config cfg(schema_for(command));
    if (!config_path.empty()) cfg.merge_file(config_path);
    for (const std::string& s : overrides) cfg.set(s);
    return run_command(command, cfg, out_path, out, log);
  } catch (const ConfigError& e) {
    return report(e, kExitUsage);
  } catch (const InputError& e) {
    return report(e, kExitUsage);
  } catch (const DomainError& e) {
    return report(e, kExitUsage);
  } catch (const GridError& e) {
    return report(e, kExitUsage);
  } catch (const CapabilityError& e) {
    return report(e, kExitUsage);
  } catch (const std::exception& e) {
    return report(e, kExitThreshold);
  }
}

}  // namespace kfp::cli
