#include "ellcov/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "ellcov/estimators.hpp"
#include "ellcov/identity_checks.hpp"
#include "ellcov/matrix_core.hpp"

namespace ellcov::bench {

namespace {

std::string fmt_g(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return std::string(buf);
}

// Lossless rendering for flag round-trips.
std::string fmt_full(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return std::string(buf);
}

std::string join(const std::vector<double>& values, std::string (*fmt)(double)) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += fmt(values[i]);
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& text, const char* flag) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token.empty()) continue;
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(token, &used);
    } catch (const std::exception&) {
      throw ConfigError(std::string(flag) + ": cannot parse '" + token + "'");
    }
    if (used != token.size()) {
      throw ConfigError(std::string(flag) + ": cannot parse '" + token + "'");
    }
    values.push_back(value);
  }
  if (values.empty()) {
    throw ConfigError(std::string(flag) + ": empty list");
  }
  return values;
}

int parse_threads(const std::string& text) {
  if (text == "auto") return 0;
  try {
    std::size_t used = 0;
    const int n = std::stoi(text, &used);
    if (used == text.size() && n >= 1) return n;
  } catch (const std::exception&) {
  }
  throw ConfigError("--threads: expected a positive integer or 'auto'");
}

std::vector<double> default_alpha_grid() {
  return {0.25, 0.5, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
}

const char* sub_name(Subcommand sub) {
  switch (sub) {
    case Subcommand::SweepB: return "sweep-b";
    case Subcommand::SweepAlpha: return "sweep-alpha";
    case Subcommand::CompareLoss: return "compare-loss";
  }
  return "?";
}

bool is_certified(double alpha, double b, double b0) {
  return alpha >= 1.0 && b > 0.0 && b <= b0 * (1.0 + 1e-12);
}

double baseline_a(const ExperimentConfig& cfg, LossKind kind) {
  return kind == LossKind::DataBased ? optimal_a(cfg.model, cfg.p, cfg.m)
                                     : quadratic_loss_a(cfg.model, cfg.p, cfg.m);
}

std::vector<double> resolve_b_values(const ExperimentConfig& cfg, int v, int r) {
  switch (cfg.b_select) {
    case BSelect::B0: {
      const double b0 = b0_bound(v, r);
      if (!(b0 > 0.0)) throw ConfigError("b0 is zero at rank 1; pass --b explicitly");
      return {b0};
    }
    case BSelect::B1: {
      const double b1 = b1_bound(v, r);
      if (!(b1 > 0.0)) throw ConfigError("b1 is zero at rank 1; pass --b explicitly");
      return {b1};
    }
    case BSelect::List:
      break;
  }
  if (!cfg.b_list.empty()) return cfg.b_list;
  // Default sweep grid: 40 points over (0, 4*b0], hitting b0 at the quarter mark.
  const double b0 = b0_bound(v, r);
  if (!(b0 > 0.0)) throw ConfigError("b0 is zero at rank 1; pass --b explicitly");
  std::vector<double> grid(40);
  for (int i = 1; i <= 40; ++i) {
    grid[i - 1] = 4.0 * b0 * (i / 40.0);
  }
  return grid;
}

}  // namespace

bool ExperimentConfig::operator==(const ExperimentConfig& other) const {
  return sub == other.sub && p == other.p && m == other.m &&
         model.kind() == other.model.kind() &&
         (model.kind() == ModelKind::Gaussian || model.df() == other.model.df()) &&
         sigma.kind == other.sigma.kind && sigma.p == other.sigma.p &&
         (sigma.kind == SigmaKind::Identity || sigma.rho == other.sigma.rho) &&
         loss == other.loss && alphas == other.alphas &&
         b_select == other.b_select && b_list == other.b_list &&
         reps == other.reps && seed == other.seed && threads == other.threads;
}

ExperimentConfig build_config(Subcommand sub, const RawFlags& raw) {
  ExperimentConfig cfg;
  cfg.sub = sub;
  switch (sub) {
    case Subcommand::SweepB:
      cfg.p = 25;
      cfg.m = 10;
      break;
    case Subcommand::SweepAlpha:
      cfg.p = 50;
      cfg.m = 20;
      break;
    case Subcommand::CompareLoss:
      cfg.p = 20;
      cfg.m = 10;
      break;
  }
  if (raw.p) cfg.p = *raw.p;
  if (raw.m) cfg.m = *raw.m;
  if (cfg.p < 1 || cfg.m < 1) throw ConfigError("p and m must be >= 1");

  const std::string dist = raw.dist.value_or("gaussian");
  if (dist == "gaussian") {
    if (raw.df) throw ConfigError("--df only applies to --dist student");
    cfg.model = ModelSpec::gaussian();
  } else if (dist == "student") {
    if (!raw.df) throw ConfigError("--dist student requires --df");
    if (!(*raw.df > 2.0)) throw ConfigError("--df must exceed 2");
    cfg.model = ModelSpec::student_t(*raw.df);
  } else {
    throw ConfigError("--dist must be gaussian or student");
  }
  if (sub == Subcommand::CompareLoss && cfg.model.kind() != ModelKind::Gaussian) {
    throw ConfigError("compare-loss runs under Gaussian sampling only");
  }

  const std::string sigma = raw.sigma.value_or("identity");
  if (sigma == "identity") {
    if (raw.rho) throw ConfigError("--rho only applies to --sigma ar1");
    cfg.sigma = SigmaSpec::identity(cfg.p);
  } else if (sigma == "ar1") {
    const double rho = raw.rho.value_or(0.9);
    if (!(std::abs(rho) < 1.0)) throw ConfigError("--rho must satisfy |rho| < 1");
    cfg.sigma = SigmaSpec::ar1(cfg.p, rho);
  } else {
    throw ConfigError("--sigma must be identity or ar1");
  }

  cfg.loss = LossKind::DataBased;

  if (raw.alpha) {
    cfg.alphas = parse_double_list(*raw.alpha, "--alpha");
  } else if (sub == Subcommand::SweepB) {
    cfg.alphas = {1.0};
  } else {
    cfg.alphas = default_alpha_grid();
  }
  for (double a : cfg.alphas) {
    if (!(a > 0.0)) throw ConfigError("--alpha values must be positive");
  }
  if (sub == Subcommand::SweepB && cfg.alphas.size() != 1) {
    throw ConfigError("sweep-b takes a single alpha");
  }

  if (raw.b) {
    if (sub == Subcommand::CompareLoss) {
      throw ConfigError("compare-loss selects b0 and b1 itself; --b does not apply");
    }
    if (*raw.b == "b0") {
      cfg.b_select = BSelect::B0;
    } else if (*raw.b == "b1") {
      cfg.b_select = BSelect::B1;
    } else {
      cfg.b_select = BSelect::List;
      cfg.b_list = parse_double_list(*raw.b, "--b");
      for (double b : cfg.b_list) {
        if (!(b > 0.0)) throw ConfigError("--b values must be positive");
      }
    }
  } else {
    cfg.b_select = sub == Subcommand::SweepB ? BSelect::List : BSelect::B0;
  }
  if (sub == Subcommand::SweepAlpha && cfg.b_select == BSelect::List &&
      cfg.b_list.size() != 1) {
    throw ConfigError("sweep-alpha takes a single b (or b0/b1)");
  }

  cfg.reps = raw.reps.value_or(1000);
  if (cfg.reps < 2) throw ConfigError("--reps must be >= 2");
  cfg.seed = raw.seed.value_or(42);
  cfg.threads = parse_threads(raw.threads.value_or("auto"));
  return cfg;
}

RawFlags config_to_raw(const ExperimentConfig& cfg) {
  RawFlags raw;
  raw.p = cfg.p;
  raw.m = cfg.m;
  raw.reps = cfg.reps;
  raw.seed = cfg.seed;
  raw.dist = cfg.model.kind() == ModelKind::Gaussian ? "gaussian" : "student";
  if (cfg.model.kind() == ModelKind::StudentT) raw.df = cfg.model.df();
  raw.sigma = cfg.sigma.kind == SigmaKind::Identity ? "identity" : "ar1";
  if (cfg.sigma.kind == SigmaKind::AR1) raw.rho = cfg.sigma.rho;
  raw.alpha = join(cfg.alphas, fmt_full);
  switch (cfg.b_select) {
    case BSelect::B0:
      raw.b = "b0";
      break;
    case BSelect::B1:
      raw.b = "b1";
      break;
    case BSelect::List:
      if (!cfg.b_list.empty()) raw.b = join(cfg.b_list, fmt_full);
      break;
  }
  raw.threads = cfg.threads == 0 ? "auto" : std::to_string(cfg.threads);
  return raw;
}

std::string config_summary(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "# ellcov-bench " << kVersion << ' ' << sub_name(cfg.sub) << " p=" << cfg.p
     << " m=" << cfg.m << " dist="
     << (cfg.model.kind() == ModelKind::Gaussian ? "gaussian" : "student");
  if (cfg.model.kind() == ModelKind::StudentT) os << " df=" << fmt_g(cfg.model.df());
  os << " sigma=" << (cfg.sigma.kind == SigmaKind::Identity ? "identity" : "ar1");
  if (cfg.sigma.kind == SigmaKind::AR1) os << " rho=" << fmt_g(cfg.sigma.rho);
  if (cfg.sub == Subcommand::CompareLoss) {
    os << " loss=data_based,quadratic";
  } else {
    os << " loss=" << (cfg.loss == LossKind::DataBased ? "data_based" : "quadratic");
  }
  os << " alpha=" << join(cfg.alphas, fmt_g) << " b=";
  switch (cfg.b_select) {
    case BSelect::B0:
      os << "b0";
      break;
    case BSelect::B1:
      os << "b1";
      break;
    case BSelect::List:
      if (cfg.sub == Subcommand::CompareLoss) {
        os << "b0,b1";
      } else if (cfg.b_list.empty()) {
        os << "grid40";
      } else {
        os << join(cfg.b_list, fmt_g);
      }
      break;
  }
  os << " reps=" << cfg.reps << " seed=" << cfg.seed;
  return os.str();
}

void cmd_sweep_b(const ExperimentConfig& cfg, std::ostream& out) {
  const double alpha = cfg.alphas.at(0);
  const int v = std::max(cfg.p, cfg.m);
  const int r = std::min(cfg.p, cfg.m);
  const double b0 = b0_bound(v, r);
  const std::vector<double> bs = resolve_b_values(cfg, v, r);

  std::vector<EstimatorSpec> ests;
  ests.reserve(bs.size() + 1);
  ests.push_back(EstimatorSpec::usual(baseline_a(cfg, cfg.loss)));
  for (double b : bs) {
    ests.push_back(EstimatorSpec::orth_invariant(ShrinkagePsi::haff(alpha, b)));
  }
  const PanelResult panel = mc_loss_panel(cfg.model, cfg.sigma, cfg.p, cfg.m, ests,
                                          cfg.loss, cfg.reps, cfg.seed, cfg.threads);

  out << config_summary(cfg) << '\n';
  out << "b,prial_percent,prial_se,base_mean,alt_mean,reps,seed,certified\n";
  for (std::size_t i = 0; i < bs.size(); ++i) {
    const PrialReport rep = prial(panel.losses[0], panel.losses[i + 1], cfg.seed);
    out << fmt_g(bs[i]) << ',' << fmt_g(rep.prial_percent) << ','
        << fmt_g(rep.std_error_prial) << ',' << fmt_g(rep.baseline_mean) << ','
        << fmt_g(rep.alt_mean) << ',' << rep.replications << ',' << cfg.seed << ','
        << (is_certified(alpha, bs[i], b0) ? "true" : "false") << '\n';
  }
}

void cmd_sweep_alpha(const ExperimentConfig& cfg, std::ostream& out) {
  const int v = std::max(cfg.p, cfg.m);
  const int r = std::min(cfg.p, cfg.m);
  const double b0 = b0_bound(v, r);
  const std::vector<double> bs = resolve_b_values(cfg, v, r);
  if (bs.size() != 1) throw ConfigError("sweep-alpha takes a single b (or b0/b1)");
  const double b = bs[0];

  std::vector<EstimatorSpec> ests;
  ests.reserve(cfg.alphas.size() + 1);
  ests.push_back(EstimatorSpec::usual(baseline_a(cfg, cfg.loss)));
  for (double alpha : cfg.alphas) {
    ests.push_back(EstimatorSpec::orth_invariant(ShrinkagePsi::haff(alpha, b)));
  }
  const PanelResult panel = mc_loss_panel(cfg.model, cfg.sigma, cfg.p, cfg.m, ests,
                                          cfg.loss, cfg.reps, cfg.seed, cfg.threads);

  out << config_summary(cfg) << '\n';
  out << "alpha,prial_percent,prial_se,base_mean,alt_mean,reps,seed,certified\n";
  for (std::size_t i = 0; i < cfg.alphas.size(); ++i) {
    const PrialReport rep = prial(panel.losses[0], panel.losses[i + 1], cfg.seed);
    out << fmt_g(cfg.alphas[i]) << ',' << fmt_g(rep.prial_percent) << ','
        << fmt_g(rep.std_error_prial) << ',' << fmt_g(rep.baseline_mean) << ','
        << fmt_g(rep.alt_mean) << ',' << rep.replications << ',' << cfg.seed << ','
        << (is_certified(cfg.alphas[i], b, b0) ? "true" : "false") << '\n';
  }
}

void cmd_compare_loss(const ExperimentConfig& cfg, std::ostream& out) {
  if (cfg.model.kind() != ModelKind::Gaussian) {
    throw ConfigError("compare-loss runs under Gaussian sampling only");
  }
  const int v = std::max(cfg.p, cfg.m);
  const int r = std::min(cfg.p, cfg.m);
  const double b0 = b0_bound(v, r);
  const double b1 = b1_bound(v, r);
  if (!(b0 > 0.0)) throw ConfigError("compare-loss needs rank >= 2 (b0 > 0)");

  auto build_panel = [&](LossKind kind, double b) {
    std::vector<EstimatorSpec> ests;
    ests.reserve(cfg.alphas.size() + 1);
    ests.push_back(EstimatorSpec::usual(baseline_a(cfg, kind)));
    for (double alpha : cfg.alphas) {
      ests.push_back(EstimatorSpec::orth_invariant(ShrinkagePsi::haff(alpha, b)));
    }
    return mc_loss_panel(cfg.model, cfg.sigma, cfg.p, cfg.m, ests, kind, cfg.reps,
                         cfg.seed, cfg.threads);
  };
  const PanelResult data_panel = build_panel(LossKind::DataBased, b0);
  const PanelResult quad_panel = build_panel(LossKind::Quadratic, b1);

  out << config_summary(cfg) << '\n';
  out << "alpha,loss,b,prial_percent,prial_se,base_mean,alt_mean,reps,seed,certified\n";
  for (std::size_t i = 0; i < cfg.alphas.size(); ++i) {
    const double alpha = cfg.alphas[i];
    const PrialReport db = prial(data_panel.losses[0], data_panel.losses[i + 1], cfg.seed);
    const PrialReport qd = prial(quad_panel.losses[0], quad_panel.losses[i + 1], cfg.seed);
    out << fmt_g(alpha) << ",data_based," << fmt_g(b0) << ',' << fmt_g(db.prial_percent)
        << ',' << fmt_g(db.std_error_prial) << ',' << fmt_g(db.baseline_mean) << ','
        << fmt_g(db.alt_mean) << ',' << db.replications << ',' << cfg.seed << ','
        << (is_certified(alpha, b0, b0) ? "true" : "false") << '\n';
    out << fmt_g(alpha) << ",quadratic," << fmt_g(b1) << ',' << fmt_g(qd.prial_percent)
        << ',' << fmt_g(qd.std_error_prial) << ',' << fmt_g(qd.baseline_mean) << ','
        << fmt_g(qd.alt_mean) << ',' << qd.replications << ',' << cfg.seed << ','
        << (is_certified(alpha, b1, b0) ? "true" : "false") << '\n';
  }
}

namespace {

struct SteinHaffCase {
  int p;
  int m;
  SigmaSpec sigma;
  const char* sigma_name;
};

std::uint64_t derived_seed(std::uint64_t base, std::uint64_t index) {
  return base + 0x9e3779b97f4a7c15ull * (index + 1);
}

}  // namespace

int cmd_verify(const VerifyConfig& vcfg, std::ostream& out) {
  bool all_ok = true;
  const auto report = [&](bool ok, const std::string& name, const std::string& detail) {
    out << (ok ? "[PASS] " : "[FAIL] ") << name << ": " << detail << '\n';
    if (!ok) all_ok = false;
  };

  // Stein-Haff identity, Gaussian sampling, per-draw paired sides.
  {
    const std::vector<SteinHaffCase> cases = {
        {5, 10, SigmaSpec::identity(5), "identity"},
        {10, 4, SigmaSpec::ar1(10, 0.9), "ar1(0.9)"},
        {4, 12, SigmaSpec::identity(4), "identity"},
    };
    int idx = 0;
    for (const auto& c : cases) {
      const int rv = std::min(c.p, c.m) * std::max(c.p, c.m);
      for (const bool use_identity : {true, false}) {
        const ShrinkagePsi phi =
            use_identity ? ShrinkagePsi::identity() : ShrinkagePsi::haff(1.0, 1.0);
        const IdentityCheckResult res =
            stein_haff_check(c.sigma, c.p, c.m, phi, vcfg.stein_haff_reps,
                             derived_seed(vcfg.seed, idx), vcfg.threads);
        bool ok = std::abs(res.z_score) < 4.0;
        std::ostringstream detail;
        detail << "p=" << c.p << " m=" << c.m << " sigma=" << c.sigma_name
               << " phi=" << (use_identity ? "identity" : "haff(1,1)")
               << " lhs=" << fmt_g(res.lhs_mean) << " rhs=" << fmt_g(res.rhs_mean)
               << " z=" << fmt_g(res.z_score) << " rejected=" << res.rejected;
        if (use_identity) {
          // The closed-form side collapses to r*v for every draw.
          const bool exact = std::abs(res.rhs_mean - rv) <= 1e-9 * rv;
          detail << " rhs_exact_rv=" << (exact ? "yes" : "NO");
          ok = ok && exact;
        }
        report(ok, "stein-haff", detail.str());
        ++idx;
      }
    }
  }

  // Improvement certificate: g(psi) under its spectrum-free bound, bound <= 0
  // for b inside the certified interval.
  {
    const std::vector<std::pair<int, int>> vr = {{25, 10}, {50, 20}, {10, 5}};
    int case_idx = 0;
    for (const auto& [v, r] : vr) {
      Rng rng(derived_seed(vcfg.seed ^ 0x67e6c7a3u, case_idx++));
      const double b0 = b0_bound(v, r);
      double worst_gap = -1e300;
      double worst_margin = -1e300;
      int variant_disagreements = 0;
      bool ok = true;
      for (int t = 0; t < vcfg.gpsi_triples; ++t) {
        const Eigen::VectorXd spectrum = random_log_uniform_spectrum(r, 1e-3, 1e3, rng);
        const double alpha = 1.0 + 9.0 * rng.uniform();
        const double b = b0 * rng.uniform();
        const ShrinkagePsi psi = ShrinkagePsi::haff(alpha, b);
        const double g = g_psi(spectrum, psi, v, r, psi.trace_lower_bound(v, r));
        const double g_sym = g_psi(spectrum, psi, v, r, psi.trace_lower_bound(v, r),
                                   /*symmetrized_cross=*/true);
        const double margin = haff_improvement_margin(v, r, b);
        worst_gap = std::max(worst_gap, g - margin);
        worst_margin = std::max(worst_margin, margin);
        if (std::abs(g - g_sym) > 1e-9) ++variant_disagreements;
        if (g > margin + 1e-9 || margin > 0.0) ok = false;
      }
      std::ostringstream detail;
      detail << "(v,r)=(" << v << ',' << r << ") triples=" << vcfg.gpsi_triples
             << " max(g-margin)=" << fmt_g(worst_gap)
             << " max(margin)=" << fmt_g(worst_margin)
             << " cross-term-variants-differ=" << variant_disagreements << "/"
             << vcfg.gpsi_triples;
      report(ok, "improvement-certificate", detail.str());
    }
  }

  // Risk optimality of the scale constant.
  {
    const std::vector<double> factors = {0.5, 0.75, 1.0, 1.25, 1.5};
    const int p = 5;
    const int m = 15;
    int idx = 0;
    struct ScanCase {
      ModelSpec model;
      SigmaSpec sigma;
      const char* name;
    };
    const std::vector<ScanCase> cases = {
        {ModelSpec::gaussian(), SigmaSpec::identity(p), "gaussian/identity"},
        {ModelSpec::gaussian(), SigmaSpec::ar1(p, 0.9), "gaussian/ar1(0.9)"},
        {ModelSpec::student_t(5.0), SigmaSpec::identity(p), "student(5)/identity"},
        {ModelSpec::student_t(5.0), SigmaSpec::ar1(p, 0.9), "student(5)/ar1(0.9)"},
    };
    for (const auto& c : cases) {
      const double center =
          optimal_a(c.model, p, m) * (vcfg.inject_broken_a ? 2.0 : 1.0);
      std::vector<double> grid;
      grid.reserve(factors.size());
      for (double f : factors) grid.push_back(center * f);
      const OptimalityScan scan =
          risk_optimality_scan(c.model, c.sigma, p, m, grid, LossKind::DataBased,
                               vcfg.scan_reps, derived_seed(vcfg.seed ^ 0x51ed270bu, idx++),
                               vcfg.threads);
      const bool ok = scan.argmin == 2;
      std::ostringstream detail;
      detail << c.name << " argmin_factor=" << fmt_g(factors[scan.argmin])
             << " risks=[";
      for (std::size_t i = 0; i < scan.mean_risk.size(); ++i) {
        if (i) detail << ' ';
        detail << fmt_g(scan.mean_risk[i]);
      }
      detail << "]";
      report(ok, "a0-optimality", detail.str());
    }
  }

  // Matrix primitives: Penrose conditions, reconstruction, trace rank,
  // symmetric square root round-trip.
  {
    Rng rng(derived_seed(vcfg.seed ^ 0x2545f491u, 0));
    double max_penrose = 0.0;
    double max_recon = 0.0;
    double max_trace = 0.0;
    double max_sqrt = 0.0;
    bool ok = true;
    for (int t = 0; t < vcfg.matrix_instances; ++t) {
      const int p = 1 + static_cast<int>(rng.next_u64() % 30);
      const int m = 1 + static_cast<int>(rng.next_u64() % 30);
      Eigen::MatrixXd u(m, p);
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < p; ++j) u(i, j) = rng.normal();
      }
      const Eigen::MatrixXd s = gram(u);
      EigenSystem es;
      try {
        es = eigen_sym_truncated(s);
      } catch (const RankZeroError&) {
        continue;
      }
      const Eigen::MatrixXd pinv = pinv_from_eigen(es);
      const double s_norm = s.norm();
      const double pinv_norm = pinv.norm();
      const double r1 = (s * pinv * s - s).norm() / s_norm;
      const double r2 = (pinv * s * pinv - pinv).norm() / pinv_norm;
      const Eigen::MatrixXd sp = s * pinv;
      const Eigen::MatrixXd ps = pinv * s;
      const double r3 = (sp - sp.transpose()).norm() / std::max(1.0, sp.norm());
      const double r4 = (ps - ps.transpose()).norm() / std::max(1.0, ps.norm());
      max_penrose = std::max({max_penrose, r1, r2, r3, r4});
      const Eigen::MatrixXd recon = es.H * es.L.asDiagonal() * es.H.transpose();
      max_recon = std::max(max_recon, (recon - s).norm() / s_norm);
      max_trace = std::max(max_trace, std::abs(ps.trace() - es.r) / es.r);
      if (t % 10 == 0) {
        const int pp = 2 + static_cast<int>(rng.next_u64() % 49);
        const double rho = -0.95 + 1.9 * rng.uniform();
        const Eigen::MatrixXd sigma = sigma_build(SigmaSpec::ar1(pp, rho));
        const Eigen::MatrixXd root = sym_sqrt(sigma);
        max_sqrt = std::max(max_sqrt, (root * root - sigma).norm() / sigma.norm());
      }
    }
    ok = max_penrose <= 1e-8 && max_recon <= 1e-8 && max_trace <= 1e-8 &&
         max_sqrt <= 1e-10;
    std::ostringstream detail;
    detail << "instances=" << vcfg.matrix_instances
           << " max_penrose=" << fmt_g(max_penrose) << " max_recon=" << fmt_g(max_recon)
           << " max_trace_rel=" << fmt_g(max_trace) << " max_sqrt=" << fmt_g(max_sqrt);
    report(ok, "matrix-primitives", detail.str());
  }

  out << (all_ok ? "verify: all checks passed" : "verify: FAILED") << '\n';
  return all_ok ? 0 : 1;
}

}  // namespace ellcov::bench
