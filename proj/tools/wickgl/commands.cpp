#include "commands.hpp"

#include <fmt/core.h>

#include <Eigen/Core>
#include <fstream>
#include <iostream>
#include <optional>

#include "wickgl/error.hpp"
#include "wickgl/field_io.hpp"
#include "wickgl/gl.hpp"
#include "wickgl/lattice.hpp"
#include "wickgl/montecarlo.hpp"
#include "wickgl/oracle.hpp"
#include "wickgl/parallel.hpp"
#include "wickgl/spectral_grid.hpp"
#include "wickgl/wick.hpp"

namespace wickgl::cli {
namespace {

Mode to_mode(const std::vector<int>& coords, int dim, const char* what) {
  if (coords.empty()) return Mode{};
  if (static_cast<int>(coords.size()) != dim) {
    throw DomainError(fmt::format("{} has {} coordinates, expected {}", what,
                                  coords.size(), dim));
  }
  return make_mode(coords);
}

Json mode_json(const Mode& v, int dim) {
  Json a = Json::array();
  for (int j = 0; j < dim; ++j) a.push_back(v[j]);
  return a;
}

std::string mode_csv(const Mode& v, int dim) {
  std::string s;
  for (int j = 0; j < dim; ++j) s += fmt::format(",{}", v[j]);
  return s;
}

std::string mode_header(int dim) {
  std::string s;
  for (int j = 1; j <= dim; ++j) s += fmt::format(",k{}", j);
  return s;
}

CutoffProfile profile_for(const ModeLattice& lattice, const std::string& kind,
                          double radius) {
  return make_profile(parse_profile_kind(kind), lattice,
                      radius > 0.0 ? radius : lattice.cutoff());
}

int worker_count(const Globals& g) {
  return resolve_thread_count(g.threads);
}

void emit(const Json& record) { std::cout << dump(record) << '\n'; }

void summary(const Globals& g, const std::string& line) {
  if (!g.quiet) std::cerr << line << '\n';
}

std::ofstream open_output(RunContext& ctx, const std::string& name,
                          bool binary = false) {
  const auto path = ctx.output(name);
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw DomainError("cannot write " + path.string());
  return out;
}

std::string opt(const std::optional<double>& x) {
  return x ? format_double(*x) : "none";
}

Json opt_json(const std::optional<double>& x) {
  return x ? number(*x) : Json(nullptr);
}

// ---------------------------------------------------------------------------

Command lattice_info(CLI::App& app) {
  struct Opts {
    int dim = 1, cutoff = 2, power = 2;
    std::string profile = "box";
    double radius = 0.0;
  };
  auto o = std::make_shared<Opts>();
  CLI::App* sub = app.add_subcommand("lattice-info", "Mode lattice, profile and grid sizes");
  sub->add_option("--dim", o->dim, "Dimension d")->capture_default_str();
  sub->add_option("--cutoff", o->cutoff, "Cutoff K")->capture_default_str();
  sub->add_option("--profile", o->profile, "box, ball or smooth")->capture_default_str();
  sub->add_option("--radius", o->radius, "Profile radius (0: the cutoff)")->capture_default_str();
  sub->add_option("--power", o->power, "Degree for the alias-free grid size")
      ->capture_default_str();
  return {sub, [o](RunContext& ctx, const Globals& g) {
            const ModeLattice lat = build_lattice(o->dim, o->cutoff);
            const CutoffProfile phi = profile_for(lat, o->profile, o->radius);
            double max_lambda = 0.0;
            for (std::size_t i = 0; i < lat.size(); ++i) {
              max_lambda = std::max(max_lambda, lat.lambda(i));
            }
            Json r;
            r["schema"] = schema::kLattice;
            r["dim"] = o->dim;
            r["cutoff"] = o->cutoff;
            r["size"] = lat.size();
            r["max_lambda"] = max_lambda;
            r["profile"] = o->profile;
            r["variance"] = field_variance(phi);
            r["grid"] = fft_friendly_size(lat.side());
            r["power"] = o->power;
            r["dealiased_grid"] = dealiased_grid_size(o->power, o->cutoff);
            emit(r);
            if (ctx.writes_files()) {
              std::ofstream csv = open_output(ctx, "modes.csv");
              csv << "schema";
              for (int j = 1; j <= o->dim; ++j) csv << ",v" << j;
              csv << ",lambda,phi\n";
              for (std::size_t i = 0; i < lat.size(); ++i) {
                csv << schema::kLattice << mode_csv(lat.mode(i), o->dim) << ','
                    << format_double(lat.lambda(i)) << ',' << format_double(phi[i])
                    << '\n';
              }
            }
            summary(g, fmt::format("lattice d={} K={}: {} modes, variance {}", o->dim,
                                   o->cutoff, lat.size(),
                                   format_double(field_variance(phi))));
            return 0;
          }};
}

Command wick_expect(CLI::App& app) {
  struct Opts {
    std::vector<int> degrees;
    std::string cov;
    std::string cov_file;
  };
  auto o = std::make_shared<Opts>();
  CLI::App* sub = app.add_subcommand(
      "wick-expect", "E[prod :Z_i^{n_i}:] for a centered Gaussian vector");
  sub->add_option("--degrees", o->degrees, "Degree vector, e.g. 2,2")
      ->delimiter(',')
      ->required();
  auto* cov = sub->add_option("--cov", o->cov, "Covariance as a JSON matrix");
  auto* file = sub->add_option("--cov-file", o->cov_file, "JSON file holding the matrix");
  cov->excludes(file);
  return {sub, [o](RunContext& ctx, const Globals& g) {
            Json m;
            if (!o->cov_file.empty()) {
              std::ifstream in(o->cov_file);
              if (!in) throw DomainError("cannot read " + o->cov_file);
              m = Json::parse(in, nullptr, false);
            } else if (!o->cov.empty()) {
              m = Json::parse(o->cov, nullptr, false);
            } else {
              throw DomainError("a covariance is required (--cov or --cov-file)");
            }
            const int size = static_cast<int>(o->degrees.size());
            if (!m.is_array() || static_cast<int>(m.size()) != size) {
              throw DomainError(
                  fmt::format("covariance must be a {}x{} JSON matrix", size, size));
            }
            Eigen::MatrixXd c(size, size);
            for (int i = 0; i < size; ++i) {
              if (!m[i].is_array() || static_cast<int>(m[i].size()) != size) {
                throw DomainError(fmt::format("covariance row {} must have {} entries",
                                              i + 1, size));
              }
              for (int j = 0; j < size; ++j) {
                if (!m[i][j].is_number()) throw DomainError("covariance entries must be numbers");
                c(i, j) = m[i][j].get<double>();
              }
            }
            const double value = wick_expectation_product(o->degrees, c);
            Json r;
            r["schema"] = schema::kWickExpect;
            r["degrees"] = o->degrees;
            r["cov"] = m;
            r["pairings"] = enumerate_theta_preimage(size, o->degrees).size();
            r["value"] = value;
            emit(r);
            if (ctx.writes_files()) open_output(ctx, "wick-expect.json") << dump(r) << '\n';
            summary(g, "wick-expect: " + format_double(value));
            return 0;
          }};
}

Json report_json(const EstimateReport& r) {
  Json j;
  j["target"] = r.target;
  j["kind"] = r.kind;
  j["samples"] = r.samples;
  j["estimate"] = {number(r.estimate.real()), number(r.estimate.imag())};
  j["stderr"] = number(r.std_error);
  j["stderr_re"] = number(r.stderr_re);
  j["stderr_im"] = number(r.stderr_im);
  if (r.oracle) {
    j["oracle"] = {number(r.oracle->real()), number(r.oracle->imag())};
    j["zscore"] = number(r.zscore);
  } else {
    j["oracle"] = nullptr;
    j["zscore"] = nullptr;
  }
  j["bias_budget"] = number(r.bias_budget);
  j["z_max"] = number(r.z_max);
  j["passed"] = r.passed;
  j["note"] = r.note;
  return j;
}

Command wick_correlate(CLI::App& app) {
  struct Opts {
    std::string kind = "wp", profile = "box";
    int dim = 1, cutoff = 2, n1 = -1, n2 = -1, power = 2;
    std::vector<int> k1, k2;
    double radius = 0.0, tau = 0.0, t0 = 0.0, t1 = 0.0, t2 = 0.0;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    double dt = 1.0 / 256.0, burn_in = 20.0, bias_relative = -1.0, z_max = 4.0;
  };
  auto o = std::make_shared<Opts>();
  CLI::App* sub = app.add_subcommand(
      "wick-correlate", "Correlation oracle, optionally against a Monte Carlo estimate");
  sub->add_option("--kind", o->kind, "wp, awp or cwp")->capture_default_str();
  sub->add_option("--dim", o->dim, "Dimension d")->capture_default_str();
  sub->add_option("--cutoff", o->cutoff, "Cutoff K")->capture_default_str();
  sub->add_option("--profile", o->profile, "box, ball or smooth")->capture_default_str();
  sub->add_option("--radius", o->radius, "Profile radius (0: the cutoff)")->capture_default_str();
  sub->add_option("--power", o->power, "Degree n of both factors")->capture_default_str();
  sub->add_option("--n1", o->n1, "Degree of the first factor (default: --power)");
  sub->add_option("--n2", o->n2, "Degree of the second factor (default: --power)");
  sub->add_option("--k1", o->k1, "First mode, e.g. 1,0 (default: 0)")->delimiter(',');
  sub->add_option("--k2", o->k2, "Second mode (default: --k1)")->delimiter(',');
  sub->add_option("--tau", o->tau, "WP: time lag")->capture_default_str();
  sub->add_option("--t0", o->t0, "AWP: start of the average")->capture_default_str();
  sub->add_option("--t1", o->t1, "AWP/CWP: first time")->capture_default_str();
  sub->add_option("--t2", o->t2, "AWP/CWP: second time")->capture_default_str();
  sub->add_option("--samples", o->samples, "Monte Carlo trajectories (0: oracle only)")
      ->capture_default_str();
  sub->add_option("--seed", o->seed, "Master seed")->capture_default_str();
  sub->add_option("--dt", o->dt, "AWP/CWP step")->capture_default_str();
  sub->add_option("--burn-in", o->burn_in, "CWP burn-in time")->capture_default_str();
  sub->add_option("--bias-relative", o->bias_relative,
                  "Relative bias budget (<0: 0 for WP, 0.01 otherwise)")
      ->capture_default_str();
  sub->add_option("--z-max", o->z_max, "Pass threshold in standard errors")
      ->capture_default_str();
  return {sub, [o](RunContext& ctx, const Globals& g) {
            const WickKind kind = parse_wick_kind(o->kind);
            const int n1 = o->n1 >= 0 ? o->n1 : o->power;
            const int n2 = o->n2 >= 0 ? o->n2 : o->power;
            const Mode k1 = to_mode(o->k1, o->dim, "--k1");
            const Mode k2 = o->k2.empty() ? k1 : to_mode(o->k2, o->dim, "--k2");
            const ModeLattice lat = build_lattice(o->dim, o->cutoff);
            const CutoffProfile phi = profile_for(lat, o->profile, o->radius);

            Json r;
            r["schema"] = schema::kCorrelation;
            r["kind"] = to_string(kind);
            r["dim"] = o->dim;
            r["cutoff"] = o->cutoff;
            r["profile"] = o->profile;
            r["n1"] = n1;
            r["n2"] = n2;
            r["k1"] = mode_json(k1, o->dim);
            r["k2"] = mode_json(k2, o->dim);
            double lag = o->tau;
            if (kind == WickKind::kWP) {
              r["tau"] = o->tau;
            } else {
              if (kind == WickKind::kAWP) r["t0"] = o->t0;
              r["t1"] = o->t1;
              r["t2"] = o->t2;
              lag = o->t2 - o->t1;
            }

            int status = 0;
            Complex value;
            if (o->samples > 0) {
              EstimateTarget t;
              t.name = "wick-correlate";
              t.kind = kind;
              t.dim = o->dim;
              t.cutoff = o->cutoff;
              t.profile = parse_profile_kind(o->profile);
              t.profile_radius = o->radius;
              t.n1 = n1;
              t.n2 = n2;
              t.k1 = k1;
              t.k2 = k2;
              t.time = {.tau = o->tau, .t0 = o->t0, .t1 = o->t1, .t2 = o->t2};
              t.samples = o->samples;
              t.seed = o->seed;
              t.dt = o->dt;
              t.burn_in = o->burn_in;
              t.bias_relative = o->bias_relative;
              t.z_max = o->z_max;
              ctx.set_seed(o->seed);
              const EstimateReport rep = estimate_wick_correlation(t, worker_count(g));
              const Json fields = report_json(rep);
              for (const auto& [key, item] : fields.items()) {
                if (key != "target" && key != "kind") r[key] = item;
              }
              value = rep.oracle.value_or(rep.estimate);
              status = rep.passed ? 0 : 1;
              summary(g, fmt::format("wick-correlate {}: estimate {} oracle {} |z| {} {}",
                                     to_string(kind), format_double(rep.estimate.real()),
                                     rep.oracle ? format_double(rep.oracle->real()) : "none",
                                     format_double(rep.zscore),
                                     rep.passed ? "pass" : "fail"));
            } else {
              switch (kind) {
                case WickKind::kWP:
                  value = correlation_wick(o->dim, o->cutoff, phi, phi, n1, n2, k1, k2, o->tau);
                  break;
                case WickKind::kAWP:
                  value = correlation_awp(o->dim, o->cutoff, phi, phi, n1, n2, k1, k2, o->t0,
                                          o->t1, o->t2);
                  break;
                case WickKind::kCWP:
                  value = correlation_cwp(o->dim, o->cutoff, phi, phi, n1, n2, k1, k2, o->t1,
                                          o->t2);
                  break;
              }
              r["oracle"] = {number(value.real()), number(value.imag())};
              if (!regime_exists(kind, std::max(n1, n2), o->dim)) {
                r["note"] = "finite-cutoff value; no limit as the cutoff grows";
              }
              summary(g, fmt::format("wick-correlate {}: oracle {}", to_string(kind),
                                     format_double(value.real())));
            }
            emit(r);
            if (ctx.writes_files()) {
              open_output(ctx, "correlation.json") << dump(r) << '\n';
              std::ofstream csv = open_output(ctx, "correlation.csv");
              csv << "schema,kind,n,d" << mode_header(o->dim) << ",tau,K,value\n";
              const std::string n =
                  n1 == n2 ? std::to_string(n1) : fmt::format("{}:{}", n1, n2);
              csv << schema::kCorrelation << ',' << to_string(kind) << ',' << n << ','
                  << o->dim << mode_csv(k1, o->dim) << ',' << format_double(lag) << ','
                  << o->cutoff << ',' << format_double(value.real()) << '\n';
            }
            return status;
          }};
}

Command regime(CLI::App& app) {
  struct Opts {
    int dim = 2, power = 2;
  };
  auto o = std::make_shared<Opts>();
  CLI::App* sub =
      app.add_subcommand("regime", "Existence and regularity of WP, AWP and CWP");
  sub->add_option("--dim", o->dim, "Dimension d >= 2")->required();
  sub->add_option("--power", o->power, "Degree n >= 2")->required();
  return {sub, [o](RunContext& ctx, const Globals& g) {
            const RegimeReport rep = regime_classify(o->power, o->dim);
            Json r;
            r["schema"] = schema::kRegime;
            r["n"] = rep.n;
            r["d"] = rep.d;
            r["wp"] = rep.wp_exists;
            r["wp_exp"] = opt_json(rep.wp_exponent);
            r["awp"] = rep.awp_exists;
            r["awp_exp"] = opt_json(rep.awp_exponent);
            r["cwp"] = rep.cwp_exists;
            r["cwp_exp"] = opt_json(rep.cwp_exponent);
            emit(r);
            if (ctx.writes_files()) {
              open_output(ctx, "regime.json") << dump(r) << '\n';
              std::ofstream csv = open_output(ctx, "regime.csv");
              csv << "schema,n,d,wp,wp_exp,awp,awp_exp,cwp,cwp_exp\n"
                  << schema::kRegime << ',' << rep.n << ',' << rep.d << ','
                  << rep.wp_exists << ',' << opt(rep.wp_exponent) << ','
                  << rep.awp_exists << ',' << opt(rep.awp_exponent) << ','
                  << rep.cwp_exists << ',' << opt(rep.cwp_exponent) << '\n';
            }
            summary(g, fmt::format("regime n={} d={}: wp {} awp {} ({}) cwp {} ({})",
                                   rep.n, rep.d, rep.wp_exists ? "yes" : "no",
                                   rep.awp_exists ? "yes" : "no", opt(rep.awp_exponent),
                                   rep.cwp_exists ? "yes" : "no", opt(rep.cwp_exponent)));
            return 0;
          }};
}

Command diverge_scan(CLI::App& app) {
  struct Opts {
    std::string kind = "wp";
    int dim = 3, power = 3;
    std::vector<int> k;
    std::vector<int> cutoffs = {2, 4, 8, 16};
  };
  auto o = std::make_shared<Opts>();
  CLI::App* sub = app.add_subcommand("diverge-scan",
                                     "Partial sums of a second-moment kernel over cutoffs");
  sub->add_option("--kind", o->kind, "wp, awp or cwp")->capture_default_str();
  sub->add_option("--dim", o->dim, "Dimension d")->capture_default_str();
  sub->add_option("--power", o->power, "Degree n")->capture_default_str();
  sub->add_option("--k", o->k, "Mode (default: 0)")->delimiter(',');
  sub->add_option("--cutoffs", o->cutoffs, "Strictly increasing cutoffs")
      ->delimiter(',')
      ->capture_default_str();
  return {sub, [o](RunContext& ctx, const Globals& g) {
            const WickKind kind = parse_wick_kind(o->kind);
            const Mode k = to_mode(o->k, o->dim, "--k");
            const DivergenceScan s = divergence_scan(kind, o->power, o->dim, k, o->cutoffs);
            Json r;
            r["schema"] = schema::kScan;
            r["kind"] = to_string(kind);
            r["n"] = o->power;
            r["d"] = o->dim;
            r["k"] = mode_json(k, o->dim);
            r["cutoffs"] = s.cutoffs;
            r["sums"] = s.sums;
            r["increments"] = s.increments;
            r["verdict"] = s.verdict;
            emit(r);
            if (ctx.writes_files()) {
              open_output(ctx, "diverge-scan.json") << dump(r) << '\n';
              std::ofstream csv = open_output(ctx, "diverge-scan.csv");
              csv << "schema,kind,n,d" << mode_header(o->dim) << ",tau,K,value\n";
              for (std::size_t i = 0; i < s.sums.size(); ++i) {
                csv << schema::kScan << ',' << to_string(kind) << ',' << o->power << ','
                    << o->dim << mode_csv(k, o->dim) << ",0," << s.cutoffs[i] << ','
                    << format_double(s.sums[i]) << '\n';
              }
            }
            summary(g, fmt::format("diverge-scan {} n={} d={}: {}", to_string(kind),
                                   o->power, o->dim, s.verdict));
            return 0;
          }};
}

Json bounds_json(const TwoSidedReport& t) {
  Json j;
  j["first"] = {number(t.first_lower), number(t.first_mid), number(t.first_upper)};
  j["second"] = {number(t.second_lower), number(t.second_mid), number(t.second_upper)};
  j["third"] = {number(t.third_lower), number(t.third_mid), number(t.third_upper)};
  j["holds"] = Json::array();
  for (bool h : t.holds) j["holds"].push_back(h);
  j["all"] = t.all();
  return j;
}

Command check_bounds(CLI::App& app) {
  struct Opts {
    int dim = 1, cutoff = 24, all_v = -1;
    double alpha = 1.0, beta = 1.0;
    std::vector<int> v;
  };
  auto o = std::make_shared<Opts>();
  CLI::App* sub = app.add_subcommand(
      "check-bounds", "Two-sided bounds for truncated discrete convolutions");
  sub->add_option("--dim", o->dim, "Dimension d")->capture_default_str();
  sub->add_option("--alpha", o->alpha, "Exponent alpha >= 0")->capture_default_str();
  sub->add_option("--beta", o->beta, "Exponent beta >= 0")->capture_default_str();
  sub->add_option("--cutoff", o->cutoff, "Truncation K")->capture_default_str();
  auto* v = sub->add_option("--v", o->v, "Mode v (default: 0)")->delimiter(',');
  sub->add_option("--all-v", o->all_v, "Check every |v|_inf <= R instead")->excludes(v);
  return {sub, [o](RunContext& ctx, const Globals& g) {
            std::vector<Mode> modes;
            if (o->all_v >= 0) {
              if (o->all_v == 0) {
                modes.push_back(Mode{});
              } else {
                const ModeLattice box = build_lattice(o->dim, o->all_v);
                for (std::size_t i = 0; i < box.size(); ++i) modes.push_back(box.mode(i));
              }
            } else {
              modes.push_back(to_mode(o->v, o->dim, "--v"));
            }
            std::ofstream csv;
            if (ctx.writes_files()) {
              csv = open_output(ctx, "check-bounds.csv");
              csv << "schema,d,alpha,beta,K" << mode_header(o->dim)
                  << ",first_lower,first_mid,first_upper,second_lower,second_mid,"
                     "second_upper,third_lower,third_mid,third_upper,all\n";
            }
            std::size_t failures = 0;
            for (const Mode& m : modes) {
              const TwoSidedReport t = twosided_bound_check(o->dim, o->alpha, o->beta, m,
                                                            o->cutoff);
              if (!t.all()) ++failures;
              if (modes.size() == 1 || !t.all()) {
                Json r;
                r["schema"] = schema::kBounds;
                r["d"] = o->dim;
                r["alpha"] = o->alpha;
                r["beta"] = o->beta;
                r["cutoff"] = o->cutoff;
                r["v"] = mode_json(m, o->dim);
                const Json fields = bounds_json(t);
                for (const auto& [key, item] : fields.items()) r[key] = item;
                emit(r);
              }
              if (csv.is_open()) {
                csv << schema::kBounds << ',' << o->dim << ',' << format_double(o->alpha)
                    << ',' << format_double(o->beta) << ',' << o->cutoff
                    << mode_csv(m, o->dim);
                for (double x : {t.first_lower, t.first_mid, t.first_upper, t.second_lower,
                                 t.second_mid, t.second_upper, t.third_lower, t.third_mid,
                                 t.third_upper}) {
                  csv << ',' << format_double(x);
                }
                csv << ',' << t.all() << '\n';
              }
            }
            if (modes.size() > 1) {
              Json r;
              r["schema"] = schema::kBounds;
              r["d"] = o->dim;
              r["alpha"] = o->alpha;
              r["beta"] = o->beta;
              r["cutoff"] = o->cutoff;
              r["checked"] = modes.size();
              r["failures"] = failures;
              emit(r);
            }
            summary(g, fmt::format("check-bounds: {} of {} modes hold", modes.size() - failures,
                                   modes.size()));
            return failures == 0 ? 0 : 1;
          }};
}

Command time_integrals(CLI::App& app) {
  struct Opts {
    std::string kind = "aver";
    double c = 1.0, a = 1.0, b = 1.0, t0 = 0.0, t1 = 1.0, t2 = 1.0, theta = 1.0;
  };
  auto o = std::make_shared<Opts>();
  CLI::App* sub = app.add_subcommand("time-integrals",
                                     "Closed-form time integrals behind AWP and CWP");
  sub->add_option("--kind", o->kind, "aver or conv")->capture_default_str();
  sub->add_option("--c", o->c, "aver: rate c > 0")->capture_default_str();
  sub->add_option("--a", o->a, "conv: rate a > 0")->capture_default_str();
  sub->add_option("--b", o->b, "conv: rate b > 0")->capture_default_str();
  sub->add_option("--t0", o->t0, "aver: start time")->capture_default_str();
  sub->add_option("--t1", o->t1, "First time")->capture_default_str();
  sub->add_option("--t2", o->t2, "Second time")->capture_default_str();
  sub->add_option("--theta", o->theta, "aver: exponent of the upper bound, in [1, 2]")
      ->capture_default_str();
  return {sub, [o](RunContext& ctx, const Globals& g) {
            Json r;
            r["schema"] = schema::kTimeIntegral;
            double value = 0.0;
            if (o->kind == "aver") {
              value = time_integral_aver(o->c, o->t0, o->t1, o->t2);
              r["kind"] = "aver";
              r["c"] = o->c;
              r["t0"] = o->t0;
              r["t1"] = o->t1;
              r["t2"] = o->t2;
              r["value"] = value;
              if (o->t1 == o->t2) {
                r["lower"] = time_integral_aver_lower(o->c, o->t0, o->t1);
                r["upper"] = time_integral_aver_upper(o->c, o->t0, o->t1, o->theta);
              }
            } else if (o->kind == "conv") {
              value = time_integral_conv(o->a, o->b, o->t1, o->t2);
              r["kind"] = "conv";
              r["a"] = o->a;
              r["b"] = o->b;
              r["t1"] = o->t1;
              r["t2"] = o->t2;
              r["value"] = value;
            } else {
              throw DomainError("unknown time integral '" + o->kind +
                                "' (expected aver or conv)");
            }
            emit(r);
            if (ctx.writes_files()) open_output(ctx, "time-integral.json") << dump(r) << '\n';
            summary(g, fmt::format("time-integrals {}: {}", o->kind, format_double(value)));
            return 0;
          }};
}

Command solve_gl_command(CLI::App& app) {
  struct Opts {
    int dim = 2, power = 3, cutoff = 8, grid = 0, refinement = 0, stride = 1;
    std::vector<double> kappa;
    std::vector<double> r = {0.0, 0.5, 1.0};
    double dt = 1e-3, t0 = 0.0, tmax = 0.5, eta = -0.5, eps_prime = 0.05,
           blowup = 1e6, radius = 0.0, init_constant = 0.0;
    std::uint64_t seed = 0, trajectory = 0;
    std::string profile = "box", init;
    bool no_noise = false;
  };
  auto o = std::make_shared<Opts>();
  CLI::App* sub = app.add_subcommand("solve-gl", "Stochastic Ginzburg-Landau run");
  sub->add_option("--dim", o->dim, "Dimension (2 or 3)")->capture_default_str();
  sub->add_option("--power", o->power, "Degree n of the nonlinearity")->capture_default_str();
  sub->add_option("--kappa", o->kappa, "Coefficients k0,...,kn")
      ->delimiter(',')
      ->required();
  sub->add_option("--cutoff", o->cutoff, "Galerkin cutoff K")->capture_default_str();
  sub->add_option("--grid", o->grid, "Norm grid points per axis (0: automatic)")
      ->capture_default_str();
  sub->add_option("--profile", o->profile, "Noise profile: box, ball or smooth")
      ->capture_default_str();
  sub->add_option("--radius", o->radius, "Profile radius (0: the cutoff)")->capture_default_str();
  sub->add_option("--dt", o->dt, "Time step")->capture_default_str();
  sub->add_option("--t0", o->t0, "Start time")->capture_default_str();
  sub->add_option("--tmax", o->tmax, "End time")->capture_default_str();
  sub->add_option("--seed", o->seed, "Master seed")->capture_default_str();
  sub->add_option("--trajectory", o->trajectory, "Trajectory index")->capture_default_str();
  sub->add_option("--refinement-level", o->refinement, "Brownian refinement level")
      ->capture_default_str();
  sub->add_option("--eta", o->eta, "Initial regularity eta")->capture_default_str();
  sub->add_option("--eps-prime", o->eps_prime, "Blow-up proxy offset")->capture_default_str();
  sub->add_option("--blowup-threshold", o->blowup, "Blow-up threshold R")
      ->capture_default_str();
  sub->add_option("--stride", o->stride, "Record every n-th step")->capture_default_str();
  sub->add_option("--r", o->r, "Trace exponents")->delimiter(',')->capture_default_str();
  auto* init = sub->add_option("--init", o->init, "Initial field file (binary; default: zero)");
  sub->add_option("--init-constant", o->init_constant, "Constant initial field instead")
      ->excludes(init);
  sub->add_flag("--no-noise", o->no_noise, "Switch the noise off");
  return {sub, [o](RunContext& ctx, const Globals& g) {
            if (static_cast<int>(o->kappa.size()) != o->power + 1) {
              throw DomainError(fmt::format("--kappa needs {} coefficients for power {}",
                                            o->power + 1, o->power));
            }
            GlConfig c;
            c.dim = o->dim;
            c.kappa = KappaSchedule(o->kappa);
            c.cutoff = o->cutoff;
            c.grid_points = o->grid;
            c.profile = parse_profile_kind(o->profile);
            c.profile_radius = o->radius;
            c.noise = !o->no_noise;
            c.seed = o->seed;
            c.trajectory = o->trajectory;
            c.refinement_level = o->refinement;
            c.t0 = o->t0;
            c.dt = o->dt;
            c.t_end = o->tmax;
            c.eta = o->eta;
            c.eps_prime = o->eps_prime;
            c.blowup_threshold = o->blowup;
            c.snapshot_stride = o->stride;
            c.trace_exponents = o->r;
            ctx.set_seed(o->seed);

            const ModeLattice lat = build_lattice(o->dim, o->cutoff);
            SpectralField xi(lat);
            if (!o->init.empty()) {
              std::ifstream in(o->init, std::ios::binary);
              if (!in) throw DomainError("cannot read " + o->init);
              xi = read_field_binary(in).resized(lat);
            } else if (o->init_constant != 0.0) {
              xi = SpectralField::constant(lat, o->init_constant);
            }
            const GlSolution sol = solve_gl(c, xi);
            for (const std::string& w : sol.warnings) std::cerr << "warning: " << w << '\n';

            Json r;
            r["schema"] = schema::kGl;
            r["dim"] = o->dim;
            r["power"] = o->power;
            r["kappa"] = o->kappa;
            r["cutoff"] = o->cutoff;
            r["dt"] = o->dt;
            r["t0"] = o->t0;
            r["tmax"] = o->tmax;
            r["eta"] = o->eta;
            r["noise"] = c.noise;
            r["nodes"] = sol.times.size();
            r["variance"] = sol.variance;
            r["r0"] = sol.r0;
            r["r1"] = sol.r1;
            r["blowup_time"] = opt_json(sol.blowup_time);
            Json traces = Json::array();
            for (std::size_t i = 0; i < sol.traces.size(); ++i) {
              traces.push_back({{"r", sol.trace_exponents[i]}, {"trace", number(sol.traces[i])}});
            }
            r["traces"] = traces;
            r["warnings"] = sol.warnings;
            emit(r);

            if (ctx.writes_files()) {
              std::ofstream snaps = open_output(ctx, "snapshots.bin", true);
              for (std::size_t j = 0; j < sol.times.size(); ++j) {
                write_snapshot(snaps, sol.times[j], sol.x[j]);
              }
              std::ofstream csv = open_output(ctx, "trace.csv");
              csv << "schema,t";
              for (double e : sol.trace_exponents) csv << ",holder_" << format_double(e);
              csv << '\n';
              for (std::size_t j = 0; j < sol.times.size(); ++j) {
                csv << schema::kGlTrace << ',' << format_double(sol.times[j]);
                for (double x : sol.node_norms[j]) csv << ',' << format_double(x);
                csv << '\n';
              }
              open_output(ctx, "result.json") << dump(r) << '\n';
            }
            summary(g, sol.blowup_time
                           ? fmt::format("solve-gl: blow-up at t = {}",
                                         format_double(*sol.blowup_time))
                           : fmt::format("solve-gl: {} nodes to t = {}", sol.times.size(),
                                         format_double(sol.times.back())));
            return 0;
          }};
}

Command ensemble(CLI::App& app) {
  auto spec = std::make_shared<std::string>();
  CLI::App* sub = app.add_subcommand("ensemble",
                                     "Monte Carlo estimates against oracles from a spec file");
  sub->add_option("--spec", *spec, "Ensemble spec (key = value sections)")->required();
  return {sub, [spec](RunContext& ctx, const Globals& g) {
            const EnsembleSpec s = load_ensemble_spec(*spec);
            const std::vector<EstimateReport> reports = run_ensemble(s, worker_count(g));
            std::ofstream jsonl, csv;
            if (ctx.writes_files()) {
              jsonl = open_output(ctx, "reports.jsonl");
              csv = open_output(ctx, "summary.csv");
              csv << "schema,target,kind,samples,estimate_re,estimate_im,stderr,oracle_re,"
                     "oracle_im,zscore,bias_budget,passed,note\n";
            }
            std::size_t passed = 0;
            for (const EstimateReport& rep : reports) {
              Json r;
              r["schema"] = schema::kEnsemble;
              const Json fields = report_json(rep);
              for (const auto& [key, item] : fields.items()) r[key] = item;
              emit(r);
              if (rep.passed) ++passed;
              if (jsonl.is_open()) jsonl << dump(r) << '\n';
              if (csv.is_open()) {
                csv << schema::kEnsemble << ',' << rep.target << ',' << rep.kind << ','
                    << rep.samples << ',' << format_double(rep.estimate.real()) << ','
                    << format_double(rep.estimate.imag()) << ','
                    << format_double(rep.std_error) << ','
                    << (rep.oracle ? format_double(rep.oracle->real()) : "") << ','
                    << (rep.oracle ? format_double(rep.oracle->imag()) : "") << ','
                    << (rep.oracle ? format_double(rep.zscore) : "") << ','
                    << format_double(rep.bias_budget) << ',' << (rep.passed ? 1 : 0) << ','
                    << rep.note << '\n';
              }
            }
            summary(g, fmt::format("ensemble: {} of {} targets passed", passed,
                                   reports.size()));
            return ensemble_exit_status(reports);
          }};
}

}  // namespace

std::vector<Command> register_commands(CLI::App& app) {
  std::vector<Command> cmds = {
      lattice_info(app),  wick_expect(app),    wick_correlate(app),
      regime(app),        diverge_scan(app),   check_bounds(app),
      time_integrals(app), solve_gl_command(app), ensemble(app),
  };
  for (Command& c : cmds) c.app->configurable();
  return cmds;
}

}  // namespace wickgl::cli
