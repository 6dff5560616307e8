#pragma once

// Ensemble estimates of Wick-object correlations from exact OU trajectories,
// compared against the closed-form oracles.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wickgl/lattice.hpp"
#include "wickgl/oracle.hpp"

namespace wickgl {

/// One comparison.  kind "fixed" is a harness self-test: the estimate,
/// standard error and oracle are given verbatim.
struct EstimateTarget {
  std::string name;
  bool fixed = false;
  WickKind kind = WickKind::kWP;
  int dim = 1;
  int cutoff = 2;
  ProfileKind profile = ProfileKind::kBox;
  double profile_radius = 0.0;  // 0: the cutoff
  int n1 = 1;
  int n2 = 1;
  Mode k1{};
  Mode k2{};
  TimeArgs time;  // WP: tau; AWP: t0, t1, t2; CWP: t1, t2
  std::size_t samples = 20000;
  std::uint64_t seed = 0;
  double dt = 1.0 / 256.0;
  double burn_in = 20.0;        // CWP only
  double bias_relative = -1.0;  // < 0: 0 for WP, 0.01 for AWP and CWP
  double bias_absolute = 0.0;   // added to the relative budget
  double z_max = 4.0;

  double fixed_estimate = 0.0;
  double fixed_stderr = 1.0;
  double fixed_oracle = 0.0;
};

struct EstimateReport {
  std::string target;
  std::string kind;
  std::size_t samples = 0;
  Complex estimate{};
  double stderr_re = 0.0;
  double stderr_im = 0.0;
  double std_error = 0.0;  // sqrt(stderr_re^2 + stderr_im^2)
  std::optional<Complex> oracle;
  double zscore = 0.0;  // |estimate - oracle| / std_error
  double bias_budget = 0.0;
  double z_max = 4.0;
  bool passed = true;   // |estimate - oracle| <= z_max std_error + bias_budget
  std::string note;
};

/// Draws target.samples independent stationary trajectories (trajectory
/// index i uses counter key (seed, i)), averages conj(c_{k1}) c'_{k2} of the
/// requested Wick object and compares with the oracle.  Divergent regimes
/// (the object does not exist as K grows) carry no oracle and the note
/// "no oracle, trend mode".  Results do not depend on `threads`.
EstimateReport estimate_wick_correlation(const EstimateTarget& target,
                                         int threads = 1);

/// Summand of the estimator for one trajectory (exposed for tests).
Complex wick_correlation_sample(const EstimateTarget& target,
                                std::uint64_t trajectory);

struct EnsembleSpec {
  std::vector<EstimateTarget> targets;
};

/// key = value text with [section] headers.  [defaults] (optional, first)
/// seeds every later section; each other section is one target named by its
/// header.  Errors are DomainError("line N: ...").
EnsembleSpec parse_ensemble_spec(const std::string& text);
EnsembleSpec load_ensemble_spec(const std::string& path);

std::vector<EstimateReport> run_ensemble(const EnsembleSpec& spec,
                                         int threads = 1);

/// 0 when every report passed, 1 otherwise.
int ensemble_exit_status(const std::vector<EstimateReport>& reports);

}  // namespace wickgl
