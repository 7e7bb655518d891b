#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lyaplab {

/// Per-checkpoint observables of one trial. Geometry fields are absent when
/// the checkpoint's singular gap was degenerate (x+ ill-defined) or the
/// quantity was not requested.
struct CheckpointObservation {
  long n{0};
  double log_norm{0.0};
  double log_rho{0.0};
  std::optional<double> delta_plus_hyper;
  std::optional<double> delta_to_lmu;
  std::optional<double> vector_log_growth;
  std::optional<int> coset_label;
  bool degenerate{false};

  /// rho(g) <= ||g|| is a theorem; violation means a broken measurement.
  void assert_domination() const {
    if (!(log_rho <= log_norm + 1e-9) || !std::isfinite(log_rho) ||
        !std::isfinite(log_norm))
      throw std::logic_error("observation: log_rho <= log_norm violated at n=" +
                             std::to_string(n));
  }
};

struct TrajectoryRecord {
  long trial{0};
  std::string error;  // non-empty when the trial aborted
  std::vector<CheckpointObservation> rows;
};

/// Wilson 95% score interval for a binomial proportion.
struct WilsonInterval {
  double lo{0.0};
  double hi{1.0};
};

inline WilsonInterval wilson_interval(long hits, long trials) {
  if (trials <= 0) return {};
  const double z = 1.959963984540054;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(hits) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

/// Empirical frequency of one named bad event at a given (epsilon, n).
struct TailCell {
  std::string event;
  double epsilon{0.0};
  long n{0};
  long hits{0};
  long trials{0};

  double freq() const {
    return trials > 0 ? static_cast<double>(hits) / static_cast<double>(trials)
                      : 0.0;
  }
  WilsonInterval wilson() const { return wilson_interval(hits, trials); }
};

struct TailReport {
  std::vector<TailCell> cells;
  bool gap_warning{false};
  std::string gap_note;

  const TailCell& cell(const std::string& event, double epsilon, long n) const {
    for (const auto& c : cells)
      if (c.event == event && c.n == n && std::abs(c.epsilon - epsilon) < 1e-12)
        return c;
    throw std::out_of_range("TailReport: no cell " + event);
  }
};

}  // namespace lyaplab
