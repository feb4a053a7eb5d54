#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace resdens {

/// b(n) = c n^(-a).
struct PowerSchedule {
  double c = 1.0;
  double a = 0.2;

  /// Throws ConfigError unless c > 0 and both are finite.
  void validate() const;
  double value(double n) const;
};

/// sup{d + 2, 2d}. Throws DimensionError for d < 1.
int d_star(int d);

struct ConditionCheck {
  std::string name;
  bool satisfied = false;
  std::string inequality;  ///< binding inequality, as text
  double margin = 0.0;     ///< positive when satisfied (threshold distance)
  bool heuristic = false;  ///< finite-n trend check rather than exact
};

struct AssumptionReport {
  int d = 1;
  int d_star = 3;
  std::vector<ConditionCheck> conditions;

  bool all_satisfied() const;
  /// Names of the unsatisfied conditions.
  std::vector<std::string> failures() const;
  std::string to_text() const;
  std::string to_json() const;
};

/// Regression bandwidth b0 = c n^(-a): n b0^{d*}/ln n -> inf holds iff a < 1/d*
/// (boundary excluded), and ln(1/b0)/ln ln n -> inf holds iff a > 0.
AssumptionReport validate_a8(const PowerSchedule& b0, int d);

/// Density bandwidth b1 = c n^(-gamma): n^{d+8} b1^{7(d+4)} -> inf holds iff
/// 0 < gamma < (d+8)/(7(d+4)).
AssumptionReport validate_a9(const PowerSchedule& b1, int d);

/// Both conditions in one report.
AssumptionReport validate_bandwidths(const PowerSchedule& b0, const PowerSchedule& b1,
                                     int d);

using Schedule = std::function<double(double)>;

/// Finite-n trend checks for arbitrary schedules: each limit expression is
/// evaluated (on the log scale) at n in {1e3, 1e4, 1e5, 1e6} and must grow
/// strictly. Marked heuristic.
AssumptionReport trend_check(const Schedule& b0, const Schedule& b1, int d);

/// Parses "0.25" or a fraction such as "1/3". Throws ConfigError.
double parse_number(std::string_view text);

}  // namespace resdens
