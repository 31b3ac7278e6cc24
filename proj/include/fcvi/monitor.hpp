#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "fcvi/nn.hpp"

namespace fcvi {

struct MonitorThresholds {
  double eps_zero = 0.05;          // below this, a ratio counts as zero
  double eps_steady = 0.05;        // |R - 1| band treated as steady
  double eps_denominator = 1e-9;   // absolute floor on ||delta_prev||
};

// Default denominator floor scaled to the broadcast parameters.
double default_eps_denominator(const ModelParams& theta_before);

enum class ClassCase { Increase, Decrease, Steady, Vanished, New };

const char* to_string(ClassCase c);

// Per-class change of the output row between two parameter snapshots. This is
// the -lambda-scaled accumulated gradient; the scale cancels in the ratio.
struct ClassDelta {
  std::size_t cls = 0;
  std::vector<double> delta;  // s+1, weights row plus bias
};

std::vector<ClassDelta> per_class_deltas(const ModelParams& theta_before,
                                         const ModelParams& theta_after);

struct RatioScalar {
  bool degenerate = false;  // ||delta_prev|| below floor: class absent before
  double value = 0.0;
  bool clamped = false;     // projection came out negative, clamped to 0
};

// Least-squares fit of delta_curr ~= r * delta_prev.
RatioScalar ratio_scalar(std::span<const double> delta_prev,
                         std::span<const double> delta_curr,
                         double eps_denominator);

struct RatioEstimate {
  bool is_new = false;  // degenerate denominator: class appeared this round
  double value = 0.0;
  bool clamped = false;
};

RatioEstimate estimate_ratio(const RatioScalar& r, std::size_t k_prev,
                             std::size_t k_curr);

ClassCase classify_case(const RatioEstimate& est, double eps_zero,
                        double eps_steady);

struct ChangeRatioReport {
  std::vector<RatioEstimate> ratios;  // per class
  std::vector<ClassCase> cases;       // per class
  double r_min = 1.0;                 // min ratio over positive-R classes
  std::vector<double> mu;             // r_min / R, 1 for Vanished and New
  std::size_t k_prev = 0;
  std::size_t k_curr = 0;

  std::vector<std::size_t> vanished() const;
};

class MonitorInconclusive : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Throws MonitorInconclusive when no class has a positive ratio; the caller
// falls back to an all-ones mu.
ChangeRatioReport compute_report(const std::vector<ClassDelta>& deltas_prev,
                                 const std::vector<ClassDelta>& deltas_curr,
                                 std::size_t k_prev, std::size_t k_curr,
                                 const MonitorThresholds& thresholds);

}  // namespace fcvi
