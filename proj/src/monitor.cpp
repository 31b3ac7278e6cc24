#include "fcvi/monitor.hpp"

#include <cmath>
#include <limits>

namespace fcvi {

double default_eps_denominator(const ModelParams& theta_before) {
  return 1e-9 * (1.0 + inf_norm(theta_before));
}

const char* to_string(ClassCase c) {
  switch (c) {
    case ClassCase::Increase: return "increase";
    case ClassCase::Decrease: return "decrease";
    case ClassCase::Steady: return "steady";
    case ClassCase::Vanished: return "vanished";
    case ClassCase::New: return "new";
  }
  return "?";
}

std::vector<ClassDelta> per_class_deltas(const ModelParams& theta_before,
                                         const ModelParams& theta_after) {
  if (!theta_before.same_shape(theta_after))
    throw std::invalid_argument("per_class_deltas: shape mismatch");
  const std::size_t L = theta_before.num_classes();
  std::vector<ClassDelta> out(L);
  for (std::size_t l = 0; l < L; ++l) {
    const auto before = theta_before.output_row(l);
    const auto after = theta_after.output_row(l);
    out[l].cls = l;
    out[l].delta.resize(before.size());
    for (std::size_t i = 0; i < before.size(); ++i)
      out[l].delta[i] = after[i] - before[i];
  }
  return out;
}

RatioScalar ratio_scalar(std::span<const double> delta_prev,
                         std::span<const double> delta_curr,
                         double eps_denominator) {
  if (delta_prev.size() != delta_curr.size())
    throw std::invalid_argument("ratio_scalar: length mismatch");
  const double dd = dot(delta_prev, delta_prev);
  if (std::sqrt(dd) < eps_denominator) return {.degenerate = true};
  const double r = dot(delta_curr, delta_prev) / dd;
  if (r < 0.0) return {.degenerate = false, .value = 0.0, .clamped = true};
  return {.degenerate = false, .value = r, .clamped = false};
}

RatioEstimate estimate_ratio(const RatioScalar& r, std::size_t k_prev,
                             std::size_t k_curr) {
  if (k_prev < 1 || k_curr < 1)
    throw std::invalid_argument("estimate_ratio: client counts must be >= 1");
  if (r.degenerate) return {.is_new = true};
  const double scale = static_cast<double>(k_curr) / static_cast<double>(k_prev);
  return {.is_new = false, .value = scale * r.value, .clamped = r.clamped};
}

ClassCase classify_case(const RatioEstimate& est, double eps_zero,
                        double eps_steady) {
  if (!(eps_zero < 1.0 - eps_steady))
    throw std::invalid_argument("classify_case: need eps_zero < 1 - eps_steady");
  if (est.is_new) return ClassCase::New;
  if (est.value < eps_zero) return ClassCase::Vanished;
  if (std::abs(est.value - 1.0) <= eps_steady) return ClassCase::Steady;
  return est.value > 1.0 ? ClassCase::Increase : ClassCase::Decrease;
}

std::vector<std::size_t> ChangeRatioReport::vanished() const {
  std::vector<std::size_t> out;
  for (std::size_t l = 0; l < cases.size(); ++l)
    if (cases[l] == ClassCase::Vanished) out.push_back(l);
  return out;
}

ChangeRatioReport compute_report(const std::vector<ClassDelta>& deltas_prev,
                                 const std::vector<ClassDelta>& deltas_curr,
                                 std::size_t k_prev, std::size_t k_curr,
                                 const MonitorThresholds& thresholds) {
  if (deltas_prev.size() != deltas_curr.size())
    throw std::invalid_argument("compute_report: class count mismatch");

  const std::size_t L = deltas_prev.size();
  ChangeRatioReport rep;
  rep.k_prev = k_prev;
  rep.k_curr = k_curr;
  rep.ratios.resize(L);
  rep.cases.resize(L);
  rep.mu.assign(L, 1.0);

  for (std::size_t l = 0; l < L; ++l) {
    const RatioScalar r = ratio_scalar(deltas_prev[l].delta, deltas_curr[l].delta,
                                       thresholds.eps_denominator);
    rep.ratios[l] = estimate_ratio(r, k_prev, k_curr);
    rep.cases[l] = classify_case(rep.ratios[l], thresholds.eps_zero,
                                 thresholds.eps_steady);
  }

  double r_min = std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < L; ++l) {
    switch (rep.cases[l]) {
      case ClassCase::Increase:
      case ClassCase::Decrease:
      case ClassCase::Steady:
        r_min = std::min(r_min, rep.ratios[l].value);
        break;
      default:
        break;
    }
  }
  if (!std::isfinite(r_min))
    throw MonitorInconclusive("compute_report: no class with a positive ratio");
  rep.r_min = r_min;

  for (std::size_t l = 0; l < L; ++l) {
    switch (rep.cases[l]) {
      case ClassCase::Increase:
      case ClassCase::Decrease:
      case ClassCase::Steady:
        rep.mu[l] = r_min / rep.ratios[l].value;
        break;
      case ClassCase::Vanished:
      case ClassCase::New:
        rep.mu[l] = 1.0;
        break;
    }
  }
  return rep;
}

}  // namespace fcvi
