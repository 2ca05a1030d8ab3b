#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "renewal/iet_model.hpp"
#include "renewal/renewal_sim.hpp"

namespace renewal {

/// M >= 2 class IET models with prior probabilities summing to 1.
class ClassEnsemble {
 public:
  /// Throws std::invalid_argument on M < 2, size mismatch, non-positive
  /// priors or priors not summing to 1 within 1e-12.
  ClassEnsemble(std::vector<IETModel> models, std::vector<double> priors);
  /// Equal priors.
  explicit ClassEnsemble(std::vector<IETModel> models);

  std::size_t size() const noexcept { return models_.size(); }
  const IETModel& model(std::size_t k) const { return models_.at(k); }
  double prior(std::size_t k) const { return priors_.at(k); }
  const std::vector<IETModel>& models() const noexcept { return models_; }
  const std::vector<double>& priors() const noexcept { return priors_; }

 private:
  std::vector<IETModel> models_;
  std::vector<double> priors_;
};

/// Log Janossy density of an ordinary renewal trajectory (event at t_0 = 0):
///   sum_r log p(t_r - t_{r-1}) + log S(T - t_n).
/// Throws std::invalid_argument for a malformed trajectory.
double log_janossy(const IETModel& model, const Trajectory& trajectory);

/// Builds the same log-likelihood one event at a time.
class JanossyAccumulator {
 public:
  explicit JanossyAccumulator(const IETModel& model) : model_(&model) {}
  void add_event(double t);
  double finish(double horizon) const;

 private:
  const IETModel* model_;
  double last_ = 0.0;
  double total_ = 0.0;
};

/// log_pdf and log_survivor on a uniform grid with nearest-point lookup;
/// arguments beyond the grid fall back to exact evaluation.
class LikelihoodTable {
 public:
  LikelihoodTable(const IETModel& model, double x_max, double step);
  /// step 1e-3 over [0, 50 * mean], as for hazard tables.
  explicit LikelihoodTable(const IETModel& model);

  double log_pdf(double x) const;
  double log_survivor(double x) const;

 private:
  const IETModel* model_;
  double step_;
  double x_max_;
  std::vector<double> log_pdf_;
  std::vector<double> log_survivor_;
};

double log_janossy(const LikelihoodTable& table, const Trajectory& trajectory);

/// Index of the class maximizing ln pi_k + log_janossy; ties go to the lowest
/// index.
std::size_t bayes_classify(const ClassEnsemble& ensemble, const Trajectory& trajectory);
/// Same rule scored through per-class likelihood tables.
std::size_t bayes_classify(const ClassEnsemble& ensemble, const std::vector<LikelihoodTable>& tables,
                           const Trajectory& trajectory);

struct ErrorEstimate {
  double p_hat = 0.0;
  std::size_t n_trials = 0;
  std::size_t n_errors = 0;
  double ci_low = 0.0;
  double ci_high = 1.0;
};

/// Combines estimates over disjoint trial ranges.
ErrorEstimate merge(const ErrorEstimate& a, const ErrorEstimate& b);
ErrorEstimate make_error_estimate(std::size_t errors, std::size_t trials);

struct McOptions {
  SimulatorKind simulator = SimulatorKind::kThinning;
  unsigned threads = 1;
  /// Added to the trial number to form the stream index, so several runs can
  /// share a master seed without reusing streams.
  std::uint64_t stream_offset = 0;
  /// Thinning acceptance through the hazard table instead of exact hazards.
  HazardEvaluation hazard_evaluation = HazardEvaluation::kExact;
  /// Score trajectories through LikelihoodTable lookups.
  bool tabulated_likelihood = false;
};

/// Monte Carlo misclassification rate at horizon T. Trial i uses stream
/// (master_seed, stream_offset + i): the class is drawn from the priors with
/// the stream's first uniform and the trajectory is simulated from the same
/// stream. 95% Wilson interval.
ErrorEstimate mc_error_rate(const ClassEnsemble& ensemble, double horizon, std::size_t n_trials,
                            std::uint64_t master_seed, const McOptions& options = {});

/// Index k with cumulative prior just exceeding u.
std::size_t sample_class(const std::vector<double>& priors, double u);

}  // namespace renewal
