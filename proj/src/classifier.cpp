#include "renewal/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "renewal/parallel.hpp"
#include "renewal/stats.hpp"

namespace renewal {

ClassEnsemble::ClassEnsemble(std::vector<IETModel> models, std::vector<double> priors)
    : models_(std::move(models)), priors_(std::move(priors)) {
  if (models_.size() < 2) throw std::invalid_argument("M >= 2 required");
  if (priors_.size() != models_.size())
    throw std::invalid_argument("number of priors must match number of classes");
  double total = 0.0;
  for (double p : priors_) {
    if (!(p > 0.0)) throw std::invalid_argument("priors must be > 0");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    std::ostringstream msg;
    msg << "priors must sum to 1 (got " << total << ")";
    throw std::invalid_argument(msg.str());
  }
}

ClassEnsemble::ClassEnsemble(std::vector<IETModel> models)
    : ClassEnsemble(models, std::vector<double>(models.size(), 1.0 / static_cast<double>(models.size()))) {}

double log_janossy(const IETModel& model, const Trajectory& trajectory) {
  trajectory.validate();
  JanossyAccumulator acc(model);
  for (double t : trajectory.events) acc.add_event(t);
  return acc.finish(trajectory.horizon);
}

void JanossyAccumulator::add_event(double t) {
  if (!(t > last_)) throw std::invalid_argument("events must be strictly increasing");
  total_ += model_->log_pdf(t - last_);
  last_ = t;
}

double JanossyAccumulator::finish(double horizon) const {
  if (!(horizon >= last_)) throw std::invalid_argument("horizon precedes the last event");
  return total_ + model_->log_survivor(horizon - last_);
}

LikelihoodTable::LikelihoodTable(const IETModel& model)
    : LikelihoodTable(model, HazardTable::kDefaultSpanInMeans * model.mean(), HazardTable::kDefaultStep) {}

LikelihoodTable::LikelihoodTable(const IETModel& model, double x_max, double step)
    : model_(&model), step_(step), x_max_(x_max) {
  if (!(x_max > 0.0) || !(step > 0.0)) throw std::invalid_argument("likelihood table needs x_max > 0 and step > 0");
  const auto n = static_cast<std::size_t>(std::floor(x_max / step)) + 1;
  log_pdf_.resize(n);
  log_survivor_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) * step;
    log_pdf_[i] = model.log_pdf(x);
    log_survivor_[i] = model.log_survivor(x);
  }
}

double LikelihoodTable::log_pdf(double x) const {
  if (x > x_max_) return model_->log_pdf(x);
  const auto i = static_cast<std::size_t>(std::llround(x / step_));
  return log_pdf_[std::min(i, log_pdf_.size() - 1)];
}

double LikelihoodTable::log_survivor(double x) const {
  if (x > x_max_) return model_->log_survivor(x);
  const auto i = static_cast<std::size_t>(std::llround(x / step_));
  return log_survivor_[std::min(i, log_survivor_.size() - 1)];
}

double log_janossy(const LikelihoodTable& table, const Trajectory& trajectory) {
  trajectory.validate();
  double total = 0.0;
  double last = 0.0;
  for (double t : trajectory.events) {
    total += table.log_pdf(t - last);
    last = t;
  }
  return total + table.log_survivor(trajectory.horizon - last);
}

namespace {

template <class Score>
std::size_t argmax_class(const ClassEnsemble& ensemble, Score&& score_of) {
  std::size_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < ensemble.size(); ++k) {
    const double score = std::log(ensemble.prior(k)) + score_of(k);
    if (score > best_score) {
      best_score = score;
      best = k;
    }
  }
  if (best_score == -std::numeric_limits<double>::infinity())
    throw std::runtime_error("every class assigns zero likelihood to the trajectory");
  return best;
}

}  // namespace

std::size_t bayes_classify(const ClassEnsemble& ensemble, const Trajectory& trajectory) {
  trajectory.validate();
  return argmax_class(ensemble, [&](std::size_t k) {
    JanossyAccumulator acc(ensemble.model(k));
    for (double t : trajectory.events) acc.add_event(t);
    return acc.finish(trajectory.horizon);
  });
}

std::size_t bayes_classify(const ClassEnsemble& ensemble, const std::vector<LikelihoodTable>& tables,
                           const Trajectory& trajectory) {
  if (tables.size() != ensemble.size()) throw std::invalid_argument("one likelihood table per class required");
  return argmax_class(ensemble, [&](std::size_t k) { return log_janossy(tables[k], trajectory); });
}

ErrorEstimate make_error_estimate(std::size_t errors, std::size_t trials) {
  if (trials == 0) throw std::invalid_argument("error estimate needs at least one trial");
  const auto ci = wilson_interval(errors, trials);
  return {static_cast<double>(errors) / static_cast<double>(trials), trials, errors, ci.low, ci.high};
}

ErrorEstimate merge(const ErrorEstimate& a, const ErrorEstimate& b) {
  return make_error_estimate(a.n_errors + b.n_errors, a.n_trials + b.n_trials);
}

std::size_t sample_class(const std::vector<double>& priors, double u) {
  double cumulative = 0.0;
  for (std::size_t k = 0; k + 1 < priors.size(); ++k) {
    cumulative += priors[k];
    if (u < cumulative) return k;
  }
  return priors.size() - 1;
}

ErrorEstimate mc_error_rate(const ClassEnsemble& ensemble, double horizon, std::size_t n_trials,
                            std::uint64_t master_seed, const McOptions& options) {
  if (n_trials == 0) throw std::invalid_argument("mc_error_rate needs n_trials >= 1");
  std::vector<std::unique_ptr<IetSampler>> samplers;
  std::vector<LikelihoodTable> tables;
  for (const auto& m : ensemble.models()) {
    if (options.simulator == SimulatorKind::kThinning)
      samplers.push_back(std::make_unique<ThinningSampler>(m, options.hazard_evaluation));
    else
      samplers.push_back(std::make_unique<InversionSampler>(m));
    if (options.tabulated_likelihood) tables.emplace_back(m);
  }

  std::vector<char> wrong(n_trials, 0);
  parallel_for(n_trials, options.threads, [&](std::size_t i) {
    RandomStream rng({master_seed, options.stream_offset + i});
    const std::size_t truth = sample_class(ensemble.priors(), rng.uniform());
    const Trajectory trajectory = samplers[truth]->simulate(horizon, rng);
    const std::size_t decision = options.tabulated_likelihood ? bayes_classify(ensemble, tables, trajectory)
                                                              : bayes_classify(ensemble, trajectory);
    wrong[i] = decision != truth ? 1 : 0;
  });
  std::size_t errors = 0;
  for (char w : wrong) errors += static_cast<std::size_t>(w);
  return make_error_estimate(errors, n_trials);
}

}  // namespace renewal
