#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "renewal/hazard_table.hpp"
#include "renewal/iet_model.hpp"
#include "renewal/random.hpp"

namespace renewal {

/// Event times on (0, horizon], strictly increasing. The process is an
/// ordinary renewal process: an event is assumed at time 0.
struct Trajectory {
  double horizon = 0.0;
  std::vector<double> events;

  std::size_t count() const noexcept { return events.size(); }
  /// Throws std::invalid_argument unless 0 < t_1 < ... < t_n <= horizon.
  void validate() const;
  bool operator==(const Trajectory&) const = default;
};

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SimulatorKind { kThinning, kInversion };

std::string to_string(SimulatorKind kind);
SimulatorKind simulator_from_string(const std::string& name);

/// How the thinning acceptance test evaluates the hazard.
enum class HazardEvaluation { kExact, kTable };

/// Draws inter-event times for one model. Implementations are immutable and
/// may be shared across threads; all randomness comes from the stream.
class IetSampler {
 public:
  virtual ~IetSampler() = default;

  /// One full inter-event time.
  virtual double draw(RandomStream& rng) const = 0;
  /// An inter-event time if it is <= limit, otherwise nullopt. Samplers may
  /// stop early once the limit is passed.
  virtual std::optional<double> draw_within(double limit, RandomStream& rng) const;

  virtual const IETModel& model() const noexcept = 0;

  /// Events on (0, T]; draws IETs until their running sum exceeds T.
  Trajectory simulate(double horizon, RandomStream& rng) const;
  Trajectory simulate(double horizon, SeedSpec seed) const;
};

/// Inversion: solves integrated_hazard(X) = E with E unit exponential.
class InversionSampler final : public IetSampler {
 public:
  explicit InversionSampler(IETModel model) : model_(std::move(model)) {}
  double draw(RandomStream& rng) const override;
  const IETModel& model() const noexcept override { return model_; }

 private:
  IETModel model_;
};

/**
 * Ogata-style thinning with piecewise-constant dominating rates: within each
 * unit window of elapsed time the proposal rate is the hazard-table maximum
 * over that window (times 1 + 1e-6), beyond the table it is the global bound.
 *
 * Throws SimulationError at construction if the hazard is unbounded on the
 * grid (e.g. Gamma shape < 1), and from draw() if a proposal ever finds the
 * hazard above its bound.
 */
class ThinningSampler final : public IetSampler {
 public:
  explicit ThinningSampler(IETModel model, HazardEvaluation evaluation = HazardEvaluation::kExact);
  ThinningSampler(IETModel model, HazardTable table, HazardEvaluation evaluation = HazardEvaluation::kExact);

  double draw(RandomStream& rng) const override;
  std::optional<double> draw_within(double limit, RandomStream& rng) const override;
  const IETModel& model() const noexcept override { return model_; }
  const HazardTable& table() const noexcept { return table_; }

 private:
  IETModel model_;
  HazardTable table_;
  HazardEvaluation evaluation_;
};

std::unique_ptr<IetSampler> make_sampler(const IETModel& model, SimulatorKind kind);

Trajectory simulate_inversion(const IETModel& model, double horizon, SeedSpec seed);
Trajectory simulate_thinning(const IETModel& model, double horizon, SeedSpec seed);

/// Fraction of simulated trajectories on [0, T] without events, using
/// streams 0 .. n_trials-1 under `master_seed`.
double empirical_void_probability(const IETModel& model, double horizon, std::size_t n_trials,
                                  std::uint64_t master_seed,
                                  SimulatorKind kind = SimulatorKind::kThinning, unsigned threads = 1);

/// Text record `T,n,t_1,...,t_n` (no trailing comma, round-trip precision).
void write_trajectory(std::ostream& out, const Trajectory& trajectory);
std::string format_trajectory(const Trajectory& trajectory);
Trajectory parse_trajectory(const std::string& line);

}  // namespace renewal
