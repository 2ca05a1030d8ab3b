#include "renewal/renewal_sim.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "renewal/parallel.hpp"

namespace renewal {

void Trajectory::validate() const {
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw std::invalid_argument("trajectory horizon must be finite and > 0");
  double previous = 0.0;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const double t = events[i];
    if (!(t > previous) || !(t <= horizon)) {
      std::ostringstream msg;
      msg << "trajectory event " << i << " at " << t << " breaks 0 < t_1 < ... < t_n <= T";
      throw std::invalid_argument(msg.str());
    }
    previous = t;
  }
}

std::string to_string(SimulatorKind kind) {
  return kind == SimulatorKind::kThinning ? "thinning" : "inversion";
}

SimulatorKind simulator_from_string(const std::string& name) {
  if (name == "thinning") return SimulatorKind::kThinning;
  if (name == "inversion") return SimulatorKind::kInversion;
  throw std::invalid_argument("unknown simulator '" + name + "' (expected thinning or inversion)");
}

std::optional<double> IetSampler::draw_within(double limit, RandomStream& rng) const {
  const double x = draw(rng);
  if (x > limit) return std::nullopt;
  return x;
}

Trajectory IetSampler::simulate(double horizon, RandomStream& rng) const {
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw std::invalid_argument("simulation horizon must be finite and > 0");
  Trajectory out;
  out.horizon = horizon;
  double t = 0.0;
  for (;;) {
    const auto x = draw_within(horizon - t, rng);
    if (!x) break;
    double next = t + *x;
    if (next <= t) next = std::nextafter(t, horizon);
    if (next > horizon) break;
    out.events.push_back(next);
    t = next;
  }
  return out;
}

Trajectory IetSampler::simulate(double horizon, SeedSpec seed) const {
  RandomStream rng(seed);
  return simulate(horizon, rng);
}

double InversionSampler::draw(RandomStream& rng) const {
  return model_.inverse_integrated_hazard(rng.exponential());
}

ThinningSampler::ThinningSampler(IETModel model, HazardEvaluation evaluation)
    : ThinningSampler(model, HazardTable(model), evaluation) {}

ThinningSampler::ThinningSampler(IETModel model, HazardTable table, HazardEvaluation evaluation)
    : model_(std::move(model)), table_(std::move(table)), evaluation_(evaluation) {
  if (!table_.bounded())
    throw SimulationError("thinning needs a bounded hazard; " + model_.describe() +
                          " has an unbounded hazard on the grid (use inversion)");
}

std::optional<double> ThinningSampler::draw_within(double limit, RandomStream& rng) const {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const double table_windows = std::ceil(table_.x_max());
  double elapsed = 0.0;
  for (;;) {
    if (elapsed > limit) return std::nullopt;
    const double bound = table_.window_bound(elapsed);
    const double window = std::floor(elapsed);
    const double window_end = window < table_windows ? window + 1.0 : kInf;
    const double proposal = elapsed + rng.exponential() / bound;
    if (proposal >= window_end) {
      // No proposal inside this window; by memorylessness restart at its end.
      elapsed = window_end;
      continue;
    }
    elapsed = proposal;
    if (elapsed > limit) return std::nullopt;
    const double h = evaluation_ == HazardEvaluation::kExact ? model_.hazard(elapsed) : table_.lookup(elapsed);
    if (h > bound) {
      std::ostringstream msg;
      msg << "thinning bound violated for " << model_.describe() << ": hazard " << h << " > bound " << bound
          << " at elapsed " << elapsed;
      throw SimulationError(msg.str());
    }
    if (rng.uniform() * bound <= h) return elapsed;
  }
}

double ThinningSampler::draw(RandomStream& rng) const {
  return *draw_within(std::numeric_limits<double>::infinity(), rng);
}

std::unique_ptr<IetSampler> make_sampler(const IETModel& model, SimulatorKind kind) {
  if (kind == SimulatorKind::kThinning) return std::make_unique<ThinningSampler>(model);
  return std::make_unique<InversionSampler>(model);
}

Trajectory simulate_inversion(const IETModel& model, double horizon, SeedSpec seed) {
  return InversionSampler(model).simulate(horizon, seed);
}

Trajectory simulate_thinning(const IETModel& model, double horizon, SeedSpec seed) {
  return ThinningSampler(model).simulate(horizon, seed);
}

double empirical_void_probability(const IETModel& model, double horizon, std::size_t n_trials,
                                  std::uint64_t master_seed, SimulatorKind kind, unsigned threads) {
  if (n_trials == 0) throw std::invalid_argument("empirical_void_probability needs n_trials >= 1");
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be > 0");
  const auto sampler = make_sampler(model, kind);
  std::vector<char> empty(n_trials, 0);
  parallel_for(n_trials, threads, [&](std::size_t i) {
    RandomStream rng({master_seed, i});
    empty[i] = sampler->draw_within(horizon, rng) ? 0 : 1;
  });
  std::size_t count = 0;
  for (char e : empty) count += static_cast<std::size_t>(e);
  return static_cast<double>(count) / static_cast<double>(n_trials);
}

void write_trajectory(std::ostream& out, const Trajectory& trajectory) {
  out << format_trajectory(trajectory) << '\n';
}

std::string format_trajectory(const Trajectory& trajectory) {
  std::ostringstream out;
  out << std::setprecision(17) << trajectory.horizon << ',' << trajectory.events.size();
  for (double t : trajectory.events) out << ',' << t;
  return out.str();
}

Trajectory parse_trajectory(const std::string& line) {
  std::istringstream in(line);
  std::string field;
  std::vector<std::string> fields;
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (fields.size() < 2) throw std::invalid_argument("trajectory record needs at least T and n");
  Trajectory out;
  std::size_t n = 0;
  try {
    out.horizon = std::stod(fields[0]);
    n = std::stoull(fields[1]);
    if (fields.size() != n + 2) throw std::invalid_argument("event count does not match n");
    out.events.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.events.push_back(std::stod(fields[i + 2]));
  } catch (const std::logic_error& e) {
    throw std::invalid_argument(std::string("malformed trajectory record: ") + e.what());
  }
  out.validate();
  return out;
}

}  // namespace renewal
