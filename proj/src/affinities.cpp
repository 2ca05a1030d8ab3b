#include "renewal/affinities.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

#include "renewal/parallel.hpp"
#include "renewal/renewal_sim.hpp"

namespace renewal {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBracketTopFraction = 0.999;
constexpr double kNormalizationTol = 1e-9;

struct ShapeRate {
  double shape;
  double rate;
};

std::optional<ShapeRate> as_gamma(const IETModel& m) {
  if (const auto* e = std::get_if<Exponential>(&m.params())) return ShapeRate{1.0, e->rate};
  if (const auto* g = std::get_if<Gamma>(&m.params())) return ShapeRate{g->shape, g->rate};
  return std::nullopt;
}

std::string describe_failure(const QuadratureResult& r) {
  std::ostringstream msg;
  msg << "value " << r.value << ", error estimate " << r.abs_error_estimate << ", converged "
      << (r.converged ? "yes" : "no");
  return msg.str();
}

// Integral that must converge; otherwise the named condition is violated.
double required_integral(const RealFunction& f, const std::string& condition) {
  QuadratureResult r;
  try {
    r = integrate_semi_infinite(f, affinity_quadrature());
  } catch (const NumericError& e) {
    throw AssumptionViolation(condition + ": " + e.what());
  }
  if (!r.converged || !std::isfinite(r.value))
    throw AssumptionViolation(condition + ": integral did not converge (" + describe_failure(r) + ")");
  return r.value;
}

double average_abscissa(const IETModel& k, const IETModel& j) {
  return 0.5 * (k.mgf_abscissa() + j.mgf_abscissa());
}

double closed_form_gamma_rate(ShapeRate k, ShapeRate j) {
  const double shape = 0.5 * (k.shape + j.shape);
  const double rate = 0.5 * (k.rate + j.rate);
  const double log_d = 0.5 * (k.shape * std::log(k.rate) + j.shape * std::log(j.rate) - log_gamma(k.shape) -
                              log_gamma(j.shape));
  return rate - std::exp((log_d + log_gamma(shape)) / shape);
}

// int p_k ln(p_k / p_j) for Gamma densities.
double closed_form_kl(ShapeRate k, ShapeRate j) {
  return (k.shape - j.shape) * digamma(k.shape) - (log_gamma(k.shape) - log_gamma(j.shape)) +
         j.shape * std::log(k.rate / j.rate) + k.shape * (j.rate - k.rate) / k.rate;
}

struct BhattacharyyaSide {
  double gamma = kNaN;
  double tilted_mean = kNaN;
  double tilted_survivor = kNaN;
  double alpha = kNaN;
  bool gamma_closed_form = false;
  bool tilted_mean_closed_form = false;
  std::vector<AssumptionCheck> checks;
};

struct KlSide {
  double kl = kNaN;
  double kl_first_moment = kNaN;
  double survivor_kl = kNaN;
  double rho = kNaN;
  double c = kNaN;
  bool closed_form = false;
  std::vector<AssumptionCheck> checks;
};

AssumptionCheck pass(std::string name, double value, std::string detail = {}) {
  return {std::move(name), true, value, std::move(detail)};
}

AssumptionCheck fail(std::string name, double value, std::string detail) {
  return {std::move(name), false, value, std::move(detail)};
}

BhattacharyyaSide bhattacharyya_side(const IETModel& k, const IETModel& j, bool closed_form) {
  BhattacharyyaSide out;
  if (k == j) {
    out.gamma = 0.0;
    out.tilted_mean = out.tilted_survivor = k.mean();
    out.alpha = 1.0;
    out.checks.push_back(pass("gamma_root", 0.0, "identical distributions"));
    return out;
  }
  const auto gk = as_gamma(k);
  const auto gj = as_gamma(j);
  try {
    if (closed_form) {
      out.gamma = closed_form_gamma_rate(*gk, *gj);
      out.gamma_closed_form = true;
    } else {
      out.gamma = solve_bhattacharyya_gamma(k, j);
    }
    out.checks.push_back(pass("gamma_root", out.gamma));
  } catch (const NumericError& e) {
    out.checks.push_back(fail("gamma_root", kNaN, e.what()));
    return out;
  }

  const double top = average_abscissa(k, j);
  if (out.gamma < top)
    out.checks.push_back(pass("gamma_below_average_abscissa", out.gamma));
  else
    out.checks.push_back(fail("gamma_below_average_abscissa", out.gamma, "gamma >= average MGF abscissa"));

  try {
    const auto mass = tilted_bhattacharyya_mass(k, j, out.gamma);
    const double deviation = std::abs(mass.value - 1.0);
    if (mass.converged && deviation <= kNormalizationTol)
      out.checks.push_back(pass("tilted_normalization", mass.value));
    else
      out.checks.push_back(fail("tilted_normalization", mass.value, "tilted density does not integrate to 1"));
  } catch (const NumericError& e) {
    out.checks.push_back(fail("tilted_normalization", kNaN, e.what()));
  }

  const double gamma = out.gamma;
  try {
    out.tilted_survivor = required_integral(
        [&](double x) {
          return std::exp(gamma * x + 0.5 * (k.log_survivor(x) + j.log_survivor(x)));
        },
        "tilted survivor integral int e^{gamma x} sqrt(S_k S_j) dx < inf");
    out.checks.push_back(pass("tilted_survivor_integral", out.tilted_survivor));
  } catch (const NumericError& e) {
    out.checks.push_back(fail("tilted_survivor_integral", kNaN, e.what()));
  }

  try {
    if (closed_form) {
      const double shape = 0.5 * (gk->shape + gj->shape);
      const double rate = 0.5 * (gk->rate + gj->rate);
      out.tilted_mean = shape / (rate - gamma);
      out.tilted_mean_closed_form = true;
    } else {
      out.tilted_mean = required_integral(
          [&](double x) { return x * std::exp(gamma * x + 0.5 * (k.log_pdf(x) + j.log_pdf(x))); },
          "tilted mean integral int x e^{gamma x} sqrt(p_k p_j) dx < inf");
    }
    out.checks.push_back(pass("tilted_mean_integral", out.tilted_mean));
  } catch (const NumericError& e) {
    out.checks.push_back(fail("tilted_mean_integral", kNaN, e.what()));
  }
  out.alpha = out.tilted_survivor / out.tilted_mean;
  return out;
}

KlSide kl_side(const IETModel& k, const IETModel& j, bool closed_form) {
  KlSide out;
  const auto mk = k.moments();
  if (k == j) {
    out.kl = out.kl_first_moment = out.survivor_kl = 0.0;
    out.rho = 0.0;
    out.c = 1.0;
    out.checks.push_back(pass("kl_integral", 0.0, "identical distributions"));
    out.checks.push_back(pass("kl_first_moment", 0.0, "identical distributions"));
    out.checks.push_back(pass("survivor_kl_integral", 0.0, "identical distributions"));
    return out;
  }
  try {
    if (closed_form) {
      const auto gk = *as_gamma(k);
      const auto gj = *as_gamma(j);
      out.kl = closed_form_kl(gk, gj);
      out.kl_first_moment = mk.mean * (out.kl - gj.shape / gk.shape + gj.rate / gk.rate);
      out.closed_form = true;
    } else {
      out.kl = required_integral([&](double x) { return kl_density_term(k, j, x); },
                                 "KL integral int p_k ln(p_k/p_j) dx < inf");
    }
    out.checks.push_back(pass("kl_integral", out.kl));
  } catch (const NumericError& e) {
    out.checks.push_back(fail("kl_integral", kNaN, e.what()));
  }
  try {
    if (!closed_form)
      out.kl_first_moment = required_integral([&](double x) { return x * kl_density_term(k, j, x); },
                                              "KL first moment int x p_k ln(p_k/p_j) dx < inf");
    out.checks.push_back(pass("kl_first_moment", out.kl_first_moment));
  } catch (const NumericError& e) {
    out.checks.push_back(fail("kl_first_moment", kNaN, e.what()));
  }
  try {
    out.survivor_kl = required_integral([&](double x) { return kl_survivor_term(k, j, x); },
                                        "int S_k ln(S_k/S_j) dx < inf");
    out.checks.push_back(pass("survivor_kl_integral", out.survivor_kl));
  } catch (const NumericError& e) {
    out.checks.push_back(fail("survivor_kl_integral", kNaN, e.what()));
  }

  out.rho = out.kl / mk.mean;
  const double second_moment = mk.variance + mk.mean * mk.mean;
  out.c = std::exp((-out.kl_first_moment + 0.5 * out.rho * second_moment + out.survivor_kl) / mk.mean);

  // Tolerance for comparisons between quadrature results.
  const double slack = 1e-9 * (1.0 + std::abs(out.kl_first_moment) + std::abs(out.survivor_kl));
  if (std::isfinite(out.kl)) {
    if (out.kl >= -slack)
      out.checks.push_back(pass("kl_nonnegative", out.kl));
    else
      out.checks.push_back(fail("kl_nonnegative", out.kl, "negative IET KL divergence"));
  }
  if (std::isfinite(out.kl_first_moment) && std::isfinite(out.survivor_kl)) {
    const double gap = out.kl_first_moment - out.survivor_kl;
    if (gap >= -slack)
      out.checks.push_back(pass("log_integral_tail", gap, "int x q - int F"));
    else
      out.checks.push_back(fail("log_integral_tail", gap, "int x q < int F"));
  }
  return out;
}

std::vector<AssumptionCheck> model_checks(const IETModel& m, const std::string& label) {
  std::vector<AssumptionCheck> checks;
  const double abscissa = m.mgf_abscissa();
  if (abscissa > 0.0)
    checks.push_back(pass("regular_" + label, abscissa, "MGF abscissa"));
  else
    checks.push_back(fail("regular_" + label, abscissa, "no positive MGF abscissa"));
  const double floor = m.hazard_tail_limit();
  if (floor > 0.0)
    checks.push_back(pass("hazard_floor_" + label, floor, "liminf of hazard"));
  else
    checks.push_back(fail("hazard_floor_" + label, floor, "hazard tends to 0"));
  return checks;
}

PairConstants assemble(const IETModel& k, const IETModel& j, BhattacharyyaSide b, KlSide q) {
  PairConstants pc;
  pc.degenerate = (k == j) || (b.gamma == 0.0);
  pc.gamma = b.gamma;
  pc.alpha = b.alpha;
  pc.tilted_mean = b.tilted_mean;
  pc.tilted_survivor = b.tilted_survivor;
  pc.gamma_closed_form = b.gamma_closed_form;
  pc.tilted_mean_closed_form = b.tilted_mean_closed_form;
  pc.rho = q.rho;
  pc.c = q.c;
  pc.kl_integral = q.kl;
  pc.kl_first_moment = q.kl_first_moment;
  pc.survivor_kl = q.survivor_kl;
  pc.kl_closed_form = q.closed_form;
  auto& checks = pc.diagnostics.checks;
  for (auto& c : model_checks(k, "k")) checks.push_back(std::move(c));
  for (auto& c : model_checks(j, "j")) checks.push_back(std::move(c));
  for (auto& c : b.checks) checks.push_back(std::move(c));
  for (auto& c : q.checks) checks.push_back(std::move(c));
  return pc;
}

PairConstants require_complete(PairConstants pc) {
  if (std::isfinite(pc.gamma) && std::isfinite(pc.alpha) && std::isfinite(pc.rho) && std::isfinite(pc.c))
    return pc;
  for (const auto& c : pc.diagnostics.checks)
    if (!c.passed) throw AssumptionViolation(c.name + ": " + c.detail);
  throw AssumptionViolation("pair constants are not finite");
}

// Inversion is closed form for exponentials; thinning is cheaper elsewhere.
std::unique_ptr<IetSampler> default_sampler(const IETModel& m) {
  if (m.family() == Family::kExponential) return std::make_unique<InversionSampler>(m);
  try {
    return std::make_unique<ThinningSampler>(m);
  } catch (const SimulationError&) {
    return std::make_unique<InversionSampler>(m);
  }
}

// Draws from the density sqrt(p_k p_j) / Z by rejection from the equal-weight
// mixture of p_k and p_j: accept with probability 2 sqrt(p_k p_j)/(p_k + p_j).
class GeometricMeanSampler {
 public:
  GeometricMeanSampler(const IETModel& k, const IETModel& j)
      : k_(k), j_(j), sample_k_(default_sampler(k)), sample_j_(default_sampler(j)) {}

  double draw(RandomStream& rng) const {
    for (;;) {
      const double x = rng.uniform() < 0.5 ? sample_k_->draw(rng) : sample_j_->draw(rng);
      const double lk = k_.log_pdf(x);
      const double lj = j_.log_pdf(x);
      if (lk == -kInf && lj == -kInf) continue;
      const double log_accept = std::numbers::ln2 + 0.5 * (lk + lj) - log_add_exp(lk, lj);
      if (std::log(rng.uniform()) < log_accept) return x;
    }
  }

 private:
  const IETModel& k_;
  const IETModel& j_;
  std::unique_ptr<IetSampler> sample_k_;
  std::unique_ptr<IetSampler> sample_j_;
};

}  // namespace

bool AssumptionReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const AssumptionCheck& c) { return c.passed; });
}

const AssumptionCheck* AssumptionReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

QuadratureOptions affinity_quadrature() {
  QuadratureOptions opts;
  opts.rel_tol = 1e-12;
  opts.abs_tol = 1e-15;
  opts.max_panels = 20000;
  return opts;
}

double bhattacharyya_density(const IETModel& k, const IETModel& j, double x) {
  return std::exp(0.5 * (k.log_pdf(x) + j.log_pdf(x)));
}

double bhattacharyya_survivor(const IETModel& k, const IETModel& j, double x) {
  return std::exp(0.5 * (k.log_survivor(x) + j.log_survivor(x)));
}

double kl_density_term(const IETModel& k, const IETModel& j, double x) {
  const double lk = k.log_pdf(x);
  if (lk == -kInf) return 0.0;
  return std::exp(lk) * (lk - j.log_pdf(x));
}

double kl_survivor_term(const IETModel& k, const IETModel& j, double x) {
  const double lk = k.log_survivor(x);
  if (lk == -kInf) return 0.0;
  return std::exp(lk) * (lk - j.log_survivor(x));
}

QuadratureResult tilted_bhattacharyya_mass(const IETModel& k, const IETModel& j, double gamma) {
  return integrate_semi_infinite(
      [&](double x) { return std::exp(gamma * x + 0.5 * (k.log_pdf(x) + j.log_pdf(x))); },
      affinity_quadrature());
}

double solve_bhattacharyya_gamma(const IETModel& k, const IETModel& j) {
  if (k == j) return 0.0;
  const auto at_zero = tilted_bhattacharyya_mass(k, j, 0.0);
  if (!at_zero.converged) throw AssumptionViolation("Bhattacharyya coefficient integral did not converge");
  if (at_zero.value >= 1.0 - 1e-14) return 0.0;

  const double abscissa = average_abscissa(k, j);
  double top = kBracketTopFraction * abscissa;
  double mass_at_top = kNaN;
  for (int attempt = 0; attempt < 40; ++attempt) {
    try {
      const auto r = tilted_bhattacharyya_mass(k, j, top);
      if (r.converged && std::isfinite(r.value)) {
        mass_at_top = r.value;
        break;
      }
    } catch (const NumericError&) {
    }
    top *= 0.5;
  }
  if (!(mass_at_top > 1.0)) {
    std::ostringstream msg;
    msg << "no root of int e^{gamma x} sqrt(p_k p_j) dx = 1 below gamma=" << top
        << " (average MGF abscissa " << abscissa << ", mass there " << mass_at_top << ")";
    throw AssumptionViolation(msg.str());
  }
  return find_root_bracketed(
      [&](double gamma) {
        const auto r = tilted_bhattacharyya_mass(k, j, gamma);
        return r.value - 1.0;
      },
      0.0, top, 1e-15);
}

double bhattacharyya_alpha(const IETModel& k, const IETModel& j, double gamma) {
  const double num = required_integral(
      [&](double x) { return std::exp(gamma * x + 0.5 * (k.log_survivor(x) + j.log_survivor(x))); },
      "tilted survivor integral int e^{gamma x} sqrt(S_k S_j) dx < inf");
  const double den = required_integral(
      [&](double x) { return x * std::exp(gamma * x + 0.5 * (k.log_pdf(x) + j.log_pdf(x))); },
      "tilted mean integral int x e^{gamma x} sqrt(p_k p_j) dx < inf");
  return num / den;
}

double kl_rho(const IETModel& k, const IETModel& j) {
  if (k == j) return 0.0;
  const double kl =
      required_integral([&](double x) { return kl_density_term(k, j, x); }, "KL integral int p_k ln(p_k/p_j) dx < inf");
  return kl / k.mean();
}

double kl_c(const IETModel& k, const IETModel& j, double rho) {
  if (k == j) return 1.0;
  const auto m = k.moments();
  const double first = required_integral([&](double x) { return x * kl_density_term(k, j, x); },
                                         "KL first moment int x p_k ln(p_k/p_j) dx < inf");
  const double survivor = required_integral([&](double x) { return kl_survivor_term(k, j, x); },
                                            "int S_k ln(S_k/S_j) dx < inf");
  return std::exp((-first + 0.5 * rho * (m.variance + m.mean * m.mean) + survivor) / m.mean);
}

PairConstants pair_constants(const IETModel& k, const IETModel& j) {
  return require_complete(assemble(k, j, bhattacharyya_side(k, j, false), kl_side(k, j, false)));
}

PairConstants gamma_closed_form_constants(const IETModel& k, const IETModel& j) {
  if (!as_gamma(k) || !as_gamma(j))
    throw std::invalid_argument("closed-form constants need Gamma or Exponential classes");
  return require_complete(assemble(k, j, bhattacharyya_side(k, j, true), kl_side(k, j, true)));
}

AssumptionReport check_assumptions(const IETModel& k, const IETModel& j) {
  return assemble(k, j, bhattacharyya_side(k, j, false), kl_side(k, j, false)).diagnostics;
}

MeanEstimate mc_kl_divergence(const IETModel& k, const IETModel& j, double horizon, std::size_t n_trials,
                              std::uint64_t master_seed, unsigned threads) {
  if (n_trials == 0) throw std::invalid_argument("mc_kl_divergence needs n_trials >= 1");
  if (k == j) return {0.0, 0.0, n_trials};
  const auto sampler = default_sampler(k);
  std::vector<double> values(n_trials);
  parallel_for(n_trials, threads, [&](std::size_t i) {
    RandomStream rng({master_seed, i});
    const Trajectory t = sampler->simulate(horizon, rng);
    values[i] = log_janossy(k, t) - log_janossy(j, t);
  });
  return sample_mean(values);
}

MeanEstimate mc_bhattacharyya(const IETModel& k, const IETModel& j, double horizon, std::size_t n_trials,
                              std::uint64_t master_seed, BhattacharyyaEstimator estimator, unsigned threads) {
  if (n_trials == 0) throw std::invalid_argument("mc_bhattacharyya needs n_trials >= 1");
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be > 0");
  if (k == j) return {1.0, 0.0, n_trials};
  std::vector<double> values(n_trials);

  if (estimator == BhattacharyyaEstimator::kClassSampling) {
    const auto sampler = default_sampler(k);
    parallel_for(n_trials, threads, [&](std::size_t i) {
      RandomStream rng({master_seed, i});
      const Trajectory t = sampler->simulate(horizon, rng);
      values[i] = std::exp(0.5 * (log_janossy(j, t) - log_janossy(k, t)));
    });
    return sample_mean(values);
  }

  const auto coefficient = tilted_bhattacharyya_mass(k, j, 0.0);
  if (!coefficient.converged) throw NumericError("Bhattacharyya coefficient integral did not converge");
  const double log_z = std::log(coefficient.value);
  const GeometricMeanSampler sampler(k, j);
  parallel_for(n_trials, threads, [&](std::size_t i) {
    RandomStream rng({master_seed, i});
    double t = 0.0;
    std::size_t n = 0;
    double crossing = 0.0;
    for (;;) {
      const double x = sampler.draw(rng);
      if (t + x > horizon) {
        crossing = x;
        break;
      }
      t += x;
      ++n;
    }
    const double lhk = k.log_pdf(crossing) - k.log_survivor(crossing);
    const double lhj = j.log_pdf(crossing) - j.log_survivor(crossing);
    const double log_ratio = log_add_exp(lhk, lhj) - std::numbers::ln2 - 0.5 * (lhk + lhj);
    values[i] = std::exp(static_cast<double>(n + 1) * log_z + log_ratio);
  });
  return sample_mean(values);
}

PairConstantsMatrix compute_constants_matrix(const ClassEnsemble& ensemble, unsigned threads,
                                             bool use_closed_forms) {
  const std::size_t m = ensemble.size();
  const auto closed = [&](std::size_t k, std::size_t j) {
    return use_closed_forms && as_gamma(ensemble.model(k)) && as_gamma(ensemble.model(j));
  };
  std::vector<std::pair<std::size_t, std::size_t>> unordered;
  std::vector<std::pair<std::size_t, std::size_t>> ordered;
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t j = 0; j < m; ++j) {
      if (k == j) continue;
      ordered.emplace_back(k, j);
      if (k < j) unordered.emplace_back(k, j);
    }

  std::vector<BhattacharyyaSide> b_sides(unordered.size());
  parallel_for(unordered.size(), threads, [&](std::size_t i) {
    const auto [k, j] = unordered[i];
    b_sides[i] = bhattacharyya_side(ensemble.model(k), ensemble.model(j), closed(k, j));
  });
  std::vector<KlSide> k_sides(ordered.size());
  parallel_for(ordered.size(), threads, [&](std::size_t i) {
    const auto [k, j] = ordered[i];
    k_sides[i] = kl_side(ensemble.model(k), ensemble.model(j), closed(k, j));
  });

  PairConstantsMatrix out(m);
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    const auto [k, j] = ordered[i];
    const auto key = std::make_pair(std::min(k, j), std::max(k, j));
    const auto pos = static_cast<std::size_t>(std::find(unordered.begin(), unordered.end(), key) - unordered.begin());
    out.at(k, j) = assemble(ensemble.model(k), ensemble.model(j), b_sides[pos], k_sides[i]);
  }
  return out;
}

void write_constants_csv(std::ostream& out, const PairConstantsMatrix& matrix) {
  out << "k,j,gamma,alpha,rho,c,checks_passed\n";
  out << std::setprecision(12);
  for (std::size_t k = 0; k < matrix.size(); ++k)
    for (std::size_t j = 0; j < matrix.size(); ++j) {
      if (k == j) continue;
      const auto& pc = matrix.at(k, j);
      out << k + 1 << ',' << j + 1 << ',' << pc.gamma << ',' << pc.alpha << ',' << pc.rho << ',' << pc.c << ','
          << (pc.diagnostics.all_passed() ? 1 : 0) << '\n';
    }
}

}  // namespace renewal
