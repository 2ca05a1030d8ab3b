#include "renewal/iet_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "renewal/numerics.hpp"

namespace renewal {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    std::ostringstream msg;
    msg << what << " must be finite and > 0 (got " << v << ")";
    throw std::invalid_argument(msg.str());
  }
}

void require_nonnegative_x(double x) {
  if (!(x >= 0.0)) {
    std::ostringstream msg;
    msg << "inter-event time must be >= 0 (got " << x << ")";
    throw std::domain_error(msg.str());
  }
}

// x^(k-1) in log space with 0^0 = 1 and 0^k = 0 for k > 0.
double log_power(double x, double exponent) {
  if (exponent == 0.0) return 0.0;
  if (x == 0.0) return exponent > 0.0 ? -kInf : kInf;
  return exponent * std::log(x);
}

}  // namespace

IETModel::IETModel(Params params) : params_(std::move(params)) {
  std::visit(Overloaded{
                 [this](const Exponential& e) { log_coef_ = {std::log(e.rate)}; },
                 [this](const Gamma& g) {
                   log_coef_ = {g.shape * std::log(g.rate) - log_gamma(g.shape)};
                 },
                 [this](const ErlangMixture& m) {
                   log_coef_.clear();
                   for (const auto& c : m.components)
                     log_coef_.push_back(std::log(c.weight) + c.order * std::log(c.rate) -
                                         log_gamma(static_cast<double>(c.order)));
                 },
             },
             params_);
}

IETModel IETModel::exponential(double rate) {
  require_positive(rate, "exponential rate");
  return IETModel(Exponential{rate});
}

IETModel IETModel::gamma(double shape, double rate) {
  require_positive(shape, "gamma shape");
  require_positive(rate, "gamma rate");
  return IETModel(Gamma{shape, rate});
}

IETModel IETModel::erlang_mixture(std::vector<ErlangComponent> components) {
  if (components.empty()) throw std::invalid_argument("erlang mixture needs at least one component");
  double total = 0.0;
  for (const auto& c : components) {
    if (c.order < 1) throw std::invalid_argument("erlang order must be >= 1");
    require_positive(c.rate, "erlang rate");
    if (!(c.weight > 0.0 && c.weight <= 1.0))
      throw std::invalid_argument("erlang mixture weight must lie in (0, 1]");
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    std::ostringstream msg;
    msg << "erlang mixture weights must sum to 1 (got " << total << ")";
    throw std::invalid_argument(msg.str());
  }
  return IETModel(ErlangMixture{std::move(components)});
}

Family IETModel::family() const noexcept {
  return static_cast<Family>(params_.index());
}

double IETModel::log_pdf(double x) const {
  require_nonnegative_x(x);
  return std::visit(
      Overloaded{
          [&](const Exponential& e) { return log_coef_[0] - e.rate * x; },
          [&](const Gamma& g) { return log_coef_[0] + log_power(x, g.shape - 1.0) - g.rate * x; },
          [&](const ErlangMixture& m) {
            const auto& cs = m.components;
            if (cs.size() == 1)
              return log_coef_[0] + log_power(x, cs[0].order - 1.0) - cs[0].rate * x;
            double acc = -kInf;
            for (std::size_t i = 0; i < cs.size(); ++i)
              acc = log_add_exp(acc, log_coef_[i] + log_power(x, cs[i].order - 1.0) - cs[i].rate * x);
            return acc;
          },
      },
      params_);
}

double IETModel::pdf(double x) const { return std::exp(log_pdf(x)); }

double IETModel::log_survivor(double x) const {
  require_nonnegative_x(x);
  return std::visit(
      Overloaded{
          [&](const Exponential& e) { return -e.rate * x; },
          [&](const Gamma& g) { return log_regularized_gamma_q(g.shape, g.rate * x); },
          [&](const ErlangMixture& m) {
            const auto& cs = m.components;
            if (cs.size() == 1) return log_erlang_survivor_term(cs[0].order, cs[0].rate, x);
            double acc = -kInf;
            for (const auto& c : cs)
              acc = log_add_exp(acc, std::log(c.weight) + log_erlang_survivor_term(c.order, c.rate, x));
            return acc;
          },
      },
      params_);
}

double IETModel::survivor(double x) const { return std::exp(log_survivor(x)); }

double IETModel::cdf(double x) const {
  if (const auto* g = std::get_if<Gamma>(&params_)) {
    require_nonnegative_x(x);
    return regularized_gamma_p(g->shape, g->rate * x);
  }
  return -std::expm1(log_survivor(x));
}

double IETModel::hazard(double x) const {
  if (const auto* e = std::get_if<Exponential>(&params_)) {
    require_nonnegative_x(x);
    return e->rate;
  }
  return std::exp(log_pdf(x) - log_survivor(x));
}

double IETModel::integrated_hazard(double x) const { return -log_survivor(x); }

MomentSummary IETModel::moments() const {
  return std::visit(Overloaded{
                        [](const Exponential& e) {
                          return MomentSummary{1.0 / e.rate, 1.0 / (e.rate * e.rate), e.rate};
                        },
                        [](const Gamma& g) {
                          return MomentSummary{g.shape / g.rate, g.shape / (g.rate * g.rate), g.rate};
                        },
                        [](const ErlangMixture& m) {
                          double mean = 0.0;
                          double second = 0.0;
                          double abscissa = kInf;
                          for (const auto& c : m.components) {
                            mean += c.weight * c.order / c.rate;
                            second += c.weight * c.order * (c.order + 1.0) / (c.rate * c.rate);
                            abscissa = std::min(abscissa, c.rate);
                          }
                          return MomentSummary{mean, second - mean * mean, abscissa};
                        },
                    },
                    params_);
}

double IETModel::mean() const { return moments().mean; }

double IETModel::mgf_abscissa() const { return moments().mgf_abscissa; }

// Every family here has an exponential tail with rate equal to its MGF
// abscissa, and the hazard converges to that rate.
double IETModel::hazard_tail_limit() const { return mgf_abscissa(); }

double IETModel::inverse_integrated_hazard(double level) const {
  if (!(level >= 0.0) || !std::isfinite(level))
    throw std::domain_error("integrated hazard level must be finite and >= 0");
  if (const auto* e = std::get_if<Exponential>(&params_)) return level / e->rate;
  if (level == 0.0) return 0.0;
  double hi = mean() * std::max(1.0, level);
  while (integrated_hazard(hi) < level) {
    hi *= 2.0;
    if (!std::isfinite(hi)) throw NumericError("could not bracket inverse integrated hazard");
  }
  return find_root_bracketed([&](double x) { return integrated_hazard(x) - level; }, 0.0, hi,
                             1e-13 * hi);
}

std::string IETModel::describe() const {
  std::ostringstream out;
  out.precision(10);
  std::visit(Overloaded{
                 [&](const Exponential& e) { out << "Exponential(rate=" << e.rate << ")"; },
                 [&](const Gamma& g) { out << "Gamma(shape=" << g.shape << ", rate=" << g.rate << ")"; },
                 [&](const ErlangMixture& m) {
                   out << "ErlangMixture(";
                   for (std::size_t i = 0; i < m.components.size(); ++i) {
                     const auto& c = m.components[i];
                     out << (i ? ", " : "") << "[order=" << c.order << " rate=" << c.rate
                         << " weight=" << c.weight << "]";
                   }
                   out << ")";
                 },
             },
             params_);
  return out.str();
}

bool operator==(const IETModel& a, const IETModel& b) { return a.params_ == b.params_; }

}  // namespace renewal
