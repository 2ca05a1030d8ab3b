#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "renewal/classifier.hpp"
#include "renewal/iet_model.hpp"
#include "renewal/numerics.hpp"
#include "renewal/stats.hpp"

namespace renewal {

/// Raised when a pair violates an assumption the asymptotic constants need
/// (a divergent integral or an impossible bracket).
class AssumptionViolation : public NumericError {
 public:
  using NumericError::NumericError;
};

struct AssumptionCheck {
  std::string name;
  bool passed = false;
  double value = 0.0;
  std::string detail;
};

struct AssumptionReport {
  std::vector<AssumptionCheck> checks;

  bool all_passed() const;
  const AssumptionCheck* find(const std::string& name) const;
};

/**
 * Asymptotic constants of the pair (k, j):
 *   Bhattacharyya affinity  R_kj(T) ~ alpha e^{-gamma T}   (symmetric in k, j)
 *   KL affinity             K_kj(T) ~ c e^{-rho T}         (asymmetric)
 */
struct PairConstants {
  double gamma = 0.0;
  double alpha = 1.0;
  double rho = 0.0;
  double c = 1.0;
  /// Distributions are identical: gamma = rho = 0, alpha = c = 1.
  bool degenerate = false;

  // Intermediate integrals, kept for diagnostics and export.
  double tilted_mean = 0.0;      ///< int x e^{gamma x} sqrt(p_k p_j) dx
  double tilted_survivor = 0.0;  ///< int e^{gamma x} sqrt(S_k S_j) dx
  double kl_integral = 0.0;      ///< int p_k ln(p_k / p_j) dx
  double kl_first_moment = 0.0;  ///< int x p_k ln(p_k / p_j) dx
  double survivor_kl = 0.0;      ///< int S_k ln(S_k / S_j) dx

  /// Which of the above came from closed forms (the rest are quadrature).
  bool gamma_closed_form = false;
  bool tilted_mean_closed_form = false;
  bool kl_closed_form = false;

  AssumptionReport diagnostics;
};

/// Quadrature settings used for all pair integrals.
QuadratureOptions affinity_quadrature();

// Pair integrands. Evaluated in log space; 0 * ln 0 is taken as 0.
double bhattacharyya_density(const IETModel& k, const IETModel& j, double x);   ///< sqrt(p_k p_j)
double bhattacharyya_survivor(const IETModel& k, const IETModel& j, double x);  ///< sqrt(S_k S_j)
double kl_density_term(const IETModel& k, const IETModel& j, double x);         ///< p_k ln(p_k/p_j)
double kl_survivor_term(const IETModel& k, const IETModel& j, double x);        ///< S_k ln(S_k/S_j)

/// int e^{gamma x} sqrt(p_k p_j) dx.
QuadratureResult tilted_bhattacharyya_mass(const IETModel& k, const IETModel& j, double gamma);

/// Unique gamma > 0 with int e^{gamma x} sqrt(p_k p_j) dx = 1. Returns 0 for
/// identical distributions. The bracket top is 0.999 of the average MGF
/// abscissa; if the integral is not finite there the top is pulled back, and
/// AssumptionViolation is thrown when no sign change can be found.
double solve_bhattacharyya_gamma(const IETModel& k, const IETModel& j);

/// alpha = int e^{gamma x} sqrt(S_k S_j) dx / int x e^{gamma x} sqrt(p_k p_j) dx.
double bhattacharyya_alpha(const IETModel& k, const IETModel& j, double gamma);

/// rho = int p_k ln(p_k/p_j) dx / mean_k.
double kl_rho(const IETModel& k, const IETModel& j);

/// c = exp{ [ -int x q + rho (var_k + mean_k^2) / 2 + int S_k ln(S_k/S_j) ] / mean_k }.
double kl_c(const IETModel& k, const IETModel& j, double rho);

/// Generic numeric path: every constant from quadrature and root finding.
PairConstants pair_constants(const IETModel& k, const IETModel& j);

/// Gamma/Exponential pairs: gamma, the tilted mean, rho and the KL first
/// moment in closed form; only the survivor integrals use quadrature.
/// Throws std::invalid_argument for other families.
PairConstants gamma_closed_form_constants(const IETModel& k, const IETModel& j);

/// Regularity, positive hazard limits, finiteness of the KL and Bhattacharyya
/// integrals, the log-integral tail inequality int x q >= int F, and
/// gamma < average MGF abscissa. Never throws for valid models.
AssumptionReport check_assumptions(const IETModel& k, const IETModel& j);

enum class BhattacharyyaEstimator {
  /// Mean of exp{(l_j - l_k)/2} over class-k trajectories. Its relative
  /// variance grows like e^{2 gamma T}.
  kClassSampling,
  /// Importance sampling from the renewal process with IET density
  /// sqrt(p_k p_j)/Z. With the crossing interval x_{n+1} also drawn from that
  /// density the weight is Z^{n+1} (h_k + h_j) / (2 sqrt(h_k h_j)) at x_{n+1},
  /// which is unbiased for R_kj(T) and uses no asymptotic constants.
  kGeometricProposal,
};

/// Monte Carlo estimate of R_kj(T). Trial i uses stream (master_seed, i).
MeanEstimate mc_bhattacharyya(const IETModel& k, const IETModel& j, double horizon, std::size_t n_trials,
                              std::uint64_t master_seed,
                              BhattacharyyaEstimator estimator = BhattacharyyaEstimator::kClassSampling,
                              unsigned threads = 1);

/// Monte Carlo estimate of D_kj(T) = E_k[l_k - l_j].
MeanEstimate mc_kl_divergence(const IETModel& k, const IETModel& j, double horizon, std::size_t n_trials,
                              std::uint64_t master_seed, unsigned threads = 1);

/// Constants for every ordered pair k != j of an ensemble.
class PairConstantsMatrix {
 public:
  PairConstantsMatrix() = default;
  explicit PairConstantsMatrix(std::size_t classes) : size_(classes), cells_(classes * classes) {}

  std::size_t size() const noexcept { return size_; }
  PairConstants& at(std::size_t k, std::size_t j) { return cells_.at(k * size_ + j); }
  const PairConstants& at(std::size_t k, std::size_t j) const { return cells_.at(k * size_ + j); }

 private:
  std::size_t size_ = 0;
  std::vector<PairConstants> cells_;
};

/// Pairs are computed independently. Symmetric Bhattacharyya constants are
/// solved once per unordered pair and mirrored. Diagnostics are attached to
/// every pair; failures are recorded there instead of thrown. With
/// use_closed_forms, Gamma/Exponential pairs take the closed-form path.
PairConstantsMatrix compute_constants_matrix(const ClassEnsemble& ensemble, unsigned threads = 1,
                                             bool use_closed_forms = false);

/// CSV rows `k,j,gamma,alpha,rho,c,checks_passed` (1-based class labels).
void write_constants_csv(std::ostream& out, const PairConstantsMatrix& matrix);

}  // namespace renewal
