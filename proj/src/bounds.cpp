#include "renewal/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace renewal {
namespace {

constexpr double kTieTolerance = 1e-9;

void check_inputs(const std::vector<double>& priors, const AffinityMatrix& A) {
  const std::size_t m = priors.size();
  if (m < 2) throw std::invalid_argument("M >= 2 required");
  if (A.size() != m) throw std::invalid_argument("affinity matrix size does not match priors");
  for (std::size_t k = 0; k < m; ++k) {
    if (!(priors[k] > 0.0)) throw std::invalid_argument("priors must be > 0");
    if (A[k].size() != m) throw std::invalid_argument("affinity matrix must be square");
    for (std::size_t j = 0; j < m; ++j) {
      if (j == k) continue;
      if (!(A[k][j] >= 0.0)) {
        std::ostringstream msg;
        msg << "affinity (" << k + 1 << "," << j + 1 << ") must be >= 0 (got " << A[k][j] << ")";
        throw std::invalid_argument(msg.str());
      }
    }
  }
}

double entropy_sum(const std::vector<double>& priors, const AffinityMatrix& A) {
  check_inputs(priors, A);
  double total = 0.0;
  for (std::size_t k = 0; k < priors.size(); ++k) {
    double inner = 0.0;
    for (std::size_t j = 0; j < priors.size(); ++j)
      if (j != k) inner += priors[j] / priors[k] * A[k][j];
    total += priors[k] * std::log1p(inner) / std::numbers::ln2;
  }
  return total;
}

bool within_tie(double value, double minimum) {
  return value <= minimum + kTieTolerance * std::abs(minimum);
}

}  // namespace

double entropy_upper_HR(const std::vector<double>& priors, const AffinityMatrix& R) {
  return entropy_sum(priors, R);
}

double entropy_lower_HK(const std::vector<double>& priors, const AffinityMatrix& K) {
  return entropy_sum(priors, K);
}

double fano_entropy(double phi, std::size_t M) {
  if (M < 2) throw std::invalid_argument("M >= 2 required");
  return binary_entropy(phi) + phi * std::log2(static_cast<double>(M - 1));
}

double inverse_fano(double H, std::size_t M) {
  if (M < 2) throw std::invalid_argument("M >= 2 required");
  const double h_max = std::log2(static_cast<double>(M));
  const double phi_max = static_cast<double>(M - 1) / static_cast<double>(M);
  if (!(H >= 0.0)) throw std::domain_error("inverse_fano needs H >= 0");
  if (H > h_max * (1.0 + 1e-15)) {
    std::ostringstream msg;
    msg << "inverse_fano: H=" << H << " exceeds log2 M = " << h_max;
    throw std::domain_error(msg.str());
  }
  if (H == 0.0) return 0.0;
  if (H >= h_max) return phi_max;
  return find_root_bracketed([&](double phi) { return fano_entropy(phi, M) - H; }, 0.0, phi_max,
                             1e-14 * std::min(1.0, H));
}

double inverse_fano_asymptote(double H) {
  if (!(H > 0.0 && H < 1.0)) throw std::domain_error("inverse_fano_asymptote needs 0 < H < 1");
  return H / -std::log2(H);
}

double AsymptoticConstants::folded_alpha() const { return alpha_star / (2.0 * std::numbers::ln2); }

double AsymptoticConstants::lower_amplitude() const { return c_star / rho_star; }

double AsymptoticConstants::lower_amplitude_nats() const { return c_star / (rho_star * std::numbers::ln2); }

AsymptoticConstants aggregate_asymptotics(const std::vector<double>& priors,
                                          const PairConstantsMatrix& constants) {
  const std::size_t m = constants.size();
  if (m == 0) throw std::invalid_argument("empty pair-constants matrix");
  if (m < 2) throw std::invalid_argument("M >= 2 required");
  if (priors.size() != m) throw std::invalid_argument("priors do not match the constants matrix");

  AsymptoticConstants out;
  out.classes = m;
  out.gamma_star = out.rho_star = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t j = 0; j < m; ++j) {
      if (k == j) continue;
      const auto& pc = constants.at(k, j);
      if (!std::isfinite(pc.gamma) || !std::isfinite(pc.rho)) {
        std::ostringstream msg;
        msg << "pair (" << k + 1 << "," << j + 1 << ") has no finite rate constants";
        throw NumericError(msg.str());
      }
      out.gamma_star = std::min(out.gamma_star, pc.gamma);
      out.rho_star = std::min(out.rho_star, pc.rho);
    }
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t j = 0; j < m; ++j) {
      if (k == j) continue;
      const auto& pc = constants.at(k, j);
      if (within_tie(pc.gamma, out.gamma_star)) {
        out.alpha_star += priors[j] * pc.alpha;
        out.bhattacharyya_pairs.emplace_back(k, j);
      }
      if (within_tie(pc.rho, out.rho_star)) {
        out.c_star += priors[j] * pc.c;
        out.kl_pairs.emplace_back(k, j);
      }
    }
  if (!std::isfinite(out.alpha_star) || !std::isfinite(out.c_star))
    throw NumericError("dominant-pair amplitudes are not finite");
  return out;
}

double BoundCurve::ln_upper_over_T(std::size_t i) const { return std::log(upper.at(i)) / T_grid.at(i); }

double BoundCurve::ln_lower_over_T(std::size_t i) const { return std::log(lower.at(i)) / T_grid.at(i); }

BoundCurve asymptotic_bound_curves(const std::vector<double>& priors, const PairConstantsMatrix& constants,
                                   const std::vector<double>& T_grid) {
  BoundCurve curve;
  curve.constants = aggregate_asymptotics(priors, constants);
  curve.T_grid = T_grid;
  const auto& a = curve.constants;
  const std::size_t m = constants.size();
  const double max_error = 1.0 - 1.0 / static_cast<double>(m);
  const double h_max = std::log2(static_cast<double>(m));

  std::vector<double> exact_hr;
  std::vector<double> exact_hk;
  AffinityMatrix R(m, std::vector<double>(m, 1.0));
  AffinityMatrix K(m, std::vector<double>(m, 1.0));
  for (double T : T_grid) {
    if (!(T > 0.0)) throw std::invalid_argument("T grid values must be > 0");
    const double upper = a.folded_alpha() * std::exp(-a.gamma_star * T);
    const double clamped_upper = std::clamp(upper, 0.0, 1.0);
    curve.upper.push_back(clamped_upper);
    curve.upper_clamped.push_back(clamped_upper != upper);

    double lower = a.rho_star > 0.0 ? a.lower_amplitude() * std::exp(-a.rho_star * T) / T
                                    : std::numeric_limits<double>::infinity();
    const double clamped_lower = std::clamp(lower, 0.0, 1.0);
    curve.lower.push_back(clamped_lower);
    curve.lower_valid.push_back(clamped_lower == lower && lower < max_error);

    for (std::size_t k = 0; k < m; ++k)
      for (std::size_t j = 0; j < m; ++j) {
        if (k == j) continue;
        const auto& pc = constants.at(k, j);
        R[k][j] = std::min(1.0, pc.alpha * std::exp(-pc.gamma * T));
        K[k][j] = std::min(1.0, pc.c * std::exp(-pc.rho * T));
      }
    exact_hr.push_back(entropy_upper_HR(priors, R));
    exact_hk.push_back(std::min(h_max, entropy_lower_HK(priors, K)));
  }
  curve.exact_HR = std::move(exact_hr);
  curve.exact_HK = std::move(exact_hk);
  return curve;
}

void write_bound_curve_csv(std::ostream& out, const BoundCurve& curve) {
  const std::size_t m = curve.constants.classes;
  out << "T,upper,lower,ln_upper_over_T,ln_lower_over_T,lower_valid,pairwise_upper,pairwise_lower\n";
  out << std::setprecision(12);
  for (std::size_t i = 0; i < curve.T_grid.size(); ++i) {
    out << curve.T_grid[i] << ',' << curve.upper[i] << ',' << curve.lower[i] << ',' << curve.ln_upper_over_T(i)
        << ',' << curve.ln_lower_over_T(i) << ',' << (curve.lower_valid[i] ? 1 : 0);
    if (curve.exact_HR && curve.exact_HK)
      out << ',' << 0.5 * (*curve.exact_HR)[i] << ',' << inverse_fano((*curve.exact_HK)[i], m);
    else
      out << ",,";
    out << '\n';
  }
}

}  // namespace renewal
