#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "renewal/affinities.hpp"

namespace renewal {

using AffinityMatrix = std::vector<std::vector<double>>;

/// sum_k pi_k log2[1 + sum_{j != k} (pi_j / pi_k) R_kj]. Upper bound on the
/// posterior entropy H(T) in bits. The diagonal is ignored.
double entropy_upper_HR(const std::vector<double>& priors, const AffinityMatrix& R);
/// Same sum over KL affinities K_kj = exp(-D_kj); a lower bound on H(T).
double entropy_lower_HK(const std::vector<double>& priors, const AffinityMatrix& K);

/// phi in [0, (M-1)/M] with H_b(phi) + phi log2(M-1) = H (bits).
/// Throws std::domain_error for H < 0 or H > log2 M.
double inverse_fano(double H, std::size_t M);
/// H / (-log2 H), the small-H behaviour of inverse_fano. Needs 0 < H < 1.
double inverse_fano_asymptote(double H);
/// H_b(phi) + phi log2(M-1).
double fano_entropy(double phi, std::size_t M);

/// Dominant-pair aggregation of pair constants.
struct AsymptoticConstants {
  double gamma_star = 0.0;
  double alpha_star = 0.0;  ///< sum over dominant pairs of pi_j alpha_kj
  double rho_star = 0.0;
  double c_star = 0.0;      ///< sum over dominant pairs of pi_j c_kj
  std::vector<std::pair<std::size_t, std::size_t>> bhattacharyya_pairs;  ///< 0-based (k, j)
  std::vector<std::pair<std::size_t, std::size_t>> kl_pairs;
  std::size_t classes = 0;

  /// Amplitude of the upper curve: alpha* / (2 ln 2).
  double folded_alpha() const;
  /// Amplitude of the lower curve: c* / rho*.
  double lower_amplitude() const;
  /// c* / (rho* ln 2): the same amplitude when the inverse-Fano denominator
  /// is taken as -ln H instead of -log2 H.
  double lower_amplitude_nats() const;
  bool degenerate() const { return gamma_star <= 0.0 || rho_star <= 0.0; }
};

/// Ties within 1e-9 relative of the minimum rate are all included. Throws
/// std::invalid_argument for an empty matrix or mismatched priors, and
/// NumericError when a required constant is not finite.
AsymptoticConstants aggregate_asymptotics(const std::vector<double>& priors, const PairConstantsMatrix& constants);

struct BoundCurve {
  std::vector<double> T_grid;
  std::vector<double> upper;  ///< alpha*/(2 ln 2) e^{-gamma* T}, clamped to [0, 1]
  std::vector<double> lower;  ///< (c*/rho*) e^{-rho* T} / T, clamped to [0, 1]
  std::vector<bool> upper_clamped;
  /// lower(T) < 1 - 1/M and unclamped.
  std::vector<bool> lower_valid;
  /// H_R and H_K from every pair's asymptote alpha_kj e^{-gamma_kj T} and
  /// c_kj e^{-rho_kj T} (each capped at 1).
  std::optional<std::vector<double>> exact_HR;
  std::optional<std::vector<double>> exact_HK;
  AsymptoticConstants constants;

  /// ln(upper)/T and ln(lower)/T.
  double ln_upper_over_T(std::size_t i) const;
  double ln_lower_over_T(std::size_t i) const;
};

BoundCurve asymptotic_bound_curves(const std::vector<double>& priors, const PairConstantsMatrix& constants,
                                   const std::vector<double>& T_grid);

/// Columns T,upper,lower,ln_upper_over_T,ln_lower_over_T,lower_valid,pairwise_upper,pairwise_lower.
void write_bound_curve_csv(std::ostream& out, const BoundCurve& curve);

}  // namespace renewal
