#pragma once

#include <span>
#include <vector>

namespace certinpaint {

/// Parameters of the radial integrand family
///
///   Phi_mu(t) = int_0^t int_0^s (1 + r)^(-mu) dr ds,
///   F_delta(P) = (delta / 2) |P|^2 + Phi_mu(|P|),
///
/// with mu > 1 the ellipticity exponent and delta >= 0 the viscosity weight.
/// delta == 0 selects the linear-growth integrand F itself.
class DensityParams {
 public:
  /// Throws std::domain_error unless mu > 1 and delta >= 0 (both finite).
  explicit DensityParams(double mu, double delta = 0.0);

  double mu() const { return mu_; }
  double delta() const { return delta_; }

  /// Slope of Phi_mu at infinity, 1 / (mu - 1).
  double recession() const { return 1.0 / (mu_ - 1.0); }

  DensityParams with_delta(double delta) const { return DensityParams(mu_, delta); }

 private:
  double mu_;
  double delta_;
};

// Scalar profile. All of these depend on mu only; delta is ignored.
// Each throws std::domain_error for t < 0 or non-finite t.
double phi(const DensityParams& params, double t);
double phi_prime(const DensityParams& params, double t);
double phi_second(const DensityParams& params, double t);

/// Phi'(t) / t, continuous at t = 0 where it equals Phi''(0) = 1.
double phi_prime_over_t(const DensityParams& params, double t);

/// Fenchel conjugate Phi*(s) = sup_t [s t - Phi(t)] of the unregularized
/// profile. Finite on [0, c) with c the recession constant; at s == c it is
/// finite only for mu > 2. Returns +infinity outside the effective domain.
/// Throws std::domain_error for s < 0.
double phi_conjugate(const DensityParams& params, double s);

/// Unique t >= 0 with Phi'(t) = s, for 0 <= s < recession constant.
/// Safeguarded Newton with a doubling bracket and bisection fallback.
double phi_prime_inverse(const DensityParams& params, double s);

double recession_constant(const DensityParams& params);

double frobenius_norm(std::span<const double> p);

/// F_delta(P) for a 2 x M matrix stored contiguously (any length works; the
/// density is radial in the Frobenius norm).
double density_value(const DensityParams& params, std::span<const double> p);

/// DF_delta(P) = delta P + Phi'(|P|) P / |P|, with DF_delta(0) = 0.
void density_gradient(const DensityParams& params, std::span<const double> p,
                      std::span<double> out);
std::vector<double> density_gradient(const DensityParams& params,
                                     std::span<const double> p);

}  // namespace certinpaint
