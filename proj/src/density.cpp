#include "certinpaint/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace certinpaint {

namespace {

void require_nonneg(double t, const char* what) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw std::domain_error(std::string(what) + ": argument must be finite and >= 0, got " +
                            std::to_string(t));
  }
}

// (e^x - 1 - x) / x^2, extended continuously by 1/2 at x = 0.
double exprel2(double x) {
  if (std::abs(x) < 1.0) {
    double term = 0.5, sum = 0.5;
    for (int k = 1; k < 20; ++k) {
      term *= x / (k + 2.0);
      sum += term;
    }
    return sum;
  }
  return (std::expm1(x) - x) / (x * x);
}

// g(t) = t Phi'(t) - Phi(t) = int_0^t r (1 + r)^(-mu) dr = Phi*(Phi'(t)).
// With l = log(1 + t), a = 2 - mu, b = mu - 1 (a + b = 1):
//   g = l^2 [a exprel2(a l) + b exprel2(-b l)].
double legendre_transform_at(const DensityParams& params, double t) {
  const double l = std::log1p(t);
  const double a = 2.0 - params.mu(), b = params.mu() - 1.0;
  return l * l * (a * exprel2(a * l) + b * exprel2(-b * l));
}

}  // namespace

DensityParams::DensityParams(double mu, double delta) : mu_(mu), delta_(delta) {
  if (!(mu > 1.0) || !std::isfinite(mu)) {
    throw std::domain_error("DensityParams: mu must be finite and > 1, got " +
                            std::to_string(mu));
  }
  if (!(delta >= 0.0) || !std::isfinite(delta)) {
    throw std::domain_error("DensityParams: delta must be finite and >= 0, got " +
                            std::to_string(delta));
  }
}

double phi(const DensityParams& params, double t) {
  require_nonneg(t, "phi");
  // Phi = t Phi' - g; both terms are positive and at most twice Phi near 0.
  return t * phi_prime(params, t) - legendre_transform_at(params, t);
}

double phi_prime(const DensityParams& params, double t) {
  require_nonneg(t, "phi_prime");
  const double mu = params.mu();
  return -std::expm1((1.0 - mu) * std::log1p(t)) / (mu - 1.0);
}

double phi_second(const DensityParams& params, double t) {
  require_nonneg(t, "phi_second");
  return std::exp(-params.mu() * std::log1p(t));
}

double phi_prime_over_t(const DensityParams& params, double t) {
  require_nonneg(t, "phi_prime_over_t");
  if (t < 1e-12) return 1.0 - 0.5 * params.mu() * t;
  return phi_prime(params, t) / t;
}

double phi_prime_inverse(const DensityParams& params, double s) {
  require_nonneg(s, "phi_prime_inverse");
  if (s >= params.recession()) {
    throw std::domain_error("phi_prime_inverse: s must lie below the recession constant");
  }
  if (s == 0.0) return 0.0;

  double lo = 0.0;
  double hi = 1.0;
  while (phi_prime(params, hi) <= s) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) {
      throw std::domain_error("phi_prime_inverse: s too close to the recession constant");
    }
  }

  const double tol = 1e-15 * std::max(1.0, s);
  double t = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double r = phi_prime(params, t) - s;
    if (std::abs(r) <= tol) break;
    if (r < 0.0) {
      lo = t;
    } else {
      hi = t;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
    double next = t - r / phi_second(params, t);
    if (!(next > lo && next < hi)) {
      // Geometric bisection while the bracket still spans decades.
      next = (lo > 0.0 && hi > 4.0 * lo) ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
    }
    t = next;
  }
  return t;
}

double phi_conjugate(const DensityParams& params, double s) {
  if (!(s >= 0.0) || std::isnan(s)) {
    throw std::domain_error("phi_conjugate: s must be >= 0, got " + std::to_string(s));
  }
  const double mu = params.mu();
  const double cbar = params.recession();
  if (s == 0.0) return 0.0;
  if (s >= cbar) {
    if (mu > 2.0 && s == cbar) return 1.0 / ((mu - 1.0) * (mu - 2.0));
    return std::numeric_limits<double>::infinity();
  }
  const double t = phi_prime_inverse(params, s);
  // s t - Phi(t), evaluated without cancelling the two O(t) terms.
  return legendre_transform_at(params, t) + t * (s - phi_prime(params, t));
}

double recession_constant(const DensityParams& params) { return params.recession(); }

double frobenius_norm(std::span<const double> p) {
  double sum = 0.0;
  for (double v : p) sum += v * v;
  return std::sqrt(sum);
}

double density_value(const DensityParams& params, std::span<const double> p) {
  const double norm = frobenius_norm(p);
  return 0.5 * params.delta() * norm * norm + phi(params, norm);
}

void density_gradient(const DensityParams& params, std::span<const double> p,
                      std::span<double> out) {
  if (out.size() != p.size()) {
    throw std::invalid_argument("density_gradient: output size mismatch");
  }
  const double scale = params.delta() + phi_prime_over_t(params, frobenius_norm(p));
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = scale * p[i];
}

std::vector<double> density_gradient(const DensityParams& params, std::span<const double> p) {
  std::vector<double> out(p.size());
  density_gradient(params, p, out);
  return out;
}

}  // namespace certinpaint
