#include "certinpaint/energy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "certinpaint/summation.hpp"

namespace certinpaint {

namespace {

double channel_norm2(std::span<const double> u, std::span<const double> f) {
  double n2 = 0.0;
  for (std::size_t m = 0; m < u.size(); ++m) {
    const double w = u[m] - f[m];
    n2 += w * w;
  }
  return n2;
}

// Pointwise |w|^zeta, or its smoothed form.
double fidelity_kernel(double norm2, const ModelParams& params) {
  const double zeta = params.zeta();
  const double eps = params.fidelity_smoothing();
  if (eps > 0.0) return std::pow(norm2 + eps * eps, 0.5 * zeta) - std::pow(eps, zeta);
  return std::pow(norm2, 0.5 * zeta);
}

// Scalar c with d/dw (1/zeta) kernel(|w|^2) = c * w.
double fidelity_slope(double norm2, const ModelParams& params) {
  const double zeta = params.zeta();
  const double eps = params.fidelity_smoothing();
  if (eps > 0.0) return std::pow(norm2 + eps * eps, 0.5 * zeta - 1.0);
  if (norm2 == 0.0) return 0.0;
  return std::pow(norm2, 0.5 * zeta - 1.0);
}

// 5-point Gauss-Legendre nodes and weights on [-1, 1].
constexpr double kGaussNodes[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                   0.5384693101056831, 0.9061798459386640};
constexpr double kGaussWeights[5] = {0.2369268850561891, 0.4786286704993665,
                                     0.5688888888888889, 0.4786286704993665,
                                     0.2369268850561891};

// Phi(a) - Phi(b). For nearby radii the difference is integrated from Phi';
// the nearest singularity of Phi' sits at -1, so the rule is accurate to
// rounding once |a - b| is a small fraction of 1 + min(a, b).
double phi_difference(const DensityParams& density, double a, double b) {
  const double lo = std::min(a, b);
  if (std::abs(a - b) > 0.05 * (1.0 + lo)) return phi(density, a) - phi(density, b);
  const double half = 0.5 * (a - b);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (int k = 0; k < 5; ++k) sum += kGaussWeights[k] * phi_prime(density, mid + half * kGaussNodes[k]);
  return half * sum;
}

// a^p - b^p given a^2 - b^2 accurately.
double power_difference(double a2, double b2, double diff2, double p) {
  if (b2 == 0.0) return std::pow(a2, 0.5 * p);
  return std::pow(b2, 0.5 * p) * std::expm1(0.5 * p * std::log1p(diff2 / b2));
}

}  // namespace

ModelParams::ModelParams(double lambda, double zeta, DensityParams density,
                         double fidelity_smoothing)
    : lambda_(lambda), zeta_(zeta), density_(density), smoothing_(fidelity_smoothing) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("lambda must be finite and > 0, got " + std::to_string(lambda));
  }
  if (!(zeta > 1.0) || !std::isfinite(zeta)) {
    throw std::invalid_argument("zeta must be finite and > 1, got " + std::to_string(zeta));
  }
  if (!(fidelity_smoothing >= 0.0) || !std::isfinite(fidelity_smoothing)) {
    throw std::invalid_argument("fidelity smoothing must be finite and >= 0");
  }
  if (fidelity_smoothing > 0.0 && zeta >= 2.0) {
    throw std::invalid_argument("fidelity smoothing is only available for zeta < 2");
  }
}

void check_shapes(const ImageField& u, const ImageField& f, const DamageMask& mask) {
  if (!u.same_shape(f) || !mask.matches(u)) {
    throw std::invalid_argument("shape mismatch between image fields and mask");
  }
}

double fidelity(const ImageField& u, const ImageField& f, const DamageMask& mask,
                const ModelParams& params) {
  check_shapes(u, f, mask);
  CompensatedSum sum;
  for (std::size_t i = 0; i < u.pixel_count(); ++i) {
    if (mask.damaged(i)) continue;
    sum += fidelity_kernel(channel_norm2(u.pixel(i), f.pixel(i)), params);
  }
  return params.lambda() / params.zeta() * sum.value();
}

double primal_energy(const ImageField& u, const ImageField& f, const DamageMask& mask,
                     const ModelParams& params) {
  check_shapes(u, f, mask);
  const GradientField g = gradient(u);
  CompensatedSum sum;
  for (std::size_t i = 0; i < g.pixel_count(); ++i) sum += density_value(params.density(), g.at(i));
  sum += fidelity(u, f, mask, params);
  return sum.value();
}

ImageField euler_residual(const ImageField& u, const ImageField& f, const DamageMask& mask,
                          const ModelParams& params) {
  check_shapes(u, f, mask);
  GradientField flux = gradient(u);
  std::vector<double> scratch(flux.stride());
  for (std::size_t i = 0; i < flux.pixel_count(); ++i) {
    auto p = flux.at(i);
    density_gradient(params.density(), p, scratch);
    std::copy(scratch.begin(), scratch.end(), p.begin());
  }
  ImageField residual = divergence(flux);
  for (double& v : residual.values()) v = -v;

  const double lambda = params.lambda();
  for (std::size_t i = 0; i < u.pixel_count(); ++i) {
    if (mask.damaged(i)) continue;
    const auto up = u.pixel(i);
    const auto fp = f.pixel(i);
    const double c = lambda * fidelity_slope(channel_norm2(up, fp), params);
    auto rp = residual.pixel(i);
    for (std::size_t m = 0; m < up.size(); ++m) rp[m] += c * (up[m] - fp[m]);
  }
  return residual;
}

double energy_change(const ImageField& u, const ImageField& step, const ImageField& f,
                     const DamageMask& mask, const ModelParams& params) {
  check_shapes(u, f, mask);
  if (!step.same_shape(u)) throw std::invalid_argument("energy_change: step shape mismatch");
  const GradientField gu = gradient(u);
  const GradientField gs = gradient(step);
  const DensityParams& density = params.density();
  const double delta = density.delta();

  CompensatedSum sum;
  for (std::size_t i = 0; i < gu.pixel_count(); ++i) {
    const auto p = gu.at(i);
    const auto s = gs.at(i);
    double b2 = 0.0, a2 = 0.0, diff2 = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
      const double q = p[k] + s[k];
      b2 += p[k] * p[k];
      a2 += q * q;
      diff2 += (2.0 * p[k] + s[k]) * s[k];
    }
    if (diff2 == 0.0 && a2 == b2) continue;
    const double a = std::sqrt(a2), b = std::sqrt(b2);
    // a - b from a^2 - b^2 avoids subtracting two nearly equal roots.
    const double da = (a + b) > 0.0 ? diff2 / (a + b) : 0.0;
    sum += 0.5 * delta * diff2;
    sum += phi_difference(density, b + da, b);
  }

  const double eps2 = params.fidelity_smoothing() * params.fidelity_smoothing();
  const double zeta = params.zeta();
  CompensatedSum fid;
  for (std::size_t i = 0; i < u.pixel_count(); ++i) {
    if (mask.damaged(i)) continue;
    const auto up = u.pixel(i);
    const auto fp = f.pixel(i);
    const auto sp = step.pixel(i);
    double b2 = 0.0, diff2 = 0.0;
    for (std::size_t m = 0; m < up.size(); ++m) {
      const double w = up[m] - fp[m];
      b2 += w * w;
      diff2 += (2.0 * w + sp[m]) * sp[m];
    }
    if (diff2 == 0.0) continue;
    fid += power_difference(b2 + diff2 + eps2, b2 + eps2, diff2, zeta);
  }
  sum += params.lambda() / zeta * fid.value();
  return sum.value();
}

double viscous_dissipation(const ImageField& u, double delta) {
  const GradientField g = gradient(u);
  CompensatedSum sum;
  for (double v : g.values()) sum += v * v;
  return delta * sum.value();
}

}  // namespace certinpaint
