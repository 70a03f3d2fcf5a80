#include "certinpaint/dual.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "certinpaint/summation.hpp"

namespace certinpaint {

namespace {

double channel_norm(std::span<const double> v) { return frobenius_norm(v); }

// inf_v [ d.v + (lambda/zeta) |v - f|^zeta ] = d.f - ((zeta-1)/zeta) lambda^(-1/(zeta-1)) |d|^(zeta/(zeta-1))
double known_pixel_infimum(std::span<const double> d, std::span<const double> f, double lambda,
                           double zeta) {
  double dot = 0.0;
  for (std::size_t m = 0; m < d.size(); ++m) dot += d[m] * f[m];
  const double dn = channel_norm(d);
  if (dn == 0.0) return dot;
  return dot - (zeta - 1.0) / zeta * dn * std::pow(dn / lambda, 1.0 / (zeta - 1.0));
}

}  // namespace

double known_sup_norm(const ImageField& f, const DamageMask& mask) {
  if (!mask.matches(f)) throw std::invalid_argument("known_sup_norm: shape mismatch");
  double best = 0.0;
  for (std::size_t i = 0; i < f.pixel_count(); ++i) {
    if (!mask.damaged(i)) best = std::max(best, channel_norm(f.pixel(i)));
  }
  return best;
}

DualPair dual_from_primal(const ImageField& u, const ModelParams& params) {
  const GradientField g = gradient(u);
  const DensityParams limit = params.density().with_delta(0.0);
  const double delta = params.density().delta();
  DualPair out{GradientField(u.width(), u.height(), u.channels()),
               GradientField(u.width(), u.height(), u.channels())};
  for (std::size_t i = 0; i < g.pixel_count(); ++i) {
    const auto p = g.at(i);
    auto tau = out.tau.at(i);
    auto sigma = out.sigma.at(i);
    density_gradient(limit, p, tau);
    for (std::size_t k = 0; k < p.size(); ++k) sigma[k] = delta * p[k] + tau[k];
  }
  return out;
}

double dual_value(const DualField& tau, const ImageField& f, const DamageMask& mask,
                  const ModelParams& params, double bound) {
  if (tau.width() != f.width() || tau.height() != f.height() || tau.channels() != f.channels() ||
      !mask.matches(f)) {
    throw std::invalid_argument("dual_value: shape mismatch");
  }
  if (!(bound >= known_sup_norm(f, mask))) {
    throw std::invalid_argument("dual_value: bound must be at least max |f| over known pixels");
  }
  const DensityParams limit = params.density().with_delta(0.0);
  CompensatedSum sum;
  for (std::size_t i = 0; i < tau.pixel_count(); ++i) {
    const double conj = phi_conjugate(limit, frobenius_norm(tau.at(i)));
    if (std::isinf(conj)) return -std::numeric_limits<double>::infinity();
    sum += -conj;
  }
  ImageField d = divergence(tau);
  for (double& v : d.values()) v = -v;
  for (std::size_t i = 0; i < d.pixel_count(); ++i) {
    if (mask.damaged(i)) {
      sum += -bound * channel_norm(d.pixel(i));
    } else {
      sum += known_pixel_infimum(d.pixel(i), f.pixel(i), params.lambda(), params.zeta());
    }
  }
  return sum.value();
}

DualCertificate certify(const ImageField& u, const ImageField& f, const DamageMask& mask,
                        const ModelParams& params, double bound) {
  check_shapes(u, f, mask);
  const ModelParams target = params.without_smoothing().with_delta(0.0);
  const DualField tau = dual_from_primal(u, target).tau;

  DualCertificate cert;
  cert.primal_value = primal_energy(u, f, mask, target);

  double max_tau = 0.0;
  for (std::size_t i = 0; i < tau.pixel_count(); ++i) {
    max_tau = std::max(max_tau, frobenius_norm(tau.at(i)));
  }
  cert.feasibility_margin = target.density().recession() - max_tau;
  cert.low_margin_warning = cert.feasibility_margin < 1e-12;

  const ImageField div = divergence(tau);
  for (std::size_t i = 0; i < div.pixel_count(); ++i) {
    if (mask.damaged(i)) {
      cert.divergence_residual_on_damaged =
          std::max(cert.divergence_residual_on_damaged, channel_norm(div.pixel(i)));
    }
  }

  cert.dual_value = dual_value(tau, f, mask, target, bound);
  if (std::isinf(cert.dual_value)) {
    cert.dual_feasible = false;
    cert.relative_gap = std::numeric_limits<double>::infinity();
  } else {
    const double gap = cert.primal_value - cert.dual_value;
    cert.relative_gap = std::max(0.0, gap) / std::max(1.0, std::abs(cert.primal_value));
  }
  return cert;
}

}  // namespace certinpaint
