#pragma once

#include "certinpaint/density.hpp"
#include "certinpaint/grid.hpp"

namespace certinpaint {

/// Model weights of the discrete energy
///
///   I_delta[u] = sum_pixels F_delta(grad u) + (lambda / zeta) sum_{known} |u - f|^zeta.
///
/// fidelity_smoothing (eps) is an optional regularization for zeta < 2 that
/// replaces |w|^zeta by (|w|^2 + eps^2)^(zeta/2) - eps^zeta. It is off (0)
/// by default and rejected for zeta >= 2.
class ModelParams {
 public:
  /// Throws std::invalid_argument unless lambda > 0, zeta > 1, eps >= 0,
  /// and eps == 0 whenever zeta >= 2.
  ModelParams(double lambda, double zeta, DensityParams density,
              double fidelity_smoothing = 0.0);

  double lambda() const { return lambda_; }
  double zeta() const { return zeta_; }
  const DensityParams& density() const { return density_; }
  double fidelity_smoothing() const { return smoothing_; }

  ModelParams with_delta(double delta) const {
    return ModelParams(lambda_, zeta_, density_.with_delta(delta), smoothing_);
  }
  ModelParams with_lambda(double lambda) const {
    return ModelParams(lambda, zeta_, density_, smoothing_);
  }
  /// Same model with the exact L^zeta fidelity.
  ModelParams without_smoothing() const { return ModelParams(lambda_, zeta_, density_); }

 private:
  double lambda_;
  double zeta_;
  DensityParams density_;
  double smoothing_;
};

/// (lambda / zeta) sum over known pixels of |u - f|^zeta (channel norm).
double fidelity(const ImageField& u, const ImageField& f, const DamageMask& mask,
                const ModelParams& params);

/// Discrete I_delta with delta = params.density().delta(); delta = 0 gives I.
double primal_energy(const ImageField& u, const ImageField& f, const DamageMask& mask,
                     const ModelParams& params);

/// Exact gradient of primal_energy with respect to every pixel value:
///   -div DF_delta(grad u) + lambda 1_{known} |u - f|^(zeta - 2) (u - f).
/// The fidelity part is taken as 0 where u == f.
ImageField euler_residual(const ImageField& u, const ImageField& f, const DamageMask& mask,
                          const ModelParams& params);

/// I_delta[u + step] - I_delta[u] computed term by term without forming the
/// two energies, so increments far below the rounding level of I_delta itself
/// keep their sign and leading digits. Line searches rely on this.
double energy_change(const ImageField& u, const ImageField& step, const ImageField& f,
                     const DamageMask& mask, const ModelParams& params);

/// delta * sum |grad u|^2, the viscous part scaled by two.
double viscous_dissipation(const ImageField& u, double delta);

/// Throws std::invalid_argument unless u, f and mask agree in shape.
void check_shapes(const ImageField& u, const ImageField& f, const DamageMask& mask);

}  // namespace certinpaint
