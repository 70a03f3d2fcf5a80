#pragma once

#include "certinpaint/energy.hpp"
#include "certinpaint/grid.hpp"

namespace certinpaint {

/// tau = DF(grad u) (the delta = 0 stress) and sigma = DF_delta(grad u)
/// = delta grad u + tau. sigma is reported as a diagnostic only.
struct DualPair {
  DualField tau;
  DualField sigma;
};

/// Optimality certificate for a candidate u of the delta = 0 problem.
struct DualCertificate {
  double primal_value = 0.0;    ///< I[u]
  double dual_value = 0.0;      ///< certified lower bound R[tau] on min I
  double relative_gap = 0.0;    ///< (I - R) / max(1, |I|), clamped at 0; +inf if infeasible
  double divergence_residual_on_damaged = 0.0;  ///< max |div tau| over D
  double feasibility_margin = 0.0;              ///< recession constant - max |tau|
  bool dual_feasible = true;
  /// Set when feasibility_margin < 1e-12 (very large gradients).
  bool low_margin_warning = false;
};

DualPair dual_from_primal(const ImageField& u, const ModelParams& params);

/// Certified lower bound on min I over fields with sup |v| <= bound:
///
///   R[tau] = -sum Phi*(|tau|)
///          + sum_{known} [ d.f - ((zeta-1)/zeta) lambda^(-1/(zeta-1)) |d|^(zeta/(zeta-1)) ]
///          - bound * sum_{damaged} |d|,        d = -div tau.
///
/// The known-pixel bracket is the exact infimum of d.v + (lambda/zeta)|v-f|^zeta
/// over v; the damaged-pixel term is the exact infimum of d.v over |v| <= bound.
/// Returns -infinity when tau leaves the effective domain of Phi*.
/// Throws std::invalid_argument if bound < max_{known} |f|.
/// Uses the exact L^zeta fidelity and delta = 0 regardless of params.
double dual_value(const DualField& tau, const ImageField& f, const DamageMask& mask,
                  const ModelParams& params, double bound);

/// Builds tau from u, evaluates I[u] (delta = 0, exact fidelity) and
/// R[tau], and fills the diagnostics.
DualCertificate certify(const ImageField& u, const ImageField& f, const DamageMask& mask,
                        const ModelParams& params, double bound);

/// L = max over known pixels of the channel norm of f.
double known_sup_norm(const ImageField& f, const DamageMask& mask);

}  // namespace certinpaint
