#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "certinpaint/dual.hpp"
#include "certinpaint/energy.hpp"
#include "certinpaint/grid.hpp"

namespace certinpaint {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class InnerMethod {
  kAcceleratedGradient,  ///< gradient descent, Armijo backtracking, momentum with restart
  kLbfgs,                ///< limited-memory BFGS with Armijo backtracking
};

enum class InitStrategy {
  kMeanFill,    ///< f on known pixels, mean of known values on D
  kRandomFill,  ///< f on known pixels, seeded uniform values inside the max-principle ball on D
};

struct SolverConfig {
  double delta0 = 0.1;
  double delta_min = 1e-8;
  double delta_factor = 0.1;
  /// Inner stop: sup |euler_residual| <= inner_tol * (1 + max_known |f|).
  double inner_tol = 1e-8;
  int inner_max_iters = 5000;
  double gap_tol = 1e-4;
  std::uint64_t seed = 0;
  InitStrategy init = InitStrategy::kMeanFill;
  InnerMethod method = InnerMethod::kLbfgs;

  /// Throws std::invalid_argument on an inconsistent configuration.
  void validate() const;
};

enum class InnerStatus { kConverged, kMaxIterations };

struct InnerResult {
  ImageField u;
  InnerStatus status = InnerStatus::kConverged;
  int iterations = 0;
  double energy = 0.0;             ///< I_delta[u]
  double residual_inf_norm = 0.0;  ///< sup |euler_residual(u)|
  /// Accurately computed energy increment of every accepted step (all < 0).
  std::vector<double> accepted_decrements;
};

/// Minimizes I_delta from u0 for a fixed delta > 0 (overrides the delta in
/// params). Throws SolverError if a line search fails after 60 backtracks.
InnerResult minimize_smooth(const ImageField& u0, double delta, const ImageField& f,
                            const DamageMask& mask, const ModelParams& params,
                            const SolverConfig& cfg);

struct ConvergenceRecord {
  int outer_iter = 0;
  double delta = 0.0;
  int inner_iterations = 0;
  InnerStatus inner_status = InnerStatus::kConverged;
  double I_delta_value = 0.0;
  double I_value = 0.0;
  double dual_value = 0.0;
  double relative_gap = 0.0;
  double residual_inf_norm = 0.0;
  double max_abs_u = 0.0;
  double viscous_dissipation = 0.0;  ///< delta * sum |grad u_delta|^2
  double wall_seconds = 0.0;
};

struct ContinuationResult {
  ImageField u;
  DualCertificate certificate;
  std::vector<ConvergenceRecord> records;
  bool converged = false;  ///< certificate reached gap_tol
};

/// Starting field for the continuation, per cfg.init.
ImageField initial_guess(const ImageField& f, const DamageMask& mask, const SolverConfig& cfg);

/// Vanishing-viscosity continuation: minimize_smooth for
/// delta = delta0 * factor^k >= delta_min, warm-started, stopping at the first
/// certificate with relative_gap <= gap_tol. Always returns a certificate.
ContinuationResult continuation(const ImageField& f, const DamageMask& mask,
                                const ModelParams& params, const SolverConfig& cfg);

/// Same, starting from a caller-supplied field.
ContinuationResult continuation(const ImageField& u0, const ImageField& f, const DamageMask& mask,
                                const ModelParams& params, const SolverConfig& cfg);

struct MaxPrincipleCheck {
  bool passed = false;
  double margin = 0.0;  ///< bound - sup |u|; negative when violated
  double bound = 0.0;   ///< max_known |f|
  double sup_abs_u = 0.0;
};

/// Passes iff sup |u| <= max_known |f| + 1e-8.
MaxPrincipleCheck check_max_principle(const ImageField& u, const ImageField& f,
                                      const DamageMask& mask);

std::string to_string(InnerStatus status);
std::string to_string(InnerMethod method);
std::string to_string(InitStrategy init);

}  // namespace certinpaint
