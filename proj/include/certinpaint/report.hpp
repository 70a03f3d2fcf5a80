#pragma once

#include <string>
#include <vector>

#include "certinpaint/energy.hpp"
#include "certinpaint/solver.hpp"

namespace certinpaint {

struct RunReport {
  std::string input_path;
  std::string mask_path;  ///< empty when denoising
  std::string output_path;
  int width = 0;
  int height = 0;
  int channels = 0;
  std::size_t damaged_pixels = 0;
  ModelParams model{10.0, 2.0, DensityParams(2.0)};
  SolverConfig config;
  double bound = 0.0;  ///< max |f| over known pixels
  DualCertificate certificate;
  MaxPrincipleCheck max_principle;
  int outer_steps = 0;
  int total_inner_iterations = 0;
  bool converged = false;
  double wall_seconds = 0.0;
  int exit_code = 0;
};

/// Stable "key = value" text, one entry per line, fixed key order. Reals use
/// the shortest round-trip representation. With include_timing false, every
/// timing field is written as 0 so identical runs give identical bytes.
std::string format_report(const RunReport& report, bool include_timing);

inline constexpr const char* kCsvHeader =
    "outer_iter,delta,inner_iters,I_delta,I,R_hat,gap_rel,grad_inf_norm,max_abs_u,seconds";

/// CSV with kCsvHeader and one row per outer continuation step, LF endings.
std::string format_csv(const std::vector<ConvergenceRecord>& records, bool include_timing);

}  // namespace certinpaint
