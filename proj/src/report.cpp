#include "certinpaint/report.hpp"

#include <fmt/format.h>

namespace certinpaint {

namespace {

void put(std::string& out, std::string_view key, const auto& value) {
  fmt::format_to(std::back_inserter(out), "{} = {}\n", key, value);
}

}  // namespace

std::string format_report(const RunReport& r, bool include_timing) {
  std::string out;
  put(out, "input", r.input_path);
  put(out, "mask", r.mask_path.empty() ? std::string("none") : r.mask_path);
  put(out, "output", r.output_path);
  put(out, "width", r.width);
  put(out, "height", r.height);
  put(out, "channels", r.channels);
  put(out, "damaged_pixels", r.damaged_pixels);
  put(out, "mu", r.model.density().mu());
  put(out, "zeta", r.model.zeta());
  put(out, "lambda", r.model.lambda());
  put(out, "fidelity_smoothing", r.model.fidelity_smoothing());
  put(out, "delta0", r.config.delta0);
  put(out, "delta_min", r.config.delta_min);
  put(out, "delta_factor", r.config.delta_factor);
  put(out, "inner_tol", r.config.inner_tol);
  put(out, "inner_max_iters", r.config.inner_max_iters);
  put(out, "gap_tol", r.config.gap_tol);
  put(out, "seed", r.config.seed);
  put(out, "init", to_string(r.config.init));
  put(out, "inner_method", to_string(r.config.method));
  put(out, "bound_L", r.bound);
  put(out, "primal_value", r.certificate.primal_value);
  put(out, "dual_value", r.certificate.dual_value);
  put(out, "relative_gap", r.certificate.relative_gap);
  put(out, "dual_feasible", r.certificate.dual_feasible);
  put(out, "feasibility_margin", r.certificate.feasibility_margin);
  put(out, "divergence_residual_on_damaged", r.certificate.divergence_residual_on_damaged);
  put(out, "max_principle_passed", r.max_principle.passed);
  put(out, "max_principle_margin", r.max_principle.margin);
  put(out, "outer_steps", r.outer_steps);
  put(out, "total_inner_iterations", r.total_inner_iterations);
  put(out, "converged", r.converged);
  put(out, "wall_seconds", include_timing ? r.wall_seconds : 0.0);
  put(out, "exit_code", r.exit_code);
  return out;
}

std::string format_csv(const std::vector<ConvergenceRecord>& records, bool include_timing) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& rec : records) {
    fmt::format_to(std::back_inserter(out), "{},{},{},{},{},{},{},{},{},{}\n", rec.outer_iter,
                   rec.delta, rec.inner_iterations, rec.I_delta_value, rec.I_value,
                   rec.dual_value, rec.relative_gap, rec.residual_inf_norm, rec.max_abs_u,
                   include_timing ? rec.wall_seconds : 0.0);
  }
  return out;
}

}  // namespace certinpaint
