#include "certinpaint/cli.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "certinpaint/dual.hpp"
#include "certinpaint/netpbm.hpp"
#include "certinpaint/report.hpp"
#include "certinpaint/solver.hpp"

namespace certinpaint {

namespace {

struct Options {
  std::string input;
  std::string mask;
  std::string output;
  std::string report;
  std::string log_csv;
  double mu = 2.0;
  double zeta = 2.0;
  double lambda = 10.0;
  double fidelity_smoothing = 0.0;
  SolverConfig cfg;
  bool no_timing = false;
  bool quiet = false;
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path);
}

int execute(const Options& opt) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();

  NetpbmImage input;
  std::optional<ModelParams> model;
  std::optional<DamageMask> mask;
  try {
    input = read_netpbm(opt.input);
    mask = opt.mask.empty() ? DamageMask(input.width, input.height)
                            : load_mask(opt.mask, input.width, input.height);
    model.emplace(opt.lambda, opt.zeta, DensityParams(opt.mu), opt.fidelity_smoothing);
    opt.cfg.validate();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  }
  const ImageField f = to_field(input);

  ContinuationResult result;
  try {
    result = continuation(f, *mask, *model, opt.cfg);
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kExitNotCertified;
  }

  if (!opt.quiet) {
    for (const auto& rec : result.records) {
      std::cerr << fmt::format("step {:2d}  delta {:.1e}  inner {:5d}  I {:.10g}  gap {:.3e}\n",
                               rec.outer_iter, rec.delta, rec.inner_iterations, rec.I_value,
                               rec.relative_gap);
    }
  }

  RunReport report;
  report.input_path = opt.input;
  report.mask_path = opt.mask;
  report.output_path = opt.output;
  report.width = f.width();
  report.height = f.height();
  report.channels = f.channels();
  report.damaged_pixels = mask->damaged_count();
  report.model = *model;
  report.config = opt.cfg;
  report.bound = known_sup_norm(f, *mask);
  report.certificate = result.certificate;
  report.max_principle = check_max_principle(result.u, f, *mask);
  report.outer_steps = static_cast<int>(result.records.size());
  for (const auto& rec : result.records) report.total_inner_iterations += rec.inner_iterations;
  report.converged = result.converged;
  report.exit_code =
      result.converged && report.max_principle.passed ? kExitCertified : kExitNotCertified;

  try {
    if (!opt.output.empty()) save_image(opt.output, result.u, input.format, input.maxval);
    report.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    if (!opt.report.empty()) write_text(opt.report, format_report(report, !opt.no_timing));
    if (!opt.log_csv.empty()) write_text(opt.log_csv, format_csv(result.records, !opt.no_timing));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  }

  if (!opt.quiet) {
    std::cerr << fmt::format("I = {:.12g}  R = {:.12g}  gap = {:.3e}  max principle {}\n",
                             result.certificate.primal_value, result.certificate.dual_value,
                             result.certificate.relative_gap,
                             report.max_principle.passed ? "ok" : "VIOLATED");
  }
  return report.exit_code;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{
      "Certified inpainting and denoising with a linear-growth smooth TV energy.\n"
      "Minimizes sum Phi_mu(|grad u|) + (lambda/zeta) sum_known |u - f|^zeta by\n"
      "vanishing-viscosity continuation and reports a duality-gap certificate.\n"
      "Mask polarity: bright (>= 128 of 255) = damaged pixel, dark = known pixel.\n"
      "Exit status: 0 certified, 1 invalid input, 2 not certified."};
  Options opt;
  app.add_option("--input", opt.input, "input PGM (P2/P5) or PPM (P3/P6)")->required();
  app.add_option("--mask", opt.mask, "PGM mask, bright = damaged; omit to denoise");
  app.add_option("--output", opt.output, "restored image, same format and maxval as input");
  app.add_option("--mu", opt.mu, "ellipticity exponent mu > 1")->capture_default_str();
  app.add_option("--zeta", opt.zeta, "fidelity exponent zeta > 1")->capture_default_str();
  app.add_option("--lambda", opt.lambda, "fidelity weight lambda > 0")->capture_default_str();
  app.add_option("--delta0", opt.cfg.delta0, "initial viscosity")->capture_default_str();
  app.add_option("--delta-min", opt.cfg.delta_min, "final viscosity")->capture_default_str();
  app.add_option("--delta-factor", opt.cfg.delta_factor, "viscosity reduction factor in (0,1)")
      ->capture_default_str();
  app.add_option("--tol", opt.cfg.gap_tol, "relative duality gap tolerance")->capture_default_str();
  app.add_option("--inner-tol", opt.cfg.inner_tol, "inner residual tolerance")->capture_default_str();
  app.add_option("--inner-max-iters", opt.cfg.inner_max_iters, "inner iteration cap")
      ->capture_default_str();
  app.add_option("--seed", opt.cfg.seed, "seed for --init random")->capture_default_str();
  app.add_option("--init", opt.cfg.init, "initial fill of damaged pixels")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, InitStrategy>{{"mean", InitStrategy::kMeanFill},
                                              {"random", InitStrategy::kRandomFill}},
          CLI::ignore_case));
  app.add_option("--inner-method", opt.cfg.method, "inner minimizer")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, InnerMethod>{{"agd", InnerMethod::kAcceleratedGradient},
                                             {"lbfgs", InnerMethod::kLbfgs}},
          CLI::ignore_case));
  app.add_option("--fidelity-smoothing", opt.fidelity_smoothing,
                 "epsilon smoothing of |u - f| (zeta < 2 only)")
      ->capture_default_str();
  app.add_option("--report", opt.report, "write key = value run report");
  app.add_option("--log-csv", opt.log_csv, "write per-step convergence CSV");
  app.add_flag("--no-timing", opt.no_timing, "write timing fields as 0 (byte-reproducible output)");
  app.add_flag("--quiet", opt.quiet, "no progress output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitCertified : kExitInvalidInput;
  }
  return execute(opt);
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<std::string> storage = args;
  std::vector<char*> argv;
  argv.reserve(storage.size());
  for (auto& s : storage) argv.push_back(s.data());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace certinpaint
