#include "certinpaint/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <random>

#include "certinpaint/summation.hpp"

namespace certinpaint {

namespace {

constexpr double kArmijo = 1e-4;
constexpr int kMaxBacktracks = 60;
constexpr double kMinStep = 1e-8;
constexpr double kMaxStep = 1e4;
constexpr std::size_t kLbfgsMemory = 8;

double dot(const ImageField& a, const ImageField& b) {
  CompensatedSum sum;
  const auto av = a.values();
  const auto bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) sum += av[i] * bv[i];
  return sum.value();
}

double inf_norm(const ImageField& a) {
  double best = 0.0;
  for (double v : a.values()) best = std::max(best, std::abs(v));
  return best;
}

// out = a + s * b
ImageField axpy(const ImageField& a, double s, const ImageField& b) {
  ImageField out = a;
  auto ov = out.values();
  const auto bv = b.values();
  for (std::size_t i = 0; i < ov.size(); ++i) ov[i] += s * bv[i];
  return out;
}

ImageField difference(const ImageField& a, const ImageField& b) { return axpy(a, -1.0, b); }

// Rough inverse Lipschitz constant of the residual, used before any curvature
// pair is available.
double initial_step(const ModelParams& model) {
  return std::clamp(1.0 / (8.0 * (1.0 + model.density().delta()) + model.lambda()), kMinStep,
                    kMaxStep);
}

struct Problem {
  const ImageField& f;
  const DamageMask& mask;
  const ModelParams& model;

  ImageField residual(const ImageField& u) const { return euler_residual(u, f, mask, model); }
  double change(const ImageField& u, const ImageField& step) const {
    return energy_change(u, step, f, mask, model);
  }
};

InnerResult run_accelerated(const ImageField& u0, const Problem& prob, double tol,
                            const SolverConfig& cfg) {
  InnerResult out;
  ImageField x = u0;
  ImageField gx = prob.residual(x);
  ImageField y = x;
  ImageField gy = gx;
  bool momentum = false;
  double theta = 1.0;
  double step = initial_step(prob.model);

  while (true) {
    out.residual_inf_norm = inf_norm(gx);
    if (out.residual_inf_norm <= tol) {
      out.status = InnerStatus::kConverged;
      break;
    }
    if (out.iterations >= cfg.inner_max_iters) {
      out.status = InnerStatus::kMaxIterations;
      break;
    }

    const double gnorm2 = dot(gy, gy);
    double a = step;
    bool found = false;
    ImageField z;
    double dz = 0.0;
    for (int bt = 0; bt <= kMaxBacktracks; ++bt) {
      z = axpy(y, -a, gy);
      dz = prob.change(y, difference(z, y));
      if (dz <= -kArmijo * a * gnorm2) {
        found = true;
        break;
      }
      a *= 0.5;
    }

    // Energy change relative to the last accepted iterate.
    double dx = dz;
    if (found && momentum) dx = prob.change(x, difference(z, x));
    if (!found || dx >= 0.0) {
      if (!momentum) {
        throw SolverError("line search failed after " + std::to_string(kMaxBacktracks) +
                          " backtracks (residual " + std::to_string(out.residual_inf_norm) + ")");
      }
      y = x;
      gy = gx;
      momentum = false;
      theta = 1.0;
      continue;
    }

    ImageField gz = prob.residual(z);
    const ImageField s = difference(z, x);
    const ImageField yv = difference(gz, gx);
    const double sy = dot(s, yv);
    // Short Barzilai-Borwein step; keep the accepted step on negative curvature.
    step = sy > 0.0 ? std::clamp(sy / dot(yv, yv), kMinStep, kMaxStep) : std::clamp(2.0 * a, kMinStep, kMaxStep);

    ImageField x_prev = std::move(x);
    x = std::move(z);
    gx = std::move(gz);
    out.accepted_decrements.push_back(dx);
    ++out.iterations;

    // Gradient restart: drop momentum once it points uphill.
    if (dot(gx, s) > 0.0) {
      theta = 1.0;
      momentum = false;
      y = x;
      gy = gx;
      continue;
    }
    const double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
    const double beta = (theta - 1.0) / theta_next;
    theta = theta_next;
    if (beta > 0.0) {
      y = axpy(x, beta, s);
      gy = prob.residual(y);
      momentum = true;
    } else {
      y = x;
      gy = gx;
      momentum = false;
    }
  }
  out.u = std::move(x);
  return out;
}

InnerResult run_lbfgs(const ImageField& u0, const Problem& prob, double tol,
                      const SolverConfig& cfg) {
  InnerResult out;
  ImageField x = u0;
  ImageField gx = prob.residual(x);
  std::deque<ImageField> s_hist, y_hist;
  std::deque<double> rho_hist;
  const double fallback = initial_step(prob.model);

  while (true) {
    out.residual_inf_norm = inf_norm(gx);
    if (out.residual_inf_norm <= tol) {
      out.status = InnerStatus::kConverged;
      break;
    }
    if (out.iterations >= cfg.inner_max_iters) {
      out.status = InnerStatus::kMaxIterations;
      break;
    }

    // Two-loop recursion for d = -H g.
    ImageField q = gx;
    std::vector<double> alpha(s_hist.size());
    for (std::size_t k = s_hist.size(); k-- > 0;) {
      alpha[k] = rho_hist[k] * dot(s_hist[k], q);
      q = axpy(q, -alpha[k], y_hist[k]);
    }
    const double gamma =
        s_hist.empty() ? fallback
                       : std::clamp(1.0 / (rho_hist.back() * dot(y_hist.back(), y_hist.back())),
                                    kMinStep, kMaxStep);
    for (double& v : q.values()) v *= gamma;
    for (std::size_t k = 0; k < s_hist.size(); ++k) {
      const double b = rho_hist[k] * dot(y_hist[k], q);
      q = axpy(q, alpha[k] - b, s_hist[k]);
    }
    ImageField d = q;
    for (double& v : d.values()) v = -v;
    double gd = dot(gx, d);
    if (!(gd < 0.0)) {
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      d = gx;
      for (double& v : d.values()) v *= -fallback;
      gd = dot(gx, d);
    }

    double a = 1.0;
    bool found = false;
    ImageField z;
    double dz = 0.0;
    for (int bt = 0; bt <= kMaxBacktracks; ++bt) {
      z = axpy(x, a, d);
      dz = prob.change(x, difference(z, x));
      if (dz <= kArmijo * a * gd && dz < 0.0) {
        found = true;
        break;
      }
      a *= 0.5;
    }
    if (!found) {
      if (!s_hist.empty()) {
        s_hist.clear();
        y_hist.clear();
        rho_hist.clear();
        continue;
      }
      throw SolverError("line search failed after " + std::to_string(kMaxBacktracks) +
                        " backtracks (residual " + std::to_string(out.residual_inf_norm) + ")");
    }

    ImageField gz = prob.residual(z);
    ImageField s = difference(z, x);
    ImageField yv = difference(gz, gx);
    const double sy = dot(s, yv);
    if (sy > 1e-12 * std::sqrt(dot(s, s) * dot(yv, yv))) {
      if (s_hist.size() == kLbfgsMemory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(yv));
      rho_hist.push_back(1.0 / sy);
    }
    x = std::move(z);
    gx = std::move(gz);
    out.accepted_decrements.push_back(dz);
    ++out.iterations;
  }
  out.u = std::move(x);
  return out;
}

bool known_values_constant(const ImageField& f, const DamageMask& mask, std::size_t& first) {
  first = f.pixel_count();
  for (std::size_t i = 0; i < f.pixel_count(); ++i) {
    if (mask.damaged(i)) continue;
    if (first == f.pixel_count()) {
      first = i;
      continue;
    }
    const auto a = f.pixel(first);
    const auto b = f.pixel(i);
    if (!std::equal(a.begin(), a.end(), b.begin())) return false;
  }
  return true;
}

}  // namespace

void SolverConfig::validate() const {
  if (!(delta0 > 0.0) || !(delta_min > 0.0) || !(delta_min <= delta0)) {
    throw std::invalid_argument("solver config: need 0 < delta_min <= delta0");
  }
  if (!(delta_factor > 0.0 && delta_factor < 1.0)) {
    throw std::invalid_argument("solver config: delta_factor must lie in (0, 1)");
  }
  if (!(inner_tol > 0.0)) throw std::invalid_argument("solver config: inner_tol must be > 0");
  if (inner_max_iters <= 0) throw std::invalid_argument("solver config: inner_max_iters must be > 0");
  if (!(gap_tol >= 0.0)) throw std::invalid_argument("solver config: gap_tol must be >= 0");
}

InnerResult minimize_smooth(const ImageField& u0, double delta, const ImageField& f,
                            const DamageMask& mask, const ModelParams& params,
                            const SolverConfig& cfg) {
  check_shapes(u0, f, mask);
  if (!(delta > 0.0)) throw std::invalid_argument("minimize_smooth: delta must be > 0");
  cfg.validate();
  const ModelParams model = params.with_delta(delta);
  const Problem prob{f, mask, model};
  const double tol = cfg.inner_tol * (1.0 + known_sup_norm(f, mask));

  InnerResult out = cfg.method == InnerMethod::kLbfgs ? run_lbfgs(u0, prob, tol, cfg)
                                                       : run_accelerated(u0, prob, tol, cfg);
  out.energy = primal_energy(out.u, f, mask, model);
  return out;
}

ImageField initial_guess(const ImageField& f, const DamageMask& mask, const SolverConfig& cfg) {
  check_shapes(f, f, mask);
  ImageField u = f;
  const int nc = f.channels();
  if (cfg.init == InitStrategy::kRandomFill) {
    std::mt19937_64 rng(cfg.seed);
    // Per-channel range keeps every fill inside the ball of radius L.
    const double half = known_sup_norm(f, mask) / std::sqrt(static_cast<double>(nc));
    std::uniform_real_distribution<double> dist(-half, half);
    for (std::size_t i = 0; i < u.pixel_count(); ++i) {
      if (!mask.damaged(i)) continue;
      for (double& v : u.pixel(i)) v = dist(rng);
    }
    return u;
  }
  std::vector<double> mean(nc, 0.0);
  std::size_t known = 0;
  for (std::size_t i = 0; i < f.pixel_count(); ++i) {
    if (mask.damaged(i)) continue;
    ++known;
    const auto p = f.pixel(i);
    for (int m = 0; m < nc; ++m) mean[m] += p[m];
  }
  for (double& v : mean) v /= static_cast<double>(known);
  for (std::size_t i = 0; i < u.pixel_count(); ++i) {
    if (mask.damaged(i)) std::copy(mean.begin(), mean.end(), u.pixel(i).begin());
  }
  return u;
}

ContinuationResult continuation(const ImageField& f, const DamageMask& mask,
                                const ModelParams& params, const SolverConfig& cfg) {
  return continuation(initial_guess(f, mask, cfg), f, mask, params, cfg);
}

ContinuationResult continuation(const ImageField& u0, const ImageField& f, const DamageMask& mask,
                                const ModelParams& params, const SolverConfig& cfg) {
  using Clock = std::chrono::steady_clock;
  check_shapes(u0, f, mask);
  cfg.validate();
  const double bound = known_sup_norm(f, mask);

  ContinuationResult result;
  result.u = u0;

  std::size_t first = 0;
  if (known_values_constant(f, mask, first)) {
    // The constant field attains zero energy.
    const auto c = f.pixel(first);
    for (std::size_t i = 0; i < result.u.pixel_count(); ++i) {
      std::copy(c.begin(), c.end(), result.u.pixel(i).begin());
    }
    const auto start = Clock::now();
    result.certificate = certify(result.u, f, mask, params, bound);
    ConvergenceRecord rec;
    rec.delta = cfg.delta0;
    rec.I_delta_value = primal_energy(result.u, f, mask, params.with_delta(cfg.delta0));
    rec.I_value = result.certificate.primal_value;
    rec.dual_value = result.certificate.dual_value;
    rec.relative_gap = result.certificate.relative_gap;
    rec.residual_inf_norm = inf_norm(euler_residual(result.u, f, mask, params.with_delta(cfg.delta0)));
    rec.max_abs_u = sup_norm(result.u);
    rec.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    result.records.push_back(rec);
    result.converged = result.certificate.relative_gap <= cfg.gap_tol;
    return result;
  }

  // Schedule delta0 * factor^k, with a relative slack so that e.g.
  // 0.1 * 0.1^7 still counts as reaching delta_min = 1e-8.
  for (int k = 0;; ++k) {
    const double delta = cfg.delta0 * std::pow(cfg.delta_factor, k);
    if (delta < cfg.delta_min * (1.0 - 1e-9)) break;
    const auto start = Clock::now();
    InnerResult inner = minimize_smooth(result.u, delta, f, mask, params, cfg);
    result.u = std::move(inner.u);
    result.certificate = certify(result.u, f, mask, params, bound);

    ConvergenceRecord rec;
    rec.outer_iter = k;
    rec.delta = delta;
    rec.inner_iterations = inner.iterations;
    rec.inner_status = inner.status;
    rec.I_delta_value = inner.energy;
    rec.I_value = result.certificate.primal_value;
    rec.dual_value = result.certificate.dual_value;
    rec.relative_gap = result.certificate.relative_gap;
    rec.residual_inf_norm = inner.residual_inf_norm;
    rec.max_abs_u = sup_norm(result.u);
    rec.viscous_dissipation = viscous_dissipation(result.u, delta);
    rec.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    result.records.push_back(rec);

    if (result.certificate.relative_gap <= cfg.gap_tol) {
      result.converged = true;
      break;
    }
  }
  return result;
}

MaxPrincipleCheck check_max_principle(const ImageField& u, const ImageField& f,
                                      const DamageMask& mask) {
  check_shapes(u, f, mask);
  MaxPrincipleCheck out;
  out.bound = known_sup_norm(f, mask);
  out.sup_abs_u = sup_norm(u);
  out.margin = out.bound - out.sup_abs_u;
  out.passed = out.sup_abs_u <= out.bound + 1e-8;
  return out;
}

std::string to_string(InnerStatus status) {
  return status == InnerStatus::kConverged ? "converged" : "max_iterations";
}

std::string to_string(InnerMethod method) {
  return method == InnerMethod::kLbfgs ? "lbfgs" : "accelerated_gradient";
}

std::string to_string(InitStrategy init) {
  return init == InitStrategy::kRandomFill ? "random" : "mean";
}

}  // namespace certinpaint
