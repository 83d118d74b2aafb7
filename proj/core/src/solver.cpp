#include "spectraj/solver.hpp"

#include <lapacke.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <utility>
#include <vector>

namespace spectraj {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEqualityRelax = 1e-8;   // half-width given to equality rows
constexpr double kBoundPush = 1e-2;       // relative interior push at startup
constexpr double kDualSafeguard = 1e10;   // kappa_Sigma clip on bound multipliers
constexpr double kMaxGradScale = 100.0;   // target infinity norm after scaling
constexpr double kResidualScaleMax = 100.0;

// Filter line-search envelope and switching constants.
constexpr double kGammaTheta = 1e-5;
constexpr double kGammaPhi = 1e-5;
constexpr double kSwitchDelta = 1.0;
constexpr double kSwitchTheta = 1.1;
constexpr double kSwitchPhi = 2.3;
constexpr int kSocRounds = 4;        // second-order correction attempts
constexpr double kSocDecay = 0.99;   // required infeasibility decay per round
constexpr int kStallLimit = 100;     // accepted steps without feasibility gain

double eval_scalar(const DifferentiableFunction& f, const Eigen::VectorXd& z) {
  Eigen::VectorXd y(1);
  f.evaluate(z, y);
  return y(0);
}

Eigen::VectorXd eval_vector(const DifferentiableFunction& f, const Eigen::VectorXd& z) {
  Eigen::VectorXd y(f.output_dim());
  f.evaluate(z, y);
  return y;
}

// Shared by the public kkt_residuals and the solver's convergence test so a
// replayed result reproduces the reported numbers bit for bit.
KKTResiduals residuals_impl(const Eigen::VectorXd& g, const Eigen::MatrixXd& a,
                            const Eigen::VectorXd& c, const NLPSpec& spec,
                            const Eigen::VectorXd& z, const Multipliers& mult) {
  const int n = spec.num_variables;
  const int m = spec.num_constraints;

  const double mult_sum = (m > 0 ? mult.constraint.lpNorm<1>() : 0.0) +
                          mult.bound_lower.lpNorm<1>() + mult.bound_upper.lpNorm<1>();
  const double bound_sum = mult.bound_lower.lpNorm<1>() + mult.bound_upper.lpNorm<1>();
  const double s_d =
      std::max(kResidualScaleMax, mult_sum / std::max(1, m + 2 * n)) / kResidualScaleMax;
  const double s_c =
      std::max(kResidualScaleMax, bound_sum / std::max(1, 2 * n)) / kResidualScaleMax;

  Eigen::VectorXd stat = g - mult.bound_lower + mult.bound_upper;
  if (m > 0) stat += a.transpose() * mult.constraint;

  double feas = 0.0;
  for (int i = 0; i < n; ++i) {
    feas = std::max(feas, spec.z_lower(i) - z(i));
    feas = std::max(feas, z(i) - spec.z_upper(i));
  }
  for (int j = 0; j < m; ++j) {
    feas = std::max(feas, spec.c_lower(j) - c(j));
    feas = std::max(feas, c(j) - spec.c_upper(j));
  }

  double comp = 0.0;
  for (int i = 0; i < n; ++i) {
    if (std::isfinite(spec.z_lower(i)))
      comp = std::max(comp, std::abs(mult.bound_lower(i) * (z(i) - spec.z_lower(i))));
    if (std::isfinite(spec.z_upper(i)))
      comp = std::max(comp, std::abs(mult.bound_upper(i) * (spec.z_upper(i) - z(i))));
  }
  for (int j = 0; j < m; ++j) {
    if (spec.c_lower(j) == spec.c_upper(j)) continue;  // equality row
    const double y_j = mult.constraint(j);
    if (std::isfinite(spec.c_lower(j)))
      comp = std::max(comp, std::abs(std::max(-y_j, 0.0) * (c(j) - spec.c_lower(j))));
    if (std::isfinite(spec.c_upper(j)))
      comp = std::max(comp, std::abs(std::max(y_j, 0.0) * (spec.c_upper(j) - c(j))));
  }

  KKTResiduals r;
  r.stationarity = stat.lpNorm<Eigen::Infinity>() / s_d;
  r.feasibility = feas;
  r.complementarity = comp / s_c;
  return r;
}

// Clip a point into the strict interior of [lower, upper].
double push_inside(double v, double lower, double upper) {
  double lo = -kInf, hi = kInf;
  if (std::isfinite(lower) && std::isfinite(upper)) {
    const double margin = std::min(kBoundPush * std::max({1.0, std::abs(lower), std::abs(upper)}),
                                   kBoundPush * (upper - lower));
    lo = lower + margin;
    hi = upper - margin;
  } else if (std::isfinite(lower)) {
    lo = lower + kBoundPush * std::max(1.0, std::abs(lower));
  } else if (std::isfinite(upper)) {
    hi = upper - kBoundPush * std::max(1.0, std::abs(upper));
  }
  return std::min(std::max(v, lo), hi);
}

// Bunch-Kaufman factorization of the symmetric indefinite KKT matrix. The
// factors are kept so corrected right-hand sides reuse them; every solve does
// one round of iterative refinement.
class SymSolver {
 public:
  bool factorize(const Eigen::MatrixXd& kkt) {
    k_ = kkt;
    factors_ = kkt;
    const lapack_int dim = static_cast<lapack_int>(kkt.rows());
    ipiv_.assign(static_cast<std::size_t>(dim), 0);
    return LAPACKE_dsytrf(LAPACK_COL_MAJOR, 'L', dim, factors_.data(), dim, ipiv_.data()) == 0;
  }

  bool solve(const Eigen::VectorXd& rhs, Eigen::VectorXd& sol) const {
    const lapack_int dim = static_cast<lapack_int>(k_.rows());
    sol = rhs;
    if (LAPACKE_dsytrs(LAPACK_COL_MAJOR, 'L', dim, 1, factors_.data(), dim, ipiv_.data(),
                       sol.data(), dim) != 0)
      return false;
    Eigen::VectorXd corr = rhs - k_ * sol;
    if (LAPACKE_dsytrs(LAPACK_COL_MAJOR, 'L', dim, 1, factors_.data(), dim, ipiv_.data(),
                       corr.data(), dim) != 0)
      return false;
    sol += corr;
    return sol.allFinite();
  }

 private:
  Eigen::MatrixXd k_, factors_;
  std::vector<lapack_int> ipiv_;
};

struct Workspace {
  // primal iterate, slacks for general rows, and dual variables
  Eigen::VectorXd x, s;
  Eigen::VectorXd y;        // general-row multipliers (scaled problem)
  Eigen::VectorXd zl, zu;   // variable bound multipliers
  Eigen::VectorXd wl, wu;   // slack bound multipliers

  // internal (relaxed) bounds; lb/ub on x, sl/su on s
  Eigen::VectorXd lb, ub, sl, su;

  // scaling picked at z0
  double sigma_f = 1.0;
  Eigen::VectorXd sigma_c;
};

double barrier_value_at(const Workspace& w, const Eigen::VectorXd& x_trial,
                        const Eigen::VectorXd& s_trial, double mu) {
  double b = 0.0;
  for (int i = 0; i < x_trial.size(); ++i) {
    if (std::isfinite(w.lb(i))) b -= mu * std::log(x_trial(i) - w.lb(i));
    if (std::isfinite(w.ub(i))) b -= mu * std::log(w.ub(i) - x_trial(i));
  }
  for (int j = 0; j < s_trial.size(); ++j) {
    if (std::isfinite(w.sl(j))) b -= mu * std::log(s_trial(j) - w.sl(j));
    if (std::isfinite(w.su(j))) b -= mu * std::log(w.su(j) - s_trial(j));
  }
  return b;
}

// Largest step in (0, 1] keeping value + alpha * delta at fraction tau of its
// distance to the violated side.
double fraction_to_boundary(const Eigen::VectorXd& value, const Eigen::VectorXd& delta,
                            const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                            double tau) {
  double alpha = 1.0;
  for (int i = 0; i < value.size(); ++i) {
    if (delta(i) < 0.0 && std::isfinite(lower(i)))
      alpha = std::min(alpha, tau * (value(i) - lower(i)) / -delta(i));
    if (delta(i) > 0.0 && std::isfinite(upper(i)))
      alpha = std::min(alpha, tau * (upper(i) - value(i)) / delta(i));
  }
  return alpha;
}

double positivity_step(const Eigen::VectorXd& value, const Eigen::VectorXd& delta, double tau) {
  double alpha = 1.0;
  for (int i = 0; i < value.size(); ++i)
    if (delta(i) < 0.0) alpha = std::min(alpha, tau * value(i) / -delta(i));
  return alpha;
}

void clip_duals(Eigen::VectorXd& mult, const Eigen::VectorXd& dist, double mu) {
  for (int i = 0; i < mult.size(); ++i) {
    if (!std::isfinite(dist(i))) continue;
    const double lo = mu / (kDualSafeguard * dist(i));
    const double hi = kDualSafeguard * mu / dist(i);
    mult(i) = std::min(std::max(mult(i), lo), hi);
  }
}

}  // namespace

void NLPSpec::validate() const {
  if (num_variables <= 0) throw std::invalid_argument("NLPSpec: num_variables must be positive");
  if (num_constraints < 0) throw std::invalid_argument("NLPSpec: num_constraints negative");
  if (!objective || objective->input_dim() != num_variables || objective->output_dim() != 1)
    throw std::invalid_argument("NLPSpec: objective missing or wrong dimensions");
  if (num_constraints > 0) {
    if (!constraints || constraints->input_dim() != num_variables ||
        constraints->output_dim() != num_constraints)
      throw std::invalid_argument("NLPSpec: constraints missing or wrong dimensions");
  }
  if (z_lower.size() != num_variables || z_upper.size() != num_variables)
    throw std::invalid_argument("NLPSpec: variable bound sizes mismatch");
  if (c_lower.size() != num_constraints || c_upper.size() != num_constraints)
    throw std::invalid_argument("NLPSpec: constraint bound sizes mismatch");
  for (int i = 0; i < num_variables; ++i)
    if (!(z_lower(i) <= z_upper(i))) throw std::invalid_argument("NLPSpec: z_lower > z_upper");
  for (int j = 0; j < num_constraints; ++j) {
    if (!(c_lower(j) <= c_upper(j))) throw std::invalid_argument("NLPSpec: c_lower > c_upper");
    if (c_lower(j) == -kInf && c_upper(j) == kInf)
      throw std::invalid_argument("NLPSpec: constraint row with no finite bound");
  }
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kConverged: return "converged";
    case SolveStatus::kMaxIterations: return "max-iterations";
    case SolveStatus::kLineSearchFailure: return "line-search-failure";
    case SolveStatus::kInfeasibleDetected: return "infeasible-detected";
  }
  return "unknown";
}

KKTResiduals kkt_residuals(const NLPSpec& spec, const Eigen::VectorXd& z,
                           const Multipliers& mult) {
  spec.validate();
  if (z.size() != spec.num_variables) throw std::invalid_argument("kkt_residuals: z size");
  if (mult.constraint.size() != spec.num_constraints ||
      mult.bound_lower.size() != spec.num_variables ||
      mult.bound_upper.size() != spec.num_variables)
    throw std::invalid_argument("kkt_residuals: multiplier sizes");

  const Eigen::VectorXd g = gradient(*spec.objective, z);
  Eigen::VectorXd c(spec.num_constraints);
  Eigen::MatrixXd a(spec.num_constraints, spec.num_variables);
  if (spec.num_constraints > 0) a = jacobian(*spec.constraints, z, &c);
  return residuals_impl(g, a, c, spec, z, mult);
}

SolveResult solve(const NLPSpec& spec, const Eigen::VectorXd& z0, const SolverOptions& options) {
  const auto t_start = std::chrono::steady_clock::now();
  spec.validate();
  if (z0.size() != spec.num_variables) throw std::invalid_argument("solve: z0 size mismatch");
  if (options.tolerance <= 0.0) throw std::invalid_argument("solve: tolerance must be positive");
  if (options.barrier_reduction <= 0.0 || options.barrier_reduction >= 1.0)
    throw std::invalid_argument("solve: barrier_reduction must lie in (0, 1)");

  const int n = spec.num_variables;
  const int m = spec.num_constraints;
  const double tau = options.fraction_to_boundary;
  const double mu_floor = options.tolerance / 10.0;

  Workspace w;
  // Internal bounds: zero-width variable ranges and equality rows are widened
  // by a tight offset so every bound can host a log barrier.
  w.lb = spec.z_lower;
  w.ub = spec.z_upper;
  for (int i = 0; i < n; ++i) {
    if (w.lb(i) == w.ub(i)) {
      w.lb(i) -= kEqualityRelax;
      w.ub(i) += kEqualityRelax;
    }
  }
  Eigen::VectorXd cl_relaxed = spec.c_lower;
  Eigen::VectorXd cu_relaxed = spec.c_upper;
  for (int j = 0; j < m; ++j) {
    if (cl_relaxed(j) == cu_relaxed(j)) {
      cl_relaxed(j) -= kEqualityRelax;
      cu_relaxed(j) += kEqualityRelax;
    }
  }

  w.x.resize(n);
  for (int i = 0; i < n; ++i) w.x(i) = push_inside(z0(i), w.lb(i), w.ub(i));

  // First evaluation; non-finite values here are the caller's problem.
  double f_raw;
  Eigen::VectorXd g_raw = gradient(*spec.objective, w.x, &f_raw);
  Eigen::VectorXd c_raw(m);
  Eigen::MatrixXd a_raw(m, n);
  if (m > 0) a_raw = jacobian(*spec.constraints, w.x, &c_raw);
  if (!std::isfinite(f_raw)) throw EvalError(0);

  // Gradient-based scaling so mixed-unit problems start with moderate norms.
  const double g0 = g_raw.lpNorm<Eigen::Infinity>();
  w.sigma_f = (g0 > kMaxGradScale) ? kMaxGradScale / g0 : 1.0;
  w.sigma_c.resize(m);
  for (int j = 0; j < m; ++j) {
    const double row = m > 0 ? a_raw.row(j).lpNorm<Eigen::Infinity>() : 0.0;
    w.sigma_c(j) = (row > kMaxGradScale) ? kMaxGradScale / row : 1.0;
  }
  w.sl = w.sigma_c.cwiseProduct(cl_relaxed);
  w.su = w.sigma_c.cwiseProduct(cu_relaxed);
  for (int j = 0; j < m; ++j) {
    if (cl_relaxed(j) == -kInf) w.sl(j) = -kInf;
    if (cu_relaxed(j) == kInf) w.su(j) = kInf;
  }

  double mu = options.barrier_init;

  w.s.resize(m);
  for (int j = 0; j < m; ++j) w.s(j) = push_inside(w.sigma_c(j) * c_raw(j), w.sl(j), w.su(j));
  w.y = Eigen::VectorXd::Zero(m);
  w.zl = Eigen::VectorXd::Zero(n);
  w.zu = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    if (std::isfinite(w.lb(i))) w.zl(i) = std::min(1e6, mu / (w.x(i) - w.lb(i)));
    if (std::isfinite(w.ub(i))) w.zu(i) = std::min(1e6, mu / (w.ub(i) - w.x(i)));
  }
  w.wl = Eigen::VectorXd::Zero(m);
  w.wu = Eigen::VectorXd::Zero(m);
  for (int j = 0; j < m; ++j) {
    if (std::isfinite(w.sl(j))) w.wl(j) = std::min(1e6, mu / (w.s(j) - w.sl(j)));
    if (std::isfinite(w.su(j))) w.wu(j) = std::min(1e6, mu / (w.su(j) - w.s(j)));
  }

  Eigen::MatrixXd bfgs = Eigen::MatrixXd::Identity(n, n);
  bool bfgs_scaled = false;
  bool have_pair = false;
  Eigen::VectorXd pair_s(n);
  Eigen::VectorXd g_prev;
  Eigen::MatrixXd a_prev;

  // Filter over (infeasibility, barrier objective) pairs; reset whenever the
  // barrier parameter moves.
  std::vector<std::pair<double, double>> filter;
  const double theta0 =
      (m > 0) ? (w.sigma_c.cwiseProduct(c_raw) - w.s).lpNorm<1>() : 0.0;
  const double theta_min = 1e-4 * std::max(1.0, theta0);
  const double theta_max = 1e4 * std::max(1.0, theta0);

  double stall_best = kInf;
  int stall = 0;
  bool reset_used = false;

  SolveResult result;
  result.z = w.x;
  double best_overall = kInf;
  double best_f = f_raw;
  KKTResiduals best_res;
  Multipliers best_mult;
  Eigen::VectorXd best_x = w.x;

  if (options.log) {
    *options.log << std::setw(5) << "iter" << std::setw(17) << "objective" << std::setw(13)
                 << "feasibility" << std::setw(13) << "stationarity" << std::setw(13)
                 << "complement" << std::setw(11) << "barrier" << std::setw(11) << "step"
                 << '\n';
  }

  int iter = 0;
  bool done = false;
  double alpha_taken = 0.0;
  std::string failure_message;
  SymSolver sym;

  for (; iter <= options.max_iterations && !done; ++iter) {
    if (iter > 0) {
      // Refresh derivatives at the accepted iterate.
      try {
        g_raw = gradient(*spec.objective, w.x, &f_raw);
        if (m > 0) a_raw = jacobian(*spec.constraints, w.x, &c_raw);
      } catch (const std::exception& e) {
        result.status = SolveStatus::kLineSearchFailure;
        failure_message = std::string("derivative evaluation failed: ") + e.what();
        break;
      }
    }
    const Eigen::VectorXd g_hat = w.sigma_f * g_raw;
    const Eigen::MatrixXd a_hat = w.sigma_c.asDiagonal() * a_raw;
    const Eigen::VectorXd c_hat = w.sigma_c.cwiseProduct(c_raw);

    // Damped BFGS update with the pair gathered from the previous step. The
    // multiplier-dependent term uses the current y so both gradients see the
    // same Lagrangian.
    if (have_pair) {
      Eigen::VectorXd yk = g_hat - g_prev;
      if (m > 0) yk += (a_hat - a_prev).transpose() * w.y;
      const double ss = pair_s.squaredNorm();
      if (ss > 1e-28) {
        if (!bfgs_scaled) {
          const double sy = pair_s.dot(yk);
          if (sy > 1e-12 * std::sqrt(ss) * yk.norm()) {
            const double scale = std::min(1e6, std::max(1e-4, yk.squaredNorm() / sy));
            bfgs = scale * Eigen::MatrixXd::Identity(n, n);
          }
          bfgs_scaled = true;
        }
        const Eigen::VectorXd bs = bfgs * pair_s;
        const double sbs = pair_s.dot(bs);
        double sy = pair_s.dot(yk);
        if (sy < 0.2 * sbs) {
          const double theta = 0.8 * sbs / (sbs - sy);
          yk = theta * yk + (1.0 - theta) * bs;
          sy = pair_s.dot(yk);
        }
        if (sy > 1e-14 * sbs) {
          bfgs -= (bs * bs.transpose()) / sbs;
          bfgs += (yk * yk.transpose()) / sy;
        }
      }
      have_pair = false;
    }

    // Convergence is judged on the original problem with unscaled multipliers.
    Multipliers ext;
    ext.constraint = (m > 0) ? Eigen::VectorXd(w.sigma_c.cwiseProduct(w.y) / w.sigma_f)
                             : Eigen::VectorXd(0);
    ext.bound_lower = w.zl / w.sigma_f;
    ext.bound_upper = w.zu / w.sigma_f;
    const KKTResiduals ext_res = residuals_impl(g_raw, a_raw, c_raw, spec, w.x, ext);

    if (ext_res.overall() < best_overall) {
      best_overall = ext_res.overall();
      best_x = w.x;
      best_f = f_raw;
      best_res = ext_res;
      best_mult = ext;
    }

    if (options.log) {
      std::ostream& os = *options.log;
      const auto flags = os.flags();
      os << std::setw(5) << iter << std::scientific << std::setprecision(8) << std::setw(17)
         << f_raw << std::setprecision(2) << std::setw(13) << ext_res.feasibility
         << std::setw(13) << ext_res.stationarity << std::setw(13) << ext_res.complementarity
         << std::setw(11) << mu << std::setw(11) << alpha_taken << '\n';
      os.flags(flags);
    }

    if (ext_res.overall() <= options.tolerance) {
      if (mu <= options.tolerance) {
        result.status = SolveStatus::kConverged;
        result.z = w.x;
        result.objective = f_raw;
        result.residuals = ext_res;
        result.multipliers = ext;
        done = true;
        break;
      }
      mu = mu_floor;  // residuals already pass; finish the barrier schedule
      filter.clear();
    }

    if (stall >= kStallLimit && ext_res.feasibility > 1e-4) {
      result.status = SolveStatus::kInfeasibleDetected;
      failure_message = "feasibility stagnated while constraints remain violated";
      break;
    }

    if (iter == options.max_iterations) break;

    // Barrier subproblem error (scaled problem, slacks included) drives the
    // monotone mu schedule.
    Eigen::VectorXd dxl(n), dxu(n), dsl(m), dsu(m);
    for (int i = 0; i < n; ++i) {
      dxl(i) = std::isfinite(w.lb(i)) ? w.x(i) - w.lb(i) : kInf;
      dxu(i) = std::isfinite(w.ub(i)) ? w.ub(i) - w.x(i) : kInf;
    }
    for (int j = 0; j < m; ++j) {
      dsl(j) = std::isfinite(w.sl(j)) ? w.s(j) - w.sl(j) : kInf;
      dsu(j) = std::isfinite(w.su(j)) ? w.su(j) - w.s(j) : kInf;
    }

    {
      const double mult_sum = w.y.lpNorm<1>() + w.zl.lpNorm<1>() + w.zu.lpNorm<1>() +
                              w.wl.lpNorm<1>() + w.wu.lpNorm<1>();
      const double sd = std::max(kResidualScaleMax, mult_sum / std::max(1, 3 * m + 2 * n)) /
                        kResidualScaleMax;
      Eigen::VectorXd stat_x = g_hat - w.zl + w.zu;
      if (m > 0) stat_x += a_hat.transpose() * w.y;
      double e_mu = stat_x.lpNorm<Eigen::Infinity>() / sd;
      if (m > 0) {
        e_mu = std::max(e_mu, (-w.y - w.wl + w.wu).lpNorm<Eigen::Infinity>() / sd);
        e_mu = std::max(e_mu, (c_hat - w.s).lpNorm<Eigen::Infinity>());
      }
      double comp = 0.0;
      for (int i = 0; i < n; ++i) {
        if (std::isfinite(w.lb(i))) comp = std::max(comp, std::abs(w.zl(i) * dxl(i) - mu));
        if (std::isfinite(w.ub(i))) comp = std::max(comp, std::abs(w.zu(i) * dxu(i) - mu));
      }
      for (int j = 0; j < m; ++j) {
        if (std::isfinite(w.sl(j))) comp = std::max(comp, std::abs(w.wl(j) * dsl(j) - mu));
        if (std::isfinite(w.su(j))) comp = std::max(comp, std::abs(w.wu(j) * dsu(j) - mu));
      }
      e_mu = std::max(e_mu, comp / sd);
      if (e_mu <= 10.0 * mu && mu > mu_floor) {
        mu = std::max(mu_floor,
                      std::min(options.barrier_reduction * mu, std::pow(mu, 1.5)));
        filter.clear();
      }
    }

    // Primal-dual condensed system in (dx, dy).
    Eigen::VectorXd sigma_x = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
      if (std::isfinite(w.lb(i))) sigma_x(i) += w.zl(i) / dxl(i);
      if (std::isfinite(w.ub(i))) sigma_x(i) += w.zu(i) / dxu(i);
    }
    Eigen::VectorXd sigma_s = Eigen::VectorXd::Zero(m);
    for (int j = 0; j < m; ++j) {
      if (std::isfinite(w.sl(j))) sigma_s(j) += w.wl(j) / dsl(j);
      if (std::isfinite(w.su(j))) sigma_s(j) += w.wu(j) / dsu(j);
    }

    Eigen::VectorXd grad_phi_x = g_hat;  // gradient of barrier objective in x
    for (int i = 0; i < n; ++i) {
      if (std::isfinite(w.lb(i))) grad_phi_x(i) -= mu / dxl(i);
      if (std::isfinite(w.ub(i))) grad_phi_x(i) += mu / dxu(i);
    }
    Eigen::VectorXd grad_phi_s = Eigen::VectorXd::Zero(m);
    for (int j = 0; j < m; ++j) {
      if (std::isfinite(w.sl(j))) grad_phi_s(j) -= mu / dsl(j);
      if (std::isfinite(w.su(j))) grad_phi_s(j) += mu / dsu(j);
    }

    const int dim = n + m;
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(dim, dim);
    kkt.topLeftCorner(n, n) = bfgs;
    kkt.topLeftCorner(n, n).diagonal() += sigma_x;
    if (m > 0) {
      kkt.topRightCorner(n, m) = a_hat.transpose();
      kkt.bottomLeftCorner(m, n) = a_hat;
      kkt.bottomRightCorner(m, m).diagonal() = -sigma_s.cwiseInverse();
    }

    Eigen::VectorXd rhs(dim);
    rhs.head(n) = -grad_phi_x;
    if (m > 0) rhs.head(n) -= a_hat.transpose() * w.y;
    // w_j collects the s-row stationarity pieces folded into the dy block
    const Eigen::VectorXd fold = w.y - grad_phi_s;
    if (m > 0) rhs.tail(m) = -(c_hat - w.s) + sigma_s.cwiseInverse().cwiseProduct(fold);

    Eigen::VectorXd step(dim);
    if (!sym.factorize(kkt) || !sym.solve(rhs, step)) {
      if (!reset_used) {
        bfgs = Eigen::MatrixXd::Identity(n, n);
        bfgs_scaled = true;
        reset_used = true;
        alpha_taken = 0.0;
        continue;
      }
      result.status = SolveStatus::kLineSearchFailure;
      failure_message = "KKT factorization failed";
      break;
    }

    const Eigen::VectorXd dx = step.head(n);
    const Eigen::VectorXd dy = step.tail(m);
    const Eigen::VectorXd ds =
        (m > 0) ? Eigen::VectorXd(sigma_s.cwiseInverse().cwiseProduct(dy + fold))
                : Eigen::VectorXd(0);

    const double alpha_primal_max =
        std::min(fraction_to_boundary(w.x, dx, w.lb, w.ub, tau),
                 fraction_to_boundary(w.s, ds, w.sl, w.su, tau));

    // Filter line search on phi = scaled objective + barrier against theta =
    // the l1 norm of the slacked constraint residual.
    const double theta_cur = (m > 0) ? (c_hat - w.s).lpNorm<1>() : 0.0;
    const double f_hat = w.sigma_f * f_raw;
    const double phi0 = f_hat + barrier_value_at(w, w.x, w.s, mu);
    const double dphi0 = grad_phi_x.dot(dx) + ((m > 0) ? grad_phi_s.dot(ds) : 0.0);

    const auto filter_blocks = [&](double theta_t, double phi_t) {
      if (theta_t >= theta_max) return true;
      for (const auto& entry : filter)
        if (theta_t >= entry.first && phi_t >= entry.second) return true;
      return false;
    };

    struct Probe {
      bool ok = false;
      double f = 0.0, theta = 0.0, phi = 0.0;
      Eigen::VectorXd c;  // scaled constraint values
    };
    const auto probe = [&](const Eigen::VectorXd& x_t, const Eigen::VectorXd& s_t) {
      Probe p;
      try {
        p.f = eval_scalar(*spec.objective, x_t);
        if (!std::isfinite(p.f)) return p;
        if (m > 0) {
          p.c = w.sigma_c.cwiseProduct(eval_vector(*spec.constraints, x_t));
          if (!p.c.allFinite()) return p;
          p.theta = (p.c - s_t).lpNorm<1>();
        }
        p.phi = w.sigma_f * p.f + barrier_value_at(w, x_t, s_t, mu);
        p.ok = std::isfinite(p.phi);
      } catch (const std::exception&) {
        p.ok = false;
      }
      return p;
    };
    // Acceptance for one trial: the switching condition routes nearly feasible
    // iterates with strong descent through an Armijo test (no filter growth),
    // everything else through the filter envelope.
    const auto acceptable = [&](const Probe& p, double alpha, bool& augment) {
      if (!p.ok || filter_blocks(p.theta, p.phi)) return false;
      const bool switching =
          theta_cur <= theta_min && dphi0 < 0.0 &&
          alpha * std::pow(-dphi0, kSwitchPhi) > kSwitchDelta * std::pow(theta_cur, kSwitchTheta);
      if (switching) {
        augment = false;
        return p.phi <= phi0 + options.armijo_constant * alpha * dphi0;
      }
      augment = true;
      return p.theta <= (1.0 - kGammaTheta) * theta_cur ||
             p.phi <= phi0 - kGammaPhi * theta_cur;
    };

    bool accepted = false;
    bool augment = false;
    double alpha = alpha_primal_max;
    Eigen::VectorXd dx_used = dx, ds_used = ds, dy_used = dy;
    Eigen::VectorXd x_trial, s_trial;
    double theta_accept = 0.0;
    bool soc_tried = false;

    while (alpha > 1e-11) {
      x_trial = w.x + alpha * dx_used;
      s_trial = w.s + alpha * ds_used;
      Probe p = probe(x_trial, s_trial);
      if (acceptable(p, alpha, augment)) {
        accepted = true;
        theta_accept = p.theta;
        break;
      }

      // Second-order corrections: directly after the first full-step
      // rejection with grown infeasibility, re-solve against the constraint
      // residual observed at the trial point. Cures the short-step crawl on
      // curved equality manifolds.
      if (!soc_tried && p.ok && m > 0 && alpha == alpha_primal_max && p.theta >= theta_cur) {
        soc_tried = true;
        Eigen::VectorXd r_soc = p.c - s_trial;
        double theta_soc_prev = p.theta;
        for (int round = 0; round < kSocRounds; ++round) {
          Eigen::VectorXd rhs_soc(dim);
          rhs_soc.head(n) = rhs.head(n);
          rhs_soc.tail(m) = -r_soc + sigma_s.cwiseInverse().cwiseProduct(fold);
          Eigen::VectorXd step_soc(dim);
          if (!sym.solve(rhs_soc, step_soc)) break;
          const Eigen::VectorXd dx_soc = step_soc.head(n);
          const Eigen::VectorXd dy_soc = step_soc.tail(m);
          const Eigen::VectorXd ds_soc =
              sigma_s.cwiseInverse().cwiseProduct(dy_soc + fold);
          const double alpha_soc =
              std::min(fraction_to_boundary(w.x, dx_soc, w.lb, w.ub, tau),
                       fraction_to_boundary(w.s, ds_soc, w.sl, w.su, tau));
          const Eigen::VectorXd x_soc = w.x + alpha_soc * dx_soc;
          const Eigen::VectorXd s_soc = w.s + alpha_soc * ds_soc;
          const Probe ps = probe(x_soc, s_soc);
          if (!ps.ok) break;
          if (acceptable(ps, alpha_soc, augment)) {
            accepted = true;
            dx_used = dx_soc;
            ds_used = ds_soc;
            dy_used = dy_soc;
            alpha = alpha_soc;
            x_trial = x_soc;
            s_trial = s_soc;
            theta_accept = ps.theta;
            break;
          }
          if (ps.theta > kSocDecay * theta_soc_prev) break;
          theta_soc_prev = ps.theta;
          r_soc = ps.c - s_soc;
        }
        if (accepted) break;
      }
      alpha *= 0.5;
    }

    if (!accepted) {
      if (!reset_used) {
        bfgs = Eigen::MatrixXd::Identity(n, n);
        bfgs_scaled = true;
        reset_used = true;
        alpha_taken = 0.0;
        continue;
      }
      if (ext_res.feasibility > 1e-4) {
        result.status = SolveStatus::kInfeasibleDetected;
        failure_message = "line search exhausted while constraints remain violated";
      } else {
        result.status = SolveStatus::kLineSearchFailure;
        failure_message = "filter line search could not make progress";
      }
      break;
    }
    reset_used = false;

    if (augment) {
      filter.emplace_back(std::max(0.0, (1.0 - kGammaTheta) * theta_cur),
                          phi0 - kGammaPhi * theta_cur);
    }
    if (theta_accept < 0.99 * stall_best) {
      stall_best = theta_accept;
      stall = 0;
    } else {
      ++stall;
    }

    // Dual directions follow from the primal step that was actually taken.
    Eigen::VectorXd dzl(n), dzu(n);
    for (int i = 0; i < n; ++i) {
      dzl(i) =
          std::isfinite(w.lb(i)) ? mu / dxl(i) - w.zl(i) - w.zl(i) / dxl(i) * dx_used(i) : 0.0;
      dzu(i) =
          std::isfinite(w.ub(i)) ? mu / dxu(i) - w.zu(i) + w.zu(i) / dxu(i) * dx_used(i) : 0.0;
    }
    Eigen::VectorXd dwl(m), dwu(m);
    for (int j = 0; j < m; ++j) {
      dwl(j) =
          std::isfinite(w.sl(j)) ? mu / dsl(j) - w.wl(j) - w.wl(j) / dsl(j) * ds_used(j) : 0.0;
      dwu(j) =
          std::isfinite(w.su(j)) ? mu / dsu(j) - w.wu(j) + w.wu(j) / dsu(j) * ds_used(j) : 0.0;
    }
    const double alpha_dual = std::min({positivity_step(w.zl, dzl, tau),
                                        positivity_step(w.zu, dzu, tau),
                                        positivity_step(w.wl, dwl, tau),
                                        positivity_step(w.wu, dwu, tau)});

    pair_s = alpha * dx_used;
    g_prev = g_hat;
    a_prev = a_hat;
    have_pair = true;

    w.x = x_trial;
    w.s = s_trial;
    w.y += alpha * dy_used;
    w.zl += alpha_dual * dzl;
    w.zu += alpha_dual * dzu;
    w.wl += alpha_dual * dwl;
    w.wu += alpha_dual * dwu;
    for (int i = 0; i < n; ++i) {
      dxl(i) = std::isfinite(w.lb(i)) ? w.x(i) - w.lb(i) : kInf;
      dxu(i) = std::isfinite(w.ub(i)) ? w.ub(i) - w.x(i) : kInf;
    }
    for (int j = 0; j < m; ++j) {
      dsl(j) = std::isfinite(w.sl(j)) ? w.s(j) - w.sl(j) : kInf;
      dsu(j) = std::isfinite(w.su(j)) ? w.su(j) - w.s(j) : kInf;
    }
    clip_duals(w.zl, dxl, mu);
    clip_duals(w.zu, dxu, mu);
    clip_duals(w.wl, dsl, mu);
    clip_duals(w.wu, dsu, mu);
    alpha_taken = alpha;
  }

  if (!done) {
    // Return the best iterate seen so the caller still gets a usable point.
    if (result.status == SolveStatus::kMaxIterations && failure_message.empty())
      failure_message = "iteration limit reached";
    result.z = best_x;
    result.objective = best_f;
    result.residuals = best_res;
    result.multipliers = best_mult;
  }
  result.iterations = std::min(iter, options.max_iterations);
  result.message = done ? "converged" : failure_message;
  result.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return result;
}

}  // namespace spectraj
