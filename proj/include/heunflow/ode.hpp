// Fixed-step ODE integrators: Euler, Heun, and the alpha-weighted Heun
// corrector, plus an empirical order-of-accuracy estimator.
//
// The weighted corrector combines the two slopes as (1-alpha)*f(x) +
// alpha*f(x~) before the state update, so alpha=0 reproduces the Euler step
// and alpha=1/2 the Heun step bit for bit.
#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "heunflow/errors.hpp"

namespace heunflow::ode {

using State = std::vector<double>;
using Rhs = std::function<State(double t, const State& x)>;

struct OdeProblem {
  Rhs f;
  State x0;
  double t0 = 0.0;
  double t_end = 1.0;
  std::function<State(double t)> analytic;  // optional exact solution
};

enum class Method { Euler, Heun, WeightedHeun };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::Euler: return "euler";
    case Method::Heun: return "heun";
    case Method::WeightedHeun: return "weighted_heun";
  }
  return "?";
}

struct SolverSpec {
  Method method = Method::Heun;
  double h = 0.1;
  double alpha = 0.5;  // WeightedHeun only
};

struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
};

namespace detail {

inline void check_h(double h) {
  if (!(h > 0.0)) throw Error("step size must be positive, got " + std::to_string(h));
}

inline void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw AlphaOutOfRange("alpha must lie in [0, 1], got " + std::to_string(alpha));
}

inline void check_finite(const State& x, const char* where) {
  for (double v : x)
    if (!std::isfinite(v)) throw NonFiniteState(std::string("non-finite state in ") + where);
}

}  // namespace detail

inline State euler_step(const Rhs& f, double t, const State& x, double h) {
  detail::check_h(h);
  State slope = f(t, x);
  State out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + h * slope[i];
  detail::check_finite(out, "euler_step");
  return out;
}

inline State heun_step(const Rhs& f, double t, const State& x, double h) {
  detail::check_h(h);
  State s0 = f(t, x);
  State pred(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) pred[i] = x[i] + h * s0[i];
  State s1 = f(t + h, pred);
  State out(x.size());
  const double hh = h / 2.0;
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + hh * (s0[i] + s1[i]);
  detail::check_finite(out, "heun_step");
  return out;
}

inline State weighted_heun_step(const Rhs& f, double t, const State& x, double h, double alpha) {
  detail::check_h(h);
  detail::check_alpha(alpha);
  State s0 = f(t, x);
  State pred(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) pred[i] = x[i] + h * s0[i];
  State s1 = f(t + h, pred);
  State out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    out[i] = x[i] + h * ((1.0 - alpha) * s0[i] + alpha * s1[i]);
  detail::check_finite(out, "weighted_heun_step");
  return out;
}

inline State step(const SolverSpec& spec, const Rhs& f, double t, const State& x, double h) {
  switch (spec.method) {
    case Method::Euler: return euler_step(f, t, x, h);
    case Method::Heun: return heun_step(f, t, x, h);
    case Method::WeightedHeun: return weighted_heun_step(f, t, x, h, spec.alpha);
  }
  throw Error("unknown method");
}

// Steps from t0 to t_end; the final step is shortened to land on t_end.
inline Trajectory integrate(const OdeProblem& problem, const SolverSpec& spec) {
  detail::check_h(spec.h);
  if (!(problem.t_end > problem.t0)) throw Error("t_end must exceed t0");
  Trajectory traj;
  traj.times.push_back(problem.t0);
  traj.states.push_back(problem.x0);
  double t = problem.t0;
  State x = problem.x0;
  std::size_t k = 0;
  // Nudge so an exact multiple of h does not leave a vanishing last step.
  const double tiny = 1e-12 * (problem.t_end - problem.t0);
  while (t < problem.t_end - tiny) {
    const double h = std::min(spec.h, problem.t_end - t);
    try {
      x = step(spec, problem.f, t, x, h);
    } catch (const NonFiniteState&) {
      throw NonFiniteState("non-finite state at step " + std::to_string(k) + " (t=" +
                           std::to_string(t) + ")");
    }
    t = (t + h >= problem.t_end - tiny) ? problem.t_end : t + h;
    traj.times.push_back(t);
    traj.states.push_back(x);
    ++k;
  }
  return traj;
}

inline double endpoint_error(const OdeProblem& problem, const SolverSpec& spec) {
  if (!problem.analytic) throw AnalyticRequired("endpoint_error needs an analytic solution");
  Trajectory traj = integrate(problem, spec);
  const State exact = problem.analytic(problem.t_end);
  const State& got = traj.states.back();
  double s = 0.0;
  for (std::size_t i = 0; i < exact.size(); ++i) {
    const double d = got[i] - exact[i];
    s += d * d;
  }
  return std::sqrt(s);
}

// Least-squares slope of log(endpoint error) against log(h).
inline double empirical_order(const OdeProblem& problem, Method method,
                              const std::vector<double>& h_list, double alpha = 0.5) {
  if (!problem.analytic) throw AnalyticRequired("empirical_order needs an analytic solution");
  if (h_list.size() < 2) throw Error("empirical_order needs at least two step sizes");
  std::vector<double> lx, ly;
  for (double h : h_list) {
    SolverSpec spec{method, h, alpha};
    const double err = endpoint_error(problem, spec);
    lx.push_back(std::log(h));
    ly.push_back(std::log(err));
  }
  const double n = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// The square-root growth benchmark: dx/dt = 2*sqrt(x), x(t) = (t+1)^2 from
// x(0) = 1. The state is clamped at zero before the root so a float
// undershoot cannot produce a NaN.
inline OdeProblem sqrt_growth_problem(double t_end) {
  OdeProblem p;
  p.f = [](double, const State& x) { return State{2.0 * std::sqrt(std::max(x[0], 0.0))}; };
  p.x0 = {1.0};
  p.t0 = 0.0;
  p.t_end = t_end;
  p.analytic = [](double t) { return State{(t + 1.0) * (t + 1.0)}; };
  return p;
}

}  // namespace heunflow::ode
