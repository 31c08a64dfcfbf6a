// Prints the Euler/Heun comparison on dx/dt = 2*sqrt(x) and the fitted
// convergence orders.
#include <cstdio>

#include "heunflow/ode.hpp"

using namespace heunflow::ode;

int main() {
  OdeProblem p = sqrt_growth_problem(9.0);

  std::printf("dx/dt = 2*sqrt(x), x(0) = 1, exact x(t) = (t+1)^2\n\n");
  std::printf("%8s %12s %12s %12s\n", "h", "euler(9)", "heun(9)", "exact");
  for (double h : {0.9, 0.6, 0.3}) {
    Trajectory e = integrate(p, {Method::Euler, h});
    Trajectory hn = integrate(p, {Method::Heun, h});
    std::printf("%8.2f %12.4f %12.4f %12.4f\n", h, e.states.back()[0], hn.states.back()[0],
                p.analytic(9.0)[0]);
  }

  OdeProblem p4 = sqrt_growth_problem(4.0);
  const std::vector<double> hs{0.1, 0.05, 0.025, 0.0125};
  std::printf("\nfitted order: euler %.3f, heun %.3f\n",
              empirical_order(p4, Method::Euler, hs), empirical_order(p4, Method::Heun, hs));
  return 0;
}
