// Two horospheres in the Poincare disk: closed-form solution, finite element
// convergence and the contact angle recovered from the flux on Sigma.
//
//   sample_horolens [b]

#include <cstdio>
#include <cstdlib>
#include <numbers>

#include "spaceform/spaceform.hpp"

using namespace spaceform;

int main(int argc, char** argv) {
  const double b = argc > 1 ? std::atof(argv[1]) : 0.25;
  const HoroLens h(b);
  const double deg = 180.0 / std::numbers::pi;
  std::printf("b = %g  c~ = %.6f  theta = %.4f deg\n", b, h.c_tilde(), h.theta() * deg);

  const ConvergenceStudy s = convergence_study(h.domain(), BvpParams{1.0, h.c_tilde()}, 5,
                                               [&](const Vec& x) { return h.u_expr(std::span<const double>(x)); });
  std::printf("%6s %10s %12s %10s %10s\n", "level", "h", "L2 error", "c_mean", "angle");
  for (const auto& row : s.table.rows())
    std::printf("%6.0f %10.4f %12.4e %10.6f %10.4f\n", row[0], row[1], row[2], row[3], row[5]);

  const RigidityReport& r = s.finest;
  std::printf("%s: curvature %.5f (exact 1), predicted angle %.4f, measured %.4f\n", r.status.c_str(),
              r.inferred_curvature, r.predicted_angle * deg, r.measured_angle * deg);
  return 0;
}
