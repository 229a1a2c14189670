#pragma once

#include <functional>
#include <vector>

namespace oucap {

/// Root of f on [lo, hi] where f(lo) and f(hi) differ in sign (or one is
/// zero). Uses TOMS 748 and falls back to plain bisection if that fails to
/// terminate. Stops once the bracket is a few ulps wide. Throws
/// RootNotBracketed when f(lo) and f(hi) share a strict sign.
double bracketed_root(const std::function<double(double)>& f, double lo, double hi);

/// Discriminant-based classification of a real cubic.
enum class CubicCase {
  OneReal,        // one real root, two complex conjugates
  ThreeDistinct,  // three distinct real roots
  DoubleRoot,     // a repeated root (triple roots are reported here too)
};

struct CubicRoots {
  CubicCase kind = CubicCase::OneReal;
  double discriminant = 0.0;
  /// Real roots in ascending order, repeated roots listed with multiplicity.
  std::vector<double> real;
};

/// Real roots of a y^3 + b y^2 + c y + d (a != 0). A discriminant with
/// |disc| <= disc_tol is treated as a repeated root.
CubicRoots solve_real_cubic(double a, double b, double c, double d, double disc_tol = 1e-9);

}  // namespace oucap
