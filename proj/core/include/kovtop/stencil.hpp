#pragma once

// Five-point central differences on a uniform grid. Every residual check in
// the library differentiates sampled quantities through these two formulas so
// that all checks share one truncation-error budget (O(h^4)).

namespace kovtop::stencil {

inline constexpr int kHalfWidth = 2;

template <class T>
T first_derivative(const T& fm2, const T& fm1, const T& fp1, const T& fp2,
                   double h) {
  return T((fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h));
}

template <class T>
T second_derivative(const T& fm2, const T& fm1, const T& f0, const T& fp1,
                    const T& fp2, double h) {
  return T((-1.0 * fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) /
           (12.0 * h * h));
}

}  // namespace kovtop::stencil
