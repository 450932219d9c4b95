#ifndef RVM_EXPONENTS_HPP
#define RVM_EXPONENTS_HPP

#include <cmath>

// Closed-form exponents of the entropy-conservation criterion.

namespace rvm {

/// alpha beta + beta + 3 alpha - 1; all entropies are conserved when positive.
constexpr double onsager_condition(double alpha, double beta) { return alpha * beta + beta + 3.0 * alpha - 1.0; }

/// Field regularity exponent 6 / (13 + sqrt 142) known for weak solutions.
inline double field_regularity_exponent() { return 6.0 / (13.0 + std::sqrt(142.0)); }

/// Smallest alpha satisfying the condition for a given beta: (1 - beta) / (3 + beta).
constexpr double critical_alpha(double beta) { return (1.0 - beta) / (3.0 + beta); }

/// Exponent of the balanced-path residual in the regime 2 alpha + beta < 1.
constexpr double defect_exponent(double alpha, double beta) { return 0.5 * onsager_condition(alpha, beta); }

} // namespace rvm

#endif
