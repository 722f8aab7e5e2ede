#pragma once

namespace fblock {

/// Standard normal CDF.
double phi(double x);

/// Standard normal quantile for p in (0, 1).
///
/// Acklam's rational approximation (relative error below 1.2e-9) followed
/// by one Halley refinement step against the erfc-based CDF, which brings
/// |phi(phi_inv(p)) - p| to within a few ulps. Throws std::domain_error
/// outside (0, 1).
double phi_inv(double p);

}  // namespace fblock
