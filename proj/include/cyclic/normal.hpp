#pragma once

namespace cyclic {

/// Standard normal CDF, via erfc.
double normal_cdf(double z) noexcept;

/// Standard normal quantile for p in (0, 1); throws DomainError otherwise.
///
/// Acklam's rational approximation (relative error ~1e-9) followed by one
/// Halley step against normal_cdf, which brings |Phi(z) - p| to ~1e-15.
double inv_norm_cdf(double p);

/// log of the Normal(mean, variance) density at x.
double normal_log_pdf(double x, double mean, double variance) noexcept;

}  // namespace cyclic
