#pragma once

namespace semicomp {

// Standard normal density, CDF and inverse CDF.
//
// norm_ppf is Wichura's AS 241 (PPND16), accurate to ~1e-16 relative over
// (0,1) including extreme tails; it is the single source of Gaussian draws
// (inversion sampling) so that simulation streams stay reproducible.

double norm_pdf(double x);
double norm_cdf(double x);
double norm_ppf(double p);

} // namespace semicomp
