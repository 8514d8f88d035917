#pragma once

namespace elm {

/// Complementary error function: power series below 2, continued fraction above.
double erfc(double x);

/// exp(x^2) erfc(x), without forming exp(x^2) for large positive x.
double erfcx(double x);

}  // namespace elm
