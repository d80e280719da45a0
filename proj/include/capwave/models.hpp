#ifndef CAPWAVE_MODELS_HPP
#define CAPWAVE_MODELS_HPP

#include "capwave/flow1d.hpp"

namespace capwave::models {

// Irrotational, swirl-free: gamma = F = 0.
flow1d::VorticityModel zero();

// gamma(x) = slope * x, F = 0.
flow1d::VorticityModel linear_gamma(double slope);

// gamma = 0, F(x) = omega * x (so FF' = omega^2 x).
flow1d::VorticityModel linear_swirl(double omega);

flow1d::VorticityModel linear_both(double slope, double omega);

}  // namespace capwave::models

#endif  // CAPWAVE_MODELS_HPP
