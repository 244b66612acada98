#pragma once

// Umbrella header.

#include "zgap/errors.hpp"
#include "zgap/quadrature.hpp"
#include "zgap/amplifier.hpp"
#include "zgap/integrand.hpp"
#include "zgap/ratios.hpp"
#include "zgap/wirtinger.hpp"
#include "zgap/zeta.hpp"
#include "zgap/zeros.hpp"
#include "zgap/meansquare.hpp"
