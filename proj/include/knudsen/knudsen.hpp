#pragma once

#include "knudsen/constants.hpp"
#include "knudsen/errors.hpp"
#include "knudsen/specfun.hpp"
#include "knudsen/kernel.hpp"
#include "knudsen/quadrature.hpp"
#include "knudsen/dispersion.hpp"
#include "knudsen/factorization.hpp"
#include "knudsen/jumps.hpp"
#include "knudsen/profiles.hpp"
#include "knudsen/oracle.hpp"
#include "knudsen/scales.hpp"
