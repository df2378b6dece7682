#pragma once

#include "pimac/core_model.hpp"
#include "pimac/optimize.hpp"
#include "pimac/achievable_schemes.hpp"
#include "pimac/upper_bounds.hpp"
#include "pimac/experiments.hpp"
