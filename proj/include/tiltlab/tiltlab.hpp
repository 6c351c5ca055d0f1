/**
 * @file tiltlab.hpp
 * @brief Umbrella header: exact arithmetic, quantum sl2 modules, tilting theory, minimal tilting
 *        complexes, tensor ideals, alcove combinatorics and the verification suites.
 */
#pragma once

#include "tiltlab/alcove.hpp"
#include "tiltlab/cmin.hpp"
#include "tiltlab/ideals.hpp"
#include "tiltlab/suites.hpp"
