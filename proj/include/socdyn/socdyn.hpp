#pragma once

#include "socdyn/errors.hpp"
#include "socdyn/core.hpp"
#include "socdyn/assessment_space.hpp"
#include "socdyn/forces.hpp"
#include "socdyn/dynamics.hpp"
#include "socdyn/analytic.hpp"
#include "socdyn/scenarios.hpp"
#include "socdyn/config.hpp"
