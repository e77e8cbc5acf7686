#pragma once

#include "mgseir/baseline.hpp"
#include "mgseir/calibration.hpp"
#include "mgseir/commands.hpp"
#include "mgseir/de.hpp"
#include "mgseir/dynamics.hpp"
#include "mgseir/econ.hpp"
#include "mgseir/format.hpp"
#include "mgseir/hazard.hpp"
#include "mgseir/io.hpp"
#include "mgseir/model.hpp"
#include "mgseir/objective.hpp"
#include "mgseir/optimizer.hpp"
#include "mgseir/parallel.hpp"
#include "mgseir/policy.hpp"
#include "mgseir/rk4.hpp"
#include "mgseir/scenario.hpp"
#include "mgseir/svg.hpp"
