#pragma once

#include "mobo/acquisition.hpp"
#include "mobo/benchmarks.hpp"
#include "mobo/cmaes.hpp"
#include "mobo/constraints.hpp"
#include "mobo/driver.hpp"
#include "mobo/gp.hpp"
#include "mobo/metrics.hpp"
#include "mobo/pareto.hpp"
#include "mobo/scalarize.hpp"
#include "mobo/types.hpp"
