#pragma once

#include "idp/errors.hpp"
#include "idp/geometry.hpp"
#include "idp/floorplan.hpp"
#include "idp/generators.hpp"
#include "idp/graph.hpp"
#include "idp/psp.hpp"
#include "idp/hull.hpp"
#include "idp/gp.hpp"
#include "idp/pareto.hpp"
#include "idp/smoothed.hpp"
#include "idp/experiments.hpp"
