#pragma once

#include "pinsync/analysis.hpp"
#include "pinsync/eig.hpp"
#include "pinsync/errors.hpp"
#include "pinsync/expm.hpp"
#include "pinsync/graph.hpp"
#include "pinsync/matrix.hpp"
#include "pinsync/random_scenario.hpp"
#include "pinsync/scenario.hpp"
#include "pinsync/simulate.hpp"
#include "pinsync/sweep.hpp"
