#pragma once

#include "agency/core_model.hpp"
#include "agency/mechanisms.hpp"
#include "agency/solution.hpp"
#include "agency/wup.hpp"
#include "agency/lp.hpp"
#include "agency/discretization.hpp"
#include "agency/arbitrary_solver.hpp"
#include "agency/ll_solver.hpp"
