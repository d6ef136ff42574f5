#pragma once

#include "ppc/costs.hpp"
#include "ppc/errors.hpp"
#include "ppc/graph.hpp"
#include "ppc/instances.hpp"
#include "ppc/objectives.hpp"
#include "ppc/rng.hpp"
#include "ppc/solvers.hpp"
#include "ppc/sweep.hpp"
#include "ppc/types.hpp"
#include "ppc/verify.hpp"
