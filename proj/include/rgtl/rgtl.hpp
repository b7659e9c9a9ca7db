#pragma once

#include "rgtl/tensor.hpp"
#include "rgtl/instance.hpp"
#include "rgtl/lp_model.hpp"
#include "rgtl/simplex.hpp"
#include "rgtl/branch_and_bound.hpp"
#include "rgtl/plan.hpp"
#include "rgtl/formulation.hpp"
#include "rgtl/lagrangian.hpp"
#include "rgtl/oracle.hpp"
#include "rgtl/bench.hpp"
