#pragma once

#include "csxlab/order.hpp"
#include "csxlab/parallel.hpp"
#include "csxlab/quadrature.hpp"
#include "csxlab/geometry.hpp"
#include "csxlab/boundary_function.hpp"
#include "csxlab/weighted_grid.hpp"
#include "csxlab/barrier.hpp"
#include "csxlab/kernels.hpp"
#include "csxlab/solver.hpp"
#include "csxlab/rates.hpp"
#include "csxlab/projection.hpp"
#include "csxlab/estimators.hpp"
