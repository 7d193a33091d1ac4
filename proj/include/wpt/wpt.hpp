#pragma once

#include "wpt/core/operator.hpp"
#include "wpt/core/sampling.hpp"
#include "wpt/core/sym_matrix.hpp"
#include "wpt/core/weights.hpp"
#include "wpt/radial/radial.hpp"
#include "wpt/scheme/convergence.hpp"
#include "wpt/scheme/discrete_operator.hpp"
#include "wpt/scheme/domain.hpp"
#include "wpt/scheme/expression.hpp"
#include "wpt/scheme/grid.hpp"
#include "wpt/scheme/solver.hpp"
#include "wpt/scheme/stencil.hpp"
#include "wpt/verify/estimates.hpp"
#include "wpt/verify/report.hpp"
#include "wpt/verify/suites.hpp"
