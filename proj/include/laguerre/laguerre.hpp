#pragma once

// Everything: special functions, heat kernels, critical function, operators,
// Hardy/BMO norms, bound fits, configs, reports and suites.

#include "laguerre/special_functions.hpp"
#include "laguerre/quadrature.hpp"
#include "laguerre/grid.hpp"
#include "laguerre/heat_kernel.hpp"
#include "laguerre/delta_kernel.hpp"
#include "laguerre/critical_function.hpp"
#include "laguerre/bound_fit.hpp"
#include "laguerre/kernel_families.hpp"
#include "laguerre/operators.hpp"
#include "laguerre/riesz.hpp"
#include "laguerre/hardy_bmo.hpp"
#include "laguerre/config.hpp"
#include "laguerre/report.hpp"
#include "laguerre/checks.hpp"
#include "laguerre/suite.hpp"
