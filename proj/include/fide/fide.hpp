#pragma once

// Umbrella header: the whole library except the CLI front end.

#include "fide/analysis.hpp"
#include "fide/expression.hpp"
#include "fide/green.hpp"
#include "fide/grid.hpp"
#include "fide/problem.hpp"
#include "fide/report_io.hpp"
#include "fide/solver.hpp"
