#pragma once

// Umbrella header: discounted walk-based responsibility allocation on
// weighted digraphs, with certified truncation, an exact resolvent solve,
// property checkers, and file formats.

#include "axioms.hpp"    // IWYU pragma: export
#include "errors.hpp"    // IWYU pragma: export
#include "graph.hpp"     // IWYU pragma: export
#include "io.hpp"        // IWYU pragma: export
#include "numeric.hpp"   // IWYU pragma: export
#include "solver.hpp"    // IWYU pragma: export
