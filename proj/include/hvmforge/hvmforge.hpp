#pragma once

// Umbrella header: systems of random variables, the six hidden variable
// model forms with their equivalence transformations, and the exact
// LP-based noncontextuality decision.

#include "hvmforge/canonical.hpp"
#include "hvmforge/contextuality.hpp"
#include "hvmforge/dist.hpp"
#include "hvmforge/errors.hpp"
#include "hvmforge/hvm.hpp"
#include "hvmforge/io.hpp"
#include "hvmforge/lp.hpp"
#include "hvmforge/point.hpp"
#include "hvmforge/rational.hpp"
#include "hvmforge/system.hpp"
#include "hvmforge/transform.hpp"
