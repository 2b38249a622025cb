#pragma once

#include "supertail/convex_fn.hpp"
#include "supertail/copulas.hpp"
#include "supertail/data_io.hpp"
#include "supertail/distributions.hpp"
#include "supertail/dominance.hpp"
#include "supertail/equilibrium.hpp"
#include "supertail/extended_real.hpp"
#include "supertail/hill.hpp"
#include "supertail/portfolio.hpp"
#include "supertail/quadrature.hpp"
#include "supertail/risk_measures.hpp"
#include "supertail/rng.hpp"
#include "supertail/stats.hpp"
