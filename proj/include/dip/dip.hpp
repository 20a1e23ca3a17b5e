#pragma once

// Pricing of contingent claims for traders who see prices one step late:
// scenario-tree markets, the hedging LPs, their duals, the full-information
// and intermediate bounds, and an exact two-phase simplex underneath.

#include "dip/scalar.hpp"
#include "dip/market.hpp"
#include "dip/delayed_view.hpp"
#include "dip/lp.hpp"
#include "dip/simplex.hpp"
#include "dip/certificates.hpp"
#include "dip/basis_oracle.hpp"
#include "dip/primal_programs.hpp"
#include "dip/dual_programs.hpp"
#include "dip/bounds.hpp"
#include "dip/random_market.hpp"
#include "dip/report.hpp"
