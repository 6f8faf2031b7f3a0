#pragma once

#include <cstdint>
#include <vector>

#include "varlex/exponent.hpp"
#include "varlex/grid.hpp"

namespace varlex {

// Window family: axis-aligned intervals (1d) or squares (2d) whose corners
// are grid nodes. The single-cell window at each midpoint is always present.
struct MaximalConfig {
  double maxWindow = 0.0;  // physical cap on the window side; 0 means the whole box
  int threads = 1;
};

// Hardy-Littlewood maximal function: at each midpoint, the largest window
// average of |f| over windows containing that midpoint.
GridFunction hl_maximal(const GridFunction& f, const MaximalConfig& cfg = {});

// Fractional variant: window measure^(alpha/dim) times the window average.
// alpha = 0 reduces to hl_maximal exactly (same code path, unit scale).
GridFunction frac_maximal(const GridFunction& f, double alpha, const MaximalConfig& cfg = {});

struct RubioConfig {
  int terms = 20;           // truncation K of the Neumann-type series
  double normBound = 0.0;   // bound N for the damping; 0 means estimate it
  MaximalConfig maximal;
};

struct RubioResult {
  GridFunction rh;          // sum_{k=0..K} M^k|h| / (2N)^k
  double normBound = 0.0;   // the N actually used
  double tailBound = 0.0;   // sup|h| * sum_{k>K} (2N)^-k
  GridFunction lastIterate; // M^K|h|, kept for a-posteriori ratio bounds
  int terms = 0;
};

// Iterated-maximal smoothing of |h|; the output dominates |h| pointwise and
// has maximal ratio at most 2N up to the reported truncation tail.
RubioResult rubio_defrancia(const GridFunction& h, const ExponentField& dualExponent,
                            const RubioConfig& cfg = {});

// 2x the largest ratio ||Mf|| / ||f|| (Luxemburg norms for `dualExponent`)
// over a fixed seeded probe family on `box`.
double estimate_maximal_norm(const ExponentField& dualExponent, const DomainBox& box,
                             int probes = 12, std::uint64_t seed = 2026,
                             const MaximalConfig& cfg = {});

}  // namespace varlex
