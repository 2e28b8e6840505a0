#pragma once

#include <string>
#include <vector>

#include "kpa/graph.hpp"
#include "kpa/partition.hpp"
#include "oracles.hpp"

namespace kpa::testing {

oracle::Weights weight_matrix(const ArgumentGraph& g);

struct ReplayReport {
  std::size_t moves = 0;
  std::size_t soft = 0;
  std::size_t guarded = 0;
  /// Largest |logged cost - oracle cost| over all moves.
  double max_cost_error = 0.0;
  /// Largest |change of sum of wt - logged cost| over hard moves.
  double max_sum_error = 0.0;
  /// Empty when every check held; otherwise the first violation.
  std::string violation;
};

/// Re-applies the move log of `result` to `init` with the oracle's set
/// arithmetic. Checks positive cost, cost agreement, hard-move sum change,
/// the retention rule for soft and guarded moves, and that replaying lands on
/// result.subgraphs.
ReplayReport replay_moves(const ArgumentGraph& g, const Partition& init, const Partition& result, double h);

}  // namespace kpa::testing
