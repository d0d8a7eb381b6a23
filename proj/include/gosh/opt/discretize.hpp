// Projection of a relaxed decision matrix onto a RAM-feasible one-hot
// assignment.

#pragma once

#include "gosh/sim/types.hpp"

namespace gosh::opt {

// Greedy argmax projection: entries of active rows are ranked descending
// (ties broken toward the lower flat index), each row is assigned to its
// best host with remaining RAM headroom, exhausted rows become WAITING, and
// inactive rows stay all-zero. `host_ram_free` is the headroom available for
// these placements (capacity minus reservations held by tasks outside
// `active`).
sim::DecisionMatrix discretize(const std::vector<double>& phi_flat,
                               const std::vector<double>& task_ram,
                               const std::vector<char>& active,
                               const std::vector<double>& host_ram_free);

}  // namespace gosh::opt
