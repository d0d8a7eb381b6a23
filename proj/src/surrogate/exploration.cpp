#include "gosh/surrogate/exploration.hpp"

#include <stdexcept>

namespace gosh::surrogate {

ExplorationState update_exploration(ExplorationState state, double xi_t) {
  if (xi_t < 0)
    throw std::invalid_argument("update_exploration: xi must be >= 0");
  state.xi_ma = state.psi * state.xi_ma + (1.0 - state.psi) * xi_t;
  const double up = (1.0 + state.delta) * state.xi_ma;
  const double down = state.literal_decrease_rule
                          ? (1.0 + state.delta) * state.xi_ma
                          : (1.0 - state.delta) * state.xi_ma;
  if (xi_t > up)
    state.k *= 1.0 + state.delta;
  else if (xi_t < down)
    state.k *= 1.0 - state.delta;
  return state;
}

}  // namespace gosh::surrogate
