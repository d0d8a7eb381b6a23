#include "gosh/opt/discretize.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace gosh::opt {

sim::DecisionMatrix discretize(const std::vector<double>& phi_flat,
                               const std::vector<double>& task_ram,
                               const std::vector<char>& active,
                               const std::vector<double>& host_ram_free) {
  const int rows = static_cast<int>(task_ram.size());
  const int cols = static_cast<int>(host_ram_free.size());
  if (active.size() != task_ram.size())
    throw std::invalid_argument("discretize: active/task_ram size mismatch");
  if (static_cast<int>(phi_flat.size()) != rows * cols)
    throw std::invalid_argument("discretize: phi size mismatch");

  // rank all active-row entries by score descending, flat index ascending
  std::vector<int> order;
  order.reserve(phi_flat.size());
  for (int i = 0; i < rows * cols; ++i)
    if (active[i / cols]) order.push_back(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (phi_flat[a] != phi_flat[b]) return phi_flat[a] > phi_flat[b];
    return a < b;
  });

  sim::DecisionMatrix out = sim::DecisionMatrix::zeros(rows, cols);
  std::vector<double> free_ram = host_ram_free;
  std::vector<char> placed(rows, 0);
  for (int idx : order) {
    int r = idx / cols, c = idx % cols;
    if (placed[r]) continue;
    if (task_ram[r] <= free_ram[c]) {
      out.at(r, c) = 1.0;
      free_ram[c] -= task_ram[r];
      placed[r] = 1;
    }
  }
  return out;  // unplaced active rows stay all-zero (WAITING)
}

}  // namespace gosh::opt
