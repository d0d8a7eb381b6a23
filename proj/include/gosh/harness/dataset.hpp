// Training-dataset generation (random scheduler) and JSONL serialization.

#pragma once

#include "gosh/harness/config.hpp"
#include "gosh/surrogate/bundle.hpp"

namespace gosh::harness {

struct Dataset {
  int num_hosts = 0;
  int num_slots = 0;
  bool starred = false;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<surrogate::IntervalRecord> records;

  int x_dim() const {
    return sim::ClusterState::flat_dim(num_hosts, num_slots) +
           num_slots * num_hosts + (starred ? 1 : 0);
  }
};

// Runs the random scheduler for `intervals` intervals, recording one
// (x_t, O_t) pair each. With `gosh_checkpoint` set the dataset is starred:
// the pre-trained models also produce the co-simulated score feature.
Dataset gen_dataset(const ExperimentConfig& cfg, int intervals,
                    std::uint64_t seed,
                    const std::string& gosh_checkpoint = "");

// First line is a header object, then one record per line.
void save_dataset(const Dataset& d, const std::string& path);
Dataset load_dataset(const std::string& path);

}  // namespace gosh::harness
