// The three-model surrogate: NPN objective model f, dropout teacher g and
// deterministic student h, plus VaR/LCB computation and online fine-tuning.

#pragma once

#include <deque>
#include <nlohmann/json_fwd.hpp>

#include "gosh/nn/adamw.hpp"
#include "gosh/nn/losses.hpp"
#include "gosh/nn/models.hpp"
#include "gosh/surrogate/exploration.hpp"

namespace gosh::surrogate {

inline constexpr double kVarQuantile = 1.65;  // 95% Gaussian quantile

// One training datapoint: x_t = [S_t, phi(D_t)] (starred variants insert the
// co-simulated score before the decision block) and the realized objective.
struct IntervalRecord {
  std::vector<double> x;
  double y = 0.0;
};

double value_at_risk(double mu, double sigma);

// Sample standard deviation of m dropout-active teacher passes.
double epistemic_uncertainty(const nn::FcnModel& g,
                             const std::vector<double>& x, int m_samples,
                             std::mt19937_64& rng);

struct LcbComponents {
  double lcb = 0.0;
  double mu = 0.0;
  double sigma = 0.0;
  double xi_hat = 0.0;
};

struct TuneConfig {
  int m_samples = 10;
  int replay_window = 100;  // 0 = latest-only fidelity mode
  double lr = 1e-3;         // online fine-tuning step size
};

struct SurrogateBundle {
  nn::NpnModel f;
  nn::FcnModel g;  // MC-dropout teacher
  nn::FcnModel h;  // deterministic student
  nn::AdamW opt_f, opt_g, opt_h;
  int input_dim = 0;
  bool starred = false;

  static SurrogateBundle make(int input_dim, bool starred,
                              std::mt19937_64& rng,
                              nn::AdamWConfig opt_cfg = {});

  // Differentiable LCB = (mu + 1.65 sigma) - k * h(x) for a tape-resident
  // input row; the decision slice of x stays differentiable.
  nn::Value lcb_node(nn::Tape& tape, nn::Value x, double k) const;

  LcbComponents lcb(const std::vector<double>& x, double k) const;

  // One per-interval fine-tuning pass: AdamW steps on f (aleatoric
  // loss) and g (MSE) over the latest record plus a bounded replay window,
  // then one step on h toward the sampled epistemic uncertainty at x_now.
  // Returns the sampled xi_t.
  double tune(const IntervalRecord& latest,
              const std::deque<IntervalRecord>& replay,
              const std::vector<double>& x_now, std::mt19937_64& rng,
              const TuneConfig& cfg = {});
};

nlohmann::json bundle_checkpoint(const SurrogateBundle& b,
                                 const ExplorationState& e);
std::pair<SurrogateBundle, ExplorationState> bundle_from_checkpoint(
    const nlohmann::json& j);

}  // namespace gosh::surrogate
