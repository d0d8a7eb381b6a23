// Scheduling policies: the surrogate-driven second-order scheduler, its
// co-simulating starred variant, the first-order / plain-FCN ablations, and
// a random baseline — all behind one interface driven interval by interval.

#pragma once

#include <deque>
#include <optional>

#include "gosh/nn/models.hpp"
#include "gosh/opt/minimize.hpp"
#include "gosh/sim/simulator.hpp"
#include "gosh/surrogate/bundle.hpp"

namespace gosh::sched {

enum class SchedulerKind {
  Gosh,
  GoshStar,
  Gobi,
  Sgobi,
  Hgobi,
  HgobiStar,
  SgobiStar,
  Random,
};

std::string scheduler_name(SchedulerKind kind);
SchedulerKind scheduler_from_name(const std::string& name);

bool is_starred(SchedulerKind kind);
bool uses_lcb(SchedulerKind kind);      // LCB acquisition vs plain FCN score
bool second_order(SchedulerKind kind);  // Newton-style vs gradient descent
bool is_learned(SchedulerKind kind);

struct ObjectiveSpec {
  double alpha = 0.5;
  double beta = 0.5;
  double r_ref = 3000.0;
};

// O_t = alpha * AEC + beta * normalized ART; throws unless alpha + beta = 1.
double objective_score(const sim::IntervalMetrics& m, const ObjectiveSpec& spec);

// t = 0 -> uniform [0,1] entries on active rows; afterwards the previous
// matrix with departed rows zeroed and newly active rows randomized.
sim::DecisionMatrix initialize_decision(int t,
                                        const sim::DecisionMatrix& previous,
                                        const std::vector<char>& active_now,
                                        const std::vector<char>& active_prev,
                                        std::mt19937_64& rng);

struct ScheduleOutcome {
  sim::DecisionMatrix decision;
  int iterations = 0;
  double scheduling_ms = 0.0;
  double xi = 0.0;       // sampled epistemic uncertainty (LCB kinds)
  double k = 0.0;        // exploration weight in effect
  double cosim_score = 0.0;  // predicted objective (starred kinds)
};

struct SchedulerConfig {
  SchedulerKind kind = SchedulerKind::Gosh;
  ObjectiveSpec objective;
  opt::OptimizerConfig optimizer;
  surrogate::TuneConfig tune;
  surrogate::ExplorationState exploration;
  int history_window = 16;   // LSTM context length
  int lstm_hidden = 32;
  int replay_capacity = 512;
  bool online_tuning = true;  // fine-tune models from realized objectives
};

class Scheduler {
 public:
  // Fresh randomly initialized models sized for the cluster (cold start).
  static Scheduler make_cold(SchedulerConfig cfg, int num_hosts, int num_slots,
                             std::uint64_t seed);

  // Produces the decision applied to the upcoming interval. Also fine-tunes
  // the models on the previous interval's realized objective (if observed)
  // and refreshes the exploration weight.
  ScheduleOutcome schedule(const sim::Simulator& sim);

  // Reports the realized objective of the interval the last schedule() call
  // decided, completing its training record.
  void observe(double realized_objective);

  const SchedulerConfig& config() const { return cfg_; }
  double exploration_k() const { return exploration_.k; }
  const surrogate::ExplorationState& exploration() const {
    return exploration_;
  }

  // Model access for checkpoint plumbing and tests.
  bool has_bundle() const { return bundle_.has_value(); }
  bool has_fcn() const { return fcn_.has_value(); }
  bool has_inner_bundle() const { return inner_bundle_.has_value(); }
  bool has_inner_fcn() const { return inner_fcn_.has_value(); }
  bool has_lstm() const { return lstm_.has_value(); }
  surrogate::SurrogateBundle& bundle() { return *bundle_; }
  const surrogate::SurrogateBundle& bundle() const { return *bundle_; }
  nn::FcnModel& fcn() { return *fcn_; }
  surrogate::SurrogateBundle& inner_bundle() { return *inner_bundle_; }
  nn::FcnModel& inner_fcn() { return *inner_fcn_; }
  nn::LstmModel& lstm() { return *lstm_; }
  void set_exploration(const surrogate::ExplorationState& e) {
    exploration_ = e;
  }

 private:
  Scheduler() = default;

  std::vector<double> context_row(const sim::Simulator& sim,
                                  const std::vector<double>& state_flat,
                                  double* cosim_score, int* inner_iterations);
  sim::DecisionMatrix optimize_decision(const std::vector<double>& context,
                                        const surrogate::SurrogateBundle* lcb,
                                        const nn::FcnModel* plain,
                                        const sim::Simulator& sim,
                                        const std::vector<char>& active,
                                        int* iterations,
                                        sim::DecisionMatrix* init_hint,
                                        bool inner_pass);
  sim::DecisionMatrix random_decision(const sim::Simulator& sim,
                                      const std::vector<char>& active);
  void tune_pending(double* xi_out);

  SchedulerConfig cfg_;
  std::mt19937_64 rng_;
  int num_hosts_ = 0;
  int num_slots_ = 0;

  std::optional<surrogate::SurrogateBundle> bundle_;  // LCB kinds
  std::optional<nn::FcnModel> fcn_;                   // plain-FCN kinds
  std::optional<nn::AdamW> opt_fcn_;
  std::optional<surrogate::SurrogateBundle> inner_bundle_;  // starred inner
  std::optional<nn::FcnModel> inner_fcn_;
  std::optional<nn::LstmModel> lstm_;

  int t_ = 0;
  sim::DecisionMatrix previous_;
  std::vector<char> previous_active_;
  opt::HessianState hessian_;
  opt::HessianState inner_hessian_;
  surrogate::ExplorationState exploration_;

  std::deque<surrogate::IntervalRecord> replay_;
  std::optional<surrogate::IntervalRecord> pending_;
  std::vector<double> last_x_;  // input layout row of the applied decision
  std::deque<std::vector<double>> history_;  // flat states for the LSTM
};

}  // namespace gosh::sched
