#pragma once

// Workload prediction. Each client carries a task pair (low, high): it first
// trains `low` epochs, then keeps going until it either runs out of capacity or
// finishes `high`. After each round the pair is adapted from the outcome:
//
//  * Ira:   additive increase by U / workload, halving on drop.
//  * Fassa: additive increase by gamma1 (start stage) or gamma2 (arise stage),
//           where the stage boundary is an EMA threshold of past capacities.

namespace fedsae {

struct TaskPair {
  double low = 1.0;
  double high = 2.0;
  double theta = 1.0;  // Fassa threshold, in epochs; Ira ignores it
};

enum class Completion { kFull, kPartial, kDropped };

struct RoundOutcome {
  Completion completion = Completion::kDropped;
  double completed_epochs = 0.0;  // epochs whose weights were uploaded
  bool uploaded = false;
  double affordable = 0.0;  // the client's actual capacity this round
};

enum class FassaPartialRule {
  kDeclared,  // r = gamma2 if theta >= low else gamma1; bounds at high / 2
  kLiteral,   // the published branch text, including its min(low + r, low / 2)
};

struct PredictorParams {
  double inverse_ratio = 10.0;  // U
  double gamma1 = 3.0;
  double gamma2 = 1.0;
  double smoothness = 0.95;  // EMA alpha
  double initial_low = 1.0;
  double initial_high = 2.0;
  FassaPartialRule partial_rule = FassaPartialRule::kDeclared;

  /// Throws ConfigError when a constraint is violated.
  void validate() const;
  /// (L0, H0) with theta0 = L0.
  TaskPair initial_pair() const;
};

/// Runs `pair` against the capacity: full if capacity > high, partial (upload
/// at `low`) if low <= capacity <= high, otherwise nothing is uploaded.
RoundOutcome execute_assignment(const TaskPair& pair, double capacity);

TaskPair ira_update(const TaskPair& pair, const RoundOutcome& outcome, const PredictorParams& params);

/// theta' = alpha * theta + (1 - alpha) * capacity.
double fassa_update_theta(double theta, double capacity, double alpha);

/// Expects `pair.theta` to already include this round's capacity.
TaskPair fassa_update(const TaskPair& pair, const RoundOutcome& outcome, const PredictorParams& params);

/// Swaps low/high when an update inverted them.
TaskPair ordered(TaskPair pair);

}  // namespace fedsae
