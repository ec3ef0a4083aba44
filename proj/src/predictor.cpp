#include "fedsae/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "fedsae/errors.hpp"

namespace fedsae {

void PredictorParams::validate() const {
  if (!(inverse_ratio > 0.0)) throw ConfigError("predictor: U must be positive");
  if (!(gamma2 > 0.0) || !(gamma1 > gamma2)) throw ConfigError("predictor: need gamma1 > gamma2 > 0");
  if (!(smoothness > 0.0 && smoothness < 1.0)) throw ConfigError("predictor: alpha must be in (0, 1)");
  if (!(initial_low > 0.0) || !(initial_low < initial_high)) {
    throw ConfigError("predictor: need 0 < L0 < H0");
  }
}

TaskPair PredictorParams::initial_pair() const { return {initial_low, initial_high, initial_low}; }

TaskPair ordered(TaskPair pair) {
  if (pair.low > pair.high) std::swap(pair.low, pair.high);
  return pair;
}

RoundOutcome execute_assignment(const TaskPair& pair, double capacity) {
  RoundOutcome out;
  out.affordable = capacity;
  if (capacity > pair.high) {
    out.completion = Completion::kFull;
    out.completed_epochs = pair.high;
  } else if (capacity >= pair.low) {
    out.completion = Completion::kPartial;
    out.completed_epochs = pair.low;
  } else {
    out.completion = Completion::kDropped;
    out.completed_epochs = 0.0;
  }
  out.uploaded = out.completion != Completion::kDropped;
  return out;
}

namespace {

TaskPair halved(const TaskPair& pair) { return {pair.low / 2.0, pair.high / 2.0, pair.theta}; }

// Partial completion: the grown low bound competes with half the old high bound.
TaskPair split_at_half_high(const TaskPair& pair, double grown_low) {
  const double half_high = pair.high / 2.0;
  return {std::min(grown_low, half_high), std::max(grown_low, half_high), pair.theta};
}

}  // namespace

TaskPair ira_update(const TaskPair& pair, const RoundOutcome& outcome, const PredictorParams& params) {
  const double u = params.inverse_ratio;
  switch (outcome.completion) {
    case Completion::kFull:
      return ordered({pair.low + u / pair.low, pair.high + u / pair.high, pair.theta});
    case Completion::kPartial:
      return ordered(split_at_half_high(pair, pair.low + u / pair.low));
    case Completion::kDropped:
      break;
  }
  return halved(pair);
}

double fassa_update_theta(double theta, double capacity, double alpha) {
  return alpha * theta + (1.0 - alpha) * capacity;
}

TaskPair fassa_update(const TaskPair& pair, const RoundOutcome& outcome, const PredictorParams& params) {
  const double g1 = params.gamma1;
  const double g2 = params.gamma2;
  const double theta = pair.theta;
  switch (outcome.completion) {
    case Completion::kFull:
      if (theta <= pair.low) return ordered({pair.low + g2, pair.high + g2, theta});
      if (theta <= pair.high) return ordered({pair.low + g1, pair.high + g2, theta});
      return ordered({pair.low + g1, pair.high + g1, theta});
    case Completion::kPartial:
      if (params.partial_rule == FassaPartialRule::kLiteral && theta >= pair.low) {
        const double grown = pair.low + g2;
        return ordered({std::min(grown, pair.low / 2.0), std::max(grown, pair.high / 2.0), theta});
      }
      return ordered(split_at_half_high(pair, pair.low + (theta >= pair.low ? g2 : g1)));
    case Completion::kDropped:
      break;
  }
  return halved(pair);
}

}  // namespace fedsae
