#include <doctest.h>

#include <cmath>
#include <random>

#include "fedsae/predictor.hpp"
#include "fedsae/random.hpp"
#include "reference_predictor.hpp"

using namespace fedsae;

namespace {

PredictorParams default_params() { return PredictorParams{}; }

RoundOutcome outcome_of(Completion c, double affordable = 0.0) {
  RoundOutcome o;
  o.completion = c;
  o.uploaded = c != Completion::kDropped;
  o.affordable = affordable;
  return o;
}

void check_pair(const TaskPair& p, double low, double high) {
  CHECK(p.low == doctest::Approx(low).epsilon(1e-14));
  CHECK(p.high == doctest::Approx(high).epsilon(1e-14));
}

struct Triple {
  TaskPair pair;
  double affordable;
};

Triple random_triple(Rng& rng) {
  std::uniform_real_distribution<double> u(0.05, 30.0);
  double a = u(rng), b = u(rng);
  Triple t{{std::min(a, b), std::max(a, b), u(rng)}, std::uniform_real_distribution<double>(0.0, 35.0)(rng)};
  return t;
}

}  // namespace

TEST_SUITE("predictor") {
  TEST_CASE("assignment outcomes") {
    const TaskPair pair{5, 8, 5};
    RoundOutcome o = execute_assignment(pair, 9);
    CHECK(o.completion == Completion::kFull);
    CHECK(o.completed_epochs == 8);
    CHECK(o.uploaded);

    o = execute_assignment(pair, 6);
    CHECK(o.completion == Completion::kPartial);
    CHECK(o.completed_epochs == 5);
    CHECK(o.uploaded);

    o = execute_assignment(pair, 3);
    CHECK(o.completion == Completion::kDropped);
    CHECK(o.completed_epochs == 0);
    CHECK_FALSE(o.uploaded);

    CHECK(execute_assignment(pair, 5).completion == Completion::kPartial);
    CHECK(execute_assignment(pair, 8).completion == Completion::kPartial);
  }

  TEST_CASE("Ira examples") {
    const PredictorParams p = default_params();
    check_pair(ira_update({5, 8, 0}, outcome_of(Completion::kFull), p), 7, 9.25);
    check_pair(ira_update({5, 8, 0}, outcome_of(Completion::kPartial), p), 4, 7);
    check_pair(ira_update({5, 8, 0}, outcome_of(Completion::kDropped), p), 2.5, 4);
    // (1, 2) grows to (11, 7), which comes back ordered.
    check_pair(ira_update({1, 2, 0}, outcome_of(Completion::kFull), p), 7, 11);
  }

  TEST_CASE("EMA threshold") {
    CHECK(fassa_update_theta(5, 10, 0.95) == doctest::Approx(5.25).epsilon(1e-15));
    CHECK(fassa_update_theta(3.75, 3.75, 0.95) == doctest::Approx(3.75).epsilon(1e-15));
    double theta = 2.0;
    for (int t = 1; t <= 10; ++t) theta = fassa_update_theta(theta, 6.0, 0.95);
    CHECK(std::abs(theta - (6.0 + std::pow(0.95, 10) * (2.0 - 6.0))) <= 1e-12);
  }

  TEST_CASE("Fassa examples") {
    const PredictorParams p = default_params();
    check_pair(fassa_update({5, 8, 4}, outcome_of(Completion::kFull), p), 6, 9);
    check_pair(fassa_update({5, 8, 12}, outcome_of(Completion::kFull), p), 8, 11);
    check_pair(fassa_update({5, 8, 6}, outcome_of(Completion::kFull), p), 8, 9);
    check_pair(fassa_update({5, 8, 6}, outcome_of(Completion::kPartial), p), 4, 6);
    for (double theta : {0.0, 6.0, 100.0}) {
      check_pair(fassa_update({5, 8, theta}, outcome_of(Completion::kDropped), p), 2.5, 4);
    }
  }

  TEST_CASE("Fassa literal partial rule") {
    PredictorParams p = default_params();
    p.partial_rule = FassaPartialRule::kLiteral;
    // theta >= low: min(low + r2, low / 2) is always low / 2.
    check_pair(fassa_update({5, 8, 6}, outcome_of(Completion::kPartial), p), 2.5, 6);
    // theta < low: same as the declared rule with r1.
    check_pair(fassa_update({5, 8, 2}, outcome_of(Completion::kPartial), p), 4, 8);
  }

  TEST_CASE("updates match the reference transcription") {
    const PredictorParams p = default_params();
    Rng rng(2024);
    for (int i = 0; i < 2000; ++i) {
      const Triple t = random_triple(rng);
      const RoundOutcome o = execute_assignment(t.pair, t.affordable);
      const auto ira_ref = reference::ira_epoch_predict(t.pair.low, t.pair.high, t.affordable, p.inverse_ratio);
      const TaskPair ira = ira_update(t.pair, o, p);
      CHECK(o.completed_epochs == ira_ref.trained_epochs);
      CHECK(ira.low == std::min(ira_ref.next_low, ira_ref.next_high));
      CHECK(ira.high == std::max(ira_ref.next_low, ira_ref.next_high));

      const auto fassa_ref = reference::fassa_epoch_predict(t.pair.low, t.pair.high, t.affordable, t.pair.theta,
                                                            p.gamma1, p.gamma2, false);
      const TaskPair fassa = fassa_update(t.pair, o, p);
      CHECK(fassa.low == std::min(fassa_ref.next_low, fassa_ref.next_high));
      CHECK(fassa.high == std::max(fassa_ref.next_low, fassa_ref.next_high));
    }
  }

  TEST_CASE("pair ordering, halving, and safety hold for random triples") {
    PredictorParams p = default_params();
    Rng rng(99);
    for (int i = 0; i < 5000; ++i) {
      const Triple t = random_triple(rng);
      p.partial_rule = i % 2 ? FassaPartialRule::kLiteral : FassaPartialRule::kDeclared;
      const RoundOutcome o = execute_assignment(t.pair, t.affordable);
      CHECK(o.completed_epochs <= t.affordable);
      if (o.uploaded) CHECK(o.completed_epochs > 0);
      for (const TaskPair& next : {ira_update(t.pair, o, p), fassa_update(t.pair, o, p)}) {
        CHECK(next.low > 0);
        CHECK(next.low <= next.high);
        if (!o.uploaded) {
          CHECK(next.low == t.pair.low / 2);
          CHECK(next.high == t.pair.high / 2);
        }
      }
      const double theta = fassa_update_theta(t.pair.theta, t.affordable, p.smoothness);
      CHECK(theta >= std::min(t.pair.theta, t.affordable) - 1e-12);
      CHECK(theta <= std::max(t.pair.theta, t.affordable) + 1e-12);
    }
  }

  TEST_CASE("Fassa low increment does not grow as the stage moves to arise") {
    const PredictorParams p = default_params();
    const RoundOutcome full = outcome_of(Completion::kFull);
    Rng rng(5);
    std::uniform_real_distribution<double> u(0.5, 20.0);
    for (int i = 0; i < 500; ++i) {
      const double low = u(rng);
      const double high = low + u(rng);
      const double start = fassa_update({low, high, high + 1}, full, p).low - low;
      const double middle = fassa_update({low, high, 0.5 * (low + high)}, full, p).low - low;
      const double arise = fassa_update({low, high, low}, full, p).low - low;
      // Ordering may swap bounds, so compare the growth of the smaller bound.
      CHECK(start >= middle - 1e-12);
      CHECK(middle >= arise - 1e-12);
    }
  }

  TEST_CASE("Ira recovers within log2(L / c) dropped rounds") {
    const PredictorParams p = default_params();
    for (double c : {1.5, 4.0, 6.0, 8.0, 9.7}) {
      for (double factor : {1.3, 3.0, 16.0, 40.0}) {
        TaskPair pair{factor * c, 2 * factor * c, 0};
        const int bound = static_cast<int>(std::ceil(std::log2(pair.low / c)));
        int drops = 0;
        for (;;) {
          const RoundOutcome o = execute_assignment(pair, c);
          if (o.uploaded) break;
          ++drops;
          pair = ira_update(pair, o, p);
          REQUIRE(drops <= bound);
        }
        CHECK(drops <= bound);
      }
    }
  }

  TEST_CASE("parameter validation") {
    PredictorParams p;
    CHECK_NOTHROW(p.validate());
    p.gamma1 = 0.5;
    CHECK_THROWS(p.validate());
    p = PredictorParams{};
    p.smoothness = 1.0;
    CHECK_THROWS(p.validate());
    p = PredictorParams{};
    p.initial_low = 3;
    CHECK_THROWS(p.validate());
    const TaskPair init = PredictorParams{}.initial_pair();
    CHECK(init.low == 1);
    CHECK(init.high == 2);
    CHECK(init.theta == 1);
  }
}
