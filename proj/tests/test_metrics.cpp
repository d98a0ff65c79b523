// Copyright 2026 The Mace Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <limits>
#include <string>

#include "doctest.h"
#include "mace/errors.hpp"
#include "mace/metrics.hpp"
#include "mace/rng.hpp"

using namespace mace;

TEST_CASE("confusion rates from counts") {
  const ConfusionRates r = ConfusionRates::from_counts(4, 1, 1, 4);
  CHECK(r.tp == doctest::Approx(0.4));
  CHECK(r.fp == doctest::Approx(0.1));
  CHECK(r.fn == doctest::Approx(0.1));
  CHECK(r.tn == doctest::Approx(0.4));
  CHECK_THROWS_AS(ConfusionRates::from_counts(0, 0, 0, 0), ValidationError);
}

TEST_CASE("named metric evaluations") {
  const ConfusionRates balanced{0.4, 0.1, 0.1, 0.4};
  CHECK(named_metric("ACC", 0.5).evaluate(balanced) == doctest::Approx(0.8));

  const ConfusionRates skewed{0.3, 0.2, 0.1, 0.4};
  CHECK(named_metric("TPR", 0.5).evaluate(skewed) == doctest::Approx(0.75));
  CHECK(named_metric("TNR", 0.5).evaluate(skewed) ==
        doctest::Approx(0.4 / 0.6));
  CHECK(named_metric("PPV", 0.5).evaluate(skewed) == doctest::Approx(0.6));
}

TEST_CASE("AM averages TPR and TNR") {
  // Class masses match the prior: TP + FN = p, FP + TN = 1 - p.
  const double p = 0.3;
  const ConfusionRates r{0.2, 0.21, 0.1, 0.49};
  const double tpr = 0.2 / 0.3;
  const double tnr = 0.49 / 0.7;
  CHECK(named_metric("AM", p).evaluate(r) ==
        doctest::Approx(0.5 * (tpr + tnr)).epsilon(1e-12));
}

TEST_CASE("WA with unit weights degenerates to ACC") {
  const GeneralizedMetric wa = named_metric("WA", 0.5, {1, 1, 1, 1});
  const GeneralizedMetric acc = named_metric("ACC", 0.5);
  RngStream rng(3, 0);
  for (int i = 0; i < 50; ++i) {
    double raw[4];
    double sum = 0.0;
    for (int k = 0; k < 4; ++k) {
      raw[k] = rng.uniform(4 * i + k) + 1e-3;
      sum += raw[k];
    }
    const ConfusionRates r{raw[0] / sum, raw[1] / sum, raw[2] / sum,
                           raw[3] / sum};
    CHECK(wa.evaluate(r) == doctest::Approx(acc.evaluate(r)).epsilon(1e-12));
  }
}

TEST_CASE("WA weighting follows its definition") {
  const GeneralizedMetric wa = named_metric("WA", 0.5, {2, 1, 3, 4});
  const ConfusionRates r{0.3, 0.2, 0.1, 0.4};
  const double expect =
      (2 * 0.3 + 1 * 0.4) / (2 * 0.3 + 1 * 0.4 + 3 * 0.2 + 4 * 0.1);
  CHECK(wa.evaluate(r) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(wa.name() == "WA(2,1,3,4)");
}

TEST_CASE("zero denominator raises a numeric error carrying the rates") {
  const GeneralizedMetric ppv = named_metric("PPV", 0.5);
  const ConfusionRates never_positive{0.0, 0.0, 0.5, 0.5};
  try {
    ppv.evaluate(never_positive);
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("PPV") != std::string::npos);
    CHECK(msg.find("fn=0.5") != std::string::npos);
  }
}

TEST_CASE("evaluate validates the rates") {
  const GeneralizedMetric acc = named_metric("ACC", 0.5);
  CHECK_THROWS_AS(acc.evaluate({-0.1, 0.4, 0.3, 0.4}), ValidationError);
}

TEST_CASE("closed-form thresholds") {
  CHECK(*named_metric("ACC", 0.5).bayes_threshold() == 0.5);
  CHECK(*named_metric("TPR", 0.5).bayes_threshold() == 0.0);
  CHECK(*named_metric("TNR", 0.5).bayes_threshold() == 1.0);
  CHECK_FALSE(named_metric("PPV", 0.5).bayes_threshold().has_value());

  // The AM threshold equals the prior exactly, including in floating
  // point, for the priors exercised throughout.
  for (double p : {0.1, 0.3, 0.5}) {
    const auto t = named_metric("AM", p).bayes_threshold();
    REQUIRE(t.has_value());
    CHECK(*t == p);
  }

  // WA admits the closed form only when reward and penalty weights pair
  // up (w1 == w4 and w2 == w3).
  const auto t_wa = named_metric("WA", 0.5, {2, 1, 1, 2}).bayes_threshold();
  REQUIRE(t_wa.has_value());
  CHECK(*t_wa == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK_FALSE(
      named_metric("WA", 0.5, {2, 1, 1, 1}).bayes_threshold().has_value());
}

TEST_CASE("threshold classifier tie predicts non-member") {
  const ThresholdClassifier above{0.5, ThresholdOrientation::positive_above};
  CHECK(above.predict(0.6) == 1);
  CHECK(above.predict(0.5) == -1);
  CHECK(above.predict(0.4) == -1);
  const ThresholdClassifier below{0.5, ThresholdOrientation::positive_below};
  CHECK(below.predict(0.4) == 1);
  CHECK(below.predict(0.5) == -1);
  CHECK(below.predict(0.6) == -1);
}

TEST_CASE("derived constants satisfy their defining identities") {
  const GeneralizedMetric m("custom", 0.3, 1.1, -0.4, 0.2, 0.9, 0.5, 0.7, 0.7,
                            0.7, 0.7);
  const DerivedCoefficients c = m.derived();
  CHECK(c.c1 == m.a0() + m.a01());
  CHECK(c.c2 == m.a0() + m.a00());
  CHECK(c.c3 == m.a11() - m.a01());
  CHECK(c.c4 == m.a10() - m.a00());
  CHECK(c.d1 == m.b0() + m.b01());
  CHECK(c.d2 == m.b0() + m.b00());
  CHECK(c.d3 == m.b11() - m.b01());
  CHECK(c.d4 == m.b10() - m.b00());
}

TEST_CASE("construction rejects degenerate coefficient sets") {
  CHECK_THROWS_AS(GeneralizedMetric("bad", 1, 1, 1, 1, 1, 0, 0, 0, 0, 0),
                  ValidationError);  // denominator identically zero
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(GeneralizedMetric("bad", inf, 1, 1, 1, 1, 1, 0, 0, 0, 0),
                  ValidationError);
}

TEST_CASE("named metric factory validation") {
  CHECK_THROWS_AS(named_metric("F1", 0.5), ValidationError);
  CHECK_THROWS_AS(named_metric("AM", 0.0), ValidationError);
  CHECK_THROWS_AS(named_metric("WA", 0.5, {1, 1, 1, 0}), ValidationError);
  CHECK_THROWS_AS(named_metric("WA", 0.5, {-1, 1, 1, 1}), ValidationError);
}
