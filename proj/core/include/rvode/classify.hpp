#pragma once

#include <span>
#include <string>

namespace rvode {

enum class LimitClass { MinusOne, Zero, PlusOne, OtherFinite, NoLimit, Inconclusive };

std::string to_string(LimitClass c);

struct ClassifierTolerances {
  double tol_mean = 0.1;    // distance from a class value {-1,0,1}
  double tol_std = 0.05;    // final-window standard deviation
  double tol_drift = 0.05;  // change of decade means, per decade
  int min_decades = 3;      // decades past t = 1 required to classify
  int min_points_per_decade = 4;
};

struct LimitClassification {
  LimitClass cls = LimitClass::Inconclusive;
  double lambda_hat = 0.0;   // -1/0/+1 for class limits, window mean for OtherFinite
  double window_mean = 0.0;  // evidence: final decade
  double window_std = 0.0;
  double drift = 0.0;        // max consecutive decade-mean change
  bool classified() const {
    return cls == LimitClass::MinusOne || cls == LimitClass::Zero || cls == LimitClass::PlusOne;
  }
};

/**
 * Decides the limit of a ratio series r(t) as t -> inf from a finite window.
 *
 * Rule: take decade windows counted back from the last time; the series
 * is "stable" when the final-decade std and the drift of the last three
 * decade means are below tolerance. A stable series within tol_mean of
 * -1, 0 or 1 classifies to that value; stable elsewhere is OtherFinite;
 * unstable is NoLimit. Less than min_decades of data past t = 1 (or too
 * few points) is Inconclusive.
 *
 * Any finite-horizon proxy for a t -> inf limit is heuristic; this one is
 * fixed and tolerance-exposed so verdicts are reproducible.
 */
LimitClassification classify(std::span<const double> t, std::span<const double> v,
                             const ClassifierTolerances& tol = {});

}  // namespace rvode
