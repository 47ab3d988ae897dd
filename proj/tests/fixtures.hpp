#pragma once

#include "iqvi/analysis.hpp"
#include "iqvi/problem_model.hpp"

namespace fixtures {

using namespace iqvi;

/// f = 2x, Phi(x) = x/4 + B[0, 1] in R^3, alpha = 2; unique solution 0.
inline ProblemInstance ballExample() {
    return ProblemInstance::make(Mapping::scaledIdentity(3, 2.0),
                                 MovingSet::translated(Mapping::scaledIdentity(3, 0.25),
                                                       ConvexSet::ball(Vector::Zero(3), 1.0)),
                                 2.0);
}

/// lambda(t) = 1 + t^3
inline LambdaSchedule ballSchedule() { return LambdaSchedule::polynomial(1.0, 1.0, 3.0); }

/// f = 2x, Phi(x) = 1/(1+|x|) + [-1, 1], alpha = 2; unique solution 0.
inline ProblemInstance intervalExample() {
    return ProblemInstance::make(Mapping::scaledIdentity(1, 2.0),
                                 MovingSet::translated(Mapping::componentwise({ScalarFunction::inv_one_plus_abs}),
                                                       ConvexSet::interval(-1.0, 1.0)),
                                 2.0);
}

/// f = 2x on a constant ball, alpha = 4.
inline ProblemInstance heExample() {
    return ProblemInstance::make(Mapping::scaledIdentity(3, 2.0), MovingSet::constant(ConvexSet::ball(Vector::Zero(3), 1.0)),
                                 4.0);
}

inline ConstantsBundle ballConstants() { return ConstantsBundle::make(2.0, 2.0, 0.25, 0.25, 2.0); }

}  // namespace fixtures
