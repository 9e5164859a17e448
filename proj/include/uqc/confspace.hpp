#pragma once

#include "uqc/cyclo.hpp"
#include "uqc/rootdata.hpp"

#include <memory>

namespace uqc {

/// Loop generators of the colored-configuration local system on the disk with
/// tangent vectors: point-around-point loops, tangent rotations, and
/// half-twists exchanging two equally colored points.
struct LoopGenerator {
    enum class Kind { PointAroundPoint, TangentRotation, HalfTwist };
    Kind kind;
    long i = -1;
    long j = -1;

    static LoopGenerator point_around_point(long i, long j) { return {Kind::PointAroundPoint, i, j}; }
    static LoopGenerator tangent_rotation(long j) { return {Kind::TangentRotation, -1, j}; }
    static LoopGenerator half_twist(long i, long j) { return {Kind::HalfTwist, i, j}; }
};

/// Monodromy scalar of one generator on the one-dimensional local system
/// attached to the colored configuration (the unfolding of `bag`):
///   point-around-point -> zeta^{-2 pi(i).pi(j)}
///   tangent rotation   -> zeta^{-2 n(pi(j))}
///   half-twist         -> -zeta^{-pi(i).pi(j)}   (squares to the full loop)
CycloNum monodromy_scalar(const RootDatum& rd, const std::shared_ptr<const CycloContext>& F,
                          const WeightBag& bag, const LoopGenerator& g, Convention conv);

struct GeneratorScalar {
    LoopGenerator gen;
    CycloNum scalar;
};

/// Scalars of every generator of the configuration: all ordered pairs i < j,
/// all tangent rotations, and half-twists for equally colored pairs.
std::vector<GeneratorScalar> monodromy_table(const RootDatum& rd,
                                             const std::shared_ptr<const CycloContext>& F,
                                             const WeightBag& bag, Convention conv);

} // namespace uqc
