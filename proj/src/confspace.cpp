#include "uqc/confspace.hpp"

namespace uqc {

CycloNum monodromy_scalar(const RootDatum& rd, const std::shared_ptr<const CycloContext>& F,
                          const WeightBag& bag, const LoopGenerator& g, Convention conv) {
    if (!bag.unfolding) throw std::invalid_argument("monodromy requires an unfolding");
    const auto& pi = *bag.unfolding;
    long n = static_cast<long>(pi.size());
    auto at = [&](long k) -> const Weight& {
        if (k < 0 || k >= n) throw std::invalid_argument("unfolding index out of range");
        return pi[k];
    };
    switch (g.kind) {
    case LoopGenerator::Kind::PointAroundPoint: {
        if (g.i == g.j) throw std::invalid_argument("point-around-point needs two distinct points");
        Rat e = rd.form(at(g.i), at(g.j)) * Rat(-2);
        return zeta_pow(F, rd.l(), e);
    }
    case LoopGenerator::Kind::TangentRotation: {
        Rat e = balance_n(rd, at(g.j), conv) * Rat(-2);
        return zeta_pow(F, rd.l(), e);
    }
    case LoopGenerator::Kind::HalfTwist: {
        if (g.i == g.j) throw std::invalid_argument("half-twist needs two distinct points");
        if (at(g.i) != at(g.j)) throw std::invalid_argument("half-twist requires equally colored points");
        Rat e = rd.form(at(g.i), at(g.j)) * Rat(-1);
        return -zeta_pow(F, rd.l(), e);
    }
    }
    throw std::logic_error("unreachable");
}

std::vector<GeneratorScalar> monodromy_table(const RootDatum& rd,
                                             const std::shared_ptr<const CycloContext>& F,
                                             const WeightBag& bag, Convention conv) {
    if (!bag.unfolding) throw std::invalid_argument("monodromy requires an unfolding");
    const auto& pi = *bag.unfolding;
    long n = static_cast<long>(pi.size());
    std::vector<GeneratorScalar> out;
    for (long i = 0; i < n; ++i)
        for (long j = i + 1; j < n; ++j) {
            auto g = LoopGenerator::point_around_point(i, j);
            out.push_back({g, monodromy_scalar(rd, F, bag, g, conv)});
        }
    for (long j = 0; j < n; ++j) {
        auto g = LoopGenerator::tangent_rotation(j);
        out.push_back({g, monodromy_scalar(rd, F, bag, g, conv)});
    }
    for (long i = 0; i < n; ++i)
        for (long j = i + 1; j < n; ++j) {
            if (pi[i] != pi[j]) continue;
            auto g = LoopGenerator::half_twist(i, j);
            out.push_back({g, monodromy_scalar(rd, F, bag, g, conv)});
        }
    return out;
}

} // namespace uqc
