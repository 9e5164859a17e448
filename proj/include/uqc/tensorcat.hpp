#pragma once

#include "uqc/engine.hpp"

#include <string>

namespace uqc {

/// Tensor product in C / C_r. Strictly associative by construction: the flat
/// basis of A (x) B is the (i,j)-lexicographic family, so re-bracketed words
/// have identical bases and identical operator blocks.
ModPtr tensor(ModPtr a, ModPtr b);
ModuleMap map_tensor(const ModuleMap& f, const ModuleMap& g);

/// Same weights/dims and equal E/F blocks (the strict-associativity equality).
bool modules_structurally_equal(const GradedModule& a, const GradedModule& b);

/// Reinterpret a map between structurally equal realizations.
ModuleMap reindex_map(const ModuleMap& f, ModPtr new_src, ModPtr new_dst);

/// Fold-left tensor word of simples L(lambda_k); cached per engine.
ModPtr tensor_word(const Engine& eng, const std::vector<long>& lambdas, int twist = +1);

struct Summand {
    ModPtr piece;
    std::vector<ModuleMap> inc;  // piece -> whole, one per copy
    std::vector<ModuleMap> proj; // whole -> piece, proj_i o inc_i = id
    std::string kind;            // "projective" | "simple" | "other"
    long head_weight = 0;        // for projective/simple
    long multiplicity() const { return static_cast<long>(inc.size()); }
};

struct Decomposition {
    ModPtr whole;
    std::vector<Summand> summands;
    long total_dim() const;
};

/// Complete decomposition into indecomposables with witness maps.
/// Splitting strategy: peel projective summands (residue pairing rank with
/// P(mu)), then simple summands, then certify any remainder indecomposable via
/// the radical of its endomorphism algebra, else split by Fitting powers of
/// endomorphism words.
Decomposition decompose(const Engine& eng, ModPtr m);

/// Decompose a tensor word of simples by peeling one factor at a time (keeps
/// every intermediate decomposition small).
Decomposition decompose_word(const Engine& eng, const std::vector<long>& lambdas, int twist = +1);

/// P(hw): the indecomposable projective cover of L(hw), extracted from
/// L(rho_ell) (x) star(L(rho_ell)) (x) L(hw) by an explicit idempotent.
ModPtr build_projective_cover(const Engine& eng, long hw, int twist);

/// Both arguments must be indecomposable.
bool modules_isomorphic(const Engine& eng, ModPtr a, ModPtr b);

/// <M>: maximal trivial direct summand. dim = rank of the composite pairing
/// Hom(B,M) x Hom(M,B) -> B; incl/proj are weight-0 witness matrices with
/// proj * incl = id.
struct TrivialSummand {
    long dim = 0;
    Mat incl; // M_0-block x dim
    Mat proj; // dim x M_0-block
};
TrivialSummand max_trivial_summand(const Engine& eng, ModPtr m);

/// Compress a weight-preserving map f : M -> N to the trivial summands:
/// proj_N o f_0 o incl_M.
Mat compress_to_trivial(const TrivialSummand& src, const TrivialSummand& dst, const ModuleMap& f);

/// Coefficients c_0..c_{ell-1} of the quasi-R-matrix Theta = sum c_n F^n (x) E^n
/// (c_0 = 1), solved from the comultiplication-intertwining system on
/// M(0) (x) M(0) (extended with M(1) (x) M(1) if underdetermined).
const std::vector<CycloNum>& quasi_r_coeffs(const Engine& eng, int twist = +1);

/// Braiding R_{A,B} : A (x) B -> B (x) A  =  flip o Theta o weight-pairing.
ModuleMap braiding(const Engine& eng, ModPtr a, ModPtr b);

/// Balance on a fold-left tensor word of simples, by the recursion
/// theta_{V(x)W} = R_{W,V} R_{V,W} (theta_V (x) theta_W), theta_{L(w)} = zeta^{n(w)}.
ModuleMap balance_word(const Engine& eng, const std::vector<long>& lambdas, int twist = +1);

/// Braiding applied at slots (k, k+1) of a tensor word of simples: the map
/// word -> word-with-slots-swapped (both canonical fold-left modules).
ModuleMap word_slot_braiding(const Engine& eng, const std::vector<long>& lambdas, long k, int twist = +1);

/// Identity scaled by c.
ModuleMap scalar_map(ModPtr m, const CycloNum& c);

} // namespace uqc
