#pragma once

#include "uqc/rational.hpp"

#include <map>
#include <optional>
#include <vector>

namespace uqc {

/// Element of the weight lattice X, in fundamental-weight coordinates
/// (<i, lambda> = lambda[i]).
using Weight = std::vector<long>;

enum class Convention {
    OddChapter1,    // nu_0 = rho, congruences mod lY
    GeneralChapter4 // nu_0 = -rho_ell, congruences mod Y*_ell
};

/// Cartan datum with the root-of-unity order l and everything derived from it:
/// the Q-valued form on X, rho, rho_ell, ell_i, the highest coroot gamma_0 and
/// the coroot beta_0 dual to the highest root. Simply-connected realization:
/// X = Z^rank on fundamental weights, Y = Z^rank on simple coroots, i' has
/// coordinates (i')_j = a_{ji}.
class RootDatum {
public:
    /// cartan[i][j] = <i, j'> (Cartan integers), d = symmetrizers.
    RootDatum(std::vector<std::vector<long>> cartan, std::vector<long> d, long l);

    static RootDatum sl2(long l);

    long rank() const { return rank_; }
    long l() const { return l_; }
    long ell() const { return ell_; }
    long det_cartan() const { return detA_; }
    long ell_i(long i) const { return ell_i_[i]; }
    const std::vector<long>& symmetrizers() const { return d_; }
    const std::vector<std::vector<long>>& cartan() const { return cartan_; }

    Weight zero() const { return Weight(rank_, 0); }
    Weight rho() const { return rho_; }
    Weight rho_ell() const { return rho_ell_; }
    Weight simple_root(long i) const; // i' in X-coordinates

    long pair(long i, const Weight& w) const { return w[i]; } // <i, lambda>
    Rat form(const Weight& a, const Weight& b) const;         // lambda . mu

    /// Default convention for this l (odd -> chapter-1, even -> chapter-4).
    Convention default_convention() const {
        return l_ % 2 ? Convention::OddChapter1 : Convention::GeneralChapter4;
    }

    /// Membership tests for the sublattices of X used by the admissibility
    /// congruences.
    bool in_Y(const Weight& w) const;       // image of Y under i -> i'
    bool in_lY(const Weight& w) const;
    bool in_Ystar_ell(const Weight& w) const;

    /// <gamma_0, lambda> and <beta_0, lambda> as functionals on X.
    long pair_gamma0(const Weight& w) const;
    long pair_beta0(const Weight& w) const;
    long ell_beta0() const { return ell_beta0_; }

private:
    void enumerate_roots();

    long rank_, l_, ell_, detA_;
    std::vector<long> d_, ell_i_;
    std::vector<std::vector<long>> cartan_;
    std::vector<std::vector<Rat>> form_; // omega_i . omega_j
    Weight rho_, rho_ell_;
    std::vector<long> gamma0_, beta0_; // coroot coordinates over simple coroots
    long ell_beta0_;
};

Weight operator+(const Weight& a, const Weight& b);
Weight operator-(const Weight& a, const Weight& b);
Weight operator-(const Weight& a);
Weight operator*(long c, const Weight& a);

/// Finite formal sum over X with multiplicities in N, optionally carrying an
/// unfolding pi : J -> X realizing the multiset as a list of colored points.
struct WeightBag {
    std::map<Weight, long> mult;
    std::optional<std::vector<Weight>> unfolding;

    static WeightBag from_unfolding(std::vector<Weight> pi);
    Weight collapse(long rank) const; // the homomorphism N[X] -> X
    long size() const;                // |alpha|
    bool consistent() const;          // unfolding matches multiplicities
};

/// n(mu) = 1/2 mu.mu + mu.nu_0 with nu_0 = rho or -rho_ell.
Rat balance_n(const RootDatum& rd, const Weight& mu, Convention conv);

/// n(mu+nu) = n(mu) + n(nu) + mu.nu — exposed as a property-test hook.
bool cocycle_check(const RootDatum& rd, const Weight& mu, const Weight& nu, Convention conv);

bool is_admissible_bag(const RootDatum& rd, const WeightBag& bag, Convention conv);

/// Pair (mu_vec, alpha) with alpha over N[I]: sum mu_k - alpha ~ -2 rho mod lY
/// (odd convention), or ~ 2 rho_ell mod Y*_ell (general convention).
bool is_admissible_pair(const RootDatum& rd, const std::vector<Weight>& mus,
                        const std::vector<long>& alpha, Convention conv);

/// alpha(mu_vec) = sum mu_j + (1-l) 2 rho if it lies in N[I], else nullopt.
std::optional<std::vector<long>> alpha_of_mu(const RootDatum& rd, const std::vector<Weight>& mus);

bool in_first_alcove(const RootDatum& rd, const Weight& lambda);

/// All alcove weights, rank 1 only (inequality scan).
std::vector<long> first_alcove_sl2(const RootDatum& rd);

Weight steinberg_weight(const RootDatum& rd);

/// Reports whether the two admissibility conventions disagree on this bag
/// (the engine reports rather than resolves the open question).
bool admissibility_conventions_disagree(const RootDatum& rd, const WeightBag& bag);

} // namespace uqc
