#pragma once

#include "uqc/module.hpp"
#include "uqc/rootdata.hpp"

#include <optional>
#include <string>

namespace uqc {

struct EngineConfig {
    std::string datum = "sl2";
    std::vector<std::vector<long>> cartan; // used when datum == "custom"
    std::vector<long> d;
    long l = 5;
    std::optional<long> order_M;       // default 2 * det(A) * l
    std::optional<Convention> convention; // default by parity of l
    long tor_window_lo = -3;
    long tor_window_hi = 3;
    long ktower_cap = 6;
    long resolution_depth_cap = 64;
};

/// One engine instance = one root datum + one cyclotomic field + caches.
/// Module-theoretic operations require rank 1; the combinatorial layer
/// (rootdata, confspace) works for any finite-type datum.
class Engine {
public:
    explicit Engine(EngineConfig cfg = {});

    const EngineConfig& config() const { return cfg_; }
    const RootDatum& rd() const { return rd_; }
    const std::shared_ptr<const CycloContext>& field() const { return F_; }
    const std::shared_ptr<const ModuleEnv>& module_env() const { return env_; }
    Convention convention() const { return conv_; }
    long l() const { return rd_.l(); }
    long ell() const { return rd_.ell(); }
    long order() const { return F_->order(); }

    CycloNum zeta(long num, long den = 1) const { return env_->zeta(num, den); }
    CycloNum zeta(const Rat& e) const { return env_->zeta(e); }
    CycloNum qint(long m) const { return env_->qint(m); }
    /// zeta^{n(w)} for the balance function of the engine's convention.
    CycloNum balance_scalar(long w) const;
    Rat balance_exponent(long w) const;
    Rat weight_form(long a, long b) const; // a.b for rank 1

    void require_rank1() const;

    // --- module constructors (rank 1) ---
    ModPtr verma(long hw, int twist = +1) const;
    ModPtr coverma(long lw, int twist = +1) const;
    ModPtr simple(long hw, int twist = +1) const;
    ModPtr unit(int twist = +1) const;
    ModPtr one_dim(long w, int twist = +1) const; // requires ell | w
    ModPtr projective_cover(long hw, int twist = +1) const;
    long simple_dim(long hw) const;

    // --- functors ---
    ModPtr dual_vee(ModPtr m) const;         // C <-> C_r, weights negated
    ModPtr twist_s(ModPtr m) const;          // C <-> C_r via the antipode
    ModPtr star(ModPtr m) const;             // rigidity * = s o vee
    ModPtr galois_twist(ModPtr m) const;     // zeta -> zeta^{-1} on entries
    ModPtr dual_contra(ModPtr m) const;      // weight-preserving transpose, E<->F
    ModPtr duality_D(ModPtr m) const;        // galois_twist o dual_contra

    bool is_projective(ModPtr m) const;

    /// internal caches used by the tensor layer
    mutable std::map<int, std::pair<int, std::vector<CycloNum>>> quasi_r_cache_; // twist -> (orientation, coeffs)
    mutable std::map<std::pair<std::vector<long>, int>, ModPtr> word_cache_;

private:
    ModPtr build_simple_like(long hw, long dim, int twist) const;

    EngineConfig cfg_;
    RootDatum rd_;
    std::shared_ptr<const CycloContext> F_;
    std::shared_ptr<const ModuleEnv> env_;
    Convention conv_;

    mutable std::map<std::pair<long, int>, ModPtr> verma_cache_, coverma_cache_, simple_cache_, proj_cache_;
};

} // namespace uqc
