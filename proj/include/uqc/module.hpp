#pragma once

#include "uqc/linalg.hpp"

#include <map>
#include <memory>
#include <vector>

namespace uqc {

/// Shared arithmetic environment of the module layer (rank 1): the cyclotomic
/// field plus l and the nilpotency degree ell.
struct ModuleEnv {
    std::shared_ptr<const CycloContext> F;
    long l;
    long ell;

    CycloNum zeta(long num, long den = 1) const { return zeta_pow(F, l, num, den); }
    CycloNum zeta(const Rat& e) const { return zeta_pow(F, l, e); }
    /// Balanced quantum integer [m] = (zeta^m - zeta^-m)/(zeta - zeta^-1).
    CycloNum qint(long m) const;
};

class GradedModule;
using ModPtr = std::shared_ptr<const GradedModule>;

/// Object of C (side=+1) or C_r (side=-1), possibly over the zeta^{-1}-twisted
/// category (twist=-1): a finite X-graded space with operator blocks
/// E : V_w -> V_{w+2} and F : V_w -> V_{w-2}. The K-action is encoded by the
/// grading (zeta^{tw * side * w} on V_w). For right modules the stored blocks
/// are the right actions x -> x.E, x -> x.F; the commutator invariant
/// E.F - F.E = [w] id on V_w holds uniformly for both sides.
class GradedModule {
public:
    GradedModule(std::shared_ptr<const ModuleEnv> env, int side, int twist);

    const std::shared_ptr<const ModuleEnv>& env() const { return env_; }
    int side() const { return side_; }
    int twist() const { return twist_; }

    long dim() const { return static_cast<long>(wt_.size()); }
    long dim_at(long w) const;
    const std::map<long, std::vector<long>>& blocks() const { return blocks_; }
    const std::vector<long>& weights_of_basis() const { return wt_; }
    long weight_of(long flat) const { return wt_[flat]; }
    long pos_in_block(long flat) const { return pos_[flat]; }
    long flat_index(long w, long pos) const { return blocks_.at(w)[pos]; }
    std::vector<long> support() const;
    long max_weight() const; // throws on zero module
    long min_weight() const;

    /// Operator blocks; a missing block is the zero map (in particular when
    /// the target weight is not in the support).
    const Mat* E_block(long w) const;
    const Mat* F_block(long w) const;

    /// Construction: declare basis vectors weight-by-weight (in the flat order
    /// that defines this module), then install blocks.
    void add_basis(long w, long count);
    void set_E(long w, Mat m);
    void set_F(long w, Mat m);

    /// Verifies E^ell = F^ell = 0 and the commutator invariant; throws with a
    /// description on failure.
    void check_invariants() const;

    /// Composite operator power: E^k (dir=+1) or F^k (dir=-1) out of weight w.
    Mat op_power(int dir, long k, long w) const;

    /// Total operator rank of E^k (dir=+1) or F^k (dir=-1) over all weights.
    long total_op_rank(int dir, long k) const;

    bool same_shape(const GradedModule& o) const;

private:
    std::shared_ptr<const ModuleEnv> env_;
    int side_, twist_;
    std::vector<long> wt_;
    std::vector<long> pos_;
    std::map<long, std::vector<long>> blocks_;
    std::map<long, Mat> E_, F_;
};

/// Weight-preserving intertwiner between modules of the same side/twist.
/// Blocks are dst_dim(w) x src_dim(w); missing block = zero.
struct ModuleMap {
    ModPtr src, dst;
    std::map<long, Mat> blocks;

    static ModuleMap zero(ModPtr s, ModPtr d);
    static ModuleMap identity(ModPtr m);
    const Mat* block(long w) const;
    Mat block_or_zero(long w) const;
    void set_block(long w, Mat m);

    ModuleMap compose(const ModuleMap& inner) const; // this o inner
    ModuleMap operator+(const ModuleMap& o) const;
    ModuleMap operator-(const ModuleMap& o) const;
    ModuleMap scaled(const CycloNum& c) const;
    bool is_zero() const;
    bool operator==(const ModuleMap& o) const;

    /// Checks E/F-equivariance; throws on failure (used in tests/assertions).
    void check_intertwiner() const;

    CycloNum trace() const;
    std::optional<ModuleMap> inverse_map() const;
    bool is_iso() const;
};

/// dim-graded data helpers
struct SubmoduleResult {
    ModPtr module;
    ModuleMap inclusion;
};
struct QuotientResult {
    ModPtr module;
    ModuleMap projection;
};
struct SumResult {
    ModPtr module;
    std::vector<ModuleMap> inclusions;
    std::vector<ModuleMap> projections;
};

/// Submodule spanned (per weight) by the given column spans; verifies E/F
/// closure. Basis columns are taken as given (must be independent).
SubmoduleResult submodule(ModPtr m, const std::map<long, Mat>& span);

/// Quotient by the submodule spanned per weight by `span`.
QuotientResult quotient(ModPtr m, const std::map<long, Mat>& span);

SumResult direct_sum(const std::vector<ModPtr>& parts);

SubmoduleResult kernel(const ModuleMap& f);
SubmoduleResult image(const ModuleMap& f);

/// Basis of Hom_C(M, N) as intertwiners (deterministic order).
std::vector<ModuleMap> hom_space(ModPtr m, ModPtr n);

/// dim Ext^1_C(M, N) by the cocycle/coboundary linear system on E/F blocks.
long ext1(ModPtr m, ModPtr n);

} // namespace uqc
