#include "uqc/engine.hpp"

#include "uqc/tensorcat.hpp"

namespace uqc {

Engine::Engine(EngineConfig cfg)
    : cfg_(std::move(cfg)),
      rd_(cfg_.datum == "sl2" ? RootDatum::sl2(cfg_.l) : RootDatum(cfg_.cartan, cfg_.d, cfg_.l)) {
    long M = cfg_.order_M.value_or(2 * rd_.det_cartan() * rd_.l());
    if (M % rd_.l() != 0 || M % (2 * rd_.det_cartan()) != 0)
        throw std::invalid_argument("cyclotomic order must be divisible by l and by 2 det(A)");
    F_ = CycloContext::make(M);
    auto env = std::make_shared<ModuleEnv>();
    env->F = F_;
    env->l = rd_.l();
    env->ell = rd_.ell();
    env_ = env;
    conv_ = cfg_.convention.value_or(rd_.default_convention());
    if (cfg_.tor_window_lo > cfg_.tor_window_hi) throw std::invalid_argument("empty Tor window");
    if (cfg_.ktower_cap < 1 || cfg_.resolution_depth_cap < 1)
        throw std::invalid_argument("caps must be positive");
}

void Engine::require_rank1() const {
    if (rd_.rank() != 1)
        throw std::invalid_argument("module-theoretic operations support rank 1 only");
}

Rat Engine::weight_form(long a, long b) const {
    require_rank1();
    return rd_.form(Weight{a}, Weight{b});
}

Rat Engine::balance_exponent(long w) const {
    require_rank1();
    return balance_n(rd_, Weight{w}, conv_);
}

CycloNum Engine::balance_scalar(long w) const { return zeta(balance_exponent(w)); }

long Engine::simple_dim(long hw) const { return imod(hw, ell()) + 1; }

ModPtr Engine::verma(long hw, int twist) const {
    require_rank1();
    auto key = std::make_pair(hw, twist);
    if (auto it = verma_cache_.find(key); it != verma_cache_.end()) return it->second;
    long ell = rd_.ell();
    auto m = std::make_shared<GradedModule>(env_, +1, twist);
    for (long a = 0; a < ell; ++a) m->add_basis(hw - 2 * a, 1);
    for (long a = 0; a < ell; ++a) {
        long w = hw - 2 * a;
        if (a + 1 < ell) {
            Mat f(F_, 1, 1);
            f.at(0, 0) = F_->one();
            m->set_F(w, std::move(f));
        }
        if (a >= 1) {
            Mat e(F_, 1, 1);
            e.at(0, 0) = qint(a) * qint(hw - a + 1);
            m->set_E(w, std::move(e));
        }
    }
    m->check_invariants();
    verma_cache_[key] = m;
    return m;
}

ModPtr Engine::coverma(long lw, int twist) const {
    require_rank1();
    auto key = std::make_pair(lw, twist);
    if (auto it = coverma_cache_.find(key); it != coverma_cache_.end()) return it->second;
    long ell = rd_.ell();
    auto m = std::make_shared<GradedModule>(env_, +1, twist);
    for (long a = 0; a < ell; ++a) m->add_basis(lw + 2 * a, 1);
    for (long a = 0; a < ell; ++a) {
        long w = lw + 2 * a;
        if (a + 1 < ell) {
            Mat e(F_, 1, 1);
            e.at(0, 0) = F_->one();
            m->set_E(w, std::move(e));
        }
        if (a >= 1) {
            Mat f(F_, 1, 1);
            f.at(0, 0) = -(qint(a) * qint(lw + a - 1));
            m->set_F(w, std::move(f));
        }
    }
    m->check_invariants();
    coverma_cache_[key] = m;
    return m;
}

ModPtr Engine::build_simple_like(long hw, long dim, int twist) const {
    auto m = std::make_shared<GradedModule>(env_, +1, twist);
    for (long a = 0; a < dim; ++a) m->add_basis(hw - 2 * a, 1);
    for (long a = 0; a < dim; ++a) {
        long w = hw - 2 * a;
        if (a + 1 < dim) {
            Mat f(F_, 1, 1);
            f.at(0, 0) = F_->one();
            m->set_F(w, std::move(f));
        }
        if (a >= 1) {
            Mat e(F_, 1, 1);
            e.at(0, 0) = qint(a) * qint(hw - a + 1);
            m->set_E(w, std::move(e));
        }
    }
    m->check_invariants();
    return m;
}

ModPtr Engine::simple(long hw, int twist) const {
    require_rank1();
    auto key = std::make_pair(hw, twist);
    if (auto it = simple_cache_.find(key); it != simple_cache_.end()) return it->second;
    ModPtr m = build_simple_like(hw, simple_dim(hw), twist);
    simple_cache_[key] = m;
    return m;
}

ModPtr Engine::unit(int twist) const { return simple(0, twist); }

ModPtr Engine::one_dim(long w, int twist) const {
    require_rank1();
    if (imod(w, ell()) != 0)
        throw std::invalid_argument("one-dimensional module requires weight divisible by ell");
    auto m = std::make_shared<GradedModule>(env_, +1, twist);
    m->add_basis(w, 1);
    m->check_invariants();
    return m;
}

ModPtr Engine::dual_vee(ModPtr m) const {
    auto out = std::make_shared<GradedModule>(env_, -m->side(), m->twist());
    // same flat basis family, weights negated (dual basis in the same order)
    for (long f = 0; f < m->dim(); ++f) out->add_basis(-m->weight_of(f), 1);
    for (const auto& [w, blk] : out->blocks()) {
        if (blk.empty()) continue;
        // E at w: transpose of E_m at -w-2 ; F at w: transpose of F_m at -w+2
        if (const Mat* e = m->E_block(-w - 2)) out->set_E(w, e->transpose());
        if (const Mat* f = m->F_block(-w + 2)) out->set_F(w, f->transpose());
    }
    out->check_invariants();
    return out;
}

ModPtr Engine::twist_s(ModPtr m) const {
    auto out = std::make_shared<GradedModule>(env_, -m->side(), m->twist());
    for (long f = 0; f < m->dim(); ++f) out->add_basis(m->weight_of(f), 1);
    long t = m->twist();
    for (const auto& [w, blk] : m->blocks()) {
        if (blk.empty()) continue;
        if (const Mat* e = m->E_block(w)) {
            CycloNum c = m->side() > 0 ? -zeta(-t * (w + 2)) : -zeta(t * w);
            out->set_E(w, e->scaled(c));
        }
        if (const Mat* f = m->F_block(w)) {
            CycloNum c = m->side() > 0 ? -zeta(t * w) : -zeta(-t * (w - 2));
            out->set_F(w, f->scaled(c));
        }
    }
    out->check_invariants();
    return out;
}

ModPtr Engine::star(ModPtr m) const { return twist_s(dual_vee(m)); }

ModPtr Engine::galois_twist(ModPtr m) const {
    auto out = std::make_shared<GradedModule>(env_, m->side(), -m->twist());
    for (long f = 0; f < m->dim(); ++f) out->add_basis(m->weight_of(f), 1);
    long M = F_->order();
    auto conj = [&](const Mat& b) {
        Mat r(F_, b.rows(), b.cols());
        for (long i = 0; i < b.rows(); ++i)
            for (long j = 0; j < b.cols(); ++j)
                if (!b.at(i, j).is_zero()) r.at(i, j) = b.at(i, j).galois(M - 1);
        return r;
    };
    for (const auto& [w, blk] : m->blocks()) {
        if (blk.empty()) continue;
        if (const Mat* e = m->E_block(w)) out->set_E(w, conj(*e));
        if (const Mat* f = m->F_block(w)) out->set_F(w, conj(*f));
    }
    out->check_invariants();
    return out;
}

ModPtr Engine::dual_contra(ModPtr m) const {
    auto out = std::make_shared<GradedModule>(env_, m->side(), m->twist());
    for (long f = 0; f < m->dim(); ++f) out->add_basis(m->weight_of(f), 1);
    for (const auto& [w, blk] : m->blocks()) {
        if (blk.empty()) continue;
        if (const Mat* f = m->F_block(w + 2)) out->set_E(w, f->transpose());
        if (const Mat* e = m->E_block(w - 2)) out->set_F(w, e->transpose());
    }
    out->check_invariants();
    return out;
}

ModPtr Engine::duality_D(ModPtr m) const { return galois_twist(dual_contra(m)); }

ModPtr Engine::projective_cover(long hw, int twist) const {
    require_rank1();
    auto key = std::make_pair(hw, twist);
    if (auto it = proj_cache_.find(key); it != proj_cache_.end()) return it->second;
    ModPtr p = build_projective_cover(*this, hw, twist);
    proj_cache_[key] = p;
    return p;
}

bool Engine::is_projective(ModPtr m) const {
    if (m->dim() == 0) return true;
    Decomposition dec = decompose(*this, m);
    for (const auto& s : dec.summands) {
        // indecomposable projective <=> isomorphic to the cover of its simple head
        std::vector<long> head_wts;
        long head_dim = 0;
        for (long w : s.piece->support()) {
            long h = static_cast<long>(hom_space(s.piece, simple(w, s.piece->twist())).size());
            if (h > 0) {
                head_wts.push_back(w);
                head_dim += h;
            }
        }
        if (head_wts.size() != 1 || head_dim != 1) return false;
        ModPtr cover = projective_cover(head_wts[0], s.piece->twist());
        if (cover->dim() != s.piece->dim()) return false;
        if (!modules_isomorphic(*this, s.piece, cover)) return false;
    }
    return true;
}

} // namespace uqc
