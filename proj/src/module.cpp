#include "uqc/module.hpp"

#include <algorithm>
#include <sstream>

namespace uqc {

CycloNum ModuleEnv::qint(long m) const {
    // (z^m - z^-m)/(z - z^-1); invariant under z -> z^-1
    CycloNum num = zeta(m) - zeta(-m);
    CycloNum den = zeta(1) - zeta(-1);
    return num * den.inv();
}

GradedModule::GradedModule(std::shared_ptr<const ModuleEnv> env, int side, int twist)
    : env_(std::move(env)), side_(side), twist_(twist) {
    if (side_ != 1 && side_ != -1) throw std::invalid_argument("side must be +-1");
    if (twist_ != 1 && twist_ != -1) throw std::invalid_argument("twist must be +-1");
}

long GradedModule::dim_at(long w) const {
    auto it = blocks_.find(w);
    return it == blocks_.end() ? 0 : static_cast<long>(it->second.size());
}

std::vector<long> GradedModule::support() const {
    std::vector<long> s;
    for (const auto& [w, b] : blocks_)
        if (!b.empty()) s.push_back(w);
    return s;
}

long GradedModule::max_weight() const {
    if (blocks_.empty()) throw std::logic_error("max_weight of zero module");
    return blocks_.rbegin()->first;
}

long GradedModule::min_weight() const {
    if (blocks_.empty()) throw std::logic_error("min_weight of zero module");
    return blocks_.begin()->first;
}

const Mat* GradedModule::E_block(long w) const {
    auto it = E_.find(w);
    return it == E_.end() ? nullptr : &it->second;
}

const Mat* GradedModule::F_block(long w) const {
    auto it = F_.find(w);
    return it == F_.end() ? nullptr : &it->second;
}

void GradedModule::add_basis(long w, long count) {
    auto& blk = blocks_[w];
    for (long k = 0; k < count; ++k) {
        blk.push_back(dim());
        pos_.push_back(static_cast<long>(blk.size()) - 1);
        wt_.push_back(w);
    }
}

void GradedModule::set_E(long w, Mat m) {
    if (m.rows() != dim_at(w + 2) || m.cols() != dim_at(w))
        throw std::invalid_argument("E block shape mismatch at weight " + std::to_string(w));
    if (!m.is_zero()) E_[w] = std::move(m);
}

void GradedModule::set_F(long w, Mat m) {
    if (m.rows() != dim_at(w - 2) || m.cols() != dim_at(w))
        throw std::invalid_argument("F block shape mismatch at weight " + std::to_string(w));
    if (!m.is_zero()) F_[w] = std::move(m);
}

Mat GradedModule::op_power(int dir, long k, long w) const {
    const auto& F = env_->F;
    Mat acc = Mat::identity(F, dim_at(w));
    long cur = w;
    for (long s = 0; s < k; ++s) {
        const Mat* b = dir > 0 ? E_block(cur) : F_block(cur);
        long nxt = cur + (dir > 0 ? 2 : -2);
        if (!b) {
            acc = Mat(F, dim_at(nxt), dim_at(w)); // zero
        } else {
            acc = *b * acc;
        }
        cur = nxt;
    }
    return acc;
}

long GradedModule::total_op_rank(int dir, long k) const {
    long r = 0;
    for (const auto& [w, blk] : blocks_) {
        if (blk.empty()) continue;
        r += rank(op_power(dir, k, w));
    }
    return r;
}

void GradedModule::check_invariants() const {
    const auto& F = env_->F;
    long ell = env_->ell;
    for (const auto& [w, blk] : blocks_) {
        if (blk.empty()) continue;
        long d = static_cast<long>(blk.size());
        // commutator
        Mat ef(F, d, d), fe(F, d, d);
        if (const Mat* f = F_block(w)) {
            if (const Mat* e = E_block(w - 2)) ef = *e * *f;
        }
        if (const Mat* e = E_block(w)) {
            if (const Mat* f = F_block(w + 2)) fe = *f * *e;
        }
        Mat comm = ef - fe;
        Mat expect = Mat::identity(F, d).scaled(env_->qint(w));
        if (!(comm == expect))
            throw std::logic_error("commutator invariant fails at weight " + std::to_string(w));
        // nilpotency
        if (!op_power(+1, ell, w).is_zero())
            throw std::logic_error("E^ell != 0 from weight " + std::to_string(w));
        if (!op_power(-1, ell, w).is_zero())
            throw std::logic_error("F^ell != 0 from weight " + std::to_string(w));
    }
}

bool GradedModule::same_shape(const GradedModule& o) const {
    if (side_ != o.side_ || twist_ != o.twist_) return false;
    if (blocks_.size() != o.blocks_.size()) return false;
    for (const auto& [w, b] : blocks_)
        if (o.dim_at(w) != static_cast<long>(b.size())) return false;
    return true;
}

ModuleMap ModuleMap::zero(ModPtr s, ModPtr d) {
    ModuleMap f;
    f.src = std::move(s);
    f.dst = std::move(d);
    return f;
}

ModuleMap ModuleMap::identity(ModPtr m) {
    ModuleMap f;
    f.src = m;
    f.dst = m;
    for (const auto& [w, blk] : m->blocks())
        if (!blk.empty()) f.blocks[w] = Mat::identity(m->env()->F, static_cast<long>(blk.size()));
    return f;
}

const Mat* ModuleMap::block(long w) const {
    auto it = blocks.find(w);
    return it == blocks.end() ? nullptr : &it->second;
}

Mat ModuleMap::block_or_zero(long w) const {
    if (const Mat* b = block(w)) return *b;
    return Mat(src->env()->F, dst->dim_at(w), src->dim_at(w));
}

void ModuleMap::set_block(long w, Mat m) {
    if (m.rows() != dst->dim_at(w) || m.cols() != src->dim_at(w))
        throw std::invalid_argument("map block shape mismatch at weight " + std::to_string(w));
    if (!m.is_zero()) blocks[w] = std::move(m);
}

ModuleMap ModuleMap::compose(const ModuleMap& inner) const {
    if (inner.dst.get() != src.get() && !inner.dst->same_shape(*src))
        throw std::invalid_argument("composition shape mismatch");
    ModuleMap f = ModuleMap::zero(inner.src, dst);
    for (const auto& [w, b] : inner.blocks) {
        const Mat* mine = block(w);
        if (!mine) continue;
        Mat prod = *mine * b;
        if (!prod.is_zero()) f.blocks[w] = std::move(prod);
    }
    return f;
}

ModuleMap ModuleMap::operator+(const ModuleMap& o) const {
    ModuleMap f = *this;
    for (const auto& [w, b] : o.blocks) {
        auto it = f.blocks.find(w);
        if (it == f.blocks.end())
            f.blocks[w] = b;
        else {
            it->second = it->second + b;
            if (it->second.is_zero()) f.blocks.erase(it);
        }
    }
    return f;
}

ModuleMap ModuleMap::operator-(const ModuleMap& o) const {
    ModuleMap f = *this;
    for (const auto& [w, b] : o.blocks) {
        auto it = f.blocks.find(w);
        if (it == f.blocks.end())
            f.blocks[w] = b.scaled(-src->env()->F->one());
        else {
            it->second = it->second - b;
            if (it->second.is_zero()) f.blocks.erase(it);
        }
    }
    return f;
}

ModuleMap ModuleMap::scaled(const CycloNum& c) const {
    ModuleMap f = *this;
    if (c.is_zero()) {
        f.blocks.clear();
        return f;
    }
    for (auto& [w, b] : f.blocks) b = b.scaled(c);
    return f;
}

bool ModuleMap::is_zero() const {
    for (const auto& [w, b] : blocks)
        if (!b.is_zero()) return false;
    return true;
}

bool ModuleMap::operator==(const ModuleMap& o) const { return (*this - o).is_zero(); }

void ModuleMap::check_intertwiner() const {
    const auto& F = src->env()->F;
    for (const auto& [w, blk] : src->blocks()) {
        if (blk.empty()) continue;
        // E_N T_w = T_{w+2} E_M
        {
            Mat lhs(F, dst->dim_at(w + 2), src->dim_at(w));
            if (const Mat* e = dst->E_block(w)) lhs = *e * block_or_zero(w);
            Mat rhs(F, dst->dim_at(w + 2), src->dim_at(w));
            if (const Mat* e = src->E_block(w)) rhs = block_or_zero(w + 2) * *e;
            if (!(lhs == rhs)) throw std::logic_error("map not E-equivariant at weight " + std::to_string(w));
        }
        {
            Mat lhs(F, dst->dim_at(w - 2), src->dim_at(w));
            if (const Mat* f = dst->F_block(w)) lhs = *f * block_or_zero(w);
            Mat rhs(F, dst->dim_at(w - 2), src->dim_at(w));
            if (const Mat* f = src->F_block(w)) rhs = block_or_zero(w - 2) * *f;
            if (!(lhs == rhs)) throw std::logic_error("map not F-equivariant at weight " + std::to_string(w));
        }
    }
}

CycloNum ModuleMap::trace() const {
    CycloNum t = src->env()->F->zero();
    for (const auto& [w, b] : blocks)
        for (long i = 0; i < std::min(b.rows(), b.cols()); ++i) t += b.at(i, i);
    return t;
}

std::optional<ModuleMap> ModuleMap::inverse_map() const {
    if (!src->same_shape(*dst)) return std::nullopt;
    ModuleMap inv = ModuleMap::zero(dst, src);
    for (const auto& [w, blk] : src->blocks()) {
        if (blk.empty()) continue;
        auto bi = inverse(block_or_zero(w));
        if (!bi) return std::nullopt;
        inv.blocks[w] = *bi;
    }
    return inv;
}

bool ModuleMap::is_iso() const { return inverse_map().has_value(); }

SubmoduleResult submodule(ModPtr m, const std::map<long, Mat>& span) {
    const auto& F = m->env()->F;
    auto sub = std::make_shared<GradedModule>(m->env(), m->side(), m->twist());
    std::map<long, Mat> basis;
    for (const auto& [w, mat] : span) {
        if (mat.cols() == 0) continue;
        basis[w] = mat;
        sub->add_basis(w, mat.cols());
    }
    // induced E/F: solve span_{w+2} * X = E_w * span_w
    for (const auto& [w, mat] : basis) {
        for (int dir : {+1, -1}) {
            long tw = w + (dir > 0 ? 2 : -2);
            const Mat* op = dir > 0 ? m->E_block(w) : m->F_block(w);
            if (!op) continue;
            Mat img = *op * mat;
            if (img.is_zero()) continue;
            auto it = basis.find(tw);
            if (it == basis.end()) throw std::invalid_argument("span not closed under operators");
            auto x = solve(it->second, img);
            if (!x) throw std::invalid_argument("span not closed under operators");
            if (dir > 0)
                sub->set_E(w, *x);
            else
                sub->set_F(w, *x);
        }
    }
    ModuleMap inc = ModuleMap::zero(sub, m);
    for (const auto& [w, mat] : basis) inc.set_block(w, mat);
    (void)F;
    return {sub, inc};
}

QuotientResult quotient(ModPtr m, const std::map<long, Mat>& span) {
    const auto& F = m->env()->F;
    // choose complement columns of the standard basis per weight
    auto q = std::make_shared<GradedModule>(m->env(), m->side(), m->twist());
    std::map<long, Mat> proj; // projection matrices q_dim x m_dim
    std::map<long, Mat> sub;  // the subspace, full column rank
    for (const auto& [w, blk] : m->blocks()) {
        long d = static_cast<long>(blk.size());
        if (d == 0) continue;
        Mat s = (span.count(w) && span.at(w).cols() > 0) ? span.at(w) : Mat(F, d, 0);
        sub[w] = s;
        // rows of nullspace(s^T)^T give functionals vanishing on s... simpler:
        // build [s | I], pivot columns beyond s index a complement; projection
        // = coordinates along complement modulo s.
        Mat aug = s.hstack(Mat::identity(F, d));
        Echelon e = echelon(aug);
        std::vector<long> comp;
        for (long p : e.pivots)
            if (p >= s.cols()) comp.push_back(p - s.cols());
        q->add_basis(w, static_cast<long>(comp.size()));
        // projection: express each basis vector of m as s*alpha + comp*beta,
        // take beta. Solve [s | comp-columns] * x = id.
        Mat compM(F, d, static_cast<long>(comp.size()));
        for (long j = 0; j < static_cast<long>(comp.size()); ++j) compM.at(comp[j], j) = F->one();
        Mat full = s.hstack(compM);
        auto x = solve(full, Mat::identity(F, d));
        if (!x) throw std::logic_error("quotient basis construction failed");
        Mat beta(F, static_cast<long>(comp.size()), d);
        for (long i = 0; i < beta.rows(); ++i)
            for (long j = 0; j < d; ++j) beta.at(i, j) = x->at(s.cols() + i, j);
        proj[w] = std::move(beta);
    }
    // induced operators: Eq = proj_{w+2} * E_w * comp-lift; the lift of a
    // quotient basis vector is its complement column.
    for (const auto& [w, blk] : m->blocks()) {
        if (blk.empty()) continue;
        for (int dir : {+1, -1}) {
            long tw = w + (dir > 0 ? 2 : -2);
            const Mat* op = dir > 0 ? m->E_block(w) : m->F_block(w);
            if (!op || q->dim_at(tw) == 0 || q->dim_at(w) == 0) continue;
            // lift: solve proj_w * L = id_q, with L in complement: reconstruct
            // from stored complement choice: proj_w * compM = id by design.
            // Recompute compM columns from proj pivots: easier to re-derive:
            // solve [proj_w^T...] — instead store lifts during construction.
            // (filled below)
            (void)tw;
        }
    }
    // Recompute with lifts retained: redo loop properly.
    std::map<long, Mat> lift;
    for (const auto& [w, blk] : m->blocks()) {
        long d = static_cast<long>(blk.size());
        if (d == 0 || q->dim_at(w) == 0) continue;
        // lift columns: complement columns chosen above; rebuild them

        Mat s = sub[w];
        Mat aug = s.hstack(Mat::identity(F, d));
        Echelon e = echelon(aug);
        std::vector<long> comp;
        for (long p : e.pivots)
            if (p >= s.cols()) comp.push_back(p - s.cols());
        Mat compM(F, d, static_cast<long>(comp.size()));
        for (long j = 0; j < static_cast<long>(comp.size()); ++j) compM.at(comp[j], j) = F->one();
        lift[w] = std::move(compM);
    }
    for (const auto& [w, blk] : m->blocks()) {
        if (blk.empty() || q->dim_at(w) == 0) continue;
        for (int dir : {+1, -1}) {
            long tw = w + (dir > 0 ? 2 : -2);
            const Mat* op = dir > 0 ? m->E_block(w) : m->F_block(w);
            if (!op || q->dim_at(tw) == 0) continue;
            Mat induced = proj[tw] * (*op * lift[w]);
            if (dir > 0)
                q->set_E(w, std::move(induced));
            else
                q->set_F(w, std::move(induced));
        }
    }
    ModuleMap p = ModuleMap::zero(m, q);
    for (auto& [w, b] : proj)
        if (b.rows() > 0) p.set_block(w, b);
    return {q, p};
}

SumResult direct_sum(const std::vector<ModPtr>& parts) {
    if (parts.empty()) throw std::invalid_argument("direct_sum of nothing");
    const auto& env = parts[0]->env();
    const auto& F = env->F;
    auto s = std::make_shared<GradedModule>(env, parts[0]->side(), parts[0]->twist());
    std::map<long, long> total;
    for (const auto& p : parts)
        for (const auto& [w, blk] : p->blocks()) total[w] += static_cast<long>(blk.size());
    std::map<long, std::vector<long>> offsets; // per part, per weight
    for (const auto& [w, d] : total)
        if (d > 0) s->add_basis(w, d);
    std::map<long, long> cursor;
    std::vector<std::map<long, long>> part_off(parts.size());
    for (size_t k = 0; k < parts.size(); ++k)
        for (const auto& [w, blk] : parts[k]->blocks()) {
            part_off[k][w] = cursor[w];
            cursor[w] += static_cast<long>(blk.size());
        }
    // blocks
    for (const auto& [w, d] : total) {
        if (d == 0) continue;
        for (int dir : {+1, -1}) {
            long tw = w + (dir > 0 ? 2 : -2);
            if (total.count(tw) == 0 || total[tw] == 0) continue;
            Mat m(F, total[tw], d);
            bool nonzero = false;
            for (size_t k = 0; k < parts.size(); ++k) {
                const Mat* op = dir > 0 ? parts[k]->E_block(w) : parts[k]->F_block(w);
                if (!op) continue;
                nonzero = true;
                long r0 = part_off[k].count(tw) ? part_off[k][tw] : 0;
                long c0 = part_off[k].count(w) ? part_off[k][w] : 0;
                for (long i = 0; i < op->rows(); ++i)
                    for (long j = 0; j < op->cols(); ++j) m.at(r0 + i, c0 + j) = op->at(i, j);
            }
            if (!nonzero) continue;
            if (dir > 0)
                s->set_E(w, std::move(m));
            else
                s->set_F(w, std::move(m));
        }
    }
    SumResult res;
    res.module = s;
    for (size_t k = 0; k < parts.size(); ++k) {
        ModuleMap inc = ModuleMap::zero(parts[k], s);
        ModuleMap prj = ModuleMap::zero(s, parts[k]);
        for (const auto& [w, blk] : parts[k]->blocks()) {
            long d = static_cast<long>(blk.size());
            if (d == 0) continue;
            Mat bi(F, s->dim_at(w), d), bp(F, d, s->dim_at(w));
            long off = part_off[k][w];
            for (long i = 0; i < d; ++i) {
                bi.at(off + i, i) = F->one();
                bp.at(i, off + i) = F->one();
            }
            inc.set_block(w, std::move(bi));
            prj.set_block(w, std::move(bp));
        }
        res.inclusions.push_back(std::move(inc));
        res.projections.push_back(std::move(prj));
    }
    return res;
}

SubmoduleResult kernel(const ModuleMap& f) {
    std::map<long, Mat> span;
    for (const auto& [w, blk] : f.src->blocks()) {
        if (blk.empty()) continue;
        Mat b = f.block_or_zero(w);
        span[w] = nullspace(b);
    }
    return submodule(f.src, span);
}

SubmoduleResult image(const ModuleMap& f) {
    std::map<long, Mat> span;
    for (const auto& [w, blk] : f.dst->blocks()) {
        if (blk.empty()) continue;
        Mat b = f.block_or_zero(w);
        span[w] = column_space(b);
    }
    return submodule(f.dst, span);
}

namespace {

struct UnknownIndex {
    std::map<long, long> offset;
    long total = 0;
};

UnknownIndex index_hom_unknowns(const GradedModule& m, const GradedModule& n) {
    UnknownIndex u;
    for (const auto& [w, blk] : m.blocks()) {
        long dm = static_cast<long>(blk.size());
        long dn = n.dim_at(w);
        if (dm == 0 || dn == 0) continue;
        u.offset[w] = u.total;
        u.total += dm * dn;
    }
    return u;
}

// Unknown T_w is dn x dm, entry (r, c) at offset[w] + r*dm + c.
} // namespace

std::vector<ModuleMap> hom_space(ModPtr m, ModPtr n) {
    const auto& F = m->env()->F;
    UnknownIndex u = index_hom_unknowns(*m, *n);
    if (u.total == 0) return {};
    // equations: for each w, dir: T_{w+d} * Op_m - Op_n * T_w = 0
    std::vector<std::array<long, 0>> dummy;
    long rows = 0;
    for (const auto& [w, blk] : m->blocks()) {
        long dm = static_cast<long>(blk.size());
        if (dm == 0) continue;
        for (int dir : {+1, -1}) {
            long tw = w + (dir > 0 ? 2 : -2);
            long dn_t = n->dim_at(tw);
            if (dn_t > 0) rows += dn_t * dm;
        }
    }
    Mat sys(F, rows, u.total);
    long r0 = 0;
    for (const auto& [w, blk] : m->blocks()) {
        long dm = static_cast<long>(blk.size());
        if (dm == 0) continue;
        long dn = n->dim_at(w);
        for (int dir : {+1, -1}) {
            long tw = w + (dir > 0 ? 2 : -2);
            long dm_t = m->dim_at(tw);
            long dn_t = n->dim_at(tw);
            if (dn_t == 0) continue;
            const Mat* opm = dir > 0 ? m->E_block(w) : m->F_block(w);
            const Mat* opn = dir > 0 ? n->E_block(w) : n->F_block(w);
            // equation block: rows (i, c) for i in [0,dn_t), c in [0,dm)
            for (long i = 0; i < dn_t; ++i)
                for (long c = 0; c < dm; ++c) {
                    long row = r0 + i * dm + c;
                    // + sum_k T_{tw}[i,k] opm[k,c]
                    if (opm && dm_t > 0 && u.offset.count(tw))
                        for (long k = 0; k < dm_t; ++k) {
                            const CycloNum& v = opm->at(k, c);
                            if (v.is_zero()) continue;
                            sys.at(row, u.offset.at(tw) + i * dm_t + k) += v;
                        }
                    // - sum_k opn[i,k] T_w[k,c]
                    if (opn && dn > 0 && u.offset.count(w))
                        for (long k = 0; k < dn; ++k) {
                            const CycloNum& v = opn->at(i, k);
                            if (v.is_zero()) continue;
                            sys.at(row, u.offset.at(w) + k * dm + c) -= v;
                        }
                }
            r0 += dn_t * dm;
        }
    }
    Mat ker = nullspace(sys);
    std::vector<ModuleMap> out;
    for (long j = 0; j < ker.cols(); ++j) {
        ModuleMap f = ModuleMap::zero(m, n);
        for (const auto& [w, off] : u.offset) {
            long dm = m->dim_at(w), dn = n->dim_at(w);
            Mat b(F, dn, dm);
            bool nz = false;
            for (long i = 0; i < dn; ++i)
                for (long c = 0; c < dm; ++c) {
                    b.at(i, c) = ker.at(off + i * dm + c, j);
                    nz = nz || !b.at(i, c).is_zero();
                }
            if (nz) f.blocks[w] = std::move(b);
        }
        out.push_back(std::move(f));
    }
    return out;
}

long ext1(ModPtr m, ModPtr n) {
    const auto& F = m->env()->F;
    long ell = m->env()->ell;
    // Unknowns: phiE_w : M_w -> N_{w+2} and phiF_w : M_w -> N_{w-2}.
    std::map<long, long> offE, offF;
    long total = 0;
    for (const auto& [w, blk] : m->blocks()) {
        long dm = static_cast<long>(blk.size());
        if (dm == 0) continue;
        if (long dn = n->dim_at(w + 2); dn > 0) {
            offE[w] = total;
            total += dn * dm;
        }
        if (long dn = n->dim_at(w - 2); dn > 0) {
            offF[w] = total;
            total += dn * dm;
        }
    }
    if (total == 0) return 0;

    struct Term { // coefficient * (phi at weight pw, type t) occurring inside a
                  // matrix product: N-part (left) and M-part (right)
        bool isE;
        long pw;
        Mat left;  // acting after phi (in N)
        Mat right; // acting before phi (in M)
    };
    std::vector<std::pair<std::pair<long, long>, std::vector<Term>>> eqs; // ((rows,cols at weight w->tw), terms)

    auto add_equation = [&](long rows, long cols, std::vector<Term> terms) {
        eqs.push_back({{rows, cols}, std::move(terms)});
    };

    auto opN = [&](int dir, long w) -> Mat {
        const Mat* b = dir > 0 ? n->E_block(w) : n->F_block(w);
        if (b) return *b;
        return Mat(F, n->dim_at(w + (dir > 0 ? 2 : -2)), n->dim_at(w));
    };
    auto opM = [&](int dir, long w) -> Mat {
        const Mat* b = dir > 0 ? m->E_block(w) : m->F_block(w);
        if (b) return *b;
        return Mat(F, m->dim_at(w + (dir > 0 ? 2 : -2)), m->dim_at(w));
    };

    // (1) commutator: E_N phiF + phiE F_M - F_N phiE - phiF E_M = 0 : M_w -> N_w
    for (const auto& [w, blk] : m->blocks()) {
        long dm = static_cast<long>(blk.size());
        long dn = n->dim_at(w);
        if (dm == 0 || dn == 0) continue;
        std::vector<Term> terms;
        terms.push_back({false, w, opN(+1, w - 2), Mat::identity(F, dm)});                 // E_N phiF_w
        terms.push_back({true, w - 2, Mat::identity(F, dn), opM(-1, w)});                   // phiE_{w-2} F_M
        terms.push_back({true, w, opN(-1, w + 2).scaled(-F->one()), Mat::identity(F, dm)}); // -F_N phiE_w
        terms.push_back({false, w + 2, Mat::identity(F, dn).scaled(-F->one()), opM(+1, w)});// -phiF_{w+2} E_M
        add_equation(dn, dm, std::move(terms));
    }
    // (2) E-nilpotency: sum_{a+b=ell-1} E_N^a phiE E_M^b = 0 : M_w -> N_{w+2ell}
    // (3) F-nilpotency likewise.
    for (const auto& [w, blk] : m->blocks()) {
        long dm = static_cast<long>(blk.size());
        if (dm == 0) continue;
        for (int dir : {+1, -1}) {
            long tw = w + (dir > 0 ? 2 : -2) * ell;
            long dn = n->dim_at(tw);
            if (dn == 0) continue;
            std::vector<Term> terms;
            for (long b = 0; b < ell; ++b) {
                long a = ell - 1 - b;
                long pw = w + (dir > 0 ? 2 : -2) * b; // phi applied at this weight
                Mat right = m->op_power(dir, b, w);
                Mat left = n->op_power(dir, a, pw + (dir > 0 ? 2 : -2));
                terms.push_back({dir > 0, pw, std::move(left), std::move(right)});
            }
            add_equation(dn, dm, std::move(terms));
        }
    }

    long rows = 0;
    for (const auto& [shape, t] : eqs) rows += shape.first * shape.second;
    Mat sys(F, rows, total);
    long r0 = 0;
    for (const auto& [shape, terms] : eqs) {
        long dn = shape.first, dm = shape.second;
        for (const auto& t : terms) {
            const auto& off = t.isE ? offE : offF;
            auto it = off.find(t.pw);
            if (it == off.end()) continue;
            long pdm = m->dim_at(t.pw);
            long pdn = n->dim_at(t.pw + (t.isE ? 2 : -2));
            // contribution: left * phi * right ; entry (i,c) picks up
            // left[i,a] right[b,c] * phi[a,b]
            for (long i = 0; i < dn; ++i)
                for (long a = 0; a < pdn; ++a) {
                    const CycloNum& lv = t.left.at(i, a);
                    if (lv.is_zero()) continue;
                    for (long b = 0; b < pdm; ++b)
                        for (long c = 0; c < dm; ++c) {
                            const CycloNum& rv = t.right.at(b, c);
                            if (rv.is_zero()) continue;
                            sys.at(r0 + i * dm + c, it->second + a * pdm + b) += lv * rv;
                        }
                }
        }
        r0 += dn * dm;
    }
    long cocycles = nullspace(sys).cols();

    // coboundaries: psi : M_w -> N_w, phiE = E_N psi - psi E_M etc.
    // dim B = dim {psi} - dim Hom(M, N).
    long psi_dim = 0;
    for (const auto& [w, blk] : m->blocks()) {
        long dm = static_cast<long>(blk.size());
        psi_dim += dm * n->dim_at(w);
    }
    long homs = static_cast<long>(hom_space(m, n).size());
    long coboundaries = psi_dim - homs;
    // But psi whose phi vanish are exactly Hom; coboundary space = psi_dim - homs
    // only when every psi yields a legal cocycle - which it does.
    return cocycles - coboundaries;
}

} // namespace uqc
