#include "uqc/tensorcat.hpp"

#include <algorithm>
#include <set>

namespace uqc {

namespace {

void require_compatible(const GradedModule& a, const GradedModule& b) {
    if (a.side() != b.side()) throw std::invalid_argument("tensor: side mismatch");
    if (a.twist() != b.twist()) throw std::invalid_argument("tensor: twist mismatch");
    if (a.env().get() != b.env().get()) throw std::invalid_argument("tensor: engine mismatch");
}

} // namespace

ModPtr tensor(ModPtr A, ModPtr B) {
    require_compatible(*A, *B);
    const auto& env = A->env();
    const auto& F = env->F;
    auto out = std::make_shared<GradedModule>(env, A->side(), A->twist());
    long dB = B->dim();
    for (long i = 0; i < A->dim(); ++i)
        for (long j = 0; j < dB; ++j) out->add_basis(A->weight_of(i) + B->weight_of(j), 1);
    if (out->dim() == 0) return out;

    long ts = A->twist() * A->side();
    // per-weight blocks
    for (const auto& [w, blk] : out->blocks()) {
        long d = static_cast<long>(blk.size());
        if (d == 0) continue;
        for (int dir : {+1, -1}) {
            long tw = w + (dir > 0 ? 2 : -2);
            long dt = out->dim_at(tw);
            if (dt == 0) continue;
            Mat m(F, dt, d);
            bool nz = false;
            for (long c = 0; c < d; ++c) {
                long flat = blk[c];
                long i = flat / dB, j = flat % dB;
                long wa = A->weight_of(i), wb = B->weight_of(j);
                // operator on the A slot
                const Mat* opA = dir > 0 ? A->E_block(wa) : A->F_block(wa);
                if (opA) {
                    CycloNum scal = dir > 0 ? F->one() : env->zeta(-ts * wb);
                    long pa = A->pos_in_block(i);
                    const auto& ablk = A->blocks().at(wa + (dir > 0 ? 2 : -2));
                    for (long r = 0; r < opA->rows(); ++r) {
                        const CycloNum& v = opA->at(r, pa);
                        if (v.is_zero()) continue;
                        long lift = ablk[r] * dB + j;
                        m.at(out->pos_in_block(lift), c) += v * scal;
                        nz = true;
                    }
                }
                // operator on the B slot
                const Mat* opB = dir > 0 ? B->E_block(wb) : B->F_block(wb);
                if (opB) {
                    CycloNum scal = dir > 0 ? env->zeta(ts * wa) : F->one();
                    long pb = B->pos_in_block(j);
                    const auto& bblk = B->blocks().at(wb + (dir > 0 ? 2 : -2));
                    for (long r = 0; r < opB->rows(); ++r) {
                        const CycloNum& v = opB->at(r, pb);
                        if (v.is_zero()) continue;
                        long lift = i * dB + bblk[r];
                        m.at(out->pos_in_block(lift), c) += v * scal;
                        nz = true;
                    }
                }
            }
            if (!nz) continue;
            if (dir > 0)
                out->set_E(w, std::move(m));
            else
                out->set_F(w, std::move(m));
        }
    }
    return out;
}

ModuleMap map_tensor(const ModuleMap& f, const ModuleMap& g) {
    ModPtr srcT = tensor(f.src, g.src);
    ModPtr dstT = tensor(f.dst, g.dst);
    const auto& F = f.src->env()->F;
    ModuleMap out = ModuleMap::zero(srcT, dstT);
    long dBs = g.src->dim();
    long dBd = g.dst->dim();
    for (const auto& [w, blk] : srcT->blocks()) {
        long d = static_cast<long>(blk.size());
        long dt = dstT->dim_at(w);
        if (d == 0 || dt == 0) continue;
        Mat m(F, dt, d);
        bool nz = false;
        for (long c = 0; c < d; ++c) {
            long flat = blk[c];
            long i = flat / dBs, j = flat % dBs;
            long wa = f.src->weight_of(i), wb = g.src->weight_of(j);
            const Mat* fb = f.block(wa);
            const Mat* gb = g.block(wb);
            if (!fb || !gb) continue;
            long pa = f.src->pos_in_block(i), pb = g.src->pos_in_block(j);
            const auto& ablk = f.dst->blocks().count(wa) ? f.dst->blocks().at(wa) : std::vector<long>{};
            const auto& bblk = g.dst->blocks().count(wb) ? g.dst->blocks().at(wb) : std::vector<long>{};
            for (long r1 = 0; r1 < fb->rows(); ++r1) {
                const CycloNum& v1 = fb->at(r1, pa);
                if (v1.is_zero()) continue;
                for (long r2 = 0; r2 < gb->rows(); ++r2) {
                    const CycloNum& v2 = gb->at(r2, pb);
                    if (v2.is_zero()) continue;
                    long lift = ablk[r1] * dBd + bblk[r2];
                    m.at(dstT->pos_in_block(lift), c) += v1 * v2;
                    nz = true;
                }
            }
        }
        if (nz) out.blocks[w] = std::move(m);
    }
    return out;
}

bool modules_structurally_equal(const GradedModule& a, const GradedModule& b) {
    if (!a.same_shape(b)) return false;
    if (a.weights_of_basis() != b.weights_of_basis()) return false;
    for (const auto& [w, blk] : a.blocks()) {
        if (blk.empty()) continue;
        const Mat* ea = a.E_block(w);
        const Mat* eb = b.E_block(w);
        if ((ea == nullptr) != (eb == nullptr)) return false;
        if (ea && !(*ea == *eb)) return false;
        const Mat* fa = a.F_block(w);
        const Mat* fb = b.F_block(w);
        if ((fa == nullptr) != (fb == nullptr)) return false;
        if (fa && !(*fa == *fb)) return false;
    }
    return true;
}

ModuleMap reindex_map(const ModuleMap& f, ModPtr new_src, ModPtr new_dst) {
    if (!modules_structurally_equal(*f.src, *new_src) || !modules_structurally_equal(*f.dst, *new_dst))
        throw std::logic_error("reindex_map: realizations differ");
    ModuleMap out = ModuleMap::zero(std::move(new_src), std::move(new_dst));
    out.blocks = f.blocks;
    return out;
}

ModPtr tensor_word(const Engine& eng, const std::vector<long>& lambdas, int twist) {
    auto key = std::make_pair(lambdas, twist);
    if (auto it = eng.word_cache_.find(key); it != eng.word_cache_.end()) return it->second;
    ModPtr w;
    if (lambdas.empty())
        w = eng.unit(twist);
    else {
        w = eng.simple(lambdas[0], twist);
        for (size_t k = 1; k < lambdas.size(); ++k) w = tensor(w, eng.simple(lambdas[k], twist));
    }
    eng.word_cache_[key] = w;
    return w;
}

ModuleMap scalar_map(ModPtr m, const CycloNum& c) { return ModuleMap::identity(m).scaled(c); }

// ---------------------------------------------------------------------------
// decomposition
// ---------------------------------------------------------------------------

namespace {

struct SplitPart {
    ModPtr module;
    ModuleMap inc;  // part -> whole
    ModuleMap proj; // whole -> part
};

// Split m along an exact idempotent intertwiner e (e o e = e): parts are
// im(e) and im(1-e), with coordinate projections.
std::pair<SplitPart, SplitPart> split_by_idempotent(ModPtr m, const ModuleMap& e) {
    const auto& F = m->env()->F;
    std::map<long, Mat> spanI, spanK;
    std::map<long, Mat> projI, projK;
    for (const auto& [w, blk] : m->blocks()) {
        long d = static_cast<long>(blk.size());
        if (d == 0) continue;
        Mat ew = e.block_or_zero(w);
        Mat iw = Mat::identity(F, d) - ew;
        Mat I = column_space(ew);
        Mat K = column_space(iw);
        if (I.cols() + K.cols() != d) throw std::logic_error("idempotent split defect");
        Mat full = I.hstack(K);
        auto invf = inverse(full);
        if (!invf) throw std::logic_error("idempotent split: basis not invertible");
        Mat top(F, I.cols(), d), bot(F, K.cols(), d);
        for (long i = 0; i < I.cols(); ++i)
            for (long j = 0; j < d; ++j) top.at(i, j) = invf->at(i, j);
        for (long i = 0; i < K.cols(); ++i)
            for (long j = 0; j < d; ++j) bot.at(i, j) = invf->at(I.cols() + i, j);
        spanI[w] = std::move(I);
        spanK[w] = std::move(K);
        projI[w] = std::move(top);
        projK[w] = std::move(bot);
    }
    SubmoduleResult pi = submodule(m, spanI);
    SubmoduleResult pk = submodule(m, spanK);
    SplitPart a{pi.module, pi.inclusion, ModuleMap::zero(m, pi.module)};
    SplitPart b{pk.module, pk.inclusion, ModuleMap::zero(m, pk.module)};
    for (auto& [w, mat] : projI)
        if (mat.rows() > 0) a.proj.set_block(w, mat);
    for (auto& [w, mat] : projK)
        if (mat.rows() > 0) b.proj.set_block(w, mat);
    return {a, b};
}

// residue of h in End(P)/rad for P indecomposable: trace(h)/dim(P)
CycloNum end_residue(const ModuleMap& h) {
    Rat scale(1, h.src->dim());
    return h.trace().scaled(scale);
}

struct PeelState {
    ModPtr rest;
    ModuleMap inc;  // rest -> original
    ModuleMap proj; // original -> rest
};

// Peel all direct summands isomorphic to P from state.rest.
void peel_one_type(const Engine& eng, PeelState& st, ModPtr P, const std::string& kind, long head_w,
                   std::vector<Summand>& out) {
    if (st.rest->dim() == 0 || P->dim() > st.rest->dim()) return;
    auto fs = hom_space(P, st.rest);
    if (fs.empty()) return;
    auto gs = hom_space(st.rest, P);
    if (gs.empty()) return;
    const auto& F = eng.field();
    Mat C(F, static_cast<long>(gs.size()), static_cast<long>(fs.size()));
    for (size_t j = 0; j < gs.size(); ++j)
        for (size_t i = 0; i < fs.size(); ++i) C.at(j, i) = end_residue(gs[j].compose(fs[i]));
    Echelon ec = echelon(C.hstack(Mat::identity(F, C.rows())));
    std::vector<long> fpiv;
    long r = 0;
    for (long p : ec.pivots)
        if (p < C.cols()) {
            fpiv.push_back(p);
            ++r;
        }
    if (r == 0) return;
    // g-combos: rows 0..r-1 of U (right block of the echelon) give res(g~_a f_piv_b) = delta
    std::vector<ModuleMap> gt;
    for (long a = 0; a < r; ++a) {
        ModuleMap g = ModuleMap::zero(st.rest, P);
        for (long j = 0; j < C.rows(); ++j) {
            const CycloNum& u = ec.rref.at(a, C.cols() + j);
            if (u.is_zero()) continue;
            g = g + gs[j].scaled(u);
        }
        gt.push_back(std::move(g));
    }
    std::vector<ModPtr> copies(r, P);
    SumResult PS = direct_sum(copies);
    // Fhat : P^r -> rest, G : rest -> P^r
    ModuleMap Fhat = ModuleMap::zero(PS.module, st.rest);
    ModuleMap G = ModuleMap::zero(st.rest, PS.module);
    for (long b = 0; b < r; ++b) Fhat = Fhat + fs[fpiv[b]].compose(PS.projections[b]);
    for (long a = 0; a < r; ++a) G = G + PS.inclusions[a].compose(gt[a]);
    ModuleMap GF = G.compose(Fhat); // residue-identity, invertible
    auto GFinv = GF.inverse_map();
    if (!GFinv) throw std::logic_error("projective peel: pairing not invertible");
    ModuleMap Gp = GFinv->compose(G); // Gp o Fhat = id
    ModuleMap e = Fhat.compose(Gp);   // idempotent onto the P^r summand
    auto [part, restpart] = split_by_idempotent(st.rest, e);
    Summand s;
    s.piece = P;
    s.kind = kind;
    s.head_weight = head_w;
    for (long i = 0; i < r; ++i) {
        s.inc.push_back(st.inc.compose(Fhat.compose(PS.inclusions[i])));
        s.proj.push_back(PS.projections[i].compose(Gp).compose(st.proj));
    }
    out.push_back(std::move(s));
    ModuleMap new_inc = st.inc.compose(restpart.inc);
    ModuleMap new_proj = restpart.proj.compose(st.proj);
    st.rest = restpart.module;
    st.inc = std::move(new_inc);
    st.proj = std::move(new_proj);
}

long module_total_rank(const ModuleMap& h) {
    long r = 0;
    for (const auto& [w, b] : h.blocks) r += rank(b);
    return r;
}

// Fitting split along a non-nilpotent, non-invertible endomorphism power.
std::optional<std::pair<SplitPart, SplitPart>> fitting_split(ModPtr m, const ModuleMap& h) {
    ModuleMap p = h;
    long prev = -1;
    for (long it = 0; it < 40; ++it) {
        long r = module_total_rank(p);
        if (r == prev) break;
        prev = r;
        p = p.compose(p);
    }
    long r = module_total_rank(p);
    if (r == 0 || r == m->dim()) return std::nullopt;
    const auto& F = m->env()->F;
    std::map<long, Mat> spanI, spanK;
    std::map<long, Mat> prI, prK;
    for (const auto& [w, blk] : m->blocks()) {
        long d = static_cast<long>(blk.size());
        if (d == 0) continue;
        Mat pw = p.block_or_zero(w);
        Mat I = column_space(pw);
        Mat K = nullspace(pw);
        if (I.cols() + K.cols() != d) throw std::logic_error("fitting split defect");
        Mat full = I.hstack(K);
        auto invf = inverse(full);
        if (!invf) throw std::logic_error("fitting: im/ker do not split");
        Mat top(F, I.cols(), d), bot(F, K.cols(), d);
        for (long i = 0; i < I.cols(); ++i)
            for (long j = 0; j < d; ++j) top.at(i, j) = invf->at(i, j);
        for (long i = 0; i < K.cols(); ++i)
            for (long j = 0; j < d; ++j) bot.at(i, j) = invf->at(I.cols() + i, j);
        spanI[w] = std::move(I);
        spanK[w] = std::move(K);
        prI[w] = std::move(top);
        prK[w] = std::move(bot);
    }
    SubmoduleResult pi = submodule(m, spanI);
    SubmoduleResult pk = submodule(m, spanK);
    SplitPart a{pi.module, pi.inclusion, ModuleMap::zero(m, pi.module)};
    SplitPart b{pk.module, pk.inclusion, ModuleMap::zero(m, pk.module)};
    for (auto& [w, mat] : prI)
        if (mat.rows() > 0) a.proj.set_block(w, mat);
    for (auto& [w, mat] : prK)
        if (mat.rows() > 0) b.proj.set_block(w, mat);
    return std::make_pair(a, b);
}

void decompose_into(const Engine& eng, ModPtr m, const ModuleMap& inc0, const ModuleMap& proj0,
                    std::vector<Summand>& out);

// Remainder after peeling: either certify indecomposable or split and recurse.
void handle_remainder(const Engine& eng, const PeelState& st, std::vector<Summand>& out) {
    ModPtr R = st.rest;
    auto ends = hom_space(R, R);
    long n = static_cast<long>(ends.size());
    if (n == 1) {
        Summand s;
        s.piece = R;
        s.kind = "other";
        s.head_weight = R->max_weight();
        s.inc.push_back(st.inc);
        s.proj.push_back(st.proj);
        out.push_back(std::move(s));
        return;
    }
    // radical of End via the trace form (char 0)
    const auto& F = eng.field();
    Mat gram(F, n, n);
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < n; ++j) gram.at(i, j) = ends[i].compose(ends[j]).trace();
    long radd = nullspace(gram).cols();
    if (n - radd == 1) {
        Summand s;
        s.piece = R;
        s.kind = "other";
        s.head_weight = R->max_weight();
        s.inc.push_back(st.inc);
        s.proj.push_back(st.proj);
        out.push_back(std::move(s));
        return;
    }
    // decomposable: find a Fitting splitter among words in End
    std::vector<ModuleMap> cand = ends;
    for (long i = 0; i < n && cand.size() < 200; ++i)
        for (long j = 0; j < n && cand.size() < 200; ++j) cand.push_back(ends[i].compose(ends[j]));
    for (const auto& h : cand) {
        auto sp = fitting_split(R, h);
        if (!sp) continue;
        decompose_into(eng, sp->first.module, st.inc.compose(sp->first.inc), sp->first.proj.compose(st.proj), out);
        decompose_into(eng, sp->second.module, st.inc.compose(sp->second.inc), sp->second.proj.compose(st.proj), out);
        return;
    }
    throw std::logic_error("idempotent-splitting failure: no Fitting splitter found");
}

void decompose_into(const Engine& eng, ModPtr m, const ModuleMap& inc0, const ModuleMap& proj0,
                    std::vector<Summand>& out) {
    if (m->dim() == 0) return;
    PeelState st{m, inc0, proj0};
    // projectives first (high head weights first for determinism)
    auto supp = st.rest->support();
    std::sort(supp.rbegin(), supp.rend());
    for (long w : supp) {
        if (st.rest->dim() == 0) break;
        if (st.rest->dim_at(w) == 0) continue;
        peel_one_type(eng, st, eng.projective_cover(w, m->twist()), "projective", w, out);
    }
    supp = st.rest->dim() ? st.rest->support() : std::vector<long>{};
    std::sort(supp.rbegin(), supp.rend());
    for (long w : supp) {
        if (st.rest->dim() == 0) break;
        if (st.rest->dim_at(w) == 0) continue;
        peel_one_type(eng, st, eng.simple(w, m->twist()), "simple", w, out);
    }
    if (st.rest->dim() > 0) handle_remainder(eng, st, out);
}

void merge_summands(const Engine& eng, std::vector<Summand>& list) {
    // group isomorphic pieces (same kind/head first, explicit iso check for "other")
    std::vector<Summand> merged;
    for (auto& s : list) {
        bool placed = false;
        for (auto& t : merged) {
            bool same = false;
            if (s.kind != "other" && s.kind == t.kind && s.head_weight == t.head_weight)
                same = true;
            else if (s.kind == "other" && t.kind == "other" && s.piece->dim() == t.piece->dim())
                same = modules_isomorphic(eng, s.piece, t.piece);
            if (same) {
                for (auto& i : s.inc) t.inc.push_back(std::move(i));
                for (auto& p : s.proj) t.proj.push_back(std::move(p));
                placed = true;
                break;
            }
        }
        if (!placed) merged.push_back(std::move(s));
    }
    list = std::move(merged);
}

} // namespace

long Decomposition::total_dim() const {
    long d = 0;
    for (const auto& s : summands) d += s.piece->dim() * s.multiplicity();
    return d;
}

Decomposition decompose(const Engine& eng, ModPtr m) {
    eng.require_rank1();
    Decomposition dec;
    dec.whole = m;
    decompose_into(eng, m, ModuleMap::identity(m), ModuleMap::identity(m), dec.summands);
    merge_summands(eng, dec.summands);
    if (dec.total_dim() != m->dim()) throw std::logic_error("decomposition dimension mismatch");
    return dec;
}

Decomposition decompose_word(const Engine& eng, const std::vector<long>& lambdas, int twist) {
    ModPtr word = tensor_word(eng, lambdas, twist);
    if (lambdas.empty() || lambdas.size() == 1) return decompose(eng, word);
    // peel factor by factor, keeping all intermediate decompositions small
    std::vector<Summand> cur;
    {
        ModPtr first = eng.simple(lambdas[0], twist);
        Summand s;
        s.piece = first;
        s.kind = "seed";
        s.inc.push_back(ModuleMap::identity(first));
        s.proj.push_back(ModuleMap::identity(first));
        cur.push_back(std::move(s));
    }
    ModPtr sofar = eng.simple(lambdas[0], twist);
    for (size_t k = 1; k < lambdas.size(); ++k) {
        ModPtr L = eng.simple(lambdas[k], twist);
        ModPtr next = tensor_word(eng, std::vector<long>(lambdas.begin(), lambdas.begin() + k + 1), twist);
        ModuleMap idL = ModuleMap::identity(L);
        std::vector<Summand> nxt;
        for (const auto& s : cur) {
            Decomposition d = decompose(eng, tensor(s.piece, L));
            for (size_t ci = 0; ci < s.inc.size(); ++ci) {
                ModuleMap incL = reindex_map(map_tensor(s.inc[ci], idL), tensor(s.piece, L), next);
                ModuleMap prjL = reindex_map(map_tensor(s.proj[ci], idL), next, tensor(s.piece, L));
                for (const auto& t : d.summands) {
                    Summand u;
                    u.piece = t.piece;
                    u.kind = t.kind;
                    u.head_weight = t.head_weight;
                    for (size_t cj = 0; cj < t.inc.size(); ++cj) {
                        u.inc.push_back(incL.compose(t.inc[cj]));
                        u.proj.push_back(t.proj[cj].compose(prjL));
                    }
                    nxt.push_back(std::move(u));
                }
            }
        }
        cur = std::move(nxt);
        merge_summands(eng, cur);
        sofar = next;
    }
    Decomposition dec;
    dec.whole = word;
    dec.summands = std::move(cur);
    if (dec.total_dim() != word->dim()) throw std::logic_error("word decomposition dimension mismatch");
    return dec;
}

bool modules_isomorphic(const Engine& eng, ModPtr a, ModPtr b) {
    (void)eng;
    if (!a->same_shape(*b)) return false;
    auto fs = hom_space(a, b);
    if (fs.empty()) return a->dim() == 0;
    auto gs = hom_space(b, a);
    for (const auto& g : gs)
        for (const auto& f : fs)
            if (!g.compose(f).trace().is_zero()) return true; // residue != 0 in local End(a)
    return false;
}

ModPtr build_projective_cover(const Engine& eng, long hw, int twist) {
    const auto& F = eng.field();
    ModPtr St = eng.simple(eng.rd().rho_ell()[0], twist);
    ModPtr Q = tensor(tensor(St, eng.star(St)), eng.simple(hw, twist));
    // head components of Q
    struct HeadFn {
        long w;
        ModuleMap q;
    };
    std::vector<HeadFn> heads;
    long target = -1;
    for (long w : Q->support()) {
        auto hs = hom_space(Q, eng.simple(w, twist));
        for (auto& h : hs) {
            if (w == hw && target < 0) target = static_cast<long>(heads.size());
            heads.push_back({w, std::move(h)});
        }
    }
    if (target < 0) throw std::logic_error("projective cover: head component missing");

    // Solve for an intertwiner e with q_target o e = q_target and q_j o e = 0
    // otherwise; its residue is a primitive idempotent, Newton-lift to exact.
    std::map<long, long> off;
    long total = 0;
    for (const auto& [w, blk] : Q->blocks()) {
        long d = static_cast<long>(blk.size());
        if (d == 0) continue;
        off[w] = total;
        total += d * d;
    }
    long eq_rows = 0;
    for (const auto& [w, blk] : Q->blocks()) {
        long d = static_cast<long>(blk.size());
        if (d == 0) continue;
        eq_rows += Q->dim_at(w + 2) * d + Q->dim_at(w - 2) * d;
    }
    for (const auto& h : heads)
        for (const auto& [w, b] : h.q.blocks) eq_rows += b.rows() * Q->dim_at(w);
    Mat sys(F, eq_rows, total);
    Mat rhs(F, eq_rows, 1);
    long r0 = 0;
    // intertwiner equations: e_{tw} Op_w - Op_w e_w = 0 (E and F)
    for (const auto& [w, blk] : Q->blocks()) {
        long d = static_cast<long>(blk.size());
        if (d == 0) continue;
        for (int dir : {+1, -1}) {
            long tw = w + (dir > 0 ? 2 : -2);
            long dt = Q->dim_at(tw);
            if (dt == 0) continue;
            const Mat* op = dir > 0 ? Q->E_block(w) : Q->F_block(w);
            if (op)
                for (long i = 0; i < dt; ++i)
                    for (long c = 0; c < d; ++c) {
                        long row = r0 + i * d + c;
                        for (long k = 0; k < dt; ++k) {
                            const CycloNum& v = op->at(k, c);
                            if (!v.is_zero()) sys.at(row, off.at(tw) + i * dt + k) += v;
                        }
                        for (long k = 0; k < d; ++k) {
                            const CycloNum& v = op->at(i, k);
                            if (!v.is_zero()) sys.at(row, off.at(w) + k * d + c) -= v;
                        }
                    }
            r0 += dt * d;
        }
    }
    // head conditions: q_target o e = q_target, q_other o e = 0
    for (size_t hi = 0; hi < heads.size(); ++hi) {
        const auto& h = heads[hi];
        bool is_target = static_cast<long>(hi) == target;
        for (const auto& [w, b] : h.q.blocks) {
            long d = Q->dim_at(w);
            for (long i = 0; i < b.rows(); ++i)
                for (long c = 0; c < d; ++c) {
                    long row = r0 + i * d + c;
                    for (long k = 0; k < d; ++k) {
                        const CycloNum& v = b.at(i, k);
                        if (!v.is_zero()) sys.at(row, off.at(w) + k * d + c) += v;
                    }
                    if (is_target) rhs.at(row, 0) = b.at(i, c);
                }
            r0 += b.rows() * d;
        }
    }
    auto sol = solve(sys, rhs);
    if (!sol) throw std::logic_error("projective cover: idempotent system unsolvable");
    ModuleMap e = ModuleMap::zero(Q, Q);
    for (const auto& [w, o] : off) {
        long d = Q->dim_at(w);
        Mat b(F, d, d);
        bool nz = false;
        for (long i = 0; i < d; ++i)
            for (long c = 0; c < d; ++c) {
                b.at(i, c) = sol->at(o + i * d + c, 0);
                nz = nz || !b.at(i, c).is_zero();
            }
        if (nz) e.blocks[w] = std::move(b);
    }
    // Newton refinement: e <- 3e^2 - 2e^3 until exactly idempotent
    for (int it = 0; it < 64; ++it) {
        ModuleMap e2 = e.compose(e);
        if (e2 == e) break;
        ModuleMap e3 = e2.compose(e);
        e = e2.scaled(eng.field()->from_rat(Rat(3))) - e3.scaled(eng.field()->from_rat(Rat(2)));
        if (it == 63) throw std::logic_error("projective cover: idempotent refinement did not converge");
    }
    SubmoduleResult im = image(e);
    im.module->check_invariants();
    return im.module;
}

// ---------------------------------------------------------------------------
// trivial summand
// ---------------------------------------------------------------------------

TrivialSummand max_trivial_summand(const Engine& eng, ModPtr m) {
    const auto& F = eng.field();
    ModPtr B = eng.unit(m->twist());
    auto fs = hom_space(B, m);
    auto gs = hom_space(m, B);
    TrivialSummand out;
    long d0 = m->dim_at(0);
    out.incl = Mat(F, d0, 0);
    out.proj = Mat(F, 0, d0);
    if (fs.empty() || gs.empty()) return out;
    Mat C(F, static_cast<long>(gs.size()), static_cast<long>(fs.size()));
    for (size_t j = 0; j < gs.size(); ++j)
        for (size_t i = 0; i < fs.size(); ++i) {
            ModuleMap comp = gs[j].compose(fs[i]);
            C.at(j, i) = comp.block_or_zero(0).rows() ? comp.block_or_zero(0).at(0, 0) : F->zero();
        }
    Echelon ec = echelon(C.hstack(Mat::identity(F, C.rows())));
    std::vector<long> fpiv;
    for (long p : ec.pivots)
        if (p < C.cols()) fpiv.push_back(p);
    long r = static_cast<long>(fpiv.size());
    out.dim = r;
    if (r == 0) return out;
    Mat incl(F, d0, r), proj(F, r, d0);
    for (long b = 0; b < r; ++b) {
        Mat col = fs[fpiv[b]].block_or_zero(0); // d0 x 1
        for (long i = 0; i < d0; ++i) incl.at(i, b) = col.at(i, 0);
    }
    for (long a = 0; a < r; ++a) {
        // g~_a = sum_j U[a][j] g_j ; row vector on weight 0
        Mat rowv(F, 1, d0);
        for (long j = 0; j < C.rows(); ++j) {
            const CycloNum& u = ec.rref.at(a, C.cols() + j);
            if (u.is_zero()) continue;
            Mat gj = gs[j].block_or_zero(0); // 1 x d0
            for (long c = 0; c < d0; ++c) rowv.at(0, c) += u * gj.at(0, c);
        }
        for (long c = 0; c < d0; ++c) proj.at(a, c) = rowv.at(0, c);
    }
    out.incl = std::move(incl);
    out.proj = std::move(proj);
    // exactness of the witnesses
    Mat check = out.proj * out.incl;
    if (!(check == Mat::identity(F, r))) throw std::logic_error("trivial summand witnesses not split");
    return out;
}

Mat compress_to_trivial(const TrivialSummand& src, const TrivialSummand& dst, const ModuleMap& f) {
    Mat f0 = f.block_or_zero(0);
    return dst.proj * (f0 * src.incl);
}

// ---------------------------------------------------------------------------
// braiding and balance
// ---------------------------------------------------------------------------

namespace {

// Global matrix (dim x dim) of a per-weight-block family on a module.
Mat assemble_global(ModPtr m, const std::map<long, Mat>& blocks, const std::map<long, long>& target_weight) {
    const auto& F = m->env()->F;
    Mat g(F, m->dim(), m->dim());
    for (const auto& [w, b] : blocks) {
        auto it = target_weight.find(w);
        long tw = it == target_weight.end() ? w : it->second;
        if (m->dim_at(w) == 0 || m->dim_at(tw) == 0) continue;
        const auto& sb = m->blocks().at(w);
        const auto& tb = m->blocks().at(tw);
        for (long i = 0; i < b.rows(); ++i)
            for (long j = 0; j < b.cols(); ++j)
                if (!b.at(i, j).is_zero()) g.at(tb[i], sb[j]) = b.at(i, j);
    }
    return g;
}

Mat global_E(ModPtr m) {
    std::map<long, Mat> blocks;
    std::map<long, long> tw;
    for (const auto& [w, blk] : m->blocks()) {
        if (const Mat* e = m->E_block(w)) {
            blocks[w] = *e;
            tw[w] = w + 2;
        }
    }
    return assemble_global(m, blocks, tw);
}

Mat global_F(ModPtr m) {
    std::map<long, Mat> blocks;
    std::map<long, long> tw;
    for (const auto& [w, blk] : m->blocks()) {
        if (const Mat* f = m->F_block(w)) {
            blocks[w] = *f;
            tw[w] = w - 2;
        }
    }
    return assemble_global(m, blocks, tw);
}

// Theta-term (op_a^n (x) op_b^n) as a global matrix on tensor(a,b); slot ops
// given by dir (+1 = E, -1 = F).
Mat global_slotpow(ModPtr T, ModPtr a, ModPtr b, int dir_a, int dir_b, long n) {
    const auto& F = T->env()->F;
    long dB = b->dim();
    Mat g(F, T->dim(), T->dim());
    for (long i = 0; i < a->dim(); ++i) {
        long wa = a->weight_of(i);
        Mat pa = a->op_power(dir_a, n, wa); // column pos_in_block(i)
        if (pa.rows() == 0) continue;
        const auto* ablk = a->blocks().count(wa + 2 * dir_a * n) ? &a->blocks().at(wa + 2 * dir_a * n) : nullptr;
        if (!ablk) continue;
        for (long j = 0; j < dB; ++j) {
            long wb = b->weight_of(j);
            Mat pb = b->op_power(dir_b, n, wb);
            if (pb.rows() == 0) continue;
            const auto* bblk = b->blocks().count(wb + 2 * dir_b * n) ? &b->blocks().at(wb + 2 * dir_b * n) : nullptr;
            if (!bblk) continue;
            long src = i * dB + j;
            long pia = a->pos_in_block(i), pjb = b->pos_in_block(j);
            for (long r1 = 0; r1 < pa.rows(); ++r1) {
                const CycloNum& v1 = pa.at(r1, pia);
                if (v1.is_zero()) continue;
                for (long r2 = 0; r2 < pb.rows(); ++r2) {
                    const CycloNum& v2 = pb.at(r2, pjb);
                    if (v2.is_zero()) continue;
                    g.at((*ablk)[r1] * dB + (*bblk)[r2], src) += v1 * v2;
                }
            }
        }
    }
    return g;
}

// weight-pairing operator f(x (x) y) = zeta^{tw * (wt x . wt y)} on tensor(a,b)
Mat global_pairing(const Engine& eng, ModPtr T, ModPtr a, ModPtr b) {
    const auto& F = T->env()->F;
    long dB = b->dim();
    long t = T->twist();
    Mat g(F, T->dim(), T->dim());
    for (long i = 0; i < a->dim(); ++i)
        for (long j = 0; j < dB; ++j) {
            Rat e = eng.weight_form(a->weight_of(i), b->weight_of(j)) * Rat(t);
            g.at(i * dB + j, i * dB + j) = eng.zeta(e);
        }
    return g;
}

// opposite comultiplication operators on tensor(a,b)
Mat global_Eop(const Engine& eng, ModPtr T, ModPtr a, ModPtr b) {
    // E'(x (x) y) = x (x) Ey + zeta^{ts wt(y)} Ex (x) y
    const auto& F = T->env()->F;
    long dB = b->dim();
    long ts = T->twist() * T->side();
    Mat g(F, T->dim(), T->dim());
    for (long i = 0; i < a->dim(); ++i) {
        long wa = a->weight_of(i);
        for (long j = 0; j < dB; ++j) {
            long wb = b->weight_of(j);
            long src = i * dB + j;
            if (const Mat* eb = b->E_block(wb)) {
                const auto& bblk = b->blocks().at(wb + 2);
                long pj = b->pos_in_block(j);
                for (long r = 0; r < eb->rows(); ++r)
                    if (!eb->at(r, pj).is_zero()) g.at(i * dB + bblk[r], src) += eb->at(r, pj);
            }
            if (const Mat* ea = a->E_block(wa)) {
                const auto& ablk = a->blocks().at(wa + 2);
                long pi = a->pos_in_block(i);
                CycloNum s = eng.zeta(ts * wb);
                for (long r = 0; r < ea->rows(); ++r)
                    if (!ea->at(r, pi).is_zero()) g.at(ablk[r] * dB + j, src) += ea->at(r, pi) * s;
            }
        }
    }
    return g;
}

Mat global_Fop(const Engine& eng, ModPtr T, ModPtr a, ModPtr b) {
    // F'(x (x) y) = zeta^{-ts wt(x)} x (x) Fy + Fx (x) y
    const auto& F = T->env()->F;
    long dB = b->dim();
    long ts = T->twist() * T->side();
    Mat g(F, T->dim(), T->dim());
    for (long i = 0; i < a->dim(); ++i) {
        long wa = a->weight_of(i);
        for (long j = 0; j < dB; ++j) {
            long wb = b->weight_of(j);
            long src = i * dB + j;
            if (const Mat* fb = b->F_block(wb)) {
                const auto& bblk = b->blocks().at(wb - 2);
                long pj = b->pos_in_block(j);
                CycloNum s = eng.zeta(-ts * wa);
                for (long r = 0; r < fb->rows(); ++r)
                    if (!fb->at(r, pj).is_zero()) g.at(i * dB + bblk[r], src) += fb->at(r, pj) * s;
            }
            if (const Mat* fa = a->F_block(wa)) {
                const auto& ablk = a->blocks().at(wa - 2);
                long pi = a->pos_in_block(i);
                for (long r = 0; r < fa->rows(); ++r)
                    if (!fa->at(r, pi).is_zero()) g.at(ablk[r] * dB + j, src) += fa->at(r, pi);
            }
        }
    }
    return g;
}

std::optional<std::vector<CycloNum>> try_solve_quasi_r(const Engine& eng, int twist, int orientation,
                                                       const std::vector<ModPtr>& test_modules) {
    const auto& F = eng.field();
    long ell = eng.ell();
    long unknowns = ell - 1;
    std::vector<Mat> lhs_cols(unknowns);
    std::vector<long> col_rows;
    // assemble stacked equations over all test pairs
    std::vector<std::vector<CycloNum>> rows_acc; // each row: unknowns coeffs + rhs
    for (ModPtr V : test_modules) {
        ModPtr T = tensor(V, V);
        Mat f = global_pairing(eng, T, V, V);
        Mat dE = global_E(T), dF = global_F(T);
        Mat dEop = global_Eop(eng, T, V, V), dFop = global_Fop(eng, T, V, V);
        std::vector<Mat> phi(unknowns + 1);
        for (long n2 = 1; n2 <= unknowns; ++n2)
            phi[n2] = orientation == 0 ? global_slotpow(T, V, V, -1, +1, n2)
                                       : global_slotpow(T, V, V, +1, -1, n2);
        for (int g = 0; g < 2; ++g) {
            const Mat& D = g == 0 ? dE : dF;
            const Mat& Dop = g == 0 ? dEop : dFop;
            Mat m0 = f * D - Dop * f;
            std::vector<Mat> mn(unknowns + 1);
            for (long n2 = 1; n2 <= unknowns; ++n2) mn[n2] = phi[n2] * (f * D) - Dop * (phi[n2] * f);
            for (long r = 0; r < T->dim(); ++r)
                for (long c = 0; c < T->dim(); ++c) {
                    bool nz = !m0.at(r, c).is_zero();
                    for (long n2 = 1; n2 <= unknowns && !nz; ++n2) nz = !mn[n2].at(r, c).is_zero();
                    if (!nz) continue;
                    std::vector<CycloNum> row;
                    for (long n2 = 1; n2 <= unknowns; ++n2) row.push_back(mn[n2].at(r, c));
                    row.push_back(-m0.at(r, c));
                    rows_acc.push_back(std::move(row));
                }
        }
    }
    if (rows_acc.empty()) return std::nullopt;
    Mat sys(F, static_cast<long>(rows_acc.size()), unknowns);
    Mat rhs(F, static_cast<long>(rows_acc.size()), 1);
    for (size_t r = 0; r < rows_acc.size(); ++r) {
        for (long n2 = 0; n2 < unknowns; ++n2) sys.at(static_cast<long>(r), n2) = rows_acc[r][n2];
        rhs.at(static_cast<long>(r), 0) = rows_acc[r][unknowns];
    }
    if (nullspace(sys).cols() != 0) return std::nullopt; // underdetermined
    auto sol = solve(sys, rhs);
    if (!sol) return std::nullopt;
    // verify residual exactly
    for (size_t r = 0; r < rows_acc.size(); ++r) {
        CycloNum acc = F->zero();
        for (long n2 = 0; n2 < unknowns; ++n2) acc += rows_acc[r][n2] * sol->at(n2, 0);
        if (!(acc == rows_acc[r][unknowns])) return std::nullopt;
    }
    std::vector<CycloNum> out;
    out.push_back(F->one());
    for (long n2 = 0; n2 < unknowns; ++n2) out.push_back(sol->at(n2, 0));
    return out;
}

} // namespace

const std::vector<CycloNum>& quasi_r_coeffs(const Engine& eng, int twist) {
    auto it = eng.quasi_r_cache_.find(twist);
    if (it != eng.quasi_r_cache_.end()) return it->second.second;
    std::vector<ModPtr> tests{eng.verma(0, twist), eng.verma(1, twist)};
    for (int orientation : {0, 1}) {
        auto sol = try_solve_quasi_r(eng, twist, orientation, tests);
        if (sol) {
            eng.quasi_r_cache_[twist] = {orientation, std::move(*sol)};
            return eng.quasi_r_cache_[twist].second;
        }
    }
    throw std::logic_error("quasi-R-matrix system has no consistent solution");
}

ModuleMap braiding(const Engine& eng, ModPtr a, ModPtr b) {
    const auto& coeffs = quasi_r_coeffs(eng, a->twist());
    int orientation = eng.quasi_r_cache_.at(a->twist()).first;
    const auto& F = eng.field();
    ModPtr Tab = tensor(a, b);
    ModPtr Tba = tensor(b, a);
    long dB = b->dim();
    long dA = a->dim();
    // build W = Theta o f on Tab, then flip into Tba
    Mat W(F, Tab->dim(), Tab->dim());
    {
        Mat f = global_pairing(eng, Tab, a, b);
        W = f;
        for (long n = 1; n < static_cast<long>(coeffs.size()); ++n) {
            if (coeffs[n].is_zero()) continue;
            Mat phi = orientation == 0 ? global_slotpow(Tab, a, b, -1, +1, n)
                                       : global_slotpow(Tab, a, b, +1, -1, n);
            W = W + (phi * f).scaled(coeffs[n]);
        }
    }
    // flip: (i,j) -> (j,i)
    ModuleMap R = ModuleMap::zero(Tab, Tba);
    for (const auto& [w, blk] : Tab->blocks()) {
        long d = static_cast<long>(blk.size());
        if (d == 0) continue;
        Mat m(F, d, d);
        for (long c = 0; c < d; ++c) {
            long src = blk[c];
            for (long cc = 0; cc < d; ++cc) {
                long mid = blk[cc];
                const CycloNum& v = W.at(mid, src);
                if (v.is_zero()) continue;
                long i = mid / dB, j = mid % dB;
                long flipped = j * dA + i;
                m.at(Tba->pos_in_block(flipped), c) += v;
            }
        }
        if (!m.is_zero()) R.blocks[w] = std::move(m);
    }
    return R;
}

ModuleMap balance_word(const Engine& eng, const std::vector<long>& lambdas, int twist) {
    if (lambdas.empty()) return ModuleMap::identity(eng.unit(twist));
    ModPtr cur = tensor_word(eng, {lambdas[0]}, twist);
    ModuleMap theta = scalar_map(cur, eng.balance_scalar(lambdas[0]));
    for (size_t k = 1; k < lambdas.size(); ++k) {
        ModPtr L = eng.simple(lambdas[k], twist);
        std::vector<long> pref(lambdas.begin(), lambdas.begin() + k + 1);
        ModPtr next = tensor_word(eng, pref, twist);
        ModuleMap thW = scalar_map(L, eng.balance_scalar(lambdas[k]));
        ModuleMap tt = map_tensor(theta, thW); // tensor(cur,L) -> tensor(cur,L)
        ModuleMap Rvw = braiding(eng, cur, L);
        ModuleMap Rwv = braiding(eng, L, cur);
        ModuleMap comp = Rwv.compose(Rvw).compose(tt);
        theta = reindex_map(comp, next, next);
        cur = next;
    }
    return theta;
}

ModuleMap word_slot_braiding(const Engine& eng, const std::vector<long>& lambdas, long k, int twist) {
    long m = static_cast<long>(lambdas.size());
    if (k < 0 || k + 1 >= m) throw std::invalid_argument("slot braiding index out of range");
    std::vector<long> swapped = lambdas;
    std::swap(swapped[k], swapped[k + 1]);
    ModPtr Vk = eng.simple(lambdas[k], twist);
    ModPtr Vk1 = eng.simple(lambdas[k + 1], twist);
    ModuleMap base = braiding(eng, Vk, Vk1);
    if (k > 0) {
        std::vector<long> pref(lambdas.begin(), lambdas.begin() + k);
        ModPtr P = tensor_word(eng, pref, twist);
        base = map_tensor(ModuleMap::identity(P), base);
    }
    for (long s = k + 2; s < m; ++s) base = map_tensor(base, ModuleMap::identity(eng.simple(lambdas[s], twist)));
    return reindex_map(base, tensor_word(eng, lambdas, twist), tensor_word(eng, swapped, twist));
}

} // namespace uqc
