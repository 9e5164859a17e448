#include "uqc/rootdata.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

namespace uqc {

Weight operator+(const Weight& a, const Weight& b) {
    Weight r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

Weight operator-(const Weight& a, const Weight& b) {
    Weight r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

Weight operator-(const Weight& a) {
    Weight r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = -a[i];
    return r;
}

Weight operator*(long c, const Weight& a) {
    Weight r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = c * a[i];
    return r;
}

namespace {

// Exact rational determinant / solve for the small rank x rank systems here.
Rat det_rat(std::vector<std::vector<Rat>> m) {
    long n = static_cast<long>(m.size());
    Rat det(1);
    for (long c = 0; c < n; ++c) {
        long piv = -1;
        for (long r = c; r < n; ++r)
            if (m[r][c] != 0) {
                piv = r;
                break;
            }
        if (piv < 0) return Rat(0);
        if (piv != c) {
            std::swap(m[piv], m[c]);
            det = -det;
        }
        det *= m[c][c];
        for (long r = c + 1; r < n; ++r) {
            if (m[r][c] == 0) continue;
            Rat f = m[r][c] / m[c][c];
            for (long j = c; j < n; ++j) m[r][j] -= f * m[c][j];
        }
    }
    return det;
}

// Solve M x = b exactly; M square invertible (rank is tiny).
std::vector<Rat> solve_rat(std::vector<std::vector<Rat>> m, std::vector<Rat> b) {
    long n = static_cast<long>(m.size());
    for (long c = 0; c < n; ++c) {
        long piv = -1;
        for (long r = c; r < n; ++r)
            if (m[r][c] != 0) {
                piv = r;
                break;
            }
        if (piv < 0) throw std::logic_error("singular system in root datum");
        std::swap(m[piv], m[c]);
        std::swap(b[piv], b[c]);
        for (long r = 0; r < n; ++r) {
            if (r == c || m[r][c] == 0) continue;
            Rat f = m[r][c] / m[c][c];
            for (long j = 0; j < n; ++j) m[r][j] -= f * m[c][j];
            b[r] -= f * b[c];
        }
    }
    std::vector<Rat> x(n);
    for (long i = 0; i < n; ++i) x[i] = b[i] / m[i][i];
    return x;
}

} // namespace

RootDatum::RootDatum(std::vector<std::vector<long>> cartan, std::vector<long> d, long l)
    : rank_(static_cast<long>(cartan.size())), l_(l), d_(std::move(d)), cartan_(std::move(cartan)) {
    if (l_ < 2) throw std::invalid_argument("root-of-unity order l must be >= 2");
    if (static_cast<long>(d_.size()) != rank_) throw std::invalid_argument("symmetrizer length mismatch");
    for (long i = 0; i < rank_; ++i) {
        if (static_cast<long>(cartan_[i].size()) != rank_) throw std::invalid_argument("cartan matrix not square");
        if (cartan_[i][i] != 2) throw std::invalid_argument("cartan diagonal must be 2");
        for (long j = 0; j < rank_; ++j)
            if (d_[i] * cartan_[i][j] != d_[j] * cartan_[j][i])
                throw std::invalid_argument("d_i a_ij not symmetric");
    }

    ell_ = (l_ % 2 == 0) ? l_ / 2 : l_;
    ell_i_.resize(rank_);
    for (long i = 0; i < rank_; ++i) ell_i_[i] = ell_ / std::gcd(ell_, d_[i]);

    std::vector<std::vector<Rat>> A(rank_, std::vector<Rat>(rank_));
    for (long i = 0; i < rank_; ++i)
        for (long j = 0; j < rank_; ++j) A[i][j] = Rat(cartan_[i][j]);
    Rat dA = det_rat(A);
    if (dA == 0) throw std::invalid_argument("cartan matrix is singular");
    Int num = dA.get_num();
    detA_ = std::abs(num.get_si());

    // Form on X: A^T G = D, so column k of G solves A^T g_k = d_k e_k.
    std::vector<std::vector<Rat>> At(rank_, std::vector<Rat>(rank_));
    for (long i = 0; i < rank_; ++i)
        for (long j = 0; j < rank_; ++j) At[i][j] = Rat(cartan_[j][i]);
    form_.assign(rank_, std::vector<Rat>(rank_));
    for (long k = 0; k < rank_; ++k) {
        std::vector<Rat> e(rank_, Rat(0));
        e[k] = Rat(d_[k]);
        auto g = solve_rat(At, e);
        for (long i = 0; i < rank_; ++i) form_[i][k] = g[i];
    }

    rho_.assign(rank_, 1);
    rho_ell_.resize(rank_);
    for (long i = 0; i < rank_; ++i) rho_ell_[i] = ell_i_[i] - 1;

    enumerate_roots();
}

RootDatum RootDatum::sl2(long l) { return RootDatum({{2}}, {1}, l); }

Weight RootDatum::simple_root(long i) const {
    Weight w(rank_);
    for (long j = 0; j < rank_; ++j) w[j] = cartan_[j][i];
    return w;
}

Rat RootDatum::form(const Weight& a, const Weight& b) const {
    Rat s(0);
    for (long i = 0; i < rank_; ++i) {
        if (a[i] == 0) continue;
        for (long j = 0; j < rank_; ++j) {
            if (b[j] == 0) continue;
            s += Rat(a[i]) * form_[i][j] * Rat(b[j]);
        }
    }
    return s;
}

void RootDatum::enumerate_roots() {
    // Positive roots in simple-root coordinates, by reflection closure.
    std::set<std::vector<long>> pos;
    std::vector<std::vector<long>> queue;
    for (long i = 0; i < rank_; ++i) {
        std::vector<long> e(rank_, 0);
        e[i] = 1;
        pos.insert(e);
        queue.push_back(e);
    }
    size_t guard = 0;
    while (!queue.empty()) {
        if (++guard > 100000) throw std::invalid_argument("cartan matrix is not of finite type");
        auto beta = queue.back();
        queue.pop_back();
        for (long i = 0; i < rank_; ++i) {
            long p = 0; // <i, beta'> = sum_j a_ij c_j
            for (long j = 0; j < rank_; ++j) p += cartan_[i][j] * beta[j];
            auto refl = beta;
            refl[i] -= p;
            bool nonneg = true;
            for (long j = 0; j < rank_; ++j) nonneg = nonneg && refl[j] >= 0;
            if (nonneg && !pos.count(refl)) {
                pos.insert(refl);
                queue.push_back(refl);
            }
        }
    }

    auto height = [](const std::vector<long>& c) { return std::accumulate(c.begin(), c.end(), 0L); };
    auto d_of = [&](const std::vector<long>& c) {
        // half square length of the root beta = sum c_i alpha_i:
        // (beta,beta)/2 = sum_{i,j} c_i c_j d_i a_ij / 2
        long s = 0;
        for (long i = 0; i < rank_; ++i)
            for (long j = 0; j < rank_; ++j) s += c[i] * c[j] * d_[i] * cartan_[i][j];
        return s / 2;
    };
    auto coroot_of = [&](const std::vector<long>& c) {
        long db = d_of(c);
        std::vector<long> cv(rank_);
        for (long i = 0; i < rank_; ++i) {
            long num = c[i] * d_[i];
            if (num % db != 0) throw std::logic_error("coroot coordinates not integral");
            cv[i] = num / db;
        }
        return cv;
    };

    // highest root: maximal height
    std::vector<long> highest_root;
    long hmax = -1;
    for (const auto& c : pos)
        if (height(c) > hmax) {
            hmax = height(c);
            highest_root = c;
        }
    beta0_ = coroot_of(highest_root);
    ell_beta0_ = ell_ / std::gcd(ell_, d_of(highest_root));

    // highest coroot: maximal-height element of the dual root system
    std::vector<long> best;
    long chmax = -1;
    for (const auto& c : pos) {
        auto cv = coroot_of(c);
        long h = height(cv);
        if (h > chmax) {
            chmax = h;
            best = cv;
        }
    }
    gamma0_ = best;
}

long RootDatum::pair_gamma0(const Weight& w) const {
    long s = 0;
    for (long i = 0; i < rank_; ++i) s += gamma0_[i] * w[i];
    return s;
}

long RootDatum::pair_beta0(const Weight& w) const {
    long s = 0;
    for (long i = 0; i < rank_; ++i) s += beta0_[i] * w[i];
    return s;
}

bool RootDatum::in_Y(const Weight& w) const {
    // w = sum c_i i' with integer c: coordinates give A^T c = w.
    std::vector<std::vector<Rat>> At(rank_, std::vector<Rat>(rank_));
    for (long i = 0; i < rank_; ++i)
        for (long j = 0; j < rank_; ++j) At[i][j] = Rat(cartan_[j][i]);
    std::vector<Rat> b(rank_);
    for (long i = 0; i < rank_; ++i) b[i] = Rat(w[i]);
    auto c = solve_rat(At, b);
    for (const auto& x : c)
        if (!is_integer(x)) return false;
    return true;
}

bool RootDatum::in_lY(const Weight& w) const {
    std::vector<std::vector<Rat>> At(rank_, std::vector<Rat>(rank_));
    for (long i = 0; i < rank_; ++i)
        for (long j = 0; j < rank_; ++j) At[i][j] = Rat(cartan_[j][i]);
    std::vector<Rat> b(rank_);
    for (long i = 0; i < rank_; ++i) b[i] = Rat(w[i], l_);
    auto c = solve_rat(At, b);
    for (const auto& x : c)
        if (!is_integer(x)) return false;
    return true;
}

bool RootDatum::in_Ystar_ell(const Weight& w) const {
    // w . omega_j in ell Z for all j
    for (long j = 0; j < rank_; ++j) {
        Rat s(0);
        for (long i = 0; i < rank_; ++i)
            if (w[i] != 0) s += Rat(w[i]) * form_[i][j];
        s /= Rat(ell_);
        if (!is_integer(s)) return false;
    }
    return true;
}

WeightBag WeightBag::from_unfolding(std::vector<Weight> pi) {
    WeightBag b;
    for (const auto& w : pi) b.mult[w] += 1;
    b.unfolding = std::move(pi);
    return b;
}

Weight WeightBag::collapse(long rank) const {
    Weight s(rank, 0);
    for (const auto& [w, m] : mult) s = s + m * w;
    return s;
}

long WeightBag::size() const {
    long s = 0;
    for (const auto& [w, m] : mult) s += m;
    return s;
}

bool WeightBag::consistent() const {
    if (!unfolding) return true;
    std::map<Weight, long> count;
    for (const auto& w : *unfolding) count[w] += 1;
    return count == mult;
}

Rat balance_n(const RootDatum& rd, const Weight& mu, Convention conv) {
    Weight nu0 = (conv == Convention::OddChapter1) ? rd.rho() : -rd.rho_ell();
    return rd.form(mu, mu) / 2 + rd.form(mu, nu0);
}

bool cocycle_check(const RootDatum& rd, const Weight& mu, const Weight& nu, Convention conv) {
    return balance_n(rd, mu + nu, conv) == balance_n(rd, mu, conv) + balance_n(rd, nu, conv) + rd.form(mu, nu);
}

bool is_admissible_bag(const RootDatum& rd, const WeightBag& bag, Convention conv) {
    Weight a = bag.collapse(rd.rank());
    if (conv == Convention::OddChapter1) return rd.in_lY(a + 2 * rd.rho());
    return rd.in_Ystar_ell(a - 2 * rd.rho_ell());
}

bool is_admissible_pair(const RootDatum& rd, const std::vector<Weight>& mus,
                        const std::vector<long>& alpha, Convention conv) {
    Weight s = rd.zero();
    for (const auto& m : mus) s = s + m;
    for (long i = 0; i < rd.rank(); ++i) s = s - alpha[i] * rd.simple_root(i);
    if (conv == Convention::OddChapter1) return rd.in_lY(s + 2 * rd.rho());
    return rd.in_Ystar_ell(s - 2 * rd.rho_ell());
}

std::optional<std::vector<long>> alpha_of_mu(const RootDatum& rd, const std::vector<Weight>& mus) {
    Weight x = rd.zero();
    for (const auto& m : mus) x = x + m;
    x = x + (1 - rd.l()) * (2 * rd.rho());
    // x = sum c_i i' with c in N?
    std::vector<std::vector<Rat>> At(rd.rank(), std::vector<Rat>(rd.rank()));
    for (long i = 0; i < rd.rank(); ++i)
        for (long j = 0; j < rd.rank(); ++j) At[i][j] = Rat(rd.cartan()[j][i]);
    std::vector<Rat> b(rd.rank());
    for (long i = 0; i < rd.rank(); ++i) b[i] = Rat(x[i]);
    std::vector<Rat> c;
    try {
        c = solve_rat(At, b);
    } catch (const std::logic_error&) {
        return std::nullopt;
    }
    std::vector<long> out(rd.rank());
    for (long i = 0; i < rd.rank(); ++i) {
        if (!is_integer(c[i]) || c[i] < 0) return std::nullopt;
        out[i] = static_cast<long>(c[i].get_num().get_si());
    }
    return out;
}

bool in_first_alcove(const RootDatum& rd, const Weight& lambda) {
    Weight lr = lambda + rd.rho();
    for (long i = 0; i < rd.rank(); ++i)
        if (rd.pair(i, lr) <= 0) return false;
    if (rd.l() % 2 != 0) return rd.pair_gamma0(lr) < rd.l();
    bool all_ell = true;
    for (long i = 0; i < rd.rank(); ++i) all_ell = all_ell && rd.ell_i(i) == rd.ell();
    if (all_ell) return rd.pair_gamma0(lr) < rd.ell();
    return rd.pair_beta0(lr) < rd.ell_beta0();
}

std::vector<long> first_alcove_sl2(const RootDatum& rd) {
    if (rd.rank() != 1) throw std::invalid_argument("alcove scan is rank 1 only");
    std::vector<long> out;
    for (long w = -2 * rd.l(); w <= 2 * rd.l(); ++w)
        if (in_first_alcove(rd, Weight{w})) out.push_back(w);
    return out;
}

Weight steinberg_weight(const RootDatum& rd) { return rd.rho_ell(); }

bool admissibility_conventions_disagree(const RootDatum& rd, const WeightBag& bag) {
    return is_admissible_bag(rd, bag, Convention::OddChapter1) !=
           is_admissible_bag(rd, bag, Convention::GeneralChapter4);
}

} // namespace uqc
