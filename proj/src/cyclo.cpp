#include "uqc/cyclo.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace uqc {

long euler_phi(long n) {
    long result = n;
    long m = n;
    for (long p = 2; p * p <= m; ++p) {
        if (m % p == 0) {
            while (m % p == 0) m /= p;
            result -= result / p;
        }
    }
    if (m > 1) result -= result / m;
    return result;
}

namespace {

// Divide a by b in Z[x], both monic-friendly; division must be exact.
std::vector<Int> poly_div_exact(std::vector<Int> a, const std::vector<Int>& b) {
    std::vector<Int> q(a.size() >= b.size() ? a.size() - b.size() + 1 : 0, Int(0));
    while (a.size() >= b.size()) {
        size_t da = a.size() - 1, db = b.size() - 1;
        if (a[da] == 0) {
            a.pop_back();
            continue;
        }
        Int c = a[da] / b[db];
        if (c * b[db] != a[da]) throw std::logic_error("non-exact cyclotomic division");
        q[da - db] = c;
        for (size_t i = 0; i <= db; ++i) a[da - db + i] -= c * b[i];
        while (!a.empty() && a.back() == 0) a.pop_back();
        if (a.empty()) break;
    }
    for (auto& x : a)
        if (x != 0) throw std::logic_error("non-exact cyclotomic division (remainder)");
    while (!q.empty() && q.back() == 0) q.pop_back();
    return q;
}

std::vector<Int> cyclotomic_poly(long n) {
    // Phi_n = (x^n - 1) / prod_{d | n, d < n} Phi_d
    std::vector<Int> num(n + 1, Int(0));
    num[0] = -1;
    num[n] = 1;
    for (long d = 1; d < n; ++d) {
        if (n % d != 0) continue;
        num = poly_div_exact(std::move(num), cyclotomic_poly(d));
    }
    return num;
}

} // namespace

CycloContext::CycloContext(long order) : order_(order) {
    if (order < 1) throw std::invalid_argument("cyclotomic order must be positive");
    phi_ = cyclotomic_poly(order);
    degree_ = static_cast<long>(phi_.size()) - 1;

    // Reduction rows: x^{degree+j} mod Phi, enough for products of two reduced
    // polynomials (degree <= 2*degree-2).
    red_.resize(degree_ > 0 ? degree_ - 1 : 0);
    std::vector<Rat> prev(degree_, Rat(0));
    // x^degree = -(phi_0 + phi_1 x + ...)
    for (long i = 0; i < degree_; ++i) prev[i] = Rat(-phi_[i]);
    for (long j = 0; j < degree_ - 1; ++j) {
        red_[j] = prev;
        // next = x * prev reduced
        std::vector<Rat> nxt(degree_, Rat(0));
        Rat top = prev[degree_ - 1];
        for (long i = degree_ - 1; i >= 1; --i) nxt[i] = prev[i - 1];
        nxt[0] = 0;
        if (top != 0)
            for (long i = 0; i < degree_; ++i) nxt[i] += top * Rat(-phi_[i]);
        prev = std::move(nxt);
    }

    root_pow_.resize(order_);
    std::vector<Rat> cur(degree_, Rat(0));
    cur[0] = 1;
    for (long k = 0; k < order_; ++k) {
        root_pow_[k] = cur;
        // multiply by x
        std::vector<Rat> nxt(degree_, Rat(0));
        Rat top = degree_ >= 1 ? cur[degree_ - 1] : Rat(0);
        for (long i = degree_ - 1; i >= 1; --i) nxt[i] = cur[i - 1];
        if (degree_ >= 1) nxt[0] = 0;
        if (top != 0)
            for (long i = 0; i < degree_; ++i) nxt[i] += top * Rat(-phi_[i]);
        cur = std::move(nxt);
    }
}

std::shared_ptr<const CycloContext> CycloContext::make(long order) {
    return std::shared_ptr<const CycloContext>(new CycloContext(order));
}

CycloNum CycloContext::root_power(long k) const {
    long r = k % order_;
    if (r < 0) r += order_;
    return CycloNum(shared_from_this(), root_pow_[r]);
}

CycloNum CycloContext::zero() const {
    return CycloNum(shared_from_this(), std::vector<Rat>(degree_, Rat(0)));
}

CycloNum CycloContext::one() const { return from_rat(Rat(1)); }

CycloNum CycloContext::from_rat(const Rat& r) const {
    std::vector<Rat> c(degree_, Rat(0));
    if (degree_ > 0) c[0] = r;
    return CycloNum(shared_from_this(), std::move(c));
}

CycloNum::CycloNum(std::shared_ptr<const CycloContext> ctx, std::vector<Rat> coeffs)
    : ctx_(std::move(ctx)), c_(std::move(coeffs)) {
    if (static_cast<long>(c_.size()) != ctx_->degree())
        throw std::invalid_argument("cyclotomic coefficient vector has wrong length");
}

void CycloNum::check_same(const CycloNum& o) const {
    if (!ctx_ || !o.ctx_) throw std::logic_error("arithmetic on invalid CycloNum");
    if (ctx_->order() != o.ctx_->order())
        throw std::invalid_argument("cyclotomic order mismatch: " + std::to_string(ctx_->order()) +
                                    " vs " + std::to_string(o.ctx_->order()));
}

bool CycloNum::is_zero() const {
    for (const auto& x : c_)
        if (x != 0) return false;
    return true;
}

bool CycloNum::is_one() const {
    if (c_.empty() || c_[0] != 1) return false;
    for (size_t i = 1; i < c_.size(); ++i)
        if (c_[i] != 0) return false;
    return true;
}

bool CycloNum::is_rational(Rat* out) const {
    for (size_t i = 1; i < c_.size(); ++i)
        if (c_[i] != 0) return false;
    if (out) *out = c_.empty() ? Rat(0) : c_[0];
    return true;
}

CycloNum CycloNum::operator+(const CycloNum& o) const {
    CycloNum r = *this;
    r += o;
    return r;
}

CycloNum CycloNum::operator-(const CycloNum& o) const {
    CycloNum r = *this;
    r -= o;
    return r;
}

CycloNum CycloNum::operator-() const {
    CycloNum r = *this;
    for (auto& x : r.c_) x = -x;
    return r;
}

CycloNum& CycloNum::operator+=(const CycloNum& o) {
    check_same(o);
    for (size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
}

CycloNum& CycloNum::operator-=(const CycloNum& o) {
    check_same(o);
    for (size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
}

CycloNum CycloNum::operator*(const CycloNum& o) const {
    check_same(o);
    long d = ctx_->degree();
    if (is_zero() || o.is_zero()) return ctx_->zero();
    std::vector<Rat> prod(2 * d - 1, Rat(0));
    for (long i = 0; i < d; ++i) {
        if (c_[i] == 0) continue;
        for (long j = 0; j < d; ++j) {
            if (o.c_[j] == 0) continue;
            prod[i + j] += c_[i] * o.c_[j];
        }
    }
    std::vector<Rat> out(prod.begin(), prod.begin() + d);
    for (long j = 0; j < d - 1; ++j) {
        if (prod[d + j] == 0) continue;
        const auto& row = ctx_->red_[j];
        for (long i = 0; i < d; ++i)
            if (row[i] != 0) out[i] += prod[d + j] * row[i];
    }
    return CycloNum(ctx_, std::move(out));
}

CycloNum& CycloNum::operator*=(const CycloNum& o) {
    *this = *this * o;
    return *this;
}

CycloNum CycloNum::scaled(const Rat& r) const {
    CycloNum out = *this;
    for (auto& x : out.c_) x *= r;
    return out;
}

CycloNum CycloNum::inv() const {
    if (is_zero()) throw std::domain_error("division by zero in Q(zeta)");
    long d = ctx_->degree();
    // Extended Euclid in Q[x] for (this, Phi_M): a*this + b*Phi = 1.
    using Poly = std::vector<Rat>;
    auto deg = [](const Poly& p) {
        long i = static_cast<long>(p.size()) - 1;
        while (i >= 0 && p[i] == 0) --i;
        return i;
    };
    Poly r0(ctx_->phi_.size());
    for (size_t i = 0; i < ctx_->phi_.size(); ++i) r0[i] = Rat(ctx_->phi_[i]);
    Poly r1(c_.begin(), c_.end());
    Poly s0{Rat(0)}, s1{Rat(1)}; // coefficients of `this` in the combination
    while (true) {
        long d1 = deg(r1);
        if (d1 < 0) throw std::logic_error("cyclotomic inverse: element not invertible");
        if (d1 == 0) break;
        long d0 = deg(r0);
        if (d0 < d1) {
            std::swap(r0, r1);
            std::swap(s0, s1);
            continue;
        }
        // r0 -= (lead/lead) x^{d0-d1} r1 ; same on s
        Rat f = r0[d0] / r1[d1];
        long sh = d0 - d1;
        if (static_cast<long>(s0.size()) < static_cast<long>(s1.size()) + sh)
            s0.resize(s1.size() + sh, Rat(0));
        for (long i = 0; i <= d1; ++i) r0[i + sh] -= f * r1[i];
        for (size_t i = 0; i < s1.size(); ++i) s0[i + sh] -= f * s1[i];
    }
    // r1 is a nonzero constant c: inverse = s1 / c reduced mod Phi.
    Rat cst = r1[deg(r1)];
    std::vector<Rat> out(d, Rat(0));
    // s1 may have degree >= d; reduce properly by folding with root powers.
    CycloNum acc = ctx_->zero();
    for (size_t i = 0; i < s1.size(); ++i) {
        if (s1[i] == 0) continue;
        acc += ctx_->root_power(static_cast<long>(i) % ctx_->order()).scaled(s1[i] / cst);
        // note: s1 degree stays < deg Phi + deg Phi in practice; i < order holds
    }
    out = acc.coeffs();
    return CycloNum(ctx_, std::move(out));
}

CycloNum CycloNum::pow(long e) const {
    if (e == 0) return ctx_->one();
    CycloNum base = e > 0 ? *this : inv();
    unsigned long k = static_cast<unsigned long>(e > 0 ? e : -e);
    CycloNum acc = ctx_->one();
    while (k) {
        if (k & 1) acc *= base;
        base *= base;
        k >>= 1;
    }
    return acc;
}

CycloNum CycloNum::galois(long k) const {
    long M = ctx_->order();
    long kk = imod(k, M);
    if (std::gcd(kk, M) != 1) throw std::invalid_argument("galois exponent not coprime to order");
    CycloNum acc = ctx_->zero();
    for (long i = 0; i < ctx_->degree(); ++i) {
        if (c_[i] == 0) continue;
        acc += ctx_->root_power(imod(i * kk, M)).scaled(c_[i]);
    }
    return acc;
}

bool CycloNum::operator==(const CycloNum& o) const {
    check_same(o);
    return c_ == o.c_;
}

std::string CycloNum::str() const {
    std::ostringstream os;
    bool first = true;
    for (long i = 0; i < ctx_->degree(); ++i) {
        if (c_[i] == 0) continue;
        if (!first) os << " + ";
        os << c_[i].get_str();
        if (i >= 1) os << "*z" << (i > 1 ? "^" + std::to_string(i) : "");
        first = false;
    }
    if (first) os << "0";
    return os.str();
}

double CycloNum::approx_re() const {
    double re = 0;
    for (long i = 0; i < ctx_->degree(); ++i)
        re += c_[i].get_d() * std::cos(2 * M_PI * i / ctx_->order());
    return re;
}

double CycloNum::approx_im() const {
    double im = 0;
    for (long i = 0; i < ctx_->degree(); ++i)
        im += c_[i].get_d() * std::sin(2 * M_PI * i / ctx_->order());
    return im;
}

CycloNum zeta_pow(const std::shared_ptr<const CycloContext>& ctx, long l, long num, long den) {
    if (den <= 0) throw std::invalid_argument("zeta_pow: denominator must be positive");
    long M = ctx->order();
    if (M % (l * den) != 0)
        throw std::domain_error("unrepresentable exponent: M=" + std::to_string(M) +
                                ", l=" + std::to_string(l) + ", den=" + std::to_string(den));
    long step = M / (l * den);
    return ctx->root_power(imod(num, l * den) * step % M);
}

CycloNum zeta_pow(const std::shared_ptr<const CycloContext>& ctx, long l, const Rat& e) {
    if (!e.get_den().fits_slong_p() || !e.get_num().fits_slong_p())
        throw std::domain_error("zeta_pow: exponent out of range");
    return zeta_pow(ctx, l, e.get_num().get_si(), e.get_den().get_si());
}

} // namespace uqc
