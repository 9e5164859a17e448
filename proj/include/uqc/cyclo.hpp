#pragma once

#include "uqc/rational.hpp"

#include <memory>
#include <vector>

namespace uqc {

class CycloNum;

/// Shared data for the cyclotomic field Q(zeta_M): the cyclotomic polynomial
/// Phi_M, reduction rows for x^k with k >= deg Phi_M, and the table of reduced
/// powers of zeta_M. One context is created per engine instance; every scalar
/// in a computation shares it.
class CycloContext : public std::enable_shared_from_this<CycloContext> {
public:
    static std::shared_ptr<const CycloContext> make(long order);

    long order() const { return order_; }
    long degree() const { return degree_; } // = Euler phi(order)

    /// zeta_M^k, k arbitrary integer (reduced mod order).
    CycloNum root_power(long k) const;
    CycloNum zero() const;
    CycloNum one() const;
    CycloNum from_rat(const Rat& r) const;

    /// Coefficients of Phi_M (monic, ascending degree).
    const std::vector<Int>& phi_poly() const { return phi_; }

private:
    explicit CycloContext(long order);

    long order_;
    long degree_;
    std::vector<Int> phi_;                     // Phi_M, monic, size degree_+1
    std::vector<std::vector<Rat>> red_;        // red_[j] = x^{degree_+j} mod Phi_M
    std::vector<std::vector<Rat>> root_pow_;   // x^k mod Phi_M, k in [0, order)

    friend class CycloNum;
};

/// Exact element of Q(zeta_M), stored in the canonical reduced form modulo
/// Phi_M. Equality is coefficient equality. Values are immutable in spirit:
/// all operations return fresh values.
class CycloNum {
public:
    CycloNum() = default; // invalid sentinel; any arithmetic on it throws
    CycloNum(std::shared_ptr<const CycloContext> ctx, std::vector<Rat> coeffs);

    bool valid() const { return ctx_ != nullptr; }
    const std::shared_ptr<const CycloContext>& context() const { return ctx_; }
    long order() const { return ctx_->order(); }
    const std::vector<Rat>& coeffs() const { return c_; }

    bool is_zero() const;
    bool is_one() const;
    bool is_rational(Rat* out = nullptr) const;

    CycloNum operator+(const CycloNum& o) const;
    CycloNum operator-(const CycloNum& o) const;
    CycloNum operator-() const;
    CycloNum operator*(const CycloNum& o) const;
    CycloNum& operator+=(const CycloNum& o);
    CycloNum& operator-=(const CycloNum& o);
    CycloNum& operator*=(const CycloNum& o);
    CycloNum scaled(const Rat& r) const;

    /// Multiplicative inverse; throws on zero.
    CycloNum inv() const;
    CycloNum pow(long e) const;

    /// Field automorphism zeta_M -> zeta_M^k, gcd(k, M) = 1.
    CycloNum galois(long k) const;

    bool operator==(const CycloNum& o) const;
    bool operator!=(const CycloNum& o) const { return !(*this == o); }

    std::string str() const;   // human-readable polynomial in z = zeta_M
    double approx_re() const;  // non-authoritative decimal rendering (CLI only)
    double approx_im() const;

private:
    void check_same(const CycloNum& o) const;

    std::shared_ptr<const CycloContext> ctx_;
    std::vector<Rat> c_; // size ctx_->degree()
};

/// zeta^{num/den} for zeta the primitive l-th root realized inside Q(zeta_M):
/// returns zeta_M^{num*M/(l*den)}. Requires l*den | M ("unrepresentable
/// exponent" error otherwise).
CycloNum zeta_pow(const std::shared_ptr<const CycloContext>& ctx, long l, long num, long den);
CycloNum zeta_pow(const std::shared_ptr<const CycloContext>& ctx, long l, const Rat& e);

long euler_phi(long n);

} // namespace uqc
