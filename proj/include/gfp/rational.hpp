#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace gfp {

/// Exact rational number backed by GMP. Always kept in canonical form
/// (positive denominator, gcd(num, den) = 1) so equality is structural.
///
/// All time quantities, utilizations, densities and the density threshold
/// rho are represented with this type; no schedulability inequality is ever
/// evaluated in floating point.
class Rational {
public:
    Rational() = default;
    Rational(int v) : v_(v) {}
    Rational(long v) : v_(v) {}
    Rational(long long v) : v_(static_cast<long>(v)) {}
    Rational(unsigned long v) : v_(v) {}
    Rational(long num, long den);
    explicit Rational(const mpz_class& integer) : v_(integer) {}
    Rational(const mpz_class& num, const mpz_class& den);
    explicit Rational(mpq_class v) : v_(std::move(v)) { v_.canonicalize(); }

    /// Parses "7", "-3/4", "0.125" or "1.5e-3". Decimal input is converted
    /// exactly (0.1 == 1/10).
    static Rational parse(std::string_view text);

    /// Nearest value k/denominator to x (round half away from zero).
    static Rational snap(double x, long denominator);

    const mpz_class& numerator() const { return v_.get_num(); }
    const mpz_class& denominator() const { return v_.get_den(); }
    const mpq_class& raw() const { return v_; }

    int sign() const { return sgn(v_); }
    bool is_zero() const { return sign() == 0; }
    bool is_integer() const { return v_.get_den() == 1; }

    mpz_class floor() const;
    mpz_class ceil() const;

    double to_double() const { return v_.get_d(); }

    /// "p/q", or "p" when the denominator is one.
    std::string str() const;
    /// Exact decimal when the denominator only has factors 2 and 5,
    /// otherwise the "p/q" form. Never loses information.
    std::string exact_decimal() const;

    Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
    Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
    Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
    Rational& operator/=(const Rational& o);

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
    friend Rational operator-(const Rational& a) { return Rational(mpq_class(-a.v_)); }

    friend bool operator==(const Rational& a, const Rational& b) { return cmp(a.v_, b.v_) == 0; }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b)
    {
        const int c = cmp(a.v_, b.v_);
        return c < 0 ? std::strong_ordering::less
                     : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
    }

    friend void swap(Rational& a, Rational& b) noexcept { a.v_.swap(b.v_); }

private:
    mpq_class v_;
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

inline const Rational& min(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline const Rational& max(const Rational& a, const Rational& b) { return a < b ? b : a; }

/// floor(a / b) for b > 0.
mpz_class floor_div(const Rational& a, const Rational& b);
/// ceil(a / b) for b > 0.
mpz_class ceil_div(const Rational& a, const Rational& b);

/// Least common multiple of two positive rationals: the smallest positive
/// rational that is an integer multiple of both.
Rational lcm(const Rational& a, const Rational& b);

/// Converts to int64 if the value is an integer that fits, otherwise false.
bool to_int64(const mpz_class& z, std::int64_t& out);

} // namespace gfp
