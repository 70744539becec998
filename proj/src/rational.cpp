#include "gfp/rational.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <ostream>

#include "gfp/error.hpp"

namespace gfp {

std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::InvalidTask: return "INVALID_TASK";
    case ErrorCode::InvalidSystem: return "INVALID_SYSTEM";
    case ErrorCode::EmptyTaskList: return "EMPTY_TASK_LIST";
    case ErrorCode::IndexOutOfRange: return "INDEX_OUT_OF_RANGE";
    case ErrorCode::HyperperiodOverflow: return "HYPERPERIOD_OVERFLOW";
    case ErrorCode::PolicyMismatch: return "POLICY_MISMATCH";
    case ErrorCode::UtilizationOverload: return "UTILIZATION_OVERLOAD";
    case ErrorCode::Precondition: return "PRECONDITION";
    case ErrorCode::HorizonOverflow: return "HORIZON_OVERFLOW";
    case ErrorCode::ResampleLimit: return "RESAMPLE_LIMIT";
    case ErrorCode::ParseError: return "PARSE_ERROR";
    }
    return "UNKNOWN";
}

Rational::Rational(long num, long den) : v_(num, den)
{
    if (den == 0)
        throw Error(ErrorCode::InvalidArgument, "zero denominator");
    v_.canonicalize();
}

Rational::Rational(const mpz_class& num, const mpz_class& den) : v_(num, den)
{
    if (den == 0)
        throw Error(ErrorCode::InvalidArgument, "zero denominator");
    v_.canonicalize();
}

Rational& Rational::operator/=(const Rational& o)
{
    if (o.is_zero())
        throw Error(ErrorCode::InvalidArgument, "division by zero");
    v_ /= o.v_;
    return *this;
}

namespace {

bool parse_integer(std::string_view s, mpz_class& out)
{
    if (s.empty())
        return false;
    std::size_t pos = 0;
    if (s[0] == '+' || s[0] == '-')
        pos = 1;
    if (pos == s.size())
        return false;
    for (std::size_t i = pos; i < s.size(); ++i)
        if (s[i] < '0' || s[i] > '9')
            return false;
    const std::string digits(s[0] == '+' ? s.substr(1) : s);
    return out.set_str(digits, 10) == 0;
}

mpz_class pow10(unsigned long e)
{
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), 10, e);
    return r;
}

} // namespace

Rational Rational::parse(std::string_view text)
{
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front())))
        text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())))
        text.remove_suffix(1);
    if (text.empty())
        throw Error(ErrorCode::ParseError, "empty number");

    const auto bad = [&] { return Error(ErrorCode::ParseError, "not a rational: '" + std::string(text) + "'"); };

    if (const auto slash = text.find('/'); slash != std::string_view::npos) {
        mpz_class num, den;
        if (!parse_integer(text.substr(0, slash), num) || !parse_integer(text.substr(slash + 1), den) || den == 0)
            throw bad();
        return Rational(num, den);
    }

    std::string_view mantissa = text;
    long exponent = 0;
    if (const auto e = text.find_first_of("eE"); e != std::string_view::npos) {
        mpz_class ez;
        if (!parse_integer(text.substr(e + 1), ez) || !ez.fits_slong_p())
            throw bad();
        exponent = ez.get_si();
        mantissa = text.substr(0, e);
    }

    std::string digits;
    long frac_digits = 0;
    bool seen_dot = false;
    for (std::size_t i = 0; i < mantissa.size(); ++i) {
        const char c = mantissa[i];
        if (c == '.') {
            if (seen_dot)
                throw bad();
            seen_dot = true;
        } else if ((c == '-' || c == '+') && i == 0) {
            if (c == '-')
                digits.push_back('-');
        } else if (c >= '0' && c <= '9') {
            digits.push_back(c);
            if (seen_dot)
                ++frac_digits;
        } else {
            throw bad();
        }
    }
    mpz_class num;
    if (!parse_integer(digits, num))
        throw bad();
    const long scale = exponent - frac_digits;
    if (scale >= 0)
        return Rational(mpz_class(num * pow10(static_cast<unsigned long>(scale))), mpz_class(1));
    return Rational(num, pow10(static_cast<unsigned long>(-scale)));
}

Rational Rational::snap(double x, long denominator)
{
    if (!std::isfinite(x) || denominator <= 0)
        throw Error(ErrorCode::InvalidArgument, "cannot snap non-finite value");
    const double scaled = std::round(x * static_cast<double>(denominator));
    if (std::fabs(scaled) > static_cast<double>(std::numeric_limits<long>::max() / 2))
        throw Error(ErrorCode::InvalidArgument, "value too large to snap");
    return Rational(static_cast<long>(scaled), denominator);
}

mpz_class Rational::floor() const
{
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), v_.get_num_mpz_t(), v_.get_den_mpz_t());
    return q;
}

mpz_class Rational::ceil() const
{
    mpz_class q;
    mpz_cdiv_q(q.get_mpz_t(), v_.get_num_mpz_t(), v_.get_den_mpz_t());
    return q;
}

std::string Rational::str() const
{
    if (is_integer())
        return v_.get_num().get_str();
    return v_.get_num().get_str() + "/" + v_.get_den().get_str();
}

std::string Rational::exact_decimal() const
{
    mpz_class den = v_.get_den();
    unsigned long twos = 0, fives = 0;
    while (mpz_divisible_ui_p(den.get_mpz_t(), 2)) {
        den /= 2;
        ++twos;
    }
    while (mpz_divisible_ui_p(den.get_mpz_t(), 5)) {
        den /= 5;
        ++fives;
    }
    if (den != 1)
        return str();
    const unsigned long places = std::max(twos, fives);
    if (places == 0)
        return v_.get_num().get_str();

    mpz_class scaled = v_.get_num() * pow10(places) / v_.get_den();
    const bool negative = scaled < 0;
    if (negative)
        scaled = -scaled;
    std::string digits = scaled.get_str();
    if (digits.size() <= places)
        digits.insert(0, places - digits.size() + 1, '0');
    digits.insert(digits.size() - places, ".");
    while (digits.back() == '0')
        digits.pop_back();
    if (digits.back() == '.')
        digits.pop_back();
    return negative ? "-" + digits : digits;
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

mpz_class floor_div(const Rational& a, const Rational& b) { return (a / b).floor(); }

mpz_class ceil_div(const Rational& a, const Rational& b) { return (a / b).ceil(); }

Rational lcm(const Rational& a, const Rational& b)
{
    if (a.sign() <= 0 || b.sign() <= 0)
        throw Error(ErrorCode::InvalidArgument, "lcm of non-positive rationals");
    mpz_class num, den;
    mpz_lcm(num.get_mpz_t(), a.numerator().get_mpz_t(), b.numerator().get_mpz_t());
    mpz_gcd(den.get_mpz_t(), a.denominator().get_mpz_t(), b.denominator().get_mpz_t());
    return Rational(num, den);
}

bool to_int64(const mpz_class& z, std::int64_t& out)
{
    if (!z.fits_slong_p())
        return false;
    out = z.get_si();
    return true;
}

} // namespace gfp
