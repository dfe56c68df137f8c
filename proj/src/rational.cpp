#include "hforge/rational.hpp"

#include "hforge/errors.hpp"

#include <cctype>

namespace hforge {

namespace {

bool is_integer_literal(std::string_view s)
{
    if (s.empty())
        return false;
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size())
        return false;
    for (; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i])))
            return false;
    return true;
}

} // namespace

Rat::Rat(const BigInt& num, const BigInt& den)
{
    if (den == 0)
        throw DomainError("rational with zero denominator");
    q_.get_num() = num;
    q_.get_den() = den;
    q_.canonicalize();
}

Rat Rat::parse(std::string_view text)
{
    const auto slash = text.find('/');
    if (slash == std::string_view::npos)
        return Rat(parse_bigint(text));
    const auto num = parse_bigint(text.substr(0, slash));
    const auto den_text = text.substr(slash + 1);
    if (!den_text.empty() && (den_text[0] == '-' || den_text[0] == '+'))
        throw DomainError("malformed rational '" + std::string(text) + "'");
    const auto den = parse_bigint(den_text);
    return Rat(num, den);
}

std::string Rat::str() const
{
    return q_.get_num().get_str() + "/" + q_.get_den().get_str();
}

std::string Rat::compact() const
{
    return is_integer() ? q_.get_num().get_str() : str();
}

Rat& Rat::operator/=(const Rat& o)
{
    if (o.is_zero())
        throw DomainError("division by zero");
    q_ /= o.q_;
    return *this;
}

Rat pow(const Rat& base, long exponent)
{
    if (exponent < 0)
        return Rat(1) / pow(base, -exponent);
    BigInt num, den;
    mpz_pow_ui(num.get_mpz_t(), base.raw().get_num_mpz_t(), static_cast<unsigned long>(exponent));
    mpz_pow_ui(den.get_mpz_t(), base.raw().get_den_mpz_t(), static_cast<unsigned long>(exponent));
    return Rat(num, den);
}

BigInt floor(const Rat& r)
{
    BigInt out;
    mpz_fdiv_q(out.get_mpz_t(), r.raw().get_num_mpz_t(), r.raw().get_den_mpz_t());
    return out;
}

BigInt ceil(const Rat& r)
{
    BigInt out;
    mpz_cdiv_q(out.get_mpz_t(), r.raw().get_num_mpz_t(), r.raw().get_den_mpz_t());
    return out;
}

BigInt pow2(unsigned long exponent)
{
    BigInt out;
    mpz_ui_pow_ui(out.get_mpz_t(), 2, exponent);
    return out;
}

std::string to_string(const BigInt& v) { return v.get_str(); }

BigInt parse_bigint(std::string_view text)
{
    if (!is_integer_literal(text))
        throw DomainError("malformed integer '" + std::string(text) + "'");
    std::string s(text[0] == '+' ? text.substr(1) : text);
    return BigInt(s, 10);
}

} // namespace hforge
