#pragma once

#include <gmpxx.h>

#include <compare>
#include <concepts>
#include <string>
#include <string_view>

namespace hforge {

using BigInt = mpz_class;

// Exact rational number. Always kept in lowest terms with a positive
// denominator; every probability, reward and value in the library is a Rat.
class Rat {
public:
    Rat() = default;

    template <std::signed_integral T>
    Rat(T v) : q_(static_cast<long>(v)) {}

    template <std::unsigned_integral T>
    Rat(T v) : q_(static_cast<unsigned long>(v)) {}

    explicit Rat(const BigInt& v) : q_(v) {}
    Rat(const BigInt& num, const BigInt& den);

    // Accepts "p", "-p" or "p/q" with q != 0.
    static Rat parse(std::string_view text);

    BigInt num() const { return q_.get_num(); }
    BigInt den() const { return q_.get_den(); }

    bool is_zero() const { return sgn(q_) == 0; }
    bool is_integer() const { return q_.get_den() == 1; }
    int sign() const { return sgn(q_); }

    // Always "p/q", including "1/1" and "0/1".
    std::string str() const;
    // "p" for integers, "p/q" otherwise.
    std::string compact() const;

    double to_double() const { return q_.get_d(); }

    Rat& operator+=(const Rat& o) { q_ += o.q_; return *this; }
    Rat& operator-=(const Rat& o) { q_ -= o.q_; return *this; }
    Rat& operator*=(const Rat& o) { q_ *= o.q_; return *this; }
    Rat& operator/=(const Rat& o);

    friend Rat operator+(Rat a, const Rat& b) { return a += b; }
    friend Rat operator-(Rat a, const Rat& b) { return a -= b; }
    friend Rat operator*(Rat a, const Rat& b) { return a *= b; }
    friend Rat operator/(Rat a, const Rat& b) { return a /= b; }
    Rat operator-() const { Rat r; r.q_ = -q_; return r; }

    friend bool operator==(const Rat& a, const Rat& b) { return cmp(a.q_, b.q_) == 0; }
    friend std::strong_ordering operator<=>(const Rat& a, const Rat& b)
    {
        const int c = cmp(a.q_, b.q_);
        return c < 0 ? std::strong_ordering::less
                     : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
    }

    const mpq_class& raw() const { return q_; }

private:
    mpq_class q_;
};

// Integer power; negative exponents invert (base must then be nonzero).
Rat pow(const Rat& base, long exponent);
BigInt floor(const Rat& r);
BigInt ceil(const Rat& r);
BigInt pow2(unsigned long exponent);

std::string to_string(const BigInt& v);
BigInt parse_bigint(std::string_view text);

} // namespace hforge
