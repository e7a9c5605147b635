#pragma once

#include <gmpxx.h>

#include <Eigen/Core>
#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>

#include "qbethe/errors.hpp"

namespace qbethe {

// Exact rational scalar over GMP. Always canonical: reduced, positive
// denominator. Division by zero throws PoleError instead of aborting.
class Rat {
  public:
    Rat() : v_(0) {}
    Rat(int n) : v_(n) {}
    Rat(long n) : v_(n) {}
    Rat(long n, long d) {
        if (d == 0) throw PoleError("rational with zero denominator");
        v_ = mpq_class(n, d);
        v_.canonicalize();
    }
    explicit Rat(mpq_class v) : v_(std::move(v)) { v_.canonicalize(); }

    // Accepts "n", "n/d", and signs; base 10.
    static Rat from_string(const std::string& s) {
        mpq_class v;
        if (v.set_str(s, 10) != 0)
            throw ConfigError("malformed rational '" + s + "'");
        if (v.get_den() == 0)
            throw ConfigError("zero denominator in rational '" + s + "'");
        v.canonicalize();
        return Rat(std::move(v));
    }

    bool is_zero() const { return sgn(v_) == 0; }

    Rat operator-() const { return Rat(mpq_class(-v_)); }
    Rat& operator+=(const Rat& o) { v_ += o.v_; return *this; }
    Rat& operator-=(const Rat& o) { v_ -= o.v_; return *this; }
    Rat& operator*=(const Rat& o) { v_ *= o.v_; return *this; }
    Rat& operator/=(const Rat& o) {
        if (o.is_zero()) throw PoleError("division by zero");
        v_ /= o.v_;
        return *this;
    }

    friend Rat operator+(Rat a, const Rat& b) { return a += b; }
    friend Rat operator-(Rat a, const Rat& b) { return a -= b; }
    friend Rat operator*(Rat a, const Rat& b) { return a *= b; }
    friend Rat operator/(Rat a, const Rat& b) { return a /= b; }

    friend bool operator==(const Rat& a, const Rat& b) { return a.v_ == b.v_; }
    friend bool operator!=(const Rat& a, const Rat& b) { return a.v_ != b.v_; }
    friend bool operator<(const Rat& a, const Rat& b) { return a.v_ < b.v_; }
    friend bool operator<=(const Rat& a, const Rat& b) { return a.v_ <= b.v_; }
    friend bool operator>(const Rat& a, const Rat& b) { return a.v_ > b.v_; }
    friend bool operator>=(const Rat& a, const Rat& b) { return a.v_ >= b.v_; }

    Rat inverse() const {
        if (is_zero()) throw PoleError("inverse of zero");
        return Rat(mpq_class(1) / v_);
    }

    std::string str() const { return v_.get_str(); }  // "n" or "n/d"
    std::string num_str() const { return v_.get_num().get_str(); }
    std::string den_str() const { return v_.get_den().get_str(); }
    double to_double() const { return v_.get_d(); }

    friend std::ostream& operator<<(std::ostream& os, const Rat& r) {
        return os << r.v_;
    }

  private:
    mpq_class v_;
};

using Cplx = std::complex<double>;

// Uniform hooks the templated algebra needs from a scalar type.
template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<Rat> {
    static constexpr bool exact = true;
    static bool is_zero(const Rat& x) { return x.is_zero(); }
    static Rat from_rat(const Rat& x) { return x; }
    static std::string key(const Rat& x) { return x.str(); }
    static bool less(const Rat& a, const Rat& b) { return a < b; }
};

template <>
struct ScalarTraits<Cplx> {
    static constexpr bool exact = false;
    static bool is_zero(const Cplx& x) { return x == 0.0; }
    static Cplx from_rat(const Rat& x) { return Cplx(x.to_double(), 0.0); }
    static std::string key(const Cplx& x) {
        char buf[48];
        std::snprintf(buf, sizeof(buf), "%a,%a", x.real(), x.imag());
        return buf;
    }
    static bool less(const Cplx& a, const Cplx& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    }
};

template <class S>
S checked_div(const S& a, const S& b) {
    if (ScalarTraits<S>::is_zero(b)) throw PoleError("division by zero");
    return a / b;
}

// b^e for integer e, negative exponents through the inverse.
template <class S>
S pow_int(const S& b, long e) {
    if (e < 0) return pow_int<S>(checked_div(S(1), b), -e);
    S acc(1), base = b;
    while (e > 0) {
        if (e & 1) acc = acc * base;
        base = base * base;
        e >>= 1;
    }
    return acc;
}

}  // namespace qbethe

namespace Eigen {

template <>
struct NumTraits<qbethe::Rat> : GenericNumTraits<qbethe::Rat> {
    typedef qbethe::Rat Real;
    typedef qbethe::Rat NonInteger;
    typedef qbethe::Rat Nested;
    typedef qbethe::Rat Literal;
    enum {
        IsComplex = 0,
        IsInteger = 0,
        IsSigned = 1,
        RequireInitialization = 1,
        ReadCost = 8,
        AddCost = 30,
        MulCost = 30
    };
    static inline Real epsilon() { return qbethe::Rat(0); }
    static inline Real dummy_precision() { return qbethe::Rat(0); }
    static inline int digits10() { return 0; }
};

}  // namespace Eigen
