#pragma once

#include <Eigen/Dense>
#include <span>
#include <sstream>

#include "qbethe/params.hpp"
#include "qbethe/rational.hpp"

// Rational kernel of the trigonometric model:
//
//   f(u,v) = (q u - q^{-1} v)/(u - v)
//   g(u,v) = (q - q^{-1}) u/(u - v)
//   g~(u,v) = (q - q^{-1}) v/(u - v)
//   h(u,v) = f/g,  h~(u,v) = f/g~   (kept in cancelled form, see below)
//
// h and h~ are evaluated from the cancelled closed forms
//   h(u,v)  = (q u - q^{-1} v) / ((q - q^{-1}) u)
//   h~(u,v) = (q u - q^{-1} v) / ((q - q^{-1}) v)
// so coincident arguments are regular: h(u,u) = h~(u,u) = 1. Partition
// sums rely on this.

namespace qbethe {
namespace kern {

template <class S>
void require_no_pole(const S& den, const char* fn, const S& u, const S& v) {
    if (ScalarTraits<S>::is_zero(den)) {
        std::ostringstream os;
        os << "pole of " << fn << " at (" << u << ", " << v << ")";
        throw PoleError(os.str());
    }
}

template <class S>
S f(const S& q, const S& u, const S& v) {
    S den = u - v;
    require_no_pole(den, "f", u, v);
    return (q * u - checked_div(v, q)) / den;
}

template <class S>
S g(const S& q, const S& u, const S& v) {
    S den = u - v;
    require_no_pole(den, "g", u, v);
    return (q - checked_div(S(1), q)) * u / den;
}

template <class S>
S gt(const S& q, const S& u, const S& v) {
    S den = u - v;
    require_no_pole(den, "g~", u, v);
    return (q - checked_div(S(1), q)) * v / den;
}

template <class S>
S h(const S& q, const S& u, const S& v) {
    S den = (q - checked_div(S(1), q)) * u;
    require_no_pole(den, "h", u, v);
    return (q * u - checked_div(v, q)) / den;
}

template <class S>
S ht(const S& q, const S& u, const S& v) {
    S den = (q - checked_div(S(1), q)) * v;
    require_no_pole(den, "h~", u, v);
    return (q * u - checked_div(v, q)) / den;
}

// 1/h and 1/h~ in cancelled form; regular at u = 0 resp. v = 0.
template <class S>
S inv_h(const S& q, const S& u, const S& v) {
    S den = q * u - checked_div(v, q);
    require_no_pole(den, "1/h", u, v);
    return (q - checked_div(S(1), q)) * u / den;
}

template <class S>
S inv_ht(const S& q, const S& u, const S& v) {
    S den = q * u - checked_div(v, q);
    require_no_pole(den, "1/h~", u, v);
    return (q - checked_div(S(1), q)) * v / den;
}

// Products over all pairs (u in us) x (v in vs); empty set gives 1.
template <class S, class Fn>
S pair_product(Fn&& fn, std::span<const S> us, std::span<const S> vs) {
    S acc(1);
    for (const S& u : us)
        for (const S& v : vs) acc = acc * fn(u, v);
    return acc;
}

template <class S>
S prod_f(const S& q, std::span<const S> us, std::span<const S> vs) {
    return pair_product<S>([&](const S& u, const S& v) { return f(q, u, v); }, us, vs);
}

template <class S>
S prod_f(const S& q, const S& u, std::span<const S> vs) {
    return prod_f(q, std::span<const S>(&u, 1), vs);
}

template <class S>
S prod_f(const S& q, std::span<const S> us, const S& v) {
    return prod_f(q, us, std::span<const S>(&v, 1));
}

template <class S>
S prod_g(const S& q, std::span<const S> us, std::span<const S> vs) {
    return pair_product<S>([&](const S& u, const S& v) { return g(q, u, v); }, us, vs);
}

template <class S>
S prod_gt(const S& q, std::span<const S> us, std::span<const S> vs) {
    return pair_product<S>([&](const S& u, const S& v) { return gt(q, u, v); }, us, vs);
}

template <class S>
S prod_h(const S& q, std::span<const S> us, std::span<const S> vs) {
    return pair_product<S>([&](const S& u, const S& v) { return h(q, u, v); }, us, vs);
}

template <class S>
S prod_ht(const S& q, std::span<const S> us, std::span<const S> vs) {
    return pair_product<S>([&](const S& u, const S& v) { return ht(q, u, v); }, us, vs);
}

// 1/prod_f with the partition-sum semantics: a coincident pair u = v makes
// the whole reciprocal vanish (f has a simple pole there), while a pair
// with q u = q^{-1} v is a genuine pole of 1/f and raises.
template <class S>
S inv_prod_f(const S& q, std::span<const S> us, std::span<const S> vs) {
    bool vanishes = false;
    for (const S& u : us) {
        for (const S& v : vs) {
            S num = q * u - checked_div(v, q);
            if (ScalarTraits<S>::is_zero(num)) {
                std::ostringstream os;
                os << "pole of 1/f at (" << u << ", " << v << ")";
                throw PoleError(os.str());
            }
            if (ScalarTraits<S>::is_zero(u - v)) vanishes = true;
        }
    }
    if (vanishes) return S(0);
    S acc(1);
    for (const S& u : us)
        for (const S& v : vs) acc = acc * (u - v) / (q * u - checked_div(v, q));
    return acc;
}

template <class S>
S inv_prod_f(const S& q, const S& u, std::span<const S> vs) {
    return inv_prod_f(q, std::span<const S>(&u, 1), vs);
}

template <class S>
S inv_prod_f(const S& q, std::span<const S> us, const S& v) {
    return inv_prod_f(q, us, std::span<const S>(&v, 1));
}

// One-set variant: product of a scalar function over a single set.
template <class S, class Fn>
S one_set_product(Fn&& fn, std::span<const S> us) {
    S acc(1);
    for (const S& u : us) acc = acc * fn(u);
    return acc;
}

enum class Kernel { F, G, Gt, H, Ht };

template <class S>
S kernel_eval(Kernel which, const S& q, const S& u, const S& v) {
    switch (which) {
        case Kernel::F: return f(q, u, v);
        case Kernel::G: return g(q, u, v);
        case Kernel::Gt: return gt(q, u, v);
        case Kernel::H: return h(q, u, v);
        case Kernel::Ht: return ht(q, u, v);
    }
    throw std::logic_error("unknown kernel");
}

template <class S>
S set_product(Kernel which, const S& q, std::span<const S> us, std::span<const S> vs) {
    return pair_product<S>(
        [&](const S& u, const S& v) { return kernel_eval(which, q, u, v); }, us, vs);
}

// Determinant over a field by Gaussian elimination. Exact scalars pivot on
// the first nonzero entry, floats on the largest magnitude.
template <class S>
S det_field(Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> m) {
    const int n = static_cast<int>(m.rows());
    S det(1);
    for (int c = 0; c < n; ++c) {
        int piv = -1;
        if constexpr (ScalarTraits<S>::exact) {
            for (int r = c; r < n; ++r)
                if (!ScalarTraits<S>::is_zero(m(r, c))) { piv = r; break; }
        } else {
            double best = 0.0;
            for (int r = c; r < n; ++r) {
                double mag = std::abs(m(r, c));
                if (mag > best) { best = mag; piv = r; }
            }
        }
        if (piv < 0) return S(0);
        if (piv != c) {
            m.row(piv).swap(m.row(c));
            det = -det;
        }
        det = det * m(c, c);
        for (int r = c + 1; r < n; ++r) {
            if (ScalarTraits<S>::is_zero(m(r, c))) continue;
            S factor = m(r, c) / m(c, c);
            for (int k = c; k < n; ++k) m(r, k) = m(r, k) - factor * m(c, k);
        }
    }
    return det;
}

namespace detail {

template <class S>
void izergin_check_distinct(std::span<const S> xs, std::span<const S> ys) {
    const int n = static_cast<int>(xs.size());
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            if (ScalarTraits<S>::is_zero(xs[i] - xs[j]))
                throw PoleError("izergin: coincident x arguments");
            if (ScalarTraits<S>::is_zero(ys[i] - ys[j]))
                throw PoleError("izergin: coincident y arguments");
        }
}

template <class S>
void izergin_check_qline(const S& q, std::span<const S> xs, std::span<const S> ys) {
    for (const S& x : xs)
        for (const S& y : ys)
            if (ScalarTraits<S>::is_zero(q * x - checked_div(y, q)))
                throw PoleError("izergin: q x = q^{-1} y degeneracy");
}

}  // namespace detail

enum class Izergin { K, Kt };

// Izergin determinant K(x|y), and the companion K~(x|y) = prod(y_i/x_i) K(x|y).
// Evaluated literally from the n x n determinant; n = 0 gives 1.
template <class S>
S izergin(const S& q, std::span<const S> xs, std::span<const S> ys,
          Izergin variant = Izergin::K) {
    const int n = static_cast<int>(xs.size());
    if (static_cast<int>(ys.size()) != n)
        throw InfeasibleError("izergin: |x| != |y|");
    if (n == 0) return S(1);
    detail::izergin_check_distinct<S>(xs, ys);
    detail::izergin_check_qline(q, xs, ys);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (ScalarTraits<S>::is_zero(xs[i] - ys[j]))
                throw PoleError("izergin: x_i = y_j pole");

    S qi = checked_div(S(1), q);
    S c = q - qi;
    Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            m(i, j) = c / ((xs[i] - ys[j]) * (q * xs[i] - qi * ys[j]));

    S pre(1);
    for (int i = 0; i < n; ++i) pre = pre * xs[i];
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) pre = pre * (q * xs[i] - qi * ys[j]);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            pre = pre / ((xs[i] - xs[j]) * (ys[j] - ys[i]));

    S val = pre * det_field<S>(std::move(m));
    if (variant == Izergin::Kt) {
        for (int i = 0; i < n; ++i) {
            if (ScalarTraits<S>::is_zero(xs[i]))
                throw PoleError("izergin K~: x_i = 0");
            val = val * ys[i] / xs[i];
        }
    }
    return val;
}

// K(x|y)/f(x,y) with the x_i = y_j poles cancelled. Multiplying row i of
// the determinant by prod_j (x_i - y_j) absorbs exactly the pole factors
// of f(x,y), leaving
//   [prod x_i / prod_{i<j}(x_i-x_j)(y_j-y_i)] det M',
//   M'_ij = (q - q^{-1}) prod_{j'!=j}(x_i - y_{j'}) / (q x_i - q^{-1} y_j).
// For n = 1 this is 1/h(x,y). Shared points between x and y are allowed.
template <class S>
S izergin_k_over_f(const S& q, std::span<const S> xs, std::span<const S> ys) {
    const int n = static_cast<int>(xs.size());
    if (static_cast<int>(ys.size()) != n)
        throw InfeasibleError("izergin: |x| != |y|");
    if (n == 0) return S(1);
    detail::izergin_check_distinct<S>(xs, ys);
    detail::izergin_check_qline(q, xs, ys);

    S qi = checked_div(S(1), q);
    S c = q - qi;
    Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> m(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            S num = c;
            for (int k = 0; k < n; ++k)
                if (k != j) num = num * (xs[i] - ys[k]);
            m(i, j) = num / (q * xs[i] - qi * ys[j]);
        }
    }
    S pre(1);
    for (int i = 0; i < n; ++i) pre = pre * xs[i];
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            pre = pre / ((xs[i] - xs[j]) * (ys[j] - ys[i]));
    return pre * det_field<S>(std::move(m));
}

template <class S>
S izergin_kt_over_f(const S& q, std::span<const S> xs, std::span<const S> ys) {
    S val = izergin_k_over_f(q, xs, ys);
    for (size_t i = 0; i < xs.size(); ++i) {
        if (ScalarTraits<S>::is_zero(xs[i]))
            throw PoleError("izergin K~: x_i = 0");
        val = val * ys[i] / xs[i];
    }
    return val;
}

}  // namespace kern
}  // namespace qbethe
