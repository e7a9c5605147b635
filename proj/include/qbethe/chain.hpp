#pragma once

#include <sstream>
#include <vector>

#include "qbethe/rmatrix.hpp"

// Inhomogeneous twisted fundamental spin chain: the monodromy matrix is the
// ordered product
//
//   T(z) = D . R_{0,L}(z, xi_L) ... R_{0,1}(z, xi_1),
//
// with a diagonal twist D = diag(d_1..d_N) in the auxiliary space and the
// vacuum |1>^{(x) L}. Entries T_{i,j}(z) act on states by sweeping one
// site-local R factor at a time; the N^L x N^L matrix is never formed.
// Basis encoding: index = sum_k digit_k N^{k-1}, site 1 least significant.

namespace qbethe {

template <class S>
struct ChainSpec {
    int rank = 2;            // N
    int length = 1;          // L
    S q{};                   // deformation
    std::vector<S> xi;       // inhomogeneities, size L
    std::vector<S> twist;    // d_1..d_N

    long dim() const {
        long d = 1;
        for (int k = 0; k < length; ++k) d *= rank;
        return d;
    }
};

template <class S>
void validate(const ChainSpec<S>& c) {
    if (c.rank < 2) throw ConfigError("chain rank must be >= 2");
    if (c.length < 1) throw ConfigError("chain length must be >= 1");
    if (static_cast<int>(c.xi.size()) != c.length)
        throw ConfigError("need one inhomogeneity per site");
    if (static_cast<int>(c.twist.size()) != c.rank)
        throw ConfigError("need one twist entry per auxiliary dimension");
    using T = ScalarTraits<S>;
    if (T::is_zero(c.q) || T::is_zero(c.q - S(1)) || T::is_zero(c.q + S(1)))
        throw ConfigError("q must avoid {0, 1, -1}");
    for (const auto& x : c.xi)
        if (T::is_zero(x)) throw ConfigError("inhomogeneities must be nonzero");
    for (size_t a = 0; a < c.xi.size(); ++a)
        for (size_t b = a + 1; b < c.xi.size(); ++b)
            if (T::is_zero(c.xi[a] - c.xi[b]))
                throw ConfigError("inhomogeneities must be pairwise distinct");
    for (const auto& d : c.twist)
        if (T::is_zero(d)) throw ConfigError("twist entries must be nonzero");
}

// Monodromy entry with its spectral point; z must avoid the simple poles
// at the inhomogeneities.
template <class S>
struct EntryOperator {
    int row = 1;
    int col = 1;
    S z{};
};

namespace detail {

template <class S>
void require_off_poles(const ChainSpec<S>& c, const S& z) {
    for (const auto& x : c.xi)
        if (ScalarTraits<S>::is_zero(z - x)) {
            std::ostringstream os;
            os << "monodromy evaluated at inhomogeneity z = " << z;
            throw PoleError(os.str());
        }
}

}  // namespace detail

template <class S>
Vector<S> vacuum(const ChainSpec<S>& c) {
    Vector<S> v = Vector<S>::Zero(c.dim());
    v(0) = S(1);
    return v;
}

template <class S>
Vector<S> dual_vacuum(const ChainSpec<S>& c) {
    return vacuum(c);
}

// y = T_{row,col}(z) x
template <class S>
Vector<S> apply_entry(const ChainSpec<S>& c, int row, int col, const S& z,
                      const Vector<S>& x) {
    detail::require_off_poles(c, z);
    const int n = c.rank;
    const long dim = c.dim();
    std::vector<Vector<S>> phi(n, Vector<S>::Zero(dim));
    phi[col - 1] = x;
    std::vector<Vector<S>> next(n);
    std::vector<S> p(n * n);
    long stride = 1;
    for (int site = 0; site < c.length; ++site, stride *= n) {
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                p[a * n + b] = p_coeff(c.q, a + 1, b + 1, z, c.xi[site]);
        for (int a = 0; a < n; ++a) next[a] = Vector<S>::Zero(dim);
        for (int b = 0; b < n; ++b) {
            const Vector<S>& src = phi[b];
            for (long idx = 0; idx < dim; ++idx) {
                const S& amp = src(idx);
                if (ScalarTraits<S>::is_zero(amp)) continue;
                next[b](idx) += amp;  // identity part of the R factor
                int d = static_cast<int>((idx / stride) % n);
                next[d](idx + (b - d) * stride) += p[d * n + b] * amp;
            }
        }
        phi.swap(next);
    }
    return c.twist[row - 1] * phi[row - 1];
}

// y^T = x^T T_{row,col}(z): right action on a covector.
template <class S>
Vector<S> apply_entry_dual(const ChainSpec<S>& c, int row, int col, const S& z,
                           const Vector<S>& x) {
    detail::require_off_poles(c, z);
    const int n = c.rank;
    const long dim = c.dim();
    std::vector<Vector<S>> phi(n, Vector<S>::Zero(dim));
    phi[col - 1] = x;
    std::vector<Vector<S>> next(n);
    std::vector<S> p(n * n);
    long stride = 1;
    for (int site = 0; site < c.length; ++site, stride *= n) {
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                p[a * n + b] = p_coeff(c.q, a + 1, b + 1, z, c.xi[site]);
        for (int a = 0; a < n; ++a) next[a] = Vector<S>::Zero(dim);
        for (int b = 0; b < n; ++b) {
            const Vector<S>& src = phi[b];
            for (long idx = 0; idx < dim; ++idx) {
                const S& amp = src(idx);
                if (ScalarTraits<S>::is_zero(amp)) continue;
                next[b](idx) += amp;
                int d = static_cast<int>((idx / stride) % n);
                if (d != b) continue;  // transposed jump reads digit == source aux
                for (int row = 0; row < n; ++row)
                    next[row](idx + (row - b) * stride) += p[row * n + b] * amp;
            }
        }
        phi.swap(next);
    }
    return c.twist[row - 1] * phi[row - 1];
}

template <class S>
Vector<S> apply(const ChainSpec<S>& c, const EntryOperator<S>& op, const Vector<S>& x) {
    return apply_entry(c, op.row, op.col, op.z, x);
}

// Vacuum eigenvalue of T_{i,i}(z), extracted by application. Raises if the
// vacuum fails to be an eigenvector (broken monodromy convention).
template <class S>
S lambda_eval(const ChainSpec<S>& c, int i, const S& z) {
    Vector<S> v = apply_entry(c, i, i, z, vacuum(c));
    for (long idx = 1; idx < c.dim(); ++idx)
        if (!ScalarTraits<S>::is_zero(v(idx)))
            throw EigenvectorError("vacuum is not an eigenvector of T_{i,i}");
    return v(0);
}

template <class S>
S beta_eval(const ChainSpec<S>& c, int i, const S& z) {
    return checked_div(lambda_eval(c, i + 1, z), lambda_eval(c, i, z));
}

template <class S>
Vector<S> transfer_apply(const ChainSpec<S>& c, const S& z, const Vector<S>& x) {
    Vector<S> acc = Vector<S>::Zero(c.dim());
    for (int i = 1; i <= c.rank; ++i) acc += apply_entry(c, i, i, z, x);
    return acc;
}

// Zero modes of the negative Borel half, realized as the z -> 0 evaluation
// of the monodromy entries. Construction asserts the triangularity of the
// limit (upper entries vanish at z = 0) on a dense probe state and reads
// off kappa_i as the vacuum eigenvalue of the diagonal zero mode.
template <class S>
class ZeroModes {
  public:
    explicit ZeroModes(ChainSpec<S> chain) : chain_(std::move(chain)) {
        detail::require_off_poles(chain_, S(0));
        Vector<S> probe(chain_.dim());
        for (long k = 0; k < chain_.dim(); ++k) probe(k) = S(1 + static_cast<int>(k));
        for (int i = 1; i <= chain_.rank; ++i)
            for (int j = i + 1; j <= chain_.rank; ++j) {
                Vector<S> w = apply_entry(chain_, i, j, S(0), probe);
                for (long k = 0; k < chain_.dim(); ++k)
                    if (!ScalarTraits<S>::is_zero(w(k)))
                        throw NormalizationError(
                            "upper monodromy entry does not vanish at z = 0");
            }
        kappa_.resize(chain_.rank);
        for (int i = 1; i <= chain_.rank; ++i)
            kappa_[i - 1] = lambda_eval(chain_, i, S(0));
    }

    // T^-_{i+1,i}[0] x
    Vector<S> lower(int i, const Vector<S>& x) const {
        return apply_entry(chain_, i + 1, i, S(0), x);
    }

    // T^-_{i,i}[0] x
    Vector<S> diag(int i, const Vector<S>& x) const {
        return apply_entry(chain_, i, i, S(0), x);
    }

    const S& kappa(int i) const { return kappa_.at(i - 1); }
    const ChainSpec<S>& chain() const { return chain_; }

  private:
    ChainSpec<S> chain_;
    std::vector<S> kappa_;
};

}  // namespace qbethe
