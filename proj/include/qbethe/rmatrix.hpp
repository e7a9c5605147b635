#pragma once

#include <Eigen/Dense>

#include "qbethe/kernels.hpp"
#include "qbethe/rational.hpp"

namespace qbethe {

template <class S>
using Matrix = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

template <class S>
using Vector = Eigen::Matrix<S, Eigen::Dynamic, 1>;

// Exchange-matrix coefficient p_ij (one-based indices):
//   f(u,v) - 1 on the diagonal, g(u,v) above, g~(u,v) below.
template <class S>
S p_coeff(const S& q, int i, int j, const S& u, const S& v) {
    if (i == j) return kern::f(q, u, v) - S(1);
    if (i < j) return kern::g(q, u, v);
    return kern::gt(q, u, v);
}

// R(u,v) = I (x) I + sum_ij p_ij(u,v) e_ij (x) e_ji on C^n (x) C^n.
// Basis |i> (x) |j> sits at row (i-1)*n + (j-1).
template <class S>
Matrix<S> r_matrix(const S& q, const S& u, const S& v, int n) {
    if (ScalarTraits<S>::is_zero(u - v)) throw PoleError("r_matrix at u = v");
    Matrix<S> r = Matrix<S>::Zero(n * n, n * n);
    for (int a = 0; a < n * n; ++a) r(a, a) = S(1);
    // e_ij (x) e_ji maps |j,i> to |i,j>
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            r((i - 1) * n + (j - 1), (j - 1) * n + (i - 1)) +=
                p_coeff(q, i, j, u, v);
    return r;
}

template <class S>
Matrix<S> kron(const Matrix<S>& a, const Matrix<S>& b) {
    Matrix<S> c = Matrix<S>::Zero(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) {
            if (ScalarTraits<S>::is_zero(a(i, j))) continue;
            for (int k = 0; k < b.rows(); ++k)
                for (int l = 0; l < b.cols(); ++l)
                    c(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
        }
    return c;
}

// Embed a two-site operator into factors (a, b) of C^n (x) C^n (x) C^n,
// one-based factor labels a < b.
template <class S>
Matrix<S> embed_pair(const Matrix<S>& r, int n, int a, int b) {
    Matrix<S> id = Matrix<S>::Identity(n, n);
    if (a == 1 && b == 2) return kron<S>(r, id);
    if (a == 2 && b == 3) return kron<S>(id, r);
    // factors 1 and 3: conjugate the (1,2) embedding by the (2,3) swap
    Matrix<S> swap23 = Matrix<S>::Zero(n * n * n, n * n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                swap23((i * n + k) * n + j, (i * n + j) * n + k) = S(1);
    return swap23 * kron<S>(r, id) * swap23;
}

// R12(u,v) R13(u,w) R23(v,w) - R23(v,w) R13(u,w) R12(u,v) on C^n^{(x)3}.
template <class S>
Matrix<S> yang_baxter_residual(const S& q, const S& u, const S& v, const S& w, int n) {
    Matrix<S> r12 = embed_pair(r_matrix(q, u, v, n), n, 1, 2);
    Matrix<S> r13 = embed_pair(r_matrix(q, u, w, n), n, 1, 3);
    Matrix<S> r23 = embed_pair(r_matrix(q, v, w, n), n, 2, 3);
    return r12 * r13 * r23 - r23 * r13 * r12;
}

}  // namespace qbethe
