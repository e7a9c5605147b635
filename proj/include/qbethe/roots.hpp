#pragma once

#include <Eigen/Dense>
#include <optional>
#include <random>

#include "qbethe/bethe.hpp"

// Numerical Bethe-root solver (complex double mode). The residual of the
// Bethe system for color i, parameter t = t^i_l, is
//
//   beta_i(t) - f(tbar^i_l, t)/f(t, tbar^i_l) * f(t, tbar^{i-1})/f(tbar^{i+1}, t)
//
// flattened color-major. Roots are found by damped Newton iteration with a
// finite-difference Jacobian (the residual is holomorphic, so a real step
// probes the full complex derivative); failed or singular iterations fall
// back to seeded random restarts.

namespace qbethe {

struct SolveOptions {
    double tolerance = 1e-12;
    int max_iterations = 80;
    int restarts = 12;
    uint64_t seed = 1;
};

struct RootProblem {
    ChainSpec<Cplx> chain;
    std::vector<int> cardinalities;           // r_1..r_{N-1}
    ColoredSets<Cplx> guess;                  // optional; empty = heuristic
    SolveOptions options;
};

struct SolveReport {
    bool converged = false;
    int iterations = 0;
    int restarts_used = 0;
    double residual_norm = 0.0;               // max-norm at the returned point
    ColoredSets<Cplx> roots;
    std::string failure;                      // empty when converged
    std::vector<double> residual_trace;       // per accepted iteration
};

inline int flat_size(const std::vector<int>& cards) {
    int n = 0;
    for (int r : cards) n += r;
    return n;
}

inline ColoredSets<Cplx> unflatten(const std::vector<int>& cards,
                                   const Eigen::VectorXcd& x) {
    ColoredSets<Cplx> ts(cards.size());
    int o = 0;
    for (size_t c = 0; c < cards.size(); ++c)
        for (int k = 0; k < cards[c]; ++k) ts[c].push_back(x(o++));
    return ts;
}

// Componentwise Bethe residual; color-major, elements in set order.
inline Eigen::VectorXcd bethe_residual(BetheBuilder<Cplx>& bb,
                                       const ColoredSets<Cplx>& ts) {
    const ChainSpec<Cplx>& chain = bb.chain();
    const Cplx& q = chain.q;
    const int ncolors = chain.rank - 1;
    static const ParamSet<Cplx> kEmpty;
    auto color_of = [&](int p) -> const ParamSet<Cplx>& {
        return (p < 1 || p > ncolors) ? kEmpty : ts[p - 1];
    };
    Eigen::VectorXcd res(total_cardinality(ts));
    int o = 0;
    for (int i = 1; i <= ncolors; ++i) {
        for (size_t l = 0; l < ts[i - 1].size(); ++l) {
            const Cplx t = ts[i - 1][l];
            ParamSet<Cplx> rest = without_index(ts[i - 1], static_cast<int>(l));
            Cplx rhs = kern::prod_f<Cplx>(q, rest, t) *
                       kern::inv_prod_f<Cplx>(q, t, rest) *
                       kern::prod_f<Cplx>(q, t, color_of(i - 1)) *
                       kern::inv_prod_f<Cplx>(q, color_of(i + 1), t);
            res(o++) = bb.beta(i, t) - rhs;
        }
    }
    return res;
}

namespace detail {

inline std::optional<Eigen::VectorXcd> try_residual(BetheBuilder<Cplx>& bb,
                                                    const std::vector<int>& cards,
                                                    const Eigen::VectorXcd& x) {
    try {
        return bethe_residual(bb, unflatten(cards, x));
    } catch (const PoleError&) {
        return std::nullopt;
    } catch (const ConfigError&) {
        return std::nullopt;  // coincident components during a wild step
    }
}

}  // namespace detail

inline SolveReport solve_bethe(BetheBuilder<Cplx>& bb, const RootProblem& problem) {
    const auto& cards = problem.cardinalities;
    const auto& opt = problem.options;
    const int m = flat_size(cards);
    SolveReport report;
    if (m == 0) {
        report.converged = true;
        report.roots.assign(cards.size(), {});
        return report;
    }

    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto& xi = bb.chain().xi;
    double scale = 0.0;
    for (const auto& x : xi) scale = std::max(scale, std::abs(x));

    auto heuristic_guess = [&](int attempt) {
        Eigen::VectorXcd x(m);
        if (attempt == 0) {
            // perturbed inhomogeneities, cycled through the sites
            for (int k = 0; k < m; ++k) {
                Cplx base = xi[k % xi.size()];
                double eps = 0.07 + 0.09 * unit(rng);
                double phi = 0.4 * unit(rng);
                x(k) = base * Cplx(1.0 + eps, phi * 0.1);
            }
        } else {
            for (int k = 0; k < m; ++k) {
                double r = scale * (0.4 + 1.6 * unit(rng));
                double phi = 2.0 * M_PI * unit(rng);
                x(k) = Cplx(r * std::cos(phi), r * std::sin(phi));
            }
        }
        return x;
    };

    std::string last_failure;
    for (int attempt = 0; attempt <= opt.restarts; ++attempt) {
        Eigen::VectorXcd x;
        if (attempt == 0 && !problem.guess.empty()) {
            x.resize(m);
            int o = 0;
            for (const auto& c : problem.guess)
                for (const auto& v : c) x(o++) = v;
        } else {
            x = heuristic_guess(attempt);
        }

        auto fx = detail::try_residual(bb, cards, x);
        if (!fx) {
            last_failure = "pole at initial guess";
            report.restarts_used = attempt;
            continue;
        }
        double fnorm = fx->lpNorm<Eigen::Infinity>();
        std::vector<double> trace{fnorm};
        int iter = 0;
        for (; iter < opt.max_iterations && fnorm >= opt.tolerance; ++iter) {
            // finite-difference Jacobian, real step (residual is holomorphic)
            Eigen::MatrixXcd jac(m, m);
            bool jac_ok = true;
            for (int c = 0; c < m && jac_ok; ++c) {
                double h = 1e-7 * (1.0 + std::abs(x(c)));
                Eigen::VectorXcd xp = x, xm = x;
                xp(c) += h;
                xm(c) -= h;
                auto fp = detail::try_residual(bb, cards, xp);
                auto fm = detail::try_residual(bb, cards, xm);
                if (!fp || !fm) { jac_ok = false; break; }
                jac.col(c) = (*fp - *fm) / (2.0 * h);
            }
            if (!jac_ok) { last_failure = "pole while probing the Jacobian"; break; }

            Eigen::FullPivLU<Eigen::MatrixXcd> lu(jac);
            if (!lu.isInvertible()) { last_failure = "singular Jacobian"; break; }
            Eigen::VectorXcd step = lu.solve(-*fx);

            double damping = 1.0;
            bool accepted = false;
            for (int halving = 0; halving < 12; ++halving, damping *= 0.5) {
                Eigen::VectorXcd xn = x + damping * step;
                auto fn = detail::try_residual(bb, cards, xn);
                if (!fn) continue;
                double nn = fn->lpNorm<Eigen::Infinity>();
                if (nn < fnorm || nn < opt.tolerance) {
                    x = xn;
                    fx = fn;
                    fnorm = nn;
                    trace.push_back(nn);
                    accepted = true;
                    break;
                }
            }
            if (!accepted) { last_failure = "line search stalled"; break; }
        }
        if (fnorm < opt.tolerance) {
            // coincident within-color roots solve the rational system but are
            // not admissible Bethe states; reject and restart
            ColoredSets<Cplx> roots = unflatten(cards, x);
            bool admissible = true;
            for (const auto& color : roots)
                for (size_t a = 0; a < color.size(); ++a)
                    for (size_t b = a + 1; b < color.size(); ++b)
                        if (std::abs(color[a] - color[b]) <
                            1e-6 * (1.0 + std::abs(color[a])))
                            admissible = false;
            if (!admissible) {
                last_failure = "converged to coincident roots";
                report.restarts_used = attempt;
                continue;
            }
            report.converged = true;
            report.iterations = iter;
            report.restarts_used = attempt;
            report.residual_norm = fnorm;
            report.roots = std::move(roots);
            report.residual_trace = std::move(trace);
            return report;
        }
        report.restarts_used = attempt;
    }
    report.failure = last_failure.empty() ? "no convergence" : last_failure;
    return report;
}

// Transfer-matrix eigenvalue predicted by the Bethe parameters.
inline Cplx tau_eigenvalue(BetheBuilder<Cplx>& bb, const ColoredSets<Cplx>& ts,
                           const Cplx& z) {
    const ChainSpec<Cplx>& chain = bb.chain();
    const Cplx& q = chain.q;
    const int ncolors = chain.rank - 1;
    static const ParamSet<Cplx> kEmpty;
    auto color_of = [&](int p) -> const ParamSet<Cplx>& {
        return (p < 1 || p > ncolors) ? kEmpty : ts[p - 1];
    };
    Cplx acc(0);
    for (int i = 1; i <= chain.rank; ++i)
        acc += bb.lambda(i, z) * kern::prod_f<Cplx>(q, z, color_of(i - 1)) *
               kern::prod_f<Cplx>(q, color_of(i), z);
    return acc;
}

// max_z max_k | (t(z) B)_k - tau(z) B_k | / max_k |B_k|
inline double eigen_check(BetheBuilder<Cplx>& bb, const ColoredSets<Cplx>& ts,
                          const ParamSet<Cplx>& z_samples) {
    Vector<Cplx> b = bb.bethe(ts);
    double bnorm = 0.0;
    for (long k = 0; k < b.size(); ++k) bnorm = std::max(bnorm, std::abs(b(k)));
    if (bnorm == 0.0) throw EigenvectorError("Bethe vector vanished");
    double worst = 0.0;
    for (const auto& z : z_samples) {
        Vector<Cplx> lhs = transfer_apply(bb.chain(), z, b);
        Cplx tau = tau_eigenvalue(bb, ts, z);
        for (long k = 0; k < b.size(); ++k)
            worst = std::max(worst, std::abs(lhs(k) - tau * b(k)) / bnorm);
    }
    return worst;
}

// <B, t(z) B> / <B, B> under the transpose pairing (no conjugation).
inline Cplx rayleigh_quotient(BetheBuilder<Cplx>& bb, const ColoredSets<Cplx>& ts,
                              const Cplx& z) {
    Vector<Cplx> b = bb.bethe(ts);
    Vector<Cplx> tb = transfer_apply(bb.chain(), z, b);
    Cplx num(0), den(0);
    for (long k = 0; k < b.size(); ++k) {
        num += b(k) * tb(k);
        den += b(k) * b(k);
    }
    return checked_div(num, den);
}

}  // namespace qbethe
