#pragma once

#include <mutex>
#include <unordered_map>

#include "qbethe/bethe.hpp"

// Scalar products of Bethe and dual Bethe vectors. Two independent routes:
//
//  direct:    S(u|t) = C(u) B(t), both vectors built on the chain;
//  partition: S(u|t) = sum_part Z(u_I|t_I) Zbar(u_II|t_II)
//                 * prod_i f(u^i_II, u^i_I) f(t^i_I, t^i_II)
//                 / prod_{i<=N-2} f(u^{i+1}_II, u^i_I) f(t^{i+1}_I, t^i_II)
//                 * prod_i beta_i(u^i_II) beta_i(t^i_I),
//
// where the highest coefficients Z, Zbar depend on q only and satisfy
// one-parameter recursions: peeling x = u^ell_I (|u^ell_I| = 1),
//
//  Z:    sum over j = ell+1..N and splittings
//          w^s = {x, t^s} = {w^s_I, w^s_II},      |w^s_I| = 1,  s = 1..ell-1
//          t^s = {t^s_I, t^s_II},                 |t^s_I| = 1,  s = ell..j-1
//          u^s = {u^s_II, u^s_III},               |u^s_III| = 1, s = ell+1..j-1
//        of   f(t^ell, x) / (f(x, u^{ell-1}) f(u^{ell+1}, x))
//           * g(t^ell_I, w^{ell-1}_I) f(t^ell_I, t^ell_II) / f(t^ell_I, w^{ell-1})
//           * prod_{p=1}^{ell-1} g(w^p_I, w^{p-1}_I) f(w^p_I, w^p_II) / f(w^p_I, w^{p-1})
//           * prod_{p=ell+1}^{j-1} g~(u^p_III, u^{p-1}_III) f(u^p_II, u^p_III) / f(u^{p+1}, u^p_III)
//                                * g(t^p_I, t^{p-1}_I) f(t^p_I, t^p_II) / f(t^p_I, t^{p-1})
//           * Z(child),
//        boundaries w^0_I = u^ell_III = {x}, w^0_II = u^0 = t^0 = u^N = t^N = empty;
//
//  Zbar: the mirror image, summing over i = 1..ell with splittings
//          u^s = {u^s_I, u^s_II} (|u^s_I| = 1) for s = i..ell-1,
//          t^s = {t^s_II, t^s_III} (|t^s_III| = 1) for s = i..ell,
//          w^s = {x, t^s} = {w^s_II, w^s_III} (|w^s_III| = 1) for s = ell+1..N-1,
//        boundary w^N_III = {x}, w^N = {x}, u^ell_I = {x}.
//
// Like the state recurrences, coefficients are evaluated with each g/g~
// numerator tied to the reciprocal f-product containing the same point, so
// recursive keys (whose t-side sets carry previously peeled u-points) stay
// finite and dead terms drop out as exact zeros.

namespace qbethe {

template <class S>
struct HcTerm {
    S coeff;
    ColoredSets<S> us_child;
    ColoredSets<S> ts_child;
};

template <class S>
class HighestCoefficients {
  public:
    explicit HighestCoefficients(S q) : q_(std::move(q)) {}

    const S& q() const { return q_; }

    // Memoized values, canonical peel (Z: lowest nonempty color, Zbar:
    // highest). Inputs are canonicalized by sorting within colors.
    S z(const ColoredSets<S>& us, const ColoredSets<S>& ts) { return value(false, us, ts); }
    S zbar(const ColoredSets<S>& us, const ColoredSets<S>& ts) { return value(true, us, ts); }

    // Forced peel color; children go through the memoized canonical route.
    S z_via(int ell, const ColoredSets<S>& us, const ColoredSets<S>& ts) {
        S acc(0);
        for (const auto& t : z_terms(ell, us, ts))
            acc = acc + t.coeff * z(t.us_child, t.ts_child);
        return acc;
    }
    S zbar_via(int ell, const ColoredSets<S>& us, const ColoredSets<S>& ts) {
        S acc(0);
        for (const auto& t : zbar_terms(ell, us, ts))
            acc = acc + t.coeff * zbar(t.us_child, t.ts_child);
        return acc;
    }

    std::vector<HcTerm<S>> z_terms(int ell, const ColoredSets<S>& us,
                                   const ColoredSets<S>& ts) {
        check_key(us, ts);
        const int ncolors = static_cast<int>(us.size());
        if (us[ell - 1].empty()) throw InfeasibleError("peel color is empty");
        const int pos = static_cast<int>(us[ell - 1].size()) - 1;
        const S x = us[ell - 1][pos];
        static const ParamSet<S> kEmpty;
        auto ucolor = [&](int p) -> const ParamSet<S>& {
            return (p < 1 || p > ncolors) ? kEmpty : us[p - 1];
        };
        auto tcolor = [&](int p) -> const ParamSet<S>& {
            return (p < 1 || p > ncolors) ? kEmpty : ts[p - 1];
        };
        ColoredSets<S> w(ncolors);
        for (int p = 1; p <= ncolors; ++p) w[p - 1] = with_value(tcolor(p), x);

        std::vector<HcTerm<S>> terms;
        for (int j = ell + 1; j <= ncolors + 1; ++j) {
            // radices: w^s_I for s = 1..ell-1, t^s_I for s = ell..j-1,
            // u^s_III for s = ell+1..j-1
            std::vector<int> radix;
            for (int s = 1; s <= ell - 1; ++s) radix.push_back(w[s - 1].size());
            for (int s = ell; s <= j - 1; ++s) radix.push_back(tcolor(s).size());
            for (int s = ell + 1; s <= j - 1; ++s) radix.push_back(ucolor(s).size());
            MultiIndex odo(radix);
            while (auto pick = odo.next()) {
                int o = 0;
                std::vector<int> wI(ell - 1), tI(j - ell), uIII(j - 1 - ell);
                for (int s = 1; s <= ell - 1; ++s) wI[s - 1] = (*pick)[o++];
                for (int s = ell; s <= j - 1; ++s) tI[s - ell] = (*pick)[o++];
                for (int s = ell + 1; s <= j - 1; ++s) uIII[s - ell - 1] = (*pick)[o++];

                S coeff = kern::prod_f<S>(q_, tcolor(ell), x) *
                          kern::inv_prod_f<S>(q_, x, ucolor(ell - 1));

                // w-chain and the bridging t^ell factor: pairs
                // g(A_I, prev_I)/f(A_I, prev) walking colors 1..ell.
                for (int p = 1; p <= ell && !ScalarTraits<S>::is_zero(coeff); ++p) {
                    S a = (p == ell) ? tcolor(ell)[tI[0]] : w[p - 1][wI[p - 1]];
                    const ParamSet<S>* prev;
                    int prev_i;
                    ParamSet<S> boundary{x};
                    if (p == 1) { prev = &boundary; prev_i = 0; }
                    else { prev = &w[p - 2]; prev_i = wI[p - 2]; }
                    ParamSet<S> rest = without_index(*prev, prev_i);
                    coeff = coeff * kern::inv_h(q_, a, (*prev)[prev_i]) *
                            kern::inv_prod_f<S>(q_, a, rest);
                    if (p < ell) {
                        ParamSet<S> second = without_index(w[p - 1], wI[p - 1]);
                        coeff = coeff * kern::prod_f<S>(q_, a, second);
                    } else {
                        ParamSet<S> second = without_index(tcolor(ell), tI[0]);
                        coeff = coeff * kern::prod_f<S>(q_, a, second);
                    }
                }

                // u-chain, colors ell+1..j-1, plus leftover 1/f(u^j, .)
                for (int p = ell + 1; p <= j - 1 && !ScalarTraits<S>::is_zero(coeff); ++p) {
                    S a = ucolor(p)[uIII[p - ell - 1]];
                    S b = (p == ell + 1) ? x : ucolor(p - 1)[uIII[p - ell - 2]];
                    ParamSet<S> rest = without_index(ucolor(p), uIII[p - ell - 1]);
                    coeff = coeff * kern::inv_ht(q_, a, b) *
                            kern::inv_prod_f<S>(q_, rest, b) *
                            kern::prod_f<S>(q_, rest, a);
                }
                if (!ScalarTraits<S>::is_zero(coeff)) {
                    S last = (j == ell + 1) ? x : ucolor(j - 1)[uIII[j - ell - 2]];
                    coeff = coeff * kern::inv_prod_f<S>(q_, ucolor(j), last);
                }

                // t-chain, colors ell+1..j-1
                for (int p = ell + 1; p <= j - 1 && !ScalarTraits<S>::is_zero(coeff); ++p) {
                    S a = tcolor(p)[tI[p - ell]];
                    S b = tcolor(p - 1)[tI[p - ell - 1]];
                    ParamSet<S> prev_rest = without_index(tcolor(p - 1), tI[p - ell - 1]);
                    ParamSet<S> second = without_index(tcolor(p), tI[p - ell]);
                    coeff = coeff * kern::inv_h(q_, a, b) *
                            kern::inv_prod_f<S>(q_, a, prev_rest) *
                            kern::prod_f<S>(q_, a, second);
                }
                if (ScalarTraits<S>::is_zero(coeff)) continue;

                HcTerm<S> term;
                term.coeff = coeff;
                term.us_child.resize(ncolors);
                term.ts_child.resize(ncolors);
                for (int s = 1; s <= ncolors; ++s) {
                    if (s < ell) {
                        term.us_child[s - 1] = ucolor(s);
                        term.ts_child[s - 1] = without_index(w[s - 1], wI[s - 1]);
                    } else if (s == ell) {
                        term.us_child[s - 1] = without_index(ucolor(s), pos);
                        term.ts_child[s - 1] = without_index(tcolor(s), tI[0]);
                    } else if (s <= j - 1) {
                        term.us_child[s - 1] = without_index(ucolor(s), uIII[s - ell - 1]);
                        term.ts_child[s - 1] = without_index(tcolor(s), tI[s - ell]);
                    } else {
                        term.us_child[s - 1] = ucolor(s);
                        term.ts_child[s - 1] = tcolor(s);
                    }
                }
                terms.push_back(std::move(term));
            }
        }
        return terms;
    }

    std::vector<HcTerm<S>> zbar_terms(int ell, const ColoredSets<S>& us,
                                      const ColoredSets<S>& ts) {
        check_key(us, ts);
        const int ncolors = static_cast<int>(us.size());
        if (us[ell - 1].empty()) throw InfeasibleError("peel color is empty");
        const int pos = static_cast<int>(us[ell - 1].size()) - 1;
        const S x = us[ell - 1][pos];
        static const ParamSet<S> kEmpty;
        auto ucolor = [&](int p) -> const ParamSet<S>& {
            return (p < 1 || p > ncolors) ? kEmpty : us[p - 1];
        };
        auto tcolor = [&](int p) -> const ParamSet<S>& {
            return (p < 1 || p > ncolors) ? kEmpty : ts[p - 1];
        };
        ColoredSets<S> w(ncolors);
        for (int p = 1; p <= ncolors; ++p) w[p - 1] = with_value(tcolor(p), x);

        std::vector<HcTerm<S>> terms;
        for (int i = 1; i <= ell; ++i) {
            // radices: u^s_I for s = i..ell-1, t^s_III for s = i..ell,
            // w^s_III for s = ell+1..N-1
            std::vector<int> radix;
            for (int s = i; s <= ell - 1; ++s) radix.push_back(ucolor(s).size());
            for (int s = i; s <= ell; ++s) radix.push_back(tcolor(s).size());
            for (int s = ell + 1; s <= ncolors; ++s) radix.push_back(w[s - 1].size());
            MultiIndex odo(radix);
            while (auto pick = odo.next()) {
                int o = 0;
                std::vector<int> uI(ell - i), tIII(ell - i + 1), wIII(ncolors - ell);
                for (int s = i; s <= ell - 1; ++s) uI[s - i] = (*pick)[o++];
                for (int s = i; s <= ell; ++s) tIII[s - i] = (*pick)[o++];
                for (int s = ell + 1; s <= ncolors; ++s) wIII[s - ell - 1] = (*pick)[o++];

                S coeff = kern::prod_f<S>(q_, x, tcolor(ell)) *
                          kern::inv_prod_f<S>(q_, ucolor(ell + 1), x);

                // u-chain: pairs g(u^p_I, u^{p-1}_I)/f(u^p_I, u^{p-1}) for
                // p = i+1..ell with u^ell_I = x, leftover at p = i.
                auto uI_val = [&](int p) -> S {
                    return p == ell ? x : ucolor(p)[uI[p - i]];
                };
                coeff = coeff * kern::inv_prod_f<S>(q_, uI_val(i), ucolor(i - 1));
                for (int p = i; p <= ell - 1 && !ScalarTraits<S>::is_zero(coeff); ++p) {
                    ParamSet<S> second = without_index(ucolor(p), uI[p - i]);
                    coeff = coeff * kern::prod_f<S>(q_, uI_val(p), second);
                }
                for (int p = i + 1; p <= ell && !ScalarTraits<S>::is_zero(coeff); ++p) {
                    ParamSet<S> rest = without_index(ucolor(p - 1), uI[p - 1 - i]);
                    coeff = coeff * kern::inv_h(q_, uI_val(p), uI_val(p - 1)) *
                            kern::inv_prod_f<S>(q_, uI_val(p), rest);
                }

                // t/w-chain: pairs g~(A^{p}_III, prev_III)/f(A^{p}, prev_III)
                // walking p = i+1..N, where A^p is t^p for p <= ell and
                // w^p for p > ell, with w^N = {x}.
                auto third_val = [&](int p) -> S {
                    if (p <= ell) return tcolor(p)[tIII[p - i]];
                    if (p == ncolors + 1) return x;
                    return w[p - 1][wIII[p - ell - 1]];
                };
                for (int p = i; p <= ell && !ScalarTraits<S>::is_zero(coeff); ++p) {
                    ParamSet<S> second = without_index(tcolor(p), tIII[p - i]);
                    coeff = coeff * kern::prod_f<S>(q_, second, third_val(p));
                }
                for (int p = ell + 1; p <= ncolors && !ScalarTraits<S>::is_zero(coeff); ++p) {
                    ParamSet<S> second = without_index(w[p - 1], wIII[p - ell - 1]);
                    coeff = coeff * kern::prod_f<S>(q_, second, third_val(p));
                }
                for (int p = i + 1; p <= ncolors + 1 && !ScalarTraits<S>::is_zero(coeff); ++p) {
                    ParamSet<S> parent_rest;
                    if (p <= ell)
                        parent_rest = without_index(tcolor(p), tIII[p - i]);
                    else if (p == ncolors + 1)
                        parent_rest = kEmpty;
                    else
                        parent_rest = without_index(w[p - 1], wIII[p - ell - 1]);
                    coeff = coeff * kern::inv_ht(q_, third_val(p), third_val(p - 1)) *
                            kern::inv_prod_f<S>(q_, parent_rest, third_val(p - 1));
                }
                if (ScalarTraits<S>::is_zero(coeff)) continue;

                HcTerm<S> term;
                term.coeff = coeff;
                term.us_child.resize(ncolors);
                term.ts_child.resize(ncolors);
                for (int s = 1; s <= ncolors; ++s) {
                    if (s < i) {
                        term.us_child[s - 1] = ucolor(s);
                        term.ts_child[s - 1] = tcolor(s);
                    } else if (s < ell) {
                        term.us_child[s - 1] = without_index(ucolor(s), uI[s - i]);
                        term.ts_child[s - 1] = without_index(tcolor(s), tIII[s - i]);
                    } else if (s == ell) {
                        term.us_child[s - 1] = without_index(ucolor(s), pos);
                        term.ts_child[s - 1] = without_index(tcolor(s), tIII[s - i]);
                    } else {
                        term.us_child[s - 1] = ucolor(s);
                        term.ts_child[s - 1] = without_index(w[s - 1], wIII[s - ell - 1]);
                    }
                }
                terms.push_back(std::move(term));
            }
        }
        return terms;
    }

    // Literal transcription of the lowest-color extreme of the Z recursion
    // (only the peel of color 1; valid for keys with no repeated points).
    // Kept separate from z_terms so the two code paths can be compared as
    // term multisets.
    std::vector<HcTerm<S>> z_terms_extreme_low(const ColoredSets<S>& us,
                                               const ColoredSets<S>& ts) {
        check_key(us, ts);
        const int ncolors = static_cast<int>(us.size());
        if (us[0].empty()) throw InfeasibleError("peel color is empty");
        const int pos = static_cast<int>(us[0].size()) - 1;
        const S x = us[0][pos];
        static const ParamSet<S> kEmpty;
        auto ucolor = [&](int p) -> const ParamSet<S>& {
            return (p < 1 || p > ncolors) ? kEmpty : us[p - 1];
        };
        auto tcolor = [&](int p) -> const ParamSet<S>& {
            return (p < 1 || p > ncolors) ? kEmpty : ts[p - 1];
        };

        std::vector<HcTerm<S>> terms;
        for (int j = 2; j <= ncolors + 1; ++j) {
            std::vector<int> radix;
            for (int s = 1; s <= j - 1; ++s) radix.push_back(tcolor(s).size());
            for (int s = 2; s <= j - 1; ++s) radix.push_back(ucolor(s).size());
            MultiIndex odo(radix);
            while (auto pick = odo.next()) {
                int o = 0;
                std::vector<int> tI(j - 1), uIII(j - 2);
                for (int s = 1; s <= j - 1; ++s) tI[s - 1] = (*pick)[o++];
                for (int s = 2; s <= j - 1; ++s) uIII[s - 2] = (*pick)[o++];

                auto uIII_val = [&](int p) -> S {
                    return p == 1 ? x : ucolor(p)[uIII[p - 2]];
                };
                ParamSet<S> t1_II = without_index(tcolor(1), tI[0]);
                S t1_I = tcolor(1)[tI[0]];
                S coeff = kern::g(q_, t1_I, x) * kern::prod_f<S>(q_, t1_II, x) *
                          kern::prod_f<S>(q_, t1_I, t1_II) *
                          kern::inv_prod_f<S>(q_, ucolor(2), x);
                for (int p = 2; p <= j - 1 && !ScalarTraits<S>::is_zero(coeff); ++p) {
                    S uIIIp = uIII_val(p);
                    ParamSet<S> uII = without_index(ucolor(p), uIII[p - 2]);
                    coeff = coeff * kern::gt(q_, uIIIp, uIII_val(p - 1)) *
                            kern::prod_f<S>(q_, uII, uIIIp) *
                            kern::inv_prod_f<S>(q_, ucolor(p + 1), uIIIp);
                    S tIp = tcolor(p)[tI[p - 1]];
                    ParamSet<S> tII = without_index(tcolor(p), tI[p - 1]);
                    coeff = coeff * kern::g(q_, tIp, tcolor(p - 1)[tI[p - 2]]) *
                            kern::prod_f<S>(q_, tIp, tII) *
                            kern::inv_prod_f<S>(q_, tIp, tcolor(p - 1));
                }
                if (ScalarTraits<S>::is_zero(coeff)) continue;

                HcTerm<S> term;
                term.coeff = coeff;
                term.us_child.resize(ncolors);
                term.ts_child.resize(ncolors);
                for (int s = 1; s <= ncolors; ++s) {
                    if (s == 1) {
                        term.us_child[0] = without_index(ucolor(1), pos);
                        term.ts_child[0] = t1_II;
                    } else if (s <= j - 1) {
                        term.us_child[s - 1] = without_index(ucolor(s), uIII[s - 2]);
                        term.ts_child[s - 1] = without_index(tcolor(s), tI[s - 1]);
                    } else {
                        term.us_child[s - 1] = ucolor(s);
                        term.ts_child[s - 1] = tcolor(s);
                    }
                }
                terms.push_back(std::move(term));
            }
        }
        return terms;
    }

    // Literal highest-color extreme of the Zbar recursion.
    std::vector<HcTerm<S>> zbar_terms_extreme_high(const ColoredSets<S>& us,
                                                   const ColoredSets<S>& ts) {
        check_key(us, ts);
        const int ncolors = static_cast<int>(us.size());
        const int ell = ncolors;
        if (us[ell - 1].empty()) throw InfeasibleError("peel color is empty");
        const int pos = static_cast<int>(us[ell - 1].size()) - 1;
        const S x = us[ell - 1][pos];
        static const ParamSet<S> kEmpty;
        auto ucolor = [&](int p) -> const ParamSet<S>& {
            return (p < 1 || p > ncolors) ? kEmpty : us[p - 1];
        };
        auto tcolor = [&](int p) -> const ParamSet<S>& {
            return (p < 1 || p > ncolors) ? kEmpty : ts[p - 1];
        };

        std::vector<HcTerm<S>> terms;
        for (int i = 1; i <= ell; ++i) {
            std::vector<int> radix;
            for (int s = i; s <= ell - 1; ++s) radix.push_back(ucolor(s).size());
            for (int s = i; s <= ell; ++s) radix.push_back(tcolor(s).size());
            MultiIndex odo(radix);
            while (auto pick = odo.next()) {
                int o = 0;
                std::vector<int> uI(ell - i), tIII(ell - i + 1);
                for (int s = i; s <= ell - 1; ++s) uI[s - i] = (*pick)[o++];
                for (int s = i; s <= ell; ++s) tIII[s - i] = (*pick)[o++];

                auto uI_val = [&](int p) -> S {
                    return p == ell ? x : ucolor(p)[uI[p - i]];
                };
                S tIIIl = tcolor(ell)[tIII[ell - i]];
                ParamSet<S> tII_l = without_index(tcolor(ell), tIII[ell - i]);
                S coeff = kern::gt(q_, x, tIIIl) * kern::prod_f<S>(q_, x, tII_l) *
                          kern::prod_f<S>(q_, tII_l, tIIIl) *
                          kern::inv_prod_f<S>(q_, x, ucolor(ell - 1));
                for (int p = i; p <= ell - 1 && !ScalarTraits<S>::is_zero(coeff); ++p) {
                    S tIIIp = tcolor(p)[tIII[p - i]];
                    ParamSet<S> tII = without_index(tcolor(p), tIII[p - i]);
                    coeff = coeff * kern::gt(q_, tcolor(p + 1)[tIII[p + 1 - i]], tIIIp) *
                            kern::prod_f<S>(q_, tII, tIIIp) *
                            kern::inv_prod_f<S>(q_, tcolor(p + 1), tIIIp);
                    S uIp = uI_val(p);
                    ParamSet<S> uII = without_index(ucolor(p), uI[p - i]);
                    coeff = coeff * kern::g(q_, uI_val(p + 1), uIp) *
                            kern::prod_f<S>(q_, uIp, uII) *
                            kern::inv_prod_f<S>(q_, uIp, ucolor(p - 1));
                }
                if (ScalarTraits<S>::is_zero(coeff)) continue;

                HcTerm<S> term;
                term.coeff = coeff;
                term.us_child.resize(ncolors);
                term.ts_child.resize(ncolors);
                for (int s = 1; s <= ncolors; ++s) {
                    if (s < i) {
                        term.us_child[s - 1] = ucolor(s);
                        term.ts_child[s - 1] = tcolor(s);
                    } else if (s < ell) {
                        term.us_child[s - 1] = without_index(ucolor(s), uI[s - i]);
                        term.ts_child[s - 1] = without_index(tcolor(s), tIII[s - i]);
                    } else {
                        term.us_child[s - 1] = without_index(ucolor(s), pos);
                        term.ts_child[s - 1] = tII_l;
                    }
                }
                terms.push_back(std::move(term));
            }
        }
        return terms;
    }

  private:
    void check_key(const ColoredSets<S>& us, const ColoredSets<S>& ts) const {
        if (us.size() != ts.size())
            throw InfeasibleError("highest coefficient: color count mismatch");
        for (size_t s = 0; s < us.size(); ++s)
            if (us[s].size() != ts[s].size())
                throw InfeasibleError("highest coefficient: |u^i| != |t^i|");
    }

    S value(bool bar, const ColoredSets<S>& us, const ColoredSets<S>& ts) {
        check_key(us, ts);
        ColoredSets<S> su = us, st = ts;
        for (auto& c : su) std::sort(c.begin(), c.end(), ScalarTraits<S>::less);
        for (auto& c : st) std::sort(c.begin(), c.end(), ScalarTraits<S>::less);
        if (total_cardinality(su) == 0) return S(1);
        std::string key = (bar ? "B|" : "Z|") + canonical_key(su) + canonical_key(st);
        {
            std::lock_guard<std::mutex> lock(mutex_);
            auto it = memo_.find(key);
            if (it != memo_.end()) return it->second;
        }
        int ell = -1;
        const int ncolors = static_cast<int>(su.size());
        if (bar) {
            for (int p = ncolors; p >= 1; --p)
                if (!su[p - 1].empty()) { ell = p; break; }
        } else {
            for (int p = 1; p <= ncolors; ++p)
                if (!su[p - 1].empty()) { ell = p; break; }
        }
        auto terms = bar ? zbar_terms(ell, su, st) : z_terms(ell, su, st);
        S acc(0);
        for (const auto& t : terms)
            acc = acc + t.coeff * value(bar, t.us_child, t.ts_child);
        // insert-if-absent: concurrent computations of the same key agree,
        // the first stored value wins
        std::lock_guard<std::mutex> lock(mutex_);
        return memo_.try_emplace(std::move(key), std::move(acc)).first->second;
    }

    S q_;
    std::mutex mutex_;
    std::unordered_map<std::string, S> memo_;
};

// Transpose pairing (no conjugation).
template <class S>
S pairing(const Vector<S>& a, const Vector<S>& b) {
    S acc(0);
    for (long k = 0; k < a.size(); ++k) acc = acc + a(k) * b(k);
    return acc;
}

// S(u|t) by building both vectors on the chain.
template <class S>
S scalar_product_direct(BetheBuilder<S>& bb, const ColoredSets<S>& us,
                        const ColoredSets<S>& ts) {
    return pairing(bb.dual(us), bb.bethe(ts));
}

// S(u|t) from the partition sum over highest coefficients, with beta from
// the chain. Requires matched per-color cardinalities.
template <class S>
S scalar_product_partition_sum(BetheBuilder<S>& bb, HighestCoefficients<S>& hc,
                               const ColoredSets<S>& us, const ColoredSets<S>& ts) {
    const int ncolors = static_cast<int>(us.size());
    for (int s = 0; s < ncolors; ++s)
        if (us[s].size() != ts[s].size())
            throw InfeasibleError("partition sum needs |u^i| = |t^i|");
    const S& q = bb.q();

    S total(0);
    std::vector<int> kradix(ncolors);
    for (int s = 0; s < ncolors; ++s) kradix[s] = static_cast<int>(us[s].size()) + 1;
    MultiIndex kodo(kradix);
    while (auto ks = kodo.next()) {
        std::vector<int> sizes(2 * ncolors);
        std::vector<ColorSplitSpec> specs(2 * ncolors);
        for (int s = 0; s < ncolors; ++s) {
            sizes[s] = static_cast<int>(us[s].size());
            sizes[ncolors + s] = static_cast<int>(ts[s].size());
            specs[s].size_first = (*ks)[s];
            specs[ncolors + s].size_first = (*ks)[s];
        }
        PartitionStream stream(sizes, specs);
        while (auto part = stream.next()) {
            ColoredSets<S> uI(ncolors), uII(ncolors), tI(ncolors), tII(ncolors);
            for (int s = 0; s < ncolors; ++s) {
                uI[s] = select_indices(us[s], part->first[s]);
                uII[s] = select_indices(us[s], part->second(s, sizes[s]));
                tI[s] = select_indices(ts[s], part->first[ncolors + s]);
                tII[s] = select_indices(ts[s], part->second(ncolors + s, sizes[ncolors + s]));
            }
            S w(1);
            for (int s = 0; s < ncolors; ++s) {
                w = w * kern::prod_f<S>(q, uII[s], uI[s]) * kern::prod_f<S>(q, tI[s], tII[s]);
                w = w * bb.beta_set(s + 1, uII[s]) * bb.beta_set(s + 1, tI[s]);
            }
            for (int s = 0; s + 1 < ncolors; ++s)
                w = w * kern::inv_prod_f<S>(q, uII[s + 1], uI[s]) *
                    kern::inv_prod_f<S>(q, tI[s + 1], tII[s]);
            // Z and Zbar live on q alone; hc is shared
            HighestCoefficients<S>& h = hc;
            total = total + w * h.z(uI, tI) * h.zbar(uII, tII);
        }
    }
    return total;
}

}  // namespace qbethe
