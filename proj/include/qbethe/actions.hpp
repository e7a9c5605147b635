#pragma once

#include "qbethe/bethe.hpp"

// Action formulas: the product T_{i,j}(z_1)..T_{i,j}(z_r) applied to an
// off-shell Bethe vector expands as a partition sum
//
//   T_{i,j}(zbar) B(t) = lambda_1(zbar) sum_part B(w_II) C(w_I; w_II; w_III)
//
// over splittings of w^p = {zbar, t^p} with |w^p_I| = r for p < i,
// |w^p_III| = r for p >= j, boundary w^0_I = w^N_III = zbar. The r = 1
// coefficient uses 1/h and 1/h~; general r replaces them by the cancelled
// Izergin ratios K/f and K~/f. Zero-coefficient terms (a reciprocal
// f-product on a pole of f) are dropped eagerly.

namespace qbethe {

template <class S>
struct ActionTerm {
    S coeff;                  // includes the lambda_1(zbar) prefactor
    ColoredSets<S> result;    // the w_II collection
    PartitionAssignment assignment;
};

namespace detail {

// Shared partition-driven evaluator for the single and multiple action.
template <class S>
std::vector<ActionTerm<S>> action_terms(BetheBuilder<S>& bb, int i, int j,
                                        const ParamSet<S>& zs,
                                        const ColoredSets<S>& ts, bool izergin_form) {
    const ChainSpec<S>& chain = bb.chain();
    const S& q = chain.q;
    const int ncolors = chain.rank - 1;
    const int r = static_cast<int>(zs.size());

    ColoredSets<S> w(ncolors);
    for (int p = 1; p <= ncolors; ++p) {
        w[p - 1] = ts[p - 1];
        for (const auto& z : zs) w[p - 1].push_back(z);
    }
    const ParamSet<S>& zbar = zs;
    static const ParamSet<S> kEmpty;

    std::vector<int> sizes(ncolors);
    std::vector<ColorSplitSpec> specs(ncolors);
    bool feasible = true;
    for (int p = 1; p <= ncolors; ++p) {
        sizes[p - 1] = static_cast<int>(w[p - 1].size());
        if (p < i) specs[p - 1].size_first = r;
        if (p >= j) specs[p - 1].size_third = r;
        if (specs[p - 1].size_first + specs[p - 1].size_third > sizes[p - 1])
            feasible = false;
    }
    std::vector<ActionTerm<S>> terms;
    if (!feasible) return terms;  // the operator annihilates (e.g. lowering on vacuum)

    S lam1(1);
    for (const auto& z : zbar) lam1 = lam1 * bb.lambda(1, z);

    PartitionStream stream(sizes, specs);
    while (auto part = stream.next()) {
        auto wI = [&](int p) -> ParamSet<S> {
            if (p == 0) return zbar;
            if (p < 1 || p > ncolors) return kEmpty;
            return select_indices(w[p - 1], part->first[p - 1]);
        };
        auto wIII = [&](int p) -> ParamSet<S> {
            if (p == chain.rank) return zbar;
            if (p < 1 || p > ncolors) return kEmpty;
            return select_indices(w[p - 1], part->third[p - 1]);
        };
        auto wII = [&](int p) -> ParamSet<S> {
            if (p < 1 || p > ncolors) return kEmpty;
            return select_indices(w[p - 1], part->second(p - 1, sizes[p - 1]));
        };

        S coeff = lam1;
        // lowering block, present for i > j
        for (int p = j; p <= i - 1 && !ScalarTraits<S>::is_zero(coeff); ++p)
            coeff = coeff * kern::prod_f<S>(q, wI(p), wIII(p));
        for (int p = j; p <= i - 2 && !ScalarTraits<S>::is_zero(coeff); ++p)
            coeff = coeff * kern::inv_prod_f<S>(q, wI(p + 1), wIII(p));
        // raising chain p = 1..i-1
        for (int p = 1; p <= i - 1 && !ScalarTraits<S>::is_zero(coeff); ++p) {
            ParamSet<S> a = wI(p), b = wI(p - 1);
            coeff = coeff * bb.beta_set(p, a) * kern::prod_f<S>(q, a, wII(p)) *
                    kern::inv_prod_f<S>(q, a, wII(p - 1));
            coeff = coeff * (izergin_form ? kern::izergin_k_over_f<S>(q, a, b)
                                          : kern::inv_h(q, a[0], b[0]));
        }
        // lowering chain p = j..N-1
        for (int p = j; p <= ncolors && !ScalarTraits<S>::is_zero(coeff); ++p) {
            ParamSet<S> a = wIII(p + 1), b = wIII(p);
            coeff = coeff * kern::prod_f<S>(q, wII(p), b) *
                    kern::inv_prod_f<S>(q, wII(p + 1), b);
            coeff = coeff * (izergin_form ? kern::izergin_kt_over_f<S>(q, a, b)
                                          : kern::inv_ht(q, a[0], b[0]));
        }
        if (ScalarTraits<S>::is_zero(coeff)) continue;

        ActionTerm<S> term;
        term.coeff = coeff;
        term.result.resize(ncolors);
        for (int p = 1; p <= ncolors; ++p) term.result[p - 1] = wII(p);
        term.assignment = *part;
        terms.push_back(std::move(term));
    }
    return terms;
}

}  // namespace detail

// T_{i,j}(z) B(t) as a term list, r = 1 coefficient form.
template <class S>
std::vector<ActionTerm<S>> single_action(BetheBuilder<S>& bb, int i, int j, const S& z,
                                         const ColoredSets<S>& ts) {
    ParamSet<S> zs{z};
    return detail::action_terms(bb, i, j, zs, ts, /*izergin_form=*/false);
}

// T_{i,j}(z_1)...T_{i,j}(z_r) B(t) as a term list, Izergin coefficient form.
template <class S>
std::vector<ActionTerm<S>> multi_action(BetheBuilder<S>& bb, int i, int j,
                                        const ParamSet<S>& zs, const ColoredSets<S>& ts) {
    return detail::action_terms(bb, i, j, zs, ts, /*izergin_form=*/true);
}

// T^-_{i+1,i}[0] B(t): r_i terms, one per removable parameter of color i.
template <class S>
std::vector<ActionTerm<S>> zero_mode_action(BetheBuilder<S>& bb, int i,
                                            const ColoredSets<S>& ts) {
    const ChainSpec<S>& chain = bb.chain();
    const S& q = chain.q;
    const int ncolors = chain.rank - 1;
    auto r_of = [&](int p) -> long {
        if (p < 1 || p > ncolors) return 0;
        return static_cast<long>(ts[p - 1].size());
    };
    static const ParamSet<S> kEmpty;
    auto color_of = [&](int p) -> const ParamSet<S>& {
        if (p < 1 || p > ncolors) return kEmpty;
        return ts[p - 1];
    };

    const S qgap = q - checked_div(S(1), q);
    const S& kap_i = bb.zero_modes().kappa(i);
    const S& kap_i1 = bb.zero_modes().kappa(i + 1);
    const long ri = r_of(i), rim = r_of(i - 1), rip = r_of(i + 1);

    std::vector<ActionTerm<S>> terms;
    for (int ell = 0; ell < ri; ++ell) {
        const S t = ts[i - 1][ell];
        ParamSet<S> rest = without_index(ts[i - 1], ell);
        S raise = kap_i * pow_int(q, ri - rim - 1) * bb.beta(i, t) *
                  kern::prod_f<S>(q, t, rest) *
                  kern::inv_prod_f<S>(q, t, color_of(i - 1));
        S lower = kap_i1 * pow_int(q, rip - ri + 1) * kern::prod_f<S>(q, rest, t) *
                  kern::inv_prod_f<S>(q, color_of(i + 1), t);
        ActionTerm<S> term;
        term.coeff = qgap * (raise - lower);
        term.result = ts;
        term.result[i - 1] = rest;
        terms.push_back(std::move(term));
    }
    return terms;
}

// sum_k coeff_k B(result_k)
template <class S>
Vector<S> action_sum(BetheBuilder<S>& bb, const std::vector<ActionTerm<S>>& terms) {
    Vector<S> acc = Vector<S>::Zero(bb.chain().dim());
    for (const auto& t : terms) acc += t.coeff * bb.bethe(t.result);
    return acc;
}

template <class S>
long first_mismatch(const Vector<S>& a, const Vector<S>& b) {
    if (a.size() != b.size()) return 0;
    for (long k = 0; k < a.size(); ++k)
        if (!ScalarTraits<S>::is_zero(a(k) - b(k))) return k;
    return -1;
}

struct ActionCheck {
    bool pass = false;
    long mismatch_index = -1;  // first differing amplitude, -1 when equal
    size_t term_count = 0;
};

// Formula prediction vs direct operator application, exact comparison.
// perturb (a term index) is a negative-control hook multiplying that
// term's coefficient by 2 before summing.
template <class S>
ActionCheck verify_single_action(BetheBuilder<S>& bb, int i, int j, const S& z,
                                 const ColoredSets<S>& ts, long perturb = -1) {
    auto terms = single_action(bb, i, j, z, ts);
    if (perturb >= 0 && perturb < static_cast<long>(terms.size()))
        terms[perturb].coeff = terms[perturb].coeff * S(2);
    Vector<S> predicted = action_sum(bb, terms);
    Vector<S> direct = apply_entry(bb.chain(), i, j, z, bb.bethe(ts));
    ActionCheck chk;
    chk.term_count = terms.size();
    chk.mismatch_index = first_mismatch(predicted, direct);
    chk.pass = chk.mismatch_index < 0;
    return chk;
}

// Multiple action vs the ordered operator composition. Checks both
// composition orders (the entries at equal indices commute).
template <class S>
ActionCheck verify_multi_action(BetheBuilder<S>& bb, int i, int j, const ParamSet<S>& zs,
                                const ColoredSets<S>& ts) {
    auto terms = multi_action(bb, i, j, zs, ts);
    Vector<S> predicted = action_sum(bb, terms);
    Vector<S> forward = bb.bethe(ts);
    for (auto it = zs.rbegin(); it != zs.rend(); ++it)
        forward = apply_entry(bb.chain(), i, j, *it, forward);
    Vector<S> backward = bb.bethe(ts);
    for (const auto& z : zs) backward = apply_entry(bb.chain(), i, j, z, backward);
    ActionCheck chk;
    chk.term_count = terms.size();
    chk.mismatch_index = first_mismatch(predicted, forward);
    if (chk.mismatch_index < 0) chk.mismatch_index = first_mismatch(predicted, backward);
    chk.pass = chk.mismatch_index < 0;
    return chk;
}

// Zero-mode action formula vs the z -> 0 operator.
template <class S>
ActionCheck verify_zero_mode_action(BetheBuilder<S>& bb, int i, const ColoredSets<S>& ts) {
    auto terms = zero_mode_action(bb, i, ts);
    Vector<S> predicted = action_sum(bb, terms);
    Vector<S> direct = bb.zero_modes().lower(i, bb.bethe(ts));
    ActionCheck chk;
    chk.term_count = terms.size();
    chk.mismatch_index = first_mismatch(predicted, direct);
    chk.pass = chk.mismatch_index < 0;
    return chk;
}

}  // namespace qbethe
