#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <unordered_map>

#include "qbethe/chain.hpp"
#include "qbethe/kernels.hpp"
#include "qbethe/params.hpp"
#include "qbethe/partitions.hpp"

// Off-shell Bethe vectors constructed purely from the recurrence that peels
// one parameter z off color ell:
//
//   B(.., {z, t^ell}, ..) = sum_{i<=ell<j} sum_part  T_{i,j}(z)/lambda_ell(z)
//       * B(child) / (f(z, t^{ell-1}) f(t^{ell+1}, z))
//       * prod_{p=i}^{ell-1} beta_p(t^p_I) g~(t^{p+1}_I, t^p_I) f(t^p_I, t^p_II)
//                            / f(t^p_I, t^{p-1})
//       * prod_{p=ell+1}^{j-1} g(t^p_III, t^{p-1}_III) f(t^p_II, t^p_III)
//                            / f(t^{p+1}, t^p_III)
//
// where |t^p_I| = 1 for p = i..ell-1, |t^p_III| = 1 for p = ell+1..j-1,
// boundary singletons t^ell_I = t^ell_III = {z}, t^0 = t^N = empty, and the
// child vector keeps the II parts. Dual covectors satisfy the mirrored
// recurrence with g and g~ exchanged and T_{j,i}(z) acting from the right.
//
// Coefficients are evaluated in regrouped form: each g/g~ numerator is tied
// to the reciprocal f-product that contains the same point,
//
//   g(a,b)/f(a,B) = (1/h(a,b)) / f(a, B\b),   b in B,
//   g~(a,b)/f(A,b) = (1/h~(a,b)) / f(A\a, b), a in A,
//
// so configurations where z already occurs in a neighbouring color (every
// action formula produces such children) stay finite, and terms whose
// leftover reciprocal f-products sit on a pole of f drop out.

namespace qbethe {

template <class S>
void validate_bethe_sets(const ChainSpec<S>& c, const ColoredSets<S>& sets) {
    if (static_cast<int>(sets.size()) != c.rank - 1)
        throw ConfigError("need rank-1 colored parameter sets");
    using T = ScalarTraits<S>;
    for (const auto& color : sets) {
        for (size_t a = 0; a < color.size(); ++a) {
            if (T::is_zero(color[a]))
                throw ConfigError("Bethe parameters must be nonzero");
            for (const auto& x : c.xi)
                if (T::is_zero(color[a] - x))
                    throw PoleError("Bethe parameter collides with an inhomogeneity");
            for (size_t b = a + 1; b < color.size(); ++b)
                if (T::is_zero(color[a] - color[b]))
                    throw ConfigError("parameters within one color must be distinct");
        }
    }
}

// One term of a peel step: weight, entry indices, and the smaller spec.
template <class S>
struct PeelTerm {
    S coeff;
    int row = 1, col = 1;
    ColoredSets<S> child;
};

// Terms of one peel step. `beta` evaluates beta_p at a point. The peeled
// parameter is sets[ell-1][pos]; 1/lambda_ell(z) is NOT included here.
// dual_side selects the mirrored recurrence (and swaps row/col so that the
// term reads "apply T_{row,col} from the right" for covectors).
template <class S>
std::vector<PeelTerm<S>> peel_terms(const ChainSpec<S>& chain,
                                    const std::function<S(int, const S&)>& beta,
                                    const ColoredSets<S>& sets, int ell, int pos,
                                    bool dual_side) {
    const int ncolors = chain.rank - 1;
    const S& q = chain.q;
    const S z = sets[ell - 1][pos];
    ColoredSets<S> rem = sets;
    rem[ell - 1] = without_index(rem[ell - 1], pos);

    static const ParamSet<S> kEmpty;
    auto color_of = [&](int p) -> const ParamSet<S>& {
        if (p < 1 || p > ncolors) return kEmpty;
        return rem[p - 1];
    };

    std::vector<PeelTerm<S>> terms;
    for (int i = 1; i <= ell; ++i) {
        for (int j = ell + 1; j <= chain.rank; ++j) {
            bool feasible = true;
            std::vector<int> sizes(ncolors);
            std::vector<ColorSplitSpec> specs(ncolors);
            for (int p = 1; p <= ncolors; ++p)
                sizes[p - 1] = static_cast<int>(color_of(p).size());
            for (int p = i; p <= ell - 1 && feasible; ++p) {
                specs[p - 1].size_first = 1;
                if (sizes[p - 1] < 1) feasible = false;
            }
            for (int p = ell + 1; p <= j - 1 && feasible; ++p) {
                specs[p - 1].size_third = 1;
                if (sizes[p - 1] < 1) feasible = false;
            }
            if (!feasible) continue;  // realizes the empty-color truncation

            PartitionStream stream(sizes, specs);
            while (auto part = stream.next()) {
                // singleton of color p in the left resp. right chain;
                // index -1 encodes the boundary value z at p = ell.
                auto first_idx = [&](int p) { return p == ell ? -1 : part->first[p - 1][0]; };
                auto third_idx = [&](int p) { return p == ell ? -1 : part->third[p - 1][0]; };
                auto first_val = [&](int p) -> S {
                    return p == ell ? z : color_of(p)[first_idx(p)];
                };
                auto third_val = [&](int p) -> S {
                    return p == ell ? z : color_of(p)[third_idx(p)];
                };

                S coeff(1);
                // left chain, colors i..ell-1 split into (I, II)
                for (int p = i; p <= ell - 1; ++p) {
                    S a = first_val(p);
                    ParamSet<S> second =
                        select_indices(color_of(p), part->second(p - 1, sizes[p - 1]));
                    coeff = coeff * beta(p, a) * kern::prod_f<S>(q, a, second);
                }
                coeff = coeff * kern::inv_prod_f<S>(q, first_val(i), color_of(i - 1));
                for (int p = i + 1; p <= ell; ++p) {
                    S a = first_val(p);
                    const ParamSet<S>& parent = color_of(p - 1);
                    ParamSet<S> rest = without_index(parent, first_idx(p - 1));
                    S cancelled = dual_side ? kern::inv_h(q, a, first_val(p - 1))
                                            : kern::inv_ht(q, a, first_val(p - 1));
                    coeff = coeff * cancelled * kern::inv_prod_f<S>(q, a, rest);
                }

                // right chain, colors ell+1..j-1 split into (II, III)
                for (int p = ell + 1; p <= j - 1; ++p) {
                    S a = third_val(p);
                    ParamSet<S> second =
                        select_indices(color_of(p), part->second(p - 1, sizes[p - 1]));
                    coeff = coeff * kern::prod_f<S>(q, second, a);
                    ParamSet<S> rest = without_index(color_of(p), third_idx(p));
                    S cancelled = dual_side ? kern::inv_ht(q, a, third_val(p - 1))
                                            : kern::inv_h(q, a, third_val(p - 1));
                    coeff = coeff * cancelled *
                            kern::inv_prod_f<S>(q, rest, third_val(p - 1));
                }
                coeff = coeff * kern::inv_prod_f<S>(q, color_of(j), third_val(j - 1));

                if (ScalarTraits<S>::is_zero(coeff)) continue;

                PeelTerm<S> term;
                term.coeff = coeff;
                term.row = dual_side ? j : i;
                term.col = dual_side ? i : j;
                term.child.resize(ncolors);
                for (int p = 1; p <= ncolors; ++p) {
                    if ((p >= i && p <= ell - 1) || (p >= ell + 1 && p <= j - 1))
                        term.child[p - 1] =
                            select_indices(color_of(p), part->second(p - 1, sizes[p - 1]));
                    else
                        term.child[p - 1] = color_of(p);
                }
                terms.push_back(std::move(term));
            }
        }
    }
    return terms;
}

// Builds off-shell Bethe vectors and dual covectors on one chain, with
// memoization keyed by the sorted parameter multisets. The canonical route
// peels the last element of the lowest-index nonempty color; explicit
// routes are for the consistency tests. Caches are insert-if-absent behind
// a lock, so independent vectors may be built concurrently; one build runs
// sequentially on its calling thread.
template <class S>
class BetheBuilder {
  public:
    explicit BetheBuilder(ChainSpec<S> chain) : chain_(std::move(chain)) {
        validate(chain_);
    }

    const ChainSpec<S>& chain() const { return chain_; }
    const S& q() const { return chain_.q; }

    S lambda(int i, const S& z) {
        std::string key = std::to_string(i) + "|" + ScalarTraits<S>::key(z);
        {
            std::lock_guard<std::mutex> lock(mutex_);
            auto it = lambda_cache_.find(key);
            if (it != lambda_cache_.end()) return it->second;
        }
        S val = lambda_eval(chain_, i, z);
        std::lock_guard<std::mutex> lock(mutex_);
        return lambda_cache_.try_emplace(std::move(key), std::move(val)).first->second;
    }

    S beta(int p, const S& z) { return checked_div(lambda(p + 1, z), lambda(p, z)); }

    S beta_set(int p, const ParamSet<S>& xs) {
        S acc(1);
        for (const auto& x : xs) acc = acc * beta(p, x);
        return acc;
    }

    Vector<S> bethe(const ColoredSets<S>& sets) {
        validate_bethe_sets(chain_, sets);
        if (total_cardinality(sets) == 0) return vacuum(chain_);
        std::string key = canonical_key(sets);
        {
            std::lock_guard<std::mutex> lock(mutex_);
            auto it = bethe_cache_.find(key);
            if (it != bethe_cache_.end()) return it->second;
        }
        auto [ell, pos] = canonical_peel(sets);
        Vector<S> v = eval_route(sets, ell, pos, /*dual=*/false);
        std::lock_guard<std::mutex> lock(mutex_);
        return bethe_cache_.try_emplace(std::move(key), std::move(v)).first->second;
    }

    // One forced peel (ell, pos); children go through the canonical cache.
    Vector<S> bethe_route(const ColoredSets<S>& sets, int ell, int pos) {
        validate_bethe_sets(chain_, sets);
        return eval_route(sets, ell, pos, /*dual=*/false);
    }

    Vector<S> dual(const ColoredSets<S>& sets) {
        validate_bethe_sets(chain_, sets);
        if (total_cardinality(sets) == 0) return dual_vacuum(chain_);
        std::string key = canonical_key(sets);
        {
            std::lock_guard<std::mutex> lock(mutex_);
            auto it = dual_cache_.find(key);
            if (it != dual_cache_.end()) return it->second;
        }
        auto [ell, pos] = canonical_peel(sets);
        Vector<S> v = eval_route(sets, ell, pos, /*dual=*/true);
        std::lock_guard<std::mutex> lock(mutex_);
        return dual_cache_.try_emplace(std::move(key), std::move(v)).first->second;
    }

    Vector<S> dual_route(const ColoredSets<S>& sets, int ell, int pos) {
        validate_bethe_sets(chain_, sets);
        return eval_route(sets, ell, pos, /*dual=*/true);
    }

    // Alternative normalization prod_i beta_i(t^i)^{-1} B(t).
    Vector<S> beta_normalized(const ColoredSets<S>& sets) {
        Vector<S> v = bethe(sets);
        S scale(1);
        for (int p = 1; p <= chain_.rank - 1; ++p)
            scale = scale * beta_set(p, sets[p - 1]);
        return v / scale;
    }

    ZeroModes<S>& zero_modes() {
        std::call_once(zero_modes_once_, [this] {
            zero_modes_ = std::make_unique<ZeroModes<S>>(chain_);
        });
        return *zero_modes_;
    }

  private:
    std::pair<int, int> canonical_peel(const ColoredSets<S>& sets) const {
        for (int p = 1; p <= chain_.rank - 1; ++p)
            if (!sets[p - 1].empty())
                return {p, static_cast<int>(sets[p - 1].size()) - 1};
        throw std::logic_error("canonical peel on empty sets");
    }

    Vector<S> eval_route(const ColoredSets<S>& sets, int ell, int pos, bool dual_side) {
        const S z = sets[ell - 1][pos];
        auto beta_fn = [this](int p, const S& x) { return beta(p, x); };
        auto terms = peel_terms<S>(chain_, beta_fn, sets, ell, pos, dual_side);
        S lam = lambda(ell, z);
        Vector<S> acc = Vector<S>::Zero(chain_.dim());
        for (const auto& t : terms) {
            Vector<S> child = dual_side ? dual(t.child) : bethe(t.child);
            Vector<S> applied = dual_side
                                    ? apply_entry_dual(chain_, t.row, t.col, z, child)
                                    : apply_entry(chain_, t.row, t.col, z, child);
            acc += (t.coeff / lam) * applied;
        }
        return acc;
    }

    ChainSpec<S> chain_;
    std::mutex mutex_;  // guards the three caches; values are insert-if-absent
    std::unordered_map<std::string, S> lambda_cache_;
    std::unordered_map<std::string, Vector<S>> bethe_cache_;
    std::unordered_map<std::string, Vector<S>> dual_cache_;
    std::once_flag zero_modes_once_;
    std::unique_ptr<ZeroModes<S>> zero_modes_;
};

}  // namespace qbethe
