#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "qbethe/rational.hpp"

namespace qbethe {

// One set of spectral parameters. Semantically a multiset; the order is
// only used to make enumeration deterministic.
template <class S>
using ParamSet = std::vector<S>;

// Colored collection t^1..t^{N-1}.
template <class S>
using ColoredSets = std::vector<ParamSet<S>>;

template <class S>
ParamSet<S> without_index(const ParamSet<S>& s, int idx) {
    ParamSet<S> r = s;
    r.erase(r.begin() + idx);
    return r;
}

template <class S>
ParamSet<S> with_value(const ParamSet<S>& s, const S& v) {
    ParamSet<S> r = s;
    r.push_back(v);
    return r;
}

template <class S>
ParamSet<S> select_indices(const ParamSet<S>& s, const std::vector<int>& idx) {
    ParamSet<S> r;
    r.reserve(idx.size());
    for (int i : idx) r.push_back(s[i]);
    return r;
}

template <class S>
ParamSet<S> drop_indices(const ParamSet<S>& s, const std::vector<int>& idx) {
    ParamSet<S> r;
    r.reserve(s.size());
    for (int i = 0; i < static_cast<int>(s.size()); ++i)
        if (!std::binary_search(idx.begin(), idx.end(), i)) r.push_back(s[i]);
    return r;
}

template <class S>
std::vector<int> cardinalities(const ColoredSets<S>& sets) {
    std::vector<int> r;
    r.reserve(sets.size());
    for (const auto& s : sets) r.push_back(static_cast<int>(s.size()));
    return r;
}

template <class S>
int total_cardinality(const ColoredSets<S>& sets) {
    int n = 0;
    for (const auto& s : sets) n += static_cast<int>(s.size());
    return n;
}

// Canonical cache key: per-color sorted parameter lists.
template <class S>
std::string canonical_key(const ColoredSets<S>& sets) {
    std::string key;
    for (const auto& raw : sets) {
        ParamSet<S> s = raw;
        std::sort(s.begin(), s.end(), ScalarTraits<S>::less);
        for (const auto& v : s) {
            key += ScalarTraits<S>::key(v);
            key += ',';
        }
        key += ';';
    }
    return key;
}

}  // namespace qbethe
