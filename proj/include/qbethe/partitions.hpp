#pragma once

#include <optional>
#include <vector>

#include "qbethe/errors.hpp"

namespace qbethe {

// One term of a partition sum: per color, the element indices assigned to
// the labeled subsets I and III; subset II is the complement.
struct PartitionAssignment {
    std::vector<std::vector<int>> first;  // indices in subset I, sorted
    std::vector<std::vector<int>> third;  // indices in subset III, sorted

    std::vector<int> second(int color, int set_size) const {
        std::vector<int> r;
        r.reserve(set_size);
        const auto& a = first[color];
        const auto& b = third[color];
        size_t ia = 0, ib = 0;
        for (int i = 0; i < set_size; ++i) {
            if (ia < a.size() && a[ia] == i) { ++ia; continue; }
            if (ib < b.size() && b[ib] == i) { ++ib; continue; }
            r.push_back(i);
        }
        return r;
    }
};

// Lexicographic enumeration of k-subsets of {0..n-1}.
class CombinationCursor {
  public:
    CombinationCursor(int n, int k) : n_(n), k_(k) {
        if (k < 0 || k > n) throw InfeasibleError("combination k out of range");
        idx_.resize(k);
        for (int i = 0; i < k; ++i) idx_[i] = i;
    }

    const std::vector<int>& current() const { return idx_; }

    bool advance() {
        if (k_ == 0) return false;
        int i = k_ - 1;
        while (i >= 0 && idx_[i] == n_ - k_ + i) --i;
        if (i < 0) return false;
        ++idx_[i];
        for (int j = i + 1; j < k_; ++j) idx_[j] = idx_[j - 1] + 1;
        return true;
    }

    void reset() {
        for (int i = 0; i < k_; ++i) idx_[i] = i;
    }

  private:
    int n_, k_;
    std::vector<int> idx_;
};

// Odometer over mixed radices, last position fastest. A zero radix means
// no assignments at all.
class MultiIndex {
  public:
    explicit MultiIndex(std::vector<int> radices) : radix_(std::move(radices)) {
        idx_.assign(radix_.size(), 0);
        done_ = false;
        for (int r : radix_)
            if (r <= 0) done_ = true;
    }

    std::optional<std::vector<int>> next() {
        if (done_) return std::nullopt;
        std::vector<int> out = idx_;
        int i = static_cast<int>(idx_.size()) - 1;
        while (i >= 0) {
            if (++idx_[i] < radix_[i]) break;
            idx_[i] = 0;
            --i;
        }
        if (i < 0) done_ = true;
        return out;
    }

  private:
    std::vector<int> radix_;
    std::vector<int> idx_;
    bool done_;
};

// Per-color request: split a set of given size into I (size_first),
// III (size_third) and the complement II.
struct ColorSplitSpec {
    int size_first = 0;
    int size_third = 0;
};

// Streams every assignment exactly once, lexicographically by element
// index: subset I runs fastest within a color through k-subsets in lex
// order, then subset III over the remaining indices; colors advance
// odometer-style with the last color fastest. Nothing is materialized.
class PartitionStream {
  public:
    PartitionStream(std::vector<int> set_sizes, std::vector<ColorSplitSpec> specs)
        : sizes_(std::move(set_sizes)), specs_(std::move(specs)) {
        if (sizes_.size() != specs_.size())
            throw InfeasibleError("partition stream: size/spec mismatch");
        const int m = static_cast<int>(sizes_.size());
        for (int c = 0; c < m; ++c) {
            if (specs_[c].size_first < 0 || specs_[c].size_third < 0 ||
                specs_[c].size_first + specs_[c].size_third > sizes_[c])
                throw InfeasibleError("partition stream: infeasible cardinalities");
        }
        for (int c = 0; c < m; ++c) {
            first_.emplace_back(sizes_[c], specs_[c].size_first);
            rebuild_third(c);
        }
        done_ = false;
    }

    // Number of colors.
    int colors() const { return static_cast<int>(sizes_.size()); }

    std::optional<PartitionAssignment> next() {
        if (done_) return std::nullopt;
        PartitionAssignment out;
        out.first.resize(colors());
        out.third.resize(colors());
        for (int c = 0; c < colors(); ++c) {
            out.first[c] = first_[c].current();
            out.third[c] = remap_third(c);
        }
        advance();
        return out;
    }

  private:
    // Subset III is enumerated over the complement of subset I; cursor
    // indices are positions into that complement.
    void rebuild_third(int c) {
        const int n = sizes_[c] - specs_[c].size_first;
        if (static_cast<int>(third_.size()) <= c)
            third_.emplace_back(n, specs_[c].size_third);
        else
            third_[c] = CombinationCursor(n, specs_[c].size_third);
    }

    std::vector<int> remap_third(int c) const {
        const auto& taken = first_[c].current();
        std::vector<int> rest;
        rest.reserve(sizes_[c] - taken.size());
        size_t t = 0;
        for (int i = 0; i < sizes_[c]; ++i) {
            if (t < taken.size() && taken[t] == i) { ++t; continue; }
            rest.push_back(i);
        }
        std::vector<int> r;
        r.reserve(third_[c].current().size());
        for (int pos : third_[c].current()) r.push_back(rest[pos]);
        return r;
    }

    void advance() {
        for (int c = colors() - 1; c >= 0; --c) {
            bool moved = third_[c].advance();
            if (!moved && first_[c].advance()) {
                rebuild_third(c);
                moved = true;
            }
            if (moved) {
                for (int d = c + 1; d < colors(); ++d) {
                    first_[d].reset();
                    rebuild_third(d);
                }
                return;
            }
        }
        done_ = true;
    }

    std::vector<int> sizes_;
    std::vector<ColorSplitSpec> specs_;
    std::vector<CombinationCursor> first_;
    std::vector<CombinationCursor> third_;
    bool done_;
};

}  // namespace qbethe
