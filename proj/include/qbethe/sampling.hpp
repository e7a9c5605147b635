#pragma once

#include <random>
#include <vector>

#include "qbethe/rational.hpp"

namespace qbethe {

// Deterministic source of random rational test points. Values are kept
// pairwise distinct, nonzero, and clear of the q-shifted coincidences
// (v = q^2 w in either direction) that would put kernel evaluations or
// Izergin determinants on a pole. Register externally fixed points
// (inhomogeneities, twists) with reserve().
class RationalSampler {
  public:
    RationalSampler(uint64_t seed, long magnitude = 16)
        : rng_(seed), magnitude_(magnitude) {}

    void set_q(const Rat& q) { q2_ = q * q; }

    void reserve(const Rat& v) { used_.push_back(v); }
    void reserve(const std::vector<Rat>& vs) {
        for (const auto& v : vs) used_.push_back(v);
    }

    // Unconstrained nonzero rational with |num|, den <= magnitude.
    Rat raw() {
        std::uniform_int_distribution<long> num(1, magnitude_);
        std::uniform_int_distribution<long> den(1, magnitude_);
        std::uniform_int_distribution<int> sign(0, 1);
        long n = num(rng_);
        return Rat(sign(rng_) ? n : -n, den(rng_));
    }

    // Fresh point compatible with everything drawn or reserved so far.
    Rat next() {
        for (int attempt = 0; attempt < 4096; ++attempt) {
            Rat v = raw();
            if (admissible(v)) {
                used_.push_back(v);
                return v;
            }
        }
        throw std::runtime_error("sampler exhausted; raise magnitude");
    }

    std::vector<Rat> next_n(int n) {
        std::vector<Rat> r;
        r.reserve(n);
        for (int i = 0; i < n; ++i) r.push_back(next());
        return r;
    }

  private:
    bool admissible(const Rat& v) const {
        if (v.is_zero()) return false;
        for (const auto& w : used_) {
            if (v == w) return false;
            if (!q2_.is_zero() && (v == q2_ * w || w == q2_ * v)) return false;
        }
        return true;
    }

    std::mt19937_64 rng_;
    long magnitude_;
    Rat q2_{0};
    std::vector<Rat> used_;
};

}  // namespace qbethe
