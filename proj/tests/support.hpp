#pragma once

#include <random>

#include "lvbif/models.hpp"

namespace lvbif::test {

inline MlvParams saddle_set() { return {15, 0, -5, -3, 2, 1, 0}; }
inline MlvParams elliptic_set() { return {15, 0, 7, -3, 2, 1, 0}; }

// ST2_MIN coefficients of the two paper sets in the k3 > 0 orientation.
inline St2Params st2_saddle() {
    St2Params p;
    p.k1 = 1.5811388300841898;
    p.k2 = 2.5298221281347035;
    p.k3 = 0.21081851067789198;
    p.eps = 1;
    return p;
}
inline St2Params st2_elliptic() {
    St2Params p;
    p.k1 = 1.8708286933869707;
    p.k2 = -4.27617987059879;
    p.k3 = 0.1781741612749496;
    p.eps = -1;
    return p;
}

struct Rng {
    std::mt19937 gen;
    explicit Rng(unsigned seed) : gen(seed) {}
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen); }
};

}  // namespace lvbif::test
