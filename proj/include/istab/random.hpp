#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace istab {

// Deterministic standard-normal generator (Box-Muller over mt19937_64), so
// streams are reproducible independent of the standard library.
class NormalGen {
public:
    explicit NormalGen(std::uint64_t seed) : rng_(seed) {}

    double operator()() {
        if (have_) {
            have_ = false;
            return cached_;
        }
        double u1 = 0.0;
        do {
            u1 = unit();
        } while (u1 <= 0.0);
        const double u2 = unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        cached_ = r * std::sin(a);
        have_ = true;
        return r * std::cos(a);
    }

private:
    double unit() { return double(rng_() >> 11) * 0x1.0p-53; }

    std::mt19937_64 rng_;
    bool have_ = false;
    double cached_ = 0.0;
};

}  // namespace istab
