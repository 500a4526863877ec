/*
Copyright 2026, lfqkit contributors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace lfq {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Deterministic random source. The engine (mt19937_64) and every variate
/// transform below are pinned by this header, so identical seeds produce
/// identical streams on every platform and standard library.
///
/// std::uniform_*_distribution and std::normal_distribution are
/// implementation-defined and must not be used anywhere in lfqkit.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(splitmix64(seed)) {}

    /// Child stream `id` of a master seed; streams are independent enough
    /// for simulation purposes and stable under reordering of other streams.
    static Rng stream(std::uint64_t master, std::uint64_t id) {
        return Rng(splitmix64(master ^ splitmix64(id + 0x51ed2701ULL)));
    }

    std::uint64_t next_u64() { return eng_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    double log_uniform(double a, double b) {
        return std::exp(uniform(std::log(a), std::log(b)));
    }

    /// Standard normal via Box-Muller (uncached; two uniforms per draw).
    double normal() {
        double u1 = 1.0 - uniform(); // (0, 1]
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    /// Poisson count by Knuth's product method. Mean is clamped to 1e4 so a
    /// corrupt configuration cannot spin forever.
    int poisson(double mean) {
        if (mean <= 0.0) return 0;
        if (mean > 1e4) mean = 1e4;
        const double limit = std::exp(-mean);
        int k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= uniform();
        } while (p > limit);
        return k - 1;
    }

    /// Uniform integer in [0, n). Modulo bias is < n / 2^64 and accepted in
    /// exchange for a fixed, portable draw count.
    std::size_t below(std::size_t n) {
        return static_cast<std::size_t>(eng_() % static_cast<std::uint64_t>(n));
    }

    /// Fisher-Yates shuffle using this stream only.
    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = below(i);
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 eng_;
};

} // namespace lfq
