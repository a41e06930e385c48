#pragma once

#include <random>
#include <set>
#include <utility>
#include <vector>

#include "cpsis/cp_system.hpp"
#include "cpsis/degree_model.hpp"

namespace cpsis::testutil {

inline DegreeDistribution trimodal() {
    return build_distribution({{2, 850}, {3, 100}, {4, 50}});
}

inline DegreeDistribution bimodal() {
    return build_distribution({{2, 500}, {4, 500}});
}

inline DegreeDistribution regular4() {
    return build_distribution({{4, 1000}});
}

inline DegreeDistribution random_distribution(std::mt19937& rng, int max_classes = 6,
                                              long long max_degree = 20,
                                              long long max_count = 10000,
                                              long long min_degree = 1) {
    std::uniform_int_distribution<int> classes(1, max_classes);
    std::uniform_int_distribution<long long> degree(min_degree, max_degree);
    std::uniform_int_distribution<long long> count(1, max_count);
    for (;;) {
        const int L = classes(rng);
        std::set<long long> degrees;
        while (static_cast<int>(degrees.size()) < L) degrees.insert(degree(rng));
        if (degrees.size() == 1 && *degrees.begin() == 1) continue;  // degenerate
        std::vector<std::pair<long long, long long>> pairs;
        for (long long d : degrees) pairs.emplace_back(d, count(rng));
        return build_distribution(std::span(pairs.data(), pairs.size()));
    }
}

/// State satisfying singles and pair conservation (SS = nN - 2 SI - II) but
/// not necessarily the stub identity S_s = SS + SI.
inline CPState random_conserved_state(std::mt19937& rng, const DegreeDistribution& dist) {
    std::uniform_real_distribution<double> frac(0.05, 0.95);
    CPState s;
    s.S.resize(dist.num_classes());
    s.I.resize(dist.num_classes());
    for (std::size_t l = 0; l < s.S.size(); ++l) {
        s.S[l] = frac(rng) * dist.class_count(l);
        s.I[l] = dist.class_count(l) - s.S[l];
    }
    const double nN = dist.moments().stub_count;
    std::uniform_real_distribution<double> si_frac(0.01, 0.45);
    const double si = si_frac(rng) * nN;
    std::uniform_real_distribution<double> ii_frac(0.0, 1.0);
    const double ii = ii_frac(rng) * (nN - 2.0 * si);
    s.SI = si;
    s.II = ii;
    s.SS = nN - 2.0 * si - ii;
    return s;
}

/// State satisfying all three identities: singles, pairs, and S_s = SS + SI.
inline CPState random_admissible_state(std::mt19937& rng, const DegreeDistribution& dist) {
    std::uniform_real_distribution<double> frac(0.05, 0.95);
    CPState s;
    s.S.resize(dist.num_classes());
    s.I.resize(dist.num_classes());
    double S_s = 0.0;
    for (std::size_t l = 0; l < s.S.size(); ++l) {
        s.S[l] = frac(rng) * dist.class_count(l);
        s.I[l] = dist.class_count(l) - s.S[l];
        S_s += dist.degree(l) * s.S[l];
    }
    const double I_s = dist.moments().stub_count - S_s;
    std::uniform_real_distribution<double> si_frac(0.01, 0.99);
    s.SI = si_frac(rng) * std::min(S_s, I_s);
    s.SS = S_s - s.SI;
    s.II = I_s - s.SI;
    return s;
}

}  // namespace cpsis::testutil
