#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "cpsis/errors.hpp"

namespace cpsis {

/// Degree-distribution moments. Accumulated in integer arithmetic and
/// divided once, so they are exact up to the final rounding.
struct Moments {
    double n;           // <n>, mean degree
    double n2;          // <n^2>
    double n3;          // <n^3>
    double stub_count;  // nN = <n> * N, total number of stubs
};

struct DegreeClass {
    long long degree;  // n_l
    long long count;   // N_l
};

/// Validated degree distribution: classes sorted by strictly increasing
/// degree, with cached moments.
class DegreeDistribution {
public:
    static DegreeDistribution build(std::span<const std::pair<long long, long long>> pairs);

    std::size_t num_classes() const { return classes_.size(); }
    long long node_count() const { return node_count_; }
    const std::vector<DegreeClass>& classes() const { return classes_; }
    double degree(std::size_t l) const { return static_cast<double>(classes_[l].degree); }
    double class_count(std::size_t l) const { return static_cast<double>(classes_[l].count); }
    const Moments& moments() const { return moments_; }

private:
    DegreeDistribution() = default;

    std::vector<DegreeClass> classes_;
    long long node_count_ = 0;
    Moments moments_{};
};

DegreeDistribution build_distribution(std::span<const std::pair<long long, long long>> pairs);
DegreeDistribution build_distribution(std::initializer_list<std::pair<long long, long long>> pairs);

Moments moments(const DegreeDistribution& dist);

struct EpidemicParams {
    double tau;    // infection rate per SI edge
    double gamma;  // recovery rate
};

/// Throws InvalidParameter unless tau >= 0 and gamma > 0.
void validate(const EpidemicParams& params);

/// Epidemic threshold tau_c = gamma <n> / (<n^2> - <n>).
double tau_c(const DegreeDistribution& dist, double gamma);

struct AssumptionReport {
    bool a1_holds;  // (2 + sqrt(2)) <n> <= <n^2>
    bool a2_holds;  // bimodal network, L = 2
    double a;       // <n> / (<n^2> - <n>), so tau_c = gamma * a
    double B;       // <n^2> / (<n^2> - <n>)
};

AssumptionReport check_assumptions(const DegreeDistribution& dist);

}  // namespace cpsis
