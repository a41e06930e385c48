#include "cpsis/degree_model.hpp"

#include <algorithm>
#include <cmath>

namespace cpsis {

DegreeDistribution DegreeDistribution::build(std::span<const std::pair<long long, long long>> pairs) {
    if (pairs.empty()) throw EmptyInput{};

    DegreeDistribution dist;
    dist.classes_.reserve(pairs.size());
    for (const auto& [degree, count] : pairs) {
        if (degree <= 0)
            throw NonPositiveEntry("degree " + std::to_string(degree) + " must be positive");
        if (count <= 0)
            throw NonPositiveEntry("count " + std::to_string(count) + " for degree " +
                                   std::to_string(degree) + " must be positive");
        dist.classes_.push_back({degree, count});
    }
    std::sort(dist.classes_.begin(), dist.classes_.end(),
              [](const DegreeClass& a, const DegreeClass& b) { return a.degree < b.degree; });
    for (std::size_t l = 1; l < dist.classes_.size(); ++l)
        if (dist.classes_[l].degree == dist.classes_[l - 1].degree)
            throw DuplicateDegree(dist.classes_[l].degree);

    long long nodes = 0, s1 = 0, s2 = 0, s3 = 0;
    for (const auto& c : dist.classes_) {
        nodes += c.count;
        s1 += c.degree * c.count;
        s2 += c.degree * c.degree * c.count;
        s3 += c.degree * c.degree * c.degree * c.count;
    }
    // <n^2> == <n> exactly when every degree is 1; tau_c is undefined then.
    if (s2 == s1) throw DegenerateDistribution{};

    dist.node_count_ = nodes;
    const double N = static_cast<double>(nodes);
    dist.moments_.n = static_cast<double>(s1) / N;
    dist.moments_.n2 = static_cast<double>(s2) / N;
    dist.moments_.n3 = static_cast<double>(s3) / N;
    dist.moments_.stub_count = static_cast<double>(s1);
    return dist;
}

DegreeDistribution build_distribution(std::span<const std::pair<long long, long long>> pairs) {
    return DegreeDistribution::build(pairs);
}

DegreeDistribution build_distribution(std::initializer_list<std::pair<long long, long long>> pairs) {
    return DegreeDistribution::build(std::span(pairs.begin(), pairs.size()));
}

Moments moments(const DegreeDistribution& dist) { return dist.moments(); }

void validate(const EpidemicParams& params) {
    if (!(params.tau >= 0.0))
        throw InvalidParameter("infection rate tau must be nonnegative");
    if (!(params.gamma > 0.0))
        throw InvalidParameter("recovery rate gamma must be positive");
}

double tau_c(const DegreeDistribution& dist, double gamma) {
    if (!(gamma > 0.0)) throw InvalidParameter("recovery rate gamma must be positive");
    const Moments& m = dist.moments();
    return gamma * m.n / (m.n2 - m.n);
}

AssumptionReport check_assumptions(const DegreeDistribution& dist) {
    const Moments& m = dist.moments();
    AssumptionReport report;
    report.a = m.n / (m.n2 - m.n);
    report.B = m.n2 / (m.n2 - m.n);
    report.a1_holds = (2.0 + std::sqrt(2.0)) * m.n <= m.n2;
    report.a2_holds = dist.num_classes() == 2;
    return report;
}

}  // namespace cpsis
