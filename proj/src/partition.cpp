#include "gslms/partition.hpp"

#include <cmath>
#include <string>

#include "gslms/errors.hpp"

namespace gslms {

namespace {

void check_length(const VectorView& w, const GroupPartition& p, const char* what) {
    if (static_cast<std::size_t>(w.size()) != p.length()) {
        throw DimensionError(std::string(what) + ": vector length " + std::to_string(w.size()) +
                             " does not match partition length " + std::to_string(p.length()));
    }
}

} // namespace

GroupPartition::GroupPartition(std::size_t length, std::vector<GroupRange> groups)
    : length_(length), groups_(std::move(groups)) {
    if (length_ == 0) {
        throw ParameterError("partition: filter length must be at least 1");
    }
    if (groups_.empty()) {
        throw ParameterError("partition: at least one group is required");
    }
    std::size_t next = 0;
    for (const auto& g : groups_) {
        if (g.begin != next) {
            throw ParameterError("partition: groups must be sorted, disjoint and gap-free (expected begin " +
                                 std::to_string(next) + ", got " + std::to_string(g.begin) + ")");
        }
        if (g.end <= g.begin) {
            throw ParameterError("partition: empty group at index " + std::to_string(g.begin));
        }
        next = g.end;
    }
    if (next != length_) {
        throw ParameterError("partition: groups cover " + std::to_string(next) + " indices, expected " +
                             std::to_string(length_));
    }
}

GroupPartition GroupPartition::uniform(std::size_t length, std::size_t group_size) {
    if (group_size == 0) {
        throw ParameterError("partition: group size must be at least 1");
    }
    std::vector<GroupRange> groups;
    for (std::size_t b = 0; b < length; b += group_size) {
        groups.push_back({b, std::min(b + group_size, length)});
    }
    return GroupPartition(length, std::move(groups));
}

GroupPartition GroupPartition::singletons(std::size_t length) { return uniform(length, 1); }

AttractorMode AttractorMode::grza(double epsilon) {
    if (!(epsilon > 0.0)) {
        throw ParameterError("GRZA attractor requires epsilon > 0");
    }
    return {Kind::GRZA, epsilon};
}

Vector group_norms(const VectorView& w, const GroupPartition& p) {
    check_length(w, p, "group_norms");
    Vector norms(p.group_count());
    for (std::size_t j = 0; j < p.group_count(); ++j) {
        const auto& g = p.group(j);
        norms[j] = w.segment(g.begin, g.size()).norm();
    }
    return norms;
}

double l12_norm(const VectorView& w, const GroupPartition& p) { return group_norms(w, p).sum(); }

double log_sum_penalty(const VectorView& w, const GroupPartition& p, double epsilon) {
    if (!(epsilon > 0.0)) {
        throw ParameterError("log_sum_penalty: epsilon must be > 0");
    }
    const Vector norms = group_norms(w, p);
    double total = 0.0;
    for (double n : norms) {
        total += std::log1p(n / epsilon);
    }
    return total;
}

Vector attractor_direction(const VectorView& w, const GroupPartition& p) {
    check_length(w, p, "attractor_direction");
    Vector s = Vector::Zero(w.size());
    for (const auto& g : p.groups()) {
        const auto sub = w.segment(g.begin, g.size());
        const double n = sub.norm();
        if (n >= kZeroGroupThreshold) {
            s.segment(g.begin, g.size()) = sub / n;
        }
    }
    return s;
}

Vector beta_weights(const VectorView& w, const GroupPartition& p, const AttractorMode& mode) {
    if (mode.kind == AttractorMode::Kind::GZA) {
        check_length(w, p, "beta_weights");
        return Vector::Ones(p.group_count());
    }
    if (!(mode.epsilon > 0.0)) {
        throw ParameterError("beta_weights: GRZA epsilon must be > 0");
    }
    Vector beta = group_norms(w, p);
    for (auto& b : beta) {
        b = 1.0 / (b + mode.epsilon);
    }
    return beta;
}

Vector expand_group_vector(const VectorView& per_group, const GroupPartition& p) {
    if (static_cast<std::size_t>(per_group.size()) != p.group_count()) {
        throw DimensionError("expand_group_vector: got " + std::to_string(per_group.size()) +
                             " values for " + std::to_string(p.group_count()) + " groups");
    }
    Vector out(p.length());
    for (std::size_t j = 0; j < p.group_count(); ++j) {
        const auto& g = p.group(j);
        out.segment(g.begin, g.size()).setConstant(per_group[j]);
    }
    return out;
}

Vector weighted_attractor(const VectorView& w, const GroupPartition& p, const AttractorMode& mode) {
    const Vector beta = expand_group_vector(beta_weights(w, p, mode), p);
    return beta.cwiseProduct(attractor_direction(w, p));
}

} // namespace gslms
