#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace gslms {

using Vector = Eigen::VectorXd;
using VectorView = Eigen::Ref<const Eigen::VectorXd>;

/// Group norms below this value are treated as exactly zero by the attractor.
inline constexpr double kZeroGroupThreshold = 1e-12;

/// Half-open index range [begin, end) of one group (0-based).
struct GroupRange {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t size() const noexcept { return end - begin; }
    friend bool operator==(const GroupRange&, const GroupRange&) = default;
};

/// Disjoint cover of the weight indices {0..L-1} by J contiguous, non-empty,
/// sorted groups. Immutable once built.
class GroupPartition {
public:
    /// Validates `groups` against `length`; throws ParameterError when the
    /// ranges are empty, overlapping, unsorted or leave gaps.
    GroupPartition(std::size_t length, std::vector<GroupRange> groups);

    /// Consecutive groups of `group_size`; the last one is shorter when
    /// `length` is not a multiple of it.
    static GroupPartition uniform(std::size_t length, std::size_t group_size);
    static GroupPartition singletons(std::size_t length);

    std::size_t length() const noexcept { return length_; }
    std::size_t group_count() const noexcept { return groups_.size(); }
    const std::vector<GroupRange>& groups() const noexcept { return groups_; }
    const GroupRange& group(std::size_t j) const { return groups_.at(j); }

    friend bool operator==(const GroupPartition&, const GroupPartition&) = default;

private:
    std::size_t length_;
    std::vector<GroupRange> groups_;
};

/// Group-sparsity attractor flavour. GRZA reweights each group by
/// 1/(||w_G|| + epsilon); GZA uses unit weights.
struct AttractorMode {
    enum class Kind { GZA, GRZA };

    Kind kind = Kind::GZA;
    double epsilon = 0.0;

    static AttractorMode gza() { return {Kind::GZA, 0.0}; }
    /// Throws ParameterError unless epsilon > 0.
    static AttractorMode grza(double epsilon);

    friend bool operator==(const AttractorMode&, const AttractorMode&) = default;
};

/// Per-group Euclidean norms, length J.
Vector group_norms(const VectorView& w, const GroupPartition& p);

/// Mixed l1,2 norm: sum of the group Euclidean norms.
double l12_norm(const VectorView& w, const GroupPartition& p);

/// sum_j log(1 + ||w_Gj|| / epsilon).
double log_sum_penalty(const VectorView& w, const GroupPartition& p, double epsilon);

/// Subgradient of the l1,2 norm: each group normalised to unit length, or zero
/// when its norm is below kZeroGroupThreshold.
Vector attractor_direction(const VectorView& w, const GroupPartition& p);

/// Per-group weights beta_j (length J).
Vector beta_weights(const VectorView& w, const GroupPartition& p, const AttractorMode& mode);

/// Replicates each per-group value across the indices of its group.
Vector expand_group_vector(const VectorView& per_group, const GroupPartition& p);

/// beta_n o s_n, the full length-L attractor term of the update.
Vector weighted_attractor(const VectorView& w, const GroupPartition& p, const AttractorMode& mode);

} // namespace gslms
