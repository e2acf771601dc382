#include "gslms/oracle.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "gslms/errors.hpp"
#include "gslms/parallel.hpp"

namespace gslms::oracle {

GridMinimum grid_minimize_quadratic(const MomentEstimates& m, const Box& box, std::size_t resolution) {
    if (resolution < 2) {
        throw DomainError("grid search: resolution must be >= 2");
    }
    if (!(box.mu_hi >= box.mu_lo) || !(box.rho_hi >= box.rho_lo)) {
        throw DomainError("grid search: empty box");
    }
    GridMinimum best;
    best.value = std::numeric_limits<double>::infinity();
    best.mu_cell = (box.mu_hi - box.mu_lo) / static_cast<double>(resolution - 1);
    best.rho_cell = (box.rho_hi - box.rho_lo) / static_cast<double>(resolution - 1);
    for (std::size_t i = 0; i < resolution; ++i) {
        const double mu = box.mu_lo + best.mu_cell * static_cast<double>(i);
        for (std::size_t j = 0; j < resolution; ++j) {
            const double rho = box.rho_lo + best.rho_cell * static_cast<double>(j);
            const double v = msd_quadratic(m, 0.0, mu, rho);
            if (v < best.value) {
                best.value = v;
                best.mu = mu;
                best.rho = rho;
            }
        }
    }
    return best;
}

Vector finite_diff_subgradient(const VectorView& w, const GroupPartition& p, double step) {
    if (!(step > 0.0)) {
        throw DomainError("finite difference: step must be > 0");
    }
    const Vector norms = group_norms(w, p);
    for (Eigen::Index j = 0; j < norms.size(); ++j) {
        if (!(norms[j] > 10.0 * step)) {
            throw DomainError("finite difference: group " + std::to_string(j) +
                              " is too close to the non-differentiable set");
        }
    }
    Vector x = w;
    Vector grad(w.size());
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        const double saved = x[i];
        x[i] = saved + step;
        const double up = l12_norm(x, p);
        x[i] = saved - step;
        const double down = l12_norm(x, p);
        x[i] = saved;
        grad[i] = (up - down) / (2.0 * step);
    }
    return grad;
}

namespace {

constexpr std::size_t kBlock = 64;

// Per-iteration accumulators: msd, g, h, ell, r1, r2 (value and square).
enum Stat : std::size_t { kMsd, kG, kH, kEll, kR1, kR2, kStatCount };

struct Sums {
    std::vector<double> sum;
    std::vector<double> sq;

    explicit Sums(std::size_t points) : sum(points * kStatCount, 0.0), sq(points * kStatCount, 0.0) {}

    void add(std::size_t n, Stat s, double v) {
        sum[n * kStatCount + s] += v;
        sq[n * kStatCount + s] += v * v;
    }
    void merge(const Sums& other) {
        for (std::size_t i = 0; i < sum.size(); ++i) {
            sum[i] += other.sum[i];
            sq[i] += other.sq[i];
        }
    }
};

void run_member(const EnsembleSetup& setup, const PlantSchedule& schedule, std::size_t horizon,
                std::uint64_t member, Sums& sums) {
    const auto L = static_cast<Eigen::Index>(setup.plant.size());
    InputGenerator input(setup.input, derive_seed(setup.seed, member, 0));
    PlantSimulator plant(schedule, setup.sigma_z2, derive_seed(setup.seed, member, 1));
    // Fill the delay line so the first regressor is already stationary.
    for (Eigen::Index i = 0; i + 1 < L; ++i) {
        plant.push(input.next());
    }

    FilterState state{setup.w0 ? *setup.w0 : Vector(Vector::Zero(L)), 0, 0.0};
    for (std::size_t n = 0; n <= horizon; ++n) {
        const Vector w_tilde = state.w - setup.plant;
        sums.add(n, kMsd, w_tilde.squaredNorm());
        if (n == horizon) {
            break;
        }
        const PlantSample& s = plant.push(input.next());
        const Vector b = setup.filter.attractor
                             ? weighted_attractor(state.w, setup.filter.partition, *setup.filter.attractor)
                             : Vector(Vector::Zero(L));
        const double wu = w_tilde.dot(s.u);
        const double uu = s.u.squaredNorm();
        const double e = s.d - state.w.dot(s.u);
        // E{e^2 ||u||^2} = sigma_z^2 E{||u||^2} + E{(u'w~)^2 ||u||^2} since z is independent.
        sums.add(n, kG, e * e * uu);
        sums.add(n, kH, b.squaredNorm());
        sums.add(n, kEll, wu * s.u.dot(b));
        sums.add(n, kR1, wu * wu);
        sums.add(n, kR2, b.dot(w_tilde));
        state = step(state, setup.filter, s.u, s.d, setup.filter.mu, setup.filter.rho);
    }
}

Sums run_ensemble(const EnsembleSetup& setup, std::size_t horizon, std::size_t ensemble) {
    if (ensemble < 2) {
        throw DomainError("ensemble: at least 2 members are required");
    }
    if (setup.plant.size() == 0 || static_cast<std::size_t>(setup.plant.size()) != setup.filter.length()) {
        throw DimensionError("ensemble: plant length does not match the filter");
    }
    if (setup.w0 && setup.w0->size() != setup.plant.size()) {
        throw DimensionError("ensemble: w0 length does not match the plant");
    }
    setup.filter.validate();
    setup.input.validate();

    const PlantSchedule schedule({{1, setup.plant}}, static_cast<std::int64_t>(horizon) + setup.plant.size());
    const std::size_t blocks = (ensemble + kBlock - 1) / kBlock;
    std::vector<Sums> partial(blocks, Sums(horizon + 1));
    parallel_for(blocks, setup.workers, [&](std::size_t b) {
        const std::size_t end = std::min(ensemble, (b + 1) * kBlock);
        for (std::size_t m = b * kBlock; m < end; ++m) {
            run_member(setup, schedule, horizon, m, partial[b]);
        }
    });
    Sums total(horizon + 1);
    for (const auto& p : partial) {
        total.merge(p);
    }
    return total;
}

struct MeanSe {
    double mean;
    double se;
};

MeanSe mean_se(const Sums& sums, std::size_t n, Stat s, std::size_t count) {
    const double c = static_cast<double>(count);
    const double mean = sums.sum[n * kStatCount + s] / c;
    const double var = std::max(sums.sq[n * kStatCount + s] / c - mean * mean, 0.0) * c / (c - 1.0);
    return {mean, std::sqrt(var / c)};
}

} // namespace

EnsembleMoments ensemble_moments(const EnsembleSetup& setup, std::size_t n, std::size_t ensemble) {
    const Sums sums = run_ensemble(setup, n + 1, ensemble);
    EnsembleMoments out;
    out.ensemble = ensemble;
    const auto fill = [&](Stat s, double& mean, double& se) {
        const MeanSe r = mean_se(sums, n, s, ensemble);
        mean = r.mean;
        se = r.se;
    };
    fill(kG, out.mean.g, out.stderr_.g);
    fill(kH, out.mean.h, out.stderr_.h);
    fill(kEll, out.mean.ell, out.stderr_.ell);
    fill(kR1, out.mean.r1, out.stderr_.r1);
    fill(kR2, out.mean.r2, out.stderr_.r2);
    double msd_se = 0.0;
    fill(kMsd, out.msd, msd_se);
    const double su2 = setup.input.stationary_variance();
    out.zeta = su2 * out.msd;
    out.zeta_stderr = su2 * msd_se;
    return out;
}

RecursionReport validate_model_recursion(const EnsembleSetup& setup, std::size_t horizon, std::size_t ensemble) {
    if (setup.input.kind != InputProcess::Kind::WhiteGaussian) {
        throw DomainError("model recursion check requires white Gaussian input");
    }
    const Sums sums = run_ensemble(setup, horizon, ensemble);
    const double mu = setup.filter.mu;
    const double rho = setup.filter.rho;

    RecursionReport report;
    report.ensemble = ensemble;
    report.horizon = horizon;
    for (std::size_t n = 0; n < horizon; ++n) {
        RecursionPoint pt;
        pt.n = n;
        pt.msd = mean_se(sums, n, kMsd, ensemble).mean;
        pt.increment = mean_se(sums, n + 1, kMsd, ensemble).mean - pt.msd;
        pt.moments = {mean_se(sums, n, kG, ensemble).mean, mean_se(sums, n, kH, ensemble).mean,
                      mean_se(sums, n, kEll, ensemble).mean, mean_se(sums, n, kR1, ensemble).mean,
                      mean_se(sums, n, kR2, ensemble).mean};
        pt.model_increment = msd_quadratic(pt.moments, 0.0, mu, rho);
        const double diff = std::abs(pt.increment - pt.model_increment);
        if (pt.increment != 0.0) {
            pt.relative_deviation = diff / std::abs(pt.increment);
        } else {
            pt.relative_deviation = diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
        }
        report.max_relative_deviation = std::max(report.max_relative_deviation, pt.relative_deviation);
        report.points.push_back(pt);
    }
    return report;
}

} // namespace gslms::oracle
