// analysis.hpp — Observables extracted from trajectories
//
// Eigenstate classification, dwell-time statistics, 2-D cumulative densities,
// collapse-time first passages, cascade diagnostics and superposition loci.
// Every accumulator has a merge() that callers apply in trajectory-index order.

#pragma once

#include "qsd/engine.hpp"
#include "qsd/spin_model.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qsd {

// ---------------------------------------------------------------------------
// Born probabilities and classification

// p_i = Tr(ρ P_i) in model order, clipped to [0, 1] and renormalized when the
// sum is within 1e-9 of one. Throws std::runtime_error if it is off by > 1e-6.
std::vector<double> born_probabilities(const SpinModel& model, const ComplexMatrix& rho, Observable o);
std::vector<double> normalize_probabilities(std::vector<double> p);

// Label of the unique eigenstate with p_i ≥ 1 - eps; nullopt if there is none.
// Throws std::invalid_argument unless eps ∈ (0, 0.5).
std::optional<int> classify_probabilities(const SpinModel& model, std::span<const double> p, double eps);
std::optional<int> classify_eigenstate(const SpinModel& model, const ComplexMatrix& rho, Observable o, double eps);

// ---------------------------------------------------------------------------
// Dwell times

struct OutcomeSequence {
    std::vector<std::optional<int>> labels;  // one per S_z window; nullopt = incomplete

    std::size_t size() const noexcept { return labels.size(); }
    std::size_t incomplete() const noexcept;
};

// Classifies the S_z-window-end samples (steps (2n+1)·steps_per_half).
// Throws std::invalid_argument if any of them was not recorded.
OutcomeSequence outcome_sequence(const TrajectoryRecord& traj, const SpinModel& model, double eps);

// Same classification applied to stored S_z window-end probabilities.
OutcomeSequence outcome_sequence(const SpinModel& model, const std::vector<std::vector<double>>& window_end_probs,
                                 double eps);

struct DwellStats {
    std::map<int, std::vector<std::int64_t>> runs;  // completed run lengths per label
    std::int64_t incomplete_outcomes = 0;
    std::int64_t unterminated_runs = 0;  // sequence-final runs, excluded from means

    std::size_t completed_runs(int label) const;
    double mean(int label) const;            // NaN without runs
    double standard_error(int label) const;  // sample std / √n; NaN with fewer than two runs
    void merge(const DwellStats& o);
};

// Maximal runs of identical labels. A run is completed when the next outcome
// differs, including an incomplete one; incompletes start no run.
DwellStats dwell_times(const OutcomeSequence& seq);

// ---------------------------------------------------------------------------
// Densities

struct Histogram2D {
    int bins = 200;
    double x_min = -1.0, x_max = 1.0;
    double y_min = -1.0, y_max = 1.0;
    std::vector<std::uint64_t> mass;  // index ix * bins + iy
    std::uint64_t total = 0;

    explicit Histogram2D(int bins = 200);

    // Points outside the range by more than 1e-9 throw std::out_of_range.
    void add(double x, double y);
    void merge(const Histogram2D& o);

    double bin_width_x() const noexcept { return (x_max - x_min) / bins; }
    double bin_width_y() const noexcept { return (y_max - y_min) / bins; }
    double x_center(int ix) const noexcept { return x_min + (ix + 0.5) * bin_width_x(); }
    double y_center(int iy) const noexcept { return y_min + (iy + 0.5) * bin_width_y(); }
    std::uint64_t at(int ix, int iy) const { return mass[static_cast<std::size_t>(ix * bins + iy)]; }
    // mass / (total · bin area)
    double density(int ix, int iy) const;
    int bin_index_x(double x) const;
    int bin_index_y(double y) const;
};

// Plane of the density plots: (r_x, r_z) for spin-1/2, (⟨S_x⟩, ⟨S_z⟩) for spin-1.
std::array<double, 2> plane_point(const TrajectoryRecord& traj, std::size_t sample);
std::array<double, 2> plane_point(const SpinModel& model, const ComplexMatrix& rho);
void accumulate_density(const TrajectoryRecord& traj, Histogram2D& hist);
Histogram2D accumulate_density(std::span<const TrajectoryRecord> trajs, int bins = 200);

// Exact sample counts in named disks around the eigenstate points (and, for
// spin-1, inside the petals).
struct RegionTally {
    struct Region {
        std::string name;
        std::array<double, 2> center;
    };
    std::vector<Region> regions;
    double radius = 0.1;
    bool track_petals = false;
    std::vector<std::uint64_t> counts;
    std::uint64_t petal = 0;
    std::uint64_t total = 0;

    void add(double x, double y);
    void merge(const RegionTally& o);
    std::uint64_t count(const std::string& name) const;
};

// Spin-1: z(+1), z(-1), x(+1), x(-1), center. Spin-1/2: the four eigenstate points.
RegionTally make_region_tally(Spin spin, double radius = 0.1);
void accumulate_regions(const TrajectoryRecord& traj, RegionTally& tally);

// ---------------------------------------------------------------------------
// Superposition loci and petals (spin-1, plane (⟨S_x⟩, ⟨S_z⟩))

enum class LocusKind { z_pair, x_pair, axis };

struct Locus {
    std::string name;                        // e.g. "z(+1,0)", "axis-vertical"
    std::vector<std::array<double, 2>> points;
    bool closed = false;
};

// z_pair: real superpositions cosθ|±1⟩_z + sinθ|0⟩_z for θ ∈ [0, π), giving
// closed curves; x_pair likewise in the S_x basis; axis: the vertical segment
// (superpositions of |+1⟩_z and |−1⟩_z) and the horizontal one (same in S_x).
std::vector<Locus> superposition_loci(LocusKind kind, int samples = 721);

bool point_in_polygon(std::span<const std::array<double, 2>> polygon, double x, double y);

// Inside one z-pair curve and one x-pair curve: the four lens-shaped regions
// between the loci.
class PetalRegions {
public:
    PetalRegions();
    bool contains(double x, double y) const;

private:
    std::vector<Locus> z_loci_;
    std::vector<Locus> x_loci_;
};

// ---------------------------------------------------------------------------
// Collapse times

struct CollapseTimeSpec {
    Observable observable = Observable::Sz;
    double amplitude = 1.0;
    double window = 1.0;  // the measurement window length (T/2)
    double dt = 1e-4;
    StepperKind stepper = StepperKind::kraus;
    std::vector<int> targets;
    std::int64_t n_trajectories = 0;
    std::uint64_t seed = 0;
    unsigned threads = 0;
};

struct CollapseTimeStats {
    double threshold = 0.999;
    std::map<int, std::vector<double>> arrivals;  // first-passage times per target reached
    std::int64_t non_arrivals = 0;

    std::size_t arrived() const;
    double mean() const;            // over all arrivals
    double standard_error() const;
    double mean(int target) const;
    double standard_error(int target) const;
    void merge(const CollapseTimeStats& o);
};

// One entry per threshold (each must lie in (0.5, 1)). Trajectory i uses seed
// spec.seed + i and runs until every threshold is met or the window ends.
std::vector<CollapseTimeStats> collapse_times(const SpinModel& model, const DensityMatrix& initial,
                                              const CollapseTimeSpec& spec, std::span<const double> thresholds);
CollapseTimeStats collapse_times(const SpinModel& model, const DensityMatrix& initial, const CollapseTimeSpec& spec,
                                 double threshold = 0.999);

// ---------------------------------------------------------------------------
// Cascade

struct CascadeTrace {
    std::vector<double> times;
    std::vector<std::vector<double>> probs;  // per sample, model order
};

CascadeTrace cascade_trace(const TrajectoryRecord& traj, Observable o);

// Once p_i ≤ zero_level it must stay ≤ stay_level. Feed rows in time order.
class AbsorbingMonitor {
public:
    explicit AbsorbingMonitor(std::size_t n, double zero_level = 1e-12, double stay_level = 1e-9);

    void observe(double time, std::span<const double> p);

    bool holds() const noexcept { return violations_ == 0; }
    std::int64_t violations() const noexcept { return violations_; }
    // Time p_i first fell to zero_level, if it did.
    const std::vector<std::optional<double>>& first_zero() const noexcept { return first_zero_; }
    // Largest p_i seen after its zero crossing.
    const std::vector<double>& max_after_zero() const noexcept { return max_after_; }

private:
    double zero_level_;
    double stay_level_;
    std::vector<std::optional<double>> first_zero_;
    std::vector<double> max_after_;
    std::int64_t violations_ = 0;
};

AbsorbingMonitor check_absorbing(const CascadeTrace& trace, double zero_level = 1e-12, double stay_level = 1e-9);

// ---------------------------------------------------------------------------
// Statistics helpers

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};
MeanSe mean_and_se(std::span<const double> xs);

// Two-sample Kolmogorov–Smirnov statistic sup |F_a - F_b|.
double ks_distance(std::vector<double> a, std::vector<double> b);

}  // namespace qsd
