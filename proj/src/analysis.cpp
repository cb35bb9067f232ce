// analysis.cpp — Classification, dwell times, densities, collapse times, cascades

#include "qsd/analysis.hpp"

#include "qsd/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace qsd {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

MeanSe summarize(const std::vector<std::int64_t>& xs) {
    std::vector<double> d(xs.begin(), xs.end());
    return mean_and_se(d);
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<double> normalize_probabilities(std::vector<double> p) {
    double sum = 0.0;
    for (double& x : p) {
        x = std::clamp(x, 0.0, 1.0);
        sum += x;
    }
    const double deviation = std::abs(sum - 1.0);
    if (deviation > 1e-6) {
        throw std::runtime_error("born_probabilities: probabilities sum to " + std::to_string(sum));
    }
    if (deviation > 0.0 && deviation <= 1e-9) {
        for (double& x : p) x /= sum;
    }
    return p;
}

std::vector<double> born_probabilities(const SpinModel& model, const ComplexMatrix& rho, Observable o) {
    return normalize_probabilities(eigen_probabilities(model, rho, o));
}

std::optional<int> classify_probabilities(const SpinModel& model, std::span<const double> p, double eps) {
    if (!(eps > 0.0 && eps < 0.5)) throw std::invalid_argument("classify: eps must lie in (0, 0.5)");
    if (p.size() != model.labels.size()) throw std::invalid_argument("classify: probability count mismatch");
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] >= 1.0 - eps) return model.labels[i];
    return std::nullopt;
}

std::optional<int> classify_eigenstate(const SpinModel& model, const ComplexMatrix& rho, Observable o, double eps) {
    const auto p = born_probabilities(model, rho, o);
    return classify_probabilities(model, p, eps);
}

// ---------------------------------------------------------------------------

std::size_t OutcomeSequence::incomplete() const noexcept {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), std::nullopt));
}

OutcomeSequence outcome_sequence(const TrajectoryRecord& traj, const SpinModel& model, double eps) {
    const std::int64_t half = traj.steps_per_half;
    if (half <= 0 || traj.steps.empty()) throw std::invalid_argument("outcome_sequence: empty trajectory");
    const std::int64_t last = traj.steps.back();
    OutcomeSequence seq;
    std::size_t cursor = 0;
    for (std::int64_t end = half; end <= last; end += 2 * half) {
        while (cursor < traj.steps.size() && traj.steps[cursor] < end) ++cursor;
        if (cursor == traj.steps.size() || traj.steps[cursor] != end) {
            throw std::invalid_argument("outcome_sequence: no sample at S_z window end (step " + std::to_string(end) +
                                        "); sample_stride must divide the half-period step count");
        }
        const auto p = normalize_probabilities(traj.eig_probs_z[cursor]);
        seq.labels.push_back(classify_probabilities(model, p, eps));
    }
    return seq;
}

OutcomeSequence outcome_sequence(const SpinModel& model, const std::vector<std::vector<double>>& window_end_probs,
                                 double eps) {
    OutcomeSequence seq;
    seq.labels.reserve(window_end_probs.size());
    for (const auto& p : window_end_probs)
        seq.labels.push_back(classify_probabilities(model, normalize_probabilities(p), eps));
    return seq;
}

std::size_t DwellStats::completed_runs(int label) const {
    const auto it = runs.find(label);
    return it == runs.end() ? 0 : it->second.size();
}

double DwellStats::mean(int label) const {
    const auto it = runs.find(label);
    if (it == runs.end() || it->second.empty()) return kNaN;
    return summarize(it->second).mean;
}

double DwellStats::standard_error(int label) const {
    const auto it = runs.find(label);
    if (it == runs.end() || it->second.size() < 2) return kNaN;
    return summarize(it->second).se;
}

void DwellStats::merge(const DwellStats& o) {
    for (const auto& [label, lengths] : o.runs) {
        auto& dst = runs[label];
        dst.insert(dst.end(), lengths.begin(), lengths.end());
    }
    incomplete_outcomes += o.incomplete_outcomes;
    unterminated_runs += o.unterminated_runs;
}

DwellStats dwell_times(const OutcomeSequence& seq) {
    DwellStats stats;
    std::optional<int> current;
    std::int64_t length = 0;
    for (const auto& label : seq.labels) {
        if (!label) ++stats.incomplete_outcomes;
        if (current && label == current) {
            ++length;
            continue;
        }
        if (current) stats.runs[*current].push_back(length);
        current = label;
        length = label ? 1 : 0;
    }
    if (current) ++stats.unterminated_runs;
    return stats;
}

// ---------------------------------------------------------------------------

Histogram2D::Histogram2D(int n) : bins(n) {
    if (n < 1) throw std::invalid_argument("Histogram2D: bins must be >= 1");
    mass.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0);
}

int Histogram2D::bin_index_x(double x) const {
    return std::clamp(static_cast<int>(std::floor((x - x_min) / bin_width_x())), 0, bins - 1);
}

int Histogram2D::bin_index_y(double y) const {
    return std::clamp(static_cast<int>(std::floor((y - y_min) / bin_width_y())), 0, bins - 1);
}

void Histogram2D::add(double x, double y) {
    constexpr double slack = 1e-9;
    if (!(x >= x_min - slack && x <= x_max + slack && y >= y_min - slack && y <= y_max + slack)) {
        throw std::out_of_range("Histogram2D: sample (" + std::to_string(x) + ", " + std::to_string(y) +
                                ") outside the plotting range");
    }
    ++mass[static_cast<std::size_t>(bin_index_x(x) * bins + bin_index_y(y))];
    ++total;
}

void Histogram2D::merge(const Histogram2D& o) {
    if (o.bins != bins || o.x_min != x_min || o.x_max != x_max || o.y_min != y_min || o.y_max != y_max) {
        throw std::invalid_argument("Histogram2D: merging histograms with different binning");
    }
    for (std::size_t i = 0; i < mass.size(); ++i) mass[i] += o.mass[i];
    total += o.total;
}

double Histogram2D::density(int ix, int iy) const {
    if (total == 0) return 0.0;
    return static_cast<double>(at(ix, iy)) / (static_cast<double>(total) * bin_width_x() * bin_width_y());
}

std::array<double, 2> plane_point(const TrajectoryRecord& traj, std::size_t sample) {
    if (traj.spin == Spin::half) {
        const auto& r = traj.coherence[sample];
        return {r[0], r[2]};
    }
    const auto& s = traj.spin_xyz[sample];
    return {s[0], s[2]};
}

std::array<double, 2> plane_point(const SpinModel& model, const ComplexMatrix& rho) {
    const auto s = spin_expectations(model, rho);
    const double scale = model.spin == Spin::half ? 2.0 : 1.0;  // r = 2⟨S⟩ for spin-1/2
    return {scale * s[0], scale * s[2]};
}

void accumulate_density(const TrajectoryRecord& traj, Histogram2D& hist) {
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const auto p = plane_point(traj, i);
        hist.add(p[0], p[1]);
    }
}

Histogram2D accumulate_density(std::span<const TrajectoryRecord> trajs, int bins) {
    Histogram2D hist(bins);
    for (const auto& t : trajs) accumulate_density(t, hist);
    return hist;
}

namespace {

const PetalRegions& shared_petals() {
    static const PetalRegions petals;
    return petals;
}

}  // namespace

void RegionTally::add(double x, double y) {
    ++total;
    for (std::size_t i = 0; i < regions.size(); ++i) {
        const double dx = x - regions[i].center[0];
        const double dy = y - regions[i].center[1];
        if (dx * dx + dy * dy <= radius * radius) ++counts[i];
    }
    if (track_petals && shared_petals().contains(x, y)) ++petal;
}

void RegionTally::merge(const RegionTally& o) {
    if (o.regions.size() != regions.size() || o.radius != radius) {
        throw std::invalid_argument("RegionTally: merging incompatible tallies");
    }
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += o.counts[i];
    petal += o.petal;
    total += o.total;
}

std::uint64_t RegionTally::count(const std::string& name) const {
    for (std::size_t i = 0; i < regions.size(); ++i)
        if (regions[i].name == name) return counts[i];
    throw std::invalid_argument("RegionTally: unknown region '" + name + "'");
}

RegionTally make_region_tally(Spin spin, double radius) {
    RegionTally t;
    t.radius = radius;
    t.regions = {{"z(+1)", {0.0, 1.0}}, {"z(-1)", {0.0, -1.0}}, {"x(+1)", {1.0, 0.0}}, {"x(-1)", {-1.0, 0.0}}};
    if (spin == Spin::one) {
        t.regions.push_back({"center", {0.0, 0.0}});
        t.track_petals = true;
    }
    t.counts.assign(t.regions.size(), 0);
    return t;
}

void accumulate_regions(const TrajectoryRecord& traj, RegionTally& tally) {
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const auto p = plane_point(traj, i);
        tally.add(p[0], p[1]);
    }
}

// ---------------------------------------------------------------------------

namespace {

// ⟨S_x⟩, ⟨S_z⟩ of cosθ|a⟩ + sinθ|b⟩ for eigenvectors a, b.
std::array<double, 2> locus_point(const SpinModel& model, const std::vector<Complex>& a, const std::vector<Complex>& b,
                                  double theta) {
    std::vector<Complex> psi(3);
    for (int i = 0; i < 3; ++i) psi[i] = std::cos(theta) * a[i] + std::sin(theta) * b[i];
    const auto s = spin_expectations(model, ComplexMatrix::outer(psi));
    return {s[0], s[2]};
}

Locus pair_locus(const SpinModel& model, Observable o, int first, int second, int samples) {
    const auto& vecs = model.eigenvectors(o);
    const auto& a = vecs[static_cast<std::size_t>(model.label_index(first))];
    const auto& b = vecs[static_cast<std::size_t>(model.label_index(second))];
    Locus locus;
    locus.name = std::string(o == Observable::Sz ? "z(" : "x(") + (first > 0 ? "+1" : std::to_string(first)) + "," +
                 std::to_string(second) + ")";
    locus.closed = true;
    for (int k = 0; k < samples - 1; ++k) {
        const double theta = std::numbers::pi * k / (samples - 1);
        locus.points.push_back(locus_point(model, a, b, theta));
    }
    return locus;
}

}  // namespace

std::vector<Locus> superposition_loci(LocusKind kind, int samples) {
    if (samples < 3) throw std::invalid_argument("superposition_loci: need at least 3 samples");
    const SpinModel model = build_model(Spin::one);
    switch (kind) {
        case LocusKind::z_pair:
            return {pair_locus(model, Observable::Sz, +1, 0, samples), pair_locus(model, Observable::Sz, -1, 0, samples)};
        case LocusKind::x_pair:
            return {pair_locus(model, Observable::Sx, +1, 0, samples), pair_locus(model, Observable::Sx, -1, 0, samples)};
        case LocusKind::axis: {
            Locus vertical{"axis-vertical", {}, false};
            Locus horizontal{"axis-horizontal", {}, false};
            const auto& zp = model.eigvecs_z[0];
            const auto& zm = model.eigvecs_z[2];
            const auto& xp = model.eigvecs_x[0];
            const auto& xm = model.eigvecs_x[2];
            for (int k = 0; k < samples; ++k) {
                const double theta = 0.5 * std::numbers::pi * k / (samples - 1);
                vertical.points.push_back(locus_point(model, zp, zm, theta));
                horizontal.points.push_back(locus_point(model, xp, xm, theta));
            }
            return {vertical, horizontal};
        }
    }
    return {};
}

bool point_in_polygon(std::span<const std::array<double, 2>> polygon, double x, double y) {
    bool inside = false;
    const std::size_t n = polygon.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const auto& a = polygon[i];
        const auto& b = polygon[j];
        if ((a[1] > y) != (b[1] > y)) {
            const double cross = (b[0] - a[0]) * (y - a[1]) / (b[1] - a[1]) + a[0];
            if (x < cross) inside = !inside;
        }
    }
    return inside;
}

PetalRegions::PetalRegions()
    : z_loci_(superposition_loci(LocusKind::z_pair)), x_loci_(superposition_loci(LocusKind::x_pair)) {}

bool PetalRegions::contains(double x, double y) const {
    const auto inside_any = [&](const std::vector<Locus>& loci) {
        for (const auto& l : loci)
            if (point_in_polygon(l.points, x, y)) return true;
        return false;
    };
    return inside_any(z_loci_) && inside_any(x_loci_);
}

// ---------------------------------------------------------------------------

std::size_t CollapseTimeStats::arrived() const {
    std::size_t n = 0;
    for (const auto& [t, v] : arrivals) n += v.size();
    return n;
}

namespace {

std::vector<double> all_arrivals(const CollapseTimeStats& s) {
    std::vector<double> all;
    for (const auto& [t, v] : s.arrivals) all.insert(all.end(), v.begin(), v.end());
    return all;
}

}  // namespace

double CollapseTimeStats::mean() const {
    const auto all = all_arrivals(*this);
    return all.empty() ? kNaN : mean_and_se(all).mean;
}

double CollapseTimeStats::standard_error() const {
    const auto all = all_arrivals(*this);
    return all.size() < 2 ? kNaN : mean_and_se(all).se;
}

double CollapseTimeStats::mean(int target) const {
    const auto it = arrivals.find(target);
    return it == arrivals.end() || it->second.empty() ? kNaN : mean_and_se(it->second).mean;
}

double CollapseTimeStats::standard_error(int target) const {
    const auto it = arrivals.find(target);
    return it == arrivals.end() || it->second.size() < 2 ? kNaN : mean_and_se(it->second).se;
}

void CollapseTimeStats::merge(const CollapseTimeStats& o) {
    for (const auto& [t, v] : o.arrivals) {
        auto& dst = arrivals[t];
        dst.insert(dst.end(), v.begin(), v.end());
    }
    non_arrivals += o.non_arrivals;
}

std::vector<CollapseTimeStats> collapse_times(const SpinModel& model, const DensityMatrix& initial,
                                              const CollapseTimeSpec& spec, std::span<const double> thresholds) {
    if (spec.n_trajectories <= 0) throw std::invalid_argument("collapse_times: N must be positive");
    if (spec.targets.empty()) throw std::invalid_argument("collapse_times: no targets");
    if (thresholds.empty()) throw std::invalid_argument("collapse_times: no thresholds");
    for (double th : thresholds)
        if (!(th > 0.5 && th < 1.0)) throw std::invalid_argument("collapse_times: threshold must lie in (0.5, 1)");
    if (!(spec.dt > 0.0) || !(spec.window > 0.0)) throw std::invalid_argument("collapse_times: dt and window must be positive");
    std::vector<ComplexMatrix> target_projectors;
    for (int label : spec.targets)
        target_projectors.push_back(model.projectors(spec.observable)[static_cast<std::size_t>(model.label_index(label))]);

    const auto steps = static_cast<std::int64_t>(std::llround(spec.window / spec.dt));
    const std::size_t nth = thresholds.size();

    using Hits = std::vector<std::optional<std::pair<int, double>>>;  // per threshold: (target, time)
    const auto per_trajectory = parallel_map(static_cast<std::size_t>(spec.n_trajectories), spec.threads, [&](std::size_t i) {
        Hits hits(nth);
        std::size_t remaining = nth;
        const auto check = [&](std::int64_t step, const ComplexMatrix& rho) {
            double p[3];
            for (std::size_t t = 0; t < target_projectors.size(); ++t)
                p[t] = trace_of_product(target_projectors[t], rho).real();
            for (std::size_t k = 0; k < nth; ++k) {
                if (hits[k]) continue;
                for (std::size_t t = 0; t < target_projectors.size(); ++t) {
                    if (p[t] >= thresholds[k]) {
                        hits[k] = std::make_pair(spec.targets[t], static_cast<double>(step) * spec.dt);
                        --remaining;
                        break;
                    }
                }
            }
            return remaining > 0;
        };
        ComplexMatrix rho = initial.mat();
        if (!check(0, rho)) return hits;
        NoiseSource noise(spec.seed + i);
        StepDiagnostics diag;
        const WindowSpec window{spec.observable, spec.amplitude, spec.dt, steps, spec.stepper};
        evolve_window(model, window, rho, noise, diag, check);
        return hits;
    });

    std::vector<CollapseTimeStats> out(nth);
    for (std::size_t k = 0; k < nth; ++k) out[k].threshold = thresholds[k];
    for (const auto& hits : per_trajectory) {
        for (std::size_t k = 0; k < nth; ++k) {
            if (hits[k])
                out[k].arrivals[hits[k]->first].push_back(hits[k]->second);
            else
                ++out[k].non_arrivals;
        }
    }
    return out;
}

CollapseTimeStats collapse_times(const SpinModel& model, const DensityMatrix& initial, const CollapseTimeSpec& spec,
                                 double threshold) {
    const double th[] = {threshold};
    return collapse_times(model, initial, spec, th).front();
}

// ---------------------------------------------------------------------------

CascadeTrace cascade_trace(const TrajectoryRecord& traj, Observable o) {
    CascadeTrace trace;
    trace.times = traj.times;
    const auto& src = o == Observable::Sz ? traj.eig_probs_z : traj.eig_probs_x;
    trace.probs.reserve(src.size());
    for (const auto& row : src) trace.probs.push_back(normalize_probabilities(row));
    return trace;
}

AbsorbingMonitor::AbsorbingMonitor(std::size_t n, double zero_level, double stay_level)
    : zero_level_(zero_level), stay_level_(stay_level), first_zero_(n), max_after_(n, 0.0) {}

void AbsorbingMonitor::observe(double time, std::span<const double> p) {
    if (p.size() != first_zero_.size()) throw std::invalid_argument("AbsorbingMonitor: row size mismatch");
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (first_zero_[i]) {
            max_after_[i] = std::max(max_after_[i], p[i]);
            if (p[i] > stay_level_) ++violations_;
        } else if (p[i] <= zero_level_) {
            first_zero_[i] = time;
            max_after_[i] = p[i];
        }
    }
}

AbsorbingMonitor check_absorbing(const CascadeTrace& trace, double zero_level, double stay_level) {
    AbsorbingMonitor monitor(trace.probs.empty() ? 0 : trace.probs.front().size(), zero_level, stay_level);
    for (std::size_t k = 0; k < trace.probs.size(); ++k) monitor.observe(trace.times[k], trace.probs[k]);
    return monitor;
}

// ---------------------------------------------------------------------------

MeanSe mean_and_se(std::span<const double> xs) {
    MeanSe r;
    if (xs.empty()) return {kNaN, kNaN};
    const double n = static_cast<double>(xs.size());
    r.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    if (xs.size() < 2) {
        r.se = kNaN;
        return r;
    }
    double ss = 0.0;
    for (double x : xs) ss += (x - r.mean) * (x - r.mean);
    r.se = std::sqrt(ss / (n - 1.0) / n);
    return r;
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_distance: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

}  // namespace qsd
