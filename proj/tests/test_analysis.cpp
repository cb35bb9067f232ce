// test_analysis.cpp — classification, dwell statistics, densities, loci,
// collapse times and cascade monitoring

#include "qsd/analysis.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <tuple>

using namespace qsd;

namespace {

std::vector<std::vector<double>> one_hot_rows(const std::vector<int>& labels) {
    std::vector<std::vector<double>> rows;
    for (int l : labels) {
        std::vector<double> r(3, 0.0);
        r[static_cast<std::size_t>(1 - l)] = 1.0;
        rows.push_back(r);
    }
    return rows;
}

// Born-rule transition matrix for an ideal S_z → S_x → S_z sequence.
std::vector<std::vector<double>> born_chain(const SpinModel& m) {
    const std::size_t n = m.labels.size();
    std::vector<std::vector<double>> t(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (const auto& px : m.projectors_x)
                t[i][j] += trace_of_product(m.projectors_z[i], px).real() *
                           trace_of_product(px, m.projectors_z[j]).real();
    return t;
}

}  // namespace

TEST_CASE("Born probabilities and classification") {
    const SpinModel m = build_model(Spin::one);
    const auto p = born_probabilities(m, preset_state(m, "eig_z(-1)").mat(), Observable::Sx);
    CHECK(p[0] == doctest::Approx(0.25));
    CHECK(p[1] == doctest::Approx(0.5));
    CHECK(p[2] == doctest::Approx(0.25));

    std::mt19937_64 rng(61);
    for (int i = 0; i < 200; ++i) {
        const auto q = born_probabilities(m, random_state(3, rng).mat(), Observable::Sz);
        CHECK(std::abs(q[0] + q[1] + q[2] - 1.0) < 1e-9);
    }
    CHECK_THROWS_AS(normalize_probabilities({0.5, 0.5, 1e-5}), std::runtime_error);
    const auto clipped = normalize_probabilities({1.0 + 1e-12, -1e-12, 0.0});
    CHECK(clipped[0] <= 1.0);
    CHECK(clipped[1] == 0.0);

    const std::vector<double> done = {0.0, 0.9995, 0.0005};
    CHECK(classify_probabilities(m, done, 1e-3) == 0);
    const std::vector<double> open = {0.0, 0.998, 0.002};
    CHECK_FALSE(classify_probabilities(m, open, 1e-3).has_value());
    CHECK_THROWS_AS(classify_probabilities(m, done, 0.5), std::invalid_argument);
    CHECK_FALSE(classify_eigenstate(m, preset_state(m, "mixed_start").mat(), Observable::Sz, 1e-3).has_value());
    CHECK(classify_eigenstate(m, preset_state(m, "eig_x(-1)").mat(), Observable::Sx, 1e-3) == -1);
}

TEST_CASE("dwell runs on explicit sequences") {
    const SpinModel m = build_model(Spin::one);
    SUBCASE("three repeats then a switch") {
        const DwellStats d = dwell_times(outcome_sequence(m, one_hot_rows({1, 1, 1, -1}), 1e-3));
        REQUIRE(d.completed_runs(1) == 1);
        CHECK(d.runs.at(1)[0] == 3);
        CHECK(d.completed_runs(-1) == 0);
        CHECK(d.unterminated_runs == 1);
    }
    SUBCASE("a constant sequence completes no run") {
        const DwellStats d = dwell_times(outcome_sequence(m, one_hot_rows({0, 0, 0, 0, 0}), 1e-3));
        CHECK(d.completed_runs(0) == 0);
        CHECK(std::isnan(d.mean(0)));
    }
    SUBCASE("an incomplete outcome terminates the run and starts none") {
        auto rows = one_hot_rows({1, 1, 0, 0, 0, -1});
        rows[2] = {0.4, 0.3, 0.3};
        const OutcomeSequence seq = outcome_sequence(m, rows, 1e-3);
        CHECK(seq.incomplete() == 1);
        const DwellStats d = dwell_times(seq);
        CHECK(d.runs.at(1) == std::vector<std::int64_t>{2});
        CHECK(d.runs.at(0) == std::vector<std::int64_t>{2});
        CHECK(d.incomplete_outcomes == 1);
    }
    SUBCASE("merge concatenates in order") {
        DwellStats a = dwell_times(outcome_sequence(m, one_hot_rows({1, 1, -1}), 1e-3));
        const DwellStats b = dwell_times(outcome_sequence(m, one_hot_rows({1, 0}), 1e-3));
        a.merge(b);
        CHECK(a.runs.at(1) == std::vector<std::int64_t>{2, 1});
        CHECK(a.unterminated_runs == 2);
    }
}

TEST_CASE("Born-chain return probabilities give the ideal dwell means") {
    const SpinModel one = build_model(Spin::one);
    const auto t = born_chain(one);
    CHECK(t[0][0] == doctest::Approx(3.0 / 8.0));
    CHECK(t[1][1] == doctest::Approx(0.5));
    CHECK(t[2][2] == doctest::Approx(3.0 / 8.0));
    CHECK(1.0 / (1.0 - t[0][0]) == doctest::Approx(1.6));
    CHECK(1.0 / (1.0 - t[1][1]) == doctest::Approx(2.0));
    for (const auto& row : t) CHECK(row[0] + row[1] + row[2] == doctest::Approx(1.0));

    const SpinModel half = build_model(Spin::half);
    CHECK(born_chain(half)[0][0] == doctest::Approx(0.5));
}

TEST_CASE("dwell means of sampled Born chains are geometric") {
    for (Spin spin : {Spin::half, Spin::one}) {
        const SpinModel m = build_model(spin);
        const auto t = born_chain(m);
        std::mt19937_64 rng(62);
        std::size_t state = 0;
        std::vector<std::vector<double>> rows;
        for (int i = 0; i < 40000; ++i) {
            std::discrete_distribution<std::size_t> next(t[state].begin(), t[state].end());
            state = next(rng);
            std::vector<double> r(m.labels.size(), 0.0);
            r[state] = 1.0;
            rows.push_back(r);
        }
        const DwellStats d = dwell_times(outcome_sequence(m, rows, 1e-3));
        for (std::size_t k = 0; k < m.labels.size(); ++k) {
            const int label = m.labels[k];
            const double expected = 1.0 / (1.0 - t[k][k]);
            CHECK(std::abs(d.mean(label) - expected) <= 3 * d.standard_error(label));
        }
    }
}

TEST_CASE("window-end outcomes are read from the recorded trajectory") {
    EngineConfig c;
    c.model = build_model(Spin::one);
    c.schedule = schedule_from_strengths(32, 32, 2.0);
    c.dt = 1e-3;
    c.duration = 20.0;
    c.seed = 3;
    c.sample_stride = 1000;
    const TrajectoryRecord t = run_trajectory(c, preset_state(c.model, "mixed_start"));
    const OutcomeSequence seq = outcome_sequence(t, c.model, 1e-3);
    CHECK(seq.size() == 10);

    c.sample_stride = 300;
    const TrajectoryRecord sparse = run_trajectory(c, preset_state(c.model, "mixed_start"));
    CHECK_THROWS_AS(outcome_sequence(sparse, c.model, 1e-3), std::invalid_argument);

    c.schedule = schedule_from_strengths(0, 0, 2.0);
    c.sample_stride = 1000;
    const TrajectoryRecord idle = run_trajectory(c, preset_state(c.model, "mixed_start"));
    CHECK(outcome_sequence(idle, c.model, 1e-3).incomplete() == 10);
}

TEST_CASE("2-D histogram binning and merging") {
    Histogram2D h(200);
    h.add(0.0, 0.0);
    CHECK(h.at(100, 100) == 1);
    h.add(1.0, -1.0);
    CHECK(h.at(199, 0) == 1);
    CHECK_NOTHROW(h.add(1.0 + 5e-10, 0.0));
    CHECK_THROWS_AS(h.add(1.01, 0.0), std::out_of_range);
    CHECK_THROWS_AS(h.merge(Histogram2D(100)), std::invalid_argument);

    std::mt19937_64 rng(63);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Histogram2D all(50), a(50), b(50), c(50);
    for (int i = 0; i < 30000; ++i) {
        const double x = u(rng), y = u(rng);
        all.add(x, y);
        (i < 10000 ? a : (i < 20000 ? b : c)).add(x, y);
    }
    Histogram2D left = a, right = b;
    left.merge(b);
    left.merge(c);
    right.merge(c);
    Histogram2D assoc = a;
    assoc.merge(right);
    CHECK(left.mass == all.mass);
    CHECK(assoc.mass == all.mass);
    CHECK(left.total == 30000);

    double integral = 0.0;
    for (int ix = 0; ix < 50; ++ix)
        for (int iy = 0; iy < 50; ++iy) integral += all.density(ix, iy) * all.bin_width_x() * all.bin_width_y();
    CHECK(integral == doctest::Approx(1.0));
}

TEST_CASE("spin-1/2 density piles up on the eigenstate points") {
    EngineConfig c;
    c.model = build_model(Spin::half);
    c.schedule = schedule_from_strengths(1, 1, 2.0);
    c.dt = 1e-3;
    c.duration = 400.0;
    c.seed = 4;
    const TrajectoryRecord t = run_trajectory(c, preset_state(c.model, "mixed_start"));
    Histogram2D h(200);
    accumulate_density(t, h);
    CHECK(h.total == t.size());
    // The most populated bins all lie within 0.05 of an eigenstate point.
    const std::array<double, 2> eig[] = {{0, 1}, {0, -1}, {1, 0}, {-1, 0}};
    auto near_eigenstate = [&](int ix, int iy) {
        for (auto [x, y] : eig)
            if (std::hypot(h.x_center(ix) - x, h.y_center(iy) - y) <= 0.05) return true;
        return false;
    };
    std::vector<std::tuple<std::uint64_t, int, int>> ranked;
    for (int ix = 0; ix < 200; ++ix)
        for (int iy = 0; iy < 200; ++iy) ranked.emplace_back(h.at(ix, iy), ix, iy);
    std::sort(ranked.rbegin(), ranked.rend());
    for (int k = 0; k < 12; ++k) CHECK(near_eigenstate(std::get<1>(ranked[k]), std::get<2>(ranked[k])));
}

TEST_CASE("region tallies") {
    RegionTally one = make_region_tally(Spin::one, 0.1);
    CHECK(one.regions.size() == 5);
    CHECK(one.track_petals);
    one.add(0.0, 0.98);
    one.add(0.0, 0.0);
    one.add(0.3, 0.3);
    CHECK(one.count("z(+1)") == 1);
    CHECK(one.count("center") == 1);
    CHECK(one.petal == 1);
    RegionTally other = make_region_tally(Spin::one, 0.1);
    other.add(-0.95, 0.0);
    one.merge(other);
    CHECK(one.count("x(-1)") == 1);
    CHECK(one.total == 4);
    CHECK(make_region_tally(Spin::half).regions.size() == 4);
}

TEST_CASE("superposition loci and petals") {
    for (const Locus& l : superposition_loci(LocusKind::z_pair)) {
        const double sign = l.name.find("+1") != std::string::npos ? 1.0 : -1.0;
        CHECK(l.closed);
        for (auto [x, z] : l.points) CHECK(2 * x * x + std::pow(2 * z - sign, 2) == doctest::Approx(1.0));
    }
    for (const Locus& l : superposition_loci(LocusKind::x_pair)) {
        const double sign = l.name.find("+1") != std::string::npos ? 1.0 : -1.0;
        for (auto [x, z] : l.points) CHECK(2 * z * z + std::pow(2 * x - sign, 2) == doctest::Approx(1.0));
    }

    const auto loci = superposition_loci(LocusKind::z_pair);
    bool top = false, origin = false;
    for (const Locus& l : loci)
        for (auto [x, z] : l.points) {
            top = top || (std::abs(x) < 1e-12 && std::abs(z - 1) < 1e-12);
            origin = origin || (std::abs(x) < 1e-12 && std::abs(z) < 1e-12);
        }
    CHECK(top);
    CHECK(origin);
    // Equal-weight superposition of |-1> and |0> sits at (±1/√2, -1/2).
    bool equal_weight = false;
    for (const Locus& l : loci)
        for (auto [x, z] : l.points)
            equal_weight = equal_weight || (std::abs(std::abs(x) - 1 / std::sqrt(2.0)) < 1e-9 && std::abs(z + 0.5) < 1e-9);
    CHECK(equal_weight);

    const std::vector<std::array<double, 2>> square = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    CHECK(point_in_polygon(square, 0.5, 0.5));
    CHECK_FALSE(point_in_polygon(square, 1.5, 0.5));

    const PetalRegions petals;
    CHECK(petals.contains(0.3, 0.3));
    CHECK(petals.contains(-0.3, -0.3));
    CHECK_FALSE(petals.contains(0.0, 0.5));
    CHECK_FALSE(petals.contains(0.0, 0.95));
    CHECK_FALSE(petals.contains(0.9, 0.9));
}

TEST_CASE("collapse first-passage times") {
    const SpinModel half = build_model(Spin::half);
    CollapseTimeSpec spec;
    spec.observable = Observable::Sz;
    spec.amplitude = 1.0;
    spec.window = 20.0;
    spec.dt = 1e-4;
    spec.targets = {1, -1};
    spec.n_trajectories = 2000;
    spec.seed = 77;

    SUBCASE("argument checks") {
        CollapseTimeSpec bad = spec;
        bad.n_trajectories = 0;
        CHECK_THROWS_AS(collapse_times(half, preset_state(half, "eig_x(+1)"), bad), std::invalid_argument);
        CHECK_THROWS_AS(collapse_times(half, preset_state(half, "eig_x(+1)"), spec, 0.4), std::invalid_argument);
    }
    SUBCASE("a state already at the target arrives at time zero") {
        CollapseTimeSpec s = spec;
        s.n_trajectories = 5;
        const auto stats = collapse_times(half, preset_state(half, "eig_z(+1)"), s, 0.9);
        CHECK(stats.arrived() == 5);
        CHECK(stats.mean() == 0.0);
    }
    SUBCASE("spin-1/2 means match two-barrier exit of the likelihood ratio") {
        // ℓ = ln(p+/p-) diffuses with drift ±8a² and variance 16a² per unit
        // time; the mean exit time from ±c is c·tanh(c/2)/(8a²).
        const double thresholds[] = {0.9, 0.999};
        const auto stats = collapse_times(half, preset_state(half, "eig_x(+1)"), spec, thresholds);
        for (std::size_t i = 0; i < 2; ++i) {
            const double c = std::log(thresholds[i] / (1 - thresholds[i]));
            const double expected = c * std::tanh(c / 2) / 8.0;
            CHECK(stats[i].non_arrivals == 0);
            CHECK(std::abs(stats[i].mean() - expected) <= 4 * stats[i].standard_error() + 0.02 * expected);
        }
    }
}

TEST_CASE("absorbing monitor") {
    AbsorbingMonitor ok(3);
    const double rows[][3] = {{0.5, 0.5, 0.0}, {0.6, 0.4, 1e-13}, {0.6, 0.4, 5e-10}};
    for (int i = 0; i < 3; ++i) ok.observe(i, rows[i]);
    CHECK(ok.holds());
    REQUIRE(ok.first_zero()[2].has_value());
    CHECK(*ok.first_zero()[2] == 0.0);
    CHECK_FALSE(ok.first_zero()[0].has_value());

    AbsorbingMonitor bad(3);
    const double revive[][3] = {{0.5, 0.5, 1e-13}, {0.5, 0.5, 2e-9}};
    for (int i = 0; i < 2; ++i) bad.observe(i, revive[i]);
    CHECK_FALSE(bad.holds());
    CHECK(bad.max_after_zero()[2] == 2e-9);
}

TEST_CASE("cascade traces start from the Born distribution") {
    EngineConfig c;
    c.model = build_model(Spin::one);
    c.schedule = schedule_from_strengths(0, 8, 2.0);
    c.dt = 1e-3;
    c.duration = 2.0;
    c.sample_stride = 10;
    const TrajectoryRecord t = run_trajectory(c, preset_state(c.model, "eig_z(-1)"));
    const CascadeTrace trace = cascade_trace(t, Observable::Sx);
    REQUIRE(trace.probs.size() == t.size());
    CHECK(trace.probs[0][0] == doctest::Approx(0.25));
    CHECK(trace.probs[0][1] == doctest::Approx(0.5));
    for (const auto& row : trace.probs) CHECK(row[0] + row[1] + row[2] == doctest::Approx(1.0));
}

TEST_CASE("statistics helpers") {
    const std::vector<double> x = {1.0, 2.0, 3.0};
    const MeanSe ms = mean_and_se(x);
    CHECK(ms.mean == doctest::Approx(2.0));
    CHECK(ms.se == doctest::Approx(1.0 / std::sqrt(3.0)));
    CHECK(ks_distance(x, x) == 0.0);
    CHECK(ks_distance({1, 2, 3}, {10, 11}) == 1.0);
    CHECK(ks_distance({1, 2, 3}, {2, 3, 4}) == doctest::Approx(1.0 / 3.0));
}
