#include <algorithm>
#include <cmath>
#include <map>

#include <gtest/gtest.h>

#include "specrad/cyclestats.hpp"

using namespace specrad;

namespace {

MatrixSample dense(std::initializer_list<std::initializer_list<double>> rows) {
    const auto n = static_cast<Eigen::Index>(rows.size());
    ComplexMatrix m(n, n);
    Eigen::Index i = 0;
    for (const auto& r : rows) {
        Eigen::Index j = 0;
        for (double v : r) m(i, j++) = v;
        ++i;
    }
    return MatrixSample::from_dense(m);
}

MatrixSample constant_offdiagonal(int n, double c) {
    ComplexMatrix m = ComplexMatrix::Constant(n, n, c);
    m.diagonal().setZero();
    return MatrixSample::from_dense(m);
}

// Brute force: every injective m-sequence, one representative per rotation
// for unrooted cycles. Returns #{p >= 2^h} for h = 0..H and the class size.
std::pair<std::vector<double>, double> brute_counts(const RealMatrix& a, int m, bool rooted, int H) {
    const int n = static_cast<int>(a.rows());
    std::vector<double> at_least(static_cast<std::size_t>(H) + 1, 0.0);
    double size = 0.0;
    std::vector<int> seq(static_cast<std::size_t>(m));
    std::function<void(int)> rec = [&](int pos) {
        if (pos == m) {
            if (!rooted && *std::min_element(seq.begin(), seq.end()) != seq[0]) return;
            double p = 1.0;
            const int last = rooted ? m - 1 : m;
            for (int i = 0; i < last; ++i) p *= std::pow(a(seq[i], seq[(i + 1) % m]), 2);
            size += 1.0;
            for (int h = 0; h <= H; ++h)
                if (p >= std::ldexp(1.0, h)) at_least[static_cast<std::size_t>(h)] += 1.0;
            return;
        }
        for (int v = 0; v < n; ++v) {
            if (std::find(seq.begin(), seq.begin() + pos, v) != seq.begin() + pos) continue;
            seq[static_cast<std::size_t>(pos)] = v;
            rec(pos + 1);
        }
    };
    rec(0);
    return {at_least, size};
}

MultiDigraph two_double_cycles() { return digraph_of_path({1, 2, 3, 2, 4, 3, 1, 2, 3, 2, 4, 3, 1}); }

}  // namespace

TEST(Weights, PathWeight) {
    const auto x = dense({{0, 2}, {3, 0}});
    EXPECT_EQ(path_weight(x.dense_storage(), {1, 2, 1}), Complex(6.0));
    const auto ones = dense({{1, 1, 1}, {1, 1, 1}, {1, 1, 1}});
    EXPECT_EQ(path_weight(ones.dense_storage(), {1, 3, 2, 2, 1}), Complex(1.0));
    const auto r = sample_matrix(EntryDistribution::rademacher(), 5, 3);
    EXPECT_DOUBLE_EQ(std::abs(path_weight(r.dense_storage(), {1, 4, 2, 5, 1, 3})), 1.0);
    EXPECT_THROW(path_weight(x.dense_storage(), {1, 3}), ConfigError);
}

TEST(Weights, DigraphWeight) {
    const auto x = dense({{3, 2}, {0.5, 0}});
    MultiDigraph loop;
    loop.add_edge(1, 1, 2);
    EXPECT_DOUBLE_EQ(digraph_weight(x, loop), 9.0);
    MultiDigraph two;
    two.add_edge(1, 2, 2);
    two.add_edge(2, 1, 2);
    EXPECT_DOUBLE_EQ(digraph_weight(x, two), 1.0);
    const auto ones = MatrixSample::from_dense(ComplexMatrix::Constant(4, 4, 1.0));
    EXPECT_EQ(digraph_weight(ones, two_double_cycles()), 1.0);
}

TEST(Weights, RootedWeight) {
    MultiDigraph loop2, loop4;
    loop2.add_edge(1, 1, 2);
    loop4.add_edge(1, 1, 4);
    EXPECT_EQ(rooted_weight(dense({{3}}), RootedMultiDigraph(loop2, {1, 1})), 1.0);
    EXPECT_EQ(rooted_weight(dense({{0}}), RootedMultiDigraph(loop2, {1, 1})), 1.0);
    EXPECT_EQ(rooted_weight(dense({{2}}), RootedMultiDigraph(loop4, {1, 1})), 4.0);
    MultiDigraph single;
    single.add_edge(1, 1, 1);
    EXPECT_THROW(rooted_weight(dense({{2}}), RootedMultiDigraph(single, {1, 1})), ConfigError);
}

TEST(Weights, PathAndDigraphAgree) {
    const auto x = sample_matrix(EntryDistribution::gaussian_complex(), 4, 12);
    const RealMatrix a = x.abs();
    enumerate_even_closed_paths(4, 3, [&](const Path& p) {
        const auto g = digraph_of_path(p);
        const double w = std::abs(path_weight(x.dense_storage(), p));
        EXPECT_NEAR(w, digraph_weight(a, g), 1e-12 * w);
        for (const auto& [e, m] : g.edges()) {
            const double xr = a(e.first - 1, e.second - 1);
            EXPECT_NEAR(rooted_weight(a, RootedMultiDigraph(g, e)) * xr * xr, digraph_weight(a, g), 1e-12 * w);
        }
    });
}

TEST(Dyadic, Sandwich) {
    EXPECT_EQ(dyadic_sandwich(0.0, 10), std::make_pair(0.0, 1.0));
    EXPECT_EQ(dyadic_sandwich(1.0, 10), std::make_pair(0.5, 3.0));
    EXPECT_EQ(dyadic_sandwich(2.5, 10), std::make_pair(1.5, 7.0));
    for (double a : {0.3, 1.0, 7.9, 8.0, 1000.0, 1e6}) {
        const auto [lo, hi] = dyadic_sandwich(a, 30);
        EXPECT_LE(lo, a);
        EXPECT_LE(a, hi);
    }
    EXPECT_EQ(dyadic_level(0.99, 5), -1);
    EXPECT_EQ(dyadic_level(1.0, 5), 0);
    EXPECT_EQ(dyadic_level(1e9, 5), 5);
}

TEST(Dyadic, Cutoff) {
    EXPECT_EQ(h_cutoff(6, 30), 117);
    EXPECT_EQ(h_cutoff(2, 4), 16);
}

TEST(ClassSize, Formulas) {
    EXPECT_EQ(cycle_class_size(4, 2), 6.0);
    EXPECT_EQ(cycle_class_size(5, 3), 20.0);
    EXPECT_EQ(cycle_class_size(4, 5), 0.0);
    EXPECT_EQ(rooted_cycle_class_size(5, 3), 60.0);
}

TEST(ClassStatistics, Rademacher) {
    const auto x = sample_matrix(EntryDistribution::rademacher(), 7, 2);
    const WeightContext ctx(x, 0.5, 1.0, 4);
    for (bool rooted : {false, true})
        for (int m = 1; m <= 4; ++m) {
            const auto r = cycle_class_statistics(ctx, m, rooted);
            EXPECT_TRUE(r.exact);
            EXPECT_EQ(r.S_h[0], 1.0);
            for (std::size_t h = 1; h < r.S_h.size(); ++h) EXPECT_EQ(r.S_h[h], 0.0);
            EXPECT_EQ(r.S, 1.0);
            EXPECT_EQ(r.H, ctx.H());
        }
}

TEST(ClassStatistics, ZeroMatrix) {
    const auto x = MatrixSample::from_dense(ComplexMatrix::Zero(5, 5));
    const WeightContext ctx(x, 0.5, 1.0, 3);
    const auto r = cycle_class_statistics(ctx, 2, false);
    for (double s : r.S_h) EXPECT_EQ(s, 0.0);
    EXPECT_EQ(r.S, 1.0);
    EXPECT_EQ(r.class_size, 10.0);
}

TEST(ClassStatistics, ExactMatchesBruteForce) {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const auto x = sample_matrix(EntryDistribution::pareto(1.5), 6, seed);
        const WeightContext ctx(x, 0.5, 1.0, 4);
        StatsOptions exact;
        exact.mode = StatsMode::exact;
        for (bool rooted : {false, true})
            for (int m = 1; m <= 4; ++m) {
                const auto r = cycle_class_statistics(ctx, m, rooted, exact);
                const auto [counts, size] = brute_counts(ctx.moduli, m, rooted, ctx.H());
                EXPECT_EQ(r.class_size, size);
                for (int h = 0; h <= ctx.H(); ++h)
                    EXPECT_NEAR(r.S_h[h], std::ldexp(1.0, h) * counts[h] / size, 1e-9 * std::ldexp(1.0, h))
                        << "seed " << seed << " m " << m << " rooted " << rooted << " h " << h;
            }
    }
}

TEST(ClassStatistics, MonteCarloWithinError) {
    const auto x = sample_matrix(EntryDistribution::pareto(1.5), 9, 77);
    const WeightContext ctx(x, 0.5, 1.0, 3);
    StatsOptions exact, mc;
    exact.mode = StatsMode::exact;
    mc.mode = StatsMode::montecarlo;
    mc.samples = 40000;
    for (bool rooted : {false, true}) {
        const auto e = cycle_class_statistics(ctx, 3, rooted, exact);
        const auto s = cycle_class_statistics(ctx, 3, rooted, mc);
        EXPECT_FALSE(s.exact);
        EXPECT_EQ(s.samples, 40000u);
        for (std::size_t h = 0; h < 6; ++h)
            EXPECT_NEAR(s.S_h[h], e.S_h[h], 5.0 * s.stderr_h[h] + 1e-12) << h;
    }
}

TEST(ClassStatistics, MonteCarloIsDeterministic) {
    const auto x = sample_matrix(EntryDistribution::gaussian_real(), 12, 5);
    const WeightContext ctx(x, 0.5, 1.0, 3);
    StatsOptions mc;
    mc.mode = StatsMode::montecarlo;
    mc.samples = 1000;
    EXPECT_EQ(cycle_class_statistics(ctx, 3, true, mc).S_h, cycle_class_statistics(ctx, 3, true, mc).S_h);
}

TEST(ClassStatistics, CapacityError) {
    const auto x = sample_matrix(EntryDistribution::rademacher(), 30, 1);
    const WeightContext ctx(x, 0.5, 1.0, 6);
    StatsOptions exact;
    exact.mode = StatsMode::exact;
    EXPECT_THROW(cycle_class_statistics(ctx, 6, false, exact), CapacityError);
    StatsOptions automatic;
    EXPECT_FALSE(cycle_class_statistics(ctx, 6, false, automatic).exact);
}

TEST(ClassStatistics, RelabelingAverageMatchesSupportCount) {
    const auto x = sample_matrix(EntryDistribution::tabulated({{0.0, 0.3}, {0.5, 0.3}, {3.0, 0.4}}), 5, 3);
    const WeightContext ctx(x, 0.5, 1.0, 3);
    StatsOptions exact;
    exact.mode = StatsMode::exact;
    for (int m = 1; m <= 3; ++m) {
        const auto a = cycle_class_statistics(ctx, m, true, exact);
        const auto b = rooted_class_statistics(ctx, RootedMultiDigraph(double_cycle(m), {m, 1}));
        ASSERT_EQ(a.S_h.size(), b.S_h.size());
        for (std::size_t h = 0; h < a.S_h.size(); ++h) EXPECT_NEAR(a.S_h[h], b.S_h[h], 1e-9 * std::ldexp(1.0, h));
        EXPECT_EQ(a.class_key, b.class_key);
    }
}

TEST(EventAk, RademacherAndZero) {
    const auto x = sample_matrix(EntryDistribution::rademacher(), 8, 4);
    const auto rep = check_event_Ak(WeightContext(x, 0.5, 1.0, 3));
    EXPECT_TRUE(rep.Ak);
    ASSERT_EQ(rep.per_m.size(), 3u);
    for (const auto& row : rep.per_m) {
        EXPECT_EQ(row.sum_cycle, 1.0);
        EXPECT_EQ(row.sum_rooted, 1.0);
        EXPECT_EQ(row.sum_weighted, 1.0);
    }
    const auto z = check_event_Ak(WeightContext(MatrixSample::from_dense(ComplexMatrix::Zero(6, 6)), 0.5, 1.0, 3));
    EXPECT_TRUE(z.Ak);
    for (const auto& row : z.per_m) {
        EXPECT_EQ(row.sum_cycle + row.sum_weighted, 0.0);
        // the rooted doubled loop has weight 1 whatever X_11 is
        EXPECT_EQ(row.sum_rooted, row.m == 1 ? 1.0 : 0.0);
    }
    const auto j = to_json(rep);
    EXPECT_TRUE(j.at("Ak").get<bool>());
    EXPECT_EQ(j.at("per_m").size(), 3u);
}

TEST(EventAk, FailsOnHeavyCycle) {
    // one huge 2-cycle in a small matrix pushes S_h(C_2) far above k^2
    ComplexMatrix m = ComplexMatrix::Zero(3, 3);
    m(0, 1) = 1e3;
    m(1, 0) = 1e3;
    const auto rep = check_event_Ak(WeightContext(MatrixSample::from_dense(m), 0.5, 1.0, 2));
    EXPECT_FALSE(rep.A1);
    EXPECT_FALSE(rep.Ak);
}

TEST(Moments, ClosedCases) {
    const auto x = sample_matrix(EntryDistribution::rademacher(), 6, 9);
    const WeightContext ctx(x, 0.5, 1.0, 3);
    for (int m = 1; m <= 3; ++m)
        for (double t : {1.0, 2.0, 3.0}) EXPECT_DOUBLE_EQ(cycle_empirical_moment(ctx, m, t).value, 1.0);
    const WeightContext cctx(constant_offdiagonal(5, 1.5), 0.5, 1.0, 3);
    for (int m = 2; m <= 3; ++m)
        for (double t : {1.0, 2.0})
            EXPECT_NEAR(cycle_empirical_moment(cctx, m, t).value, std::pow(1.5, 2 * t * m), 1e-12);
}

TEST(Moments, GaussianN4M2ByHand) {
    const auto x = sample_matrix(EntryDistribution::gaussian_real(), 4, 2024);
    const RealMatrix a = x.abs();
    double sum = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) sum += a(i, j) * a(i, j) * a(j, i) * a(j, i);
    const WeightContext ctx(x, 0.5, 1.0, 2);
    EXPECT_NEAR(cycle_empirical_moment(ctx, 2, 1.0).value, sum / 6.0, 1e-14);
}

TEST(Moments, EventEk) {
    const auto x = sample_matrix(EntryDistribution::rademacher(), 6, 1);
    const auto r = check_event_Ek(WeightContext(x, 0.5, 1.0, 3));
    EXPECT_TRUE(r.holds);
    EXPECT_EQ(r.per_m.size(), 3u);
}

TEST(Moments, CycleMomentBound) {
    const auto x = sample_matrix(EntryDistribution::rademacher(), 6, 1);
    const auto c = cycle_moment_bound_check(WeightContext(x, 0.5, 1.0, 3), 2, 1.0);
    EXPECT_TRUE(c.ok);
    EXPECT_NEAR(c.bound, std::pow(6.0, 2.0 * (1 - 0.5 / 8)), 1e-9);
}

TEST(WMax, Cases) {
    const auto r = sample_matrix(EntryDistribution::rademacher(), 5, 2);
    const WeightContext rc(r, 0.5, 1.0, 3);
    const auto c = w_max_bound_check(rc, 3);
    EXPECT_EQ(c.w_max, 1.0);
    EXPECT_NEAR(c.rhs, std::pow(cycle_class_size(5, 3), 1.0 / 1.25), 1e-9);
    EXPECT_TRUE(c.ok);

    ComplexMatrix m = ComplexMatrix::Constant(4, 4, 1e-3);
    m(0, 1) = 10.0;
    const auto d = w_max_bound_check(WeightContext(MatrixSample::from_dense(m), 0.5, 1.0, 2), 2);
    EXPECT_NEAR(d.w_max, 10.0 * 1e-3, 1e-15);
    EXPECT_TRUE(d.ok);

    const auto z = w_max_bound_check(WeightContext(MatrixSample::from_dense(ComplexMatrix::Zero(4, 4)), 0.5, 1.0, 2), 2);
    EXPECT_EQ(z.w_max, 0.0);
    EXPECT_EQ(z.rhs, 0.0);
    EXPECT_TRUE(z.ok);
}

TEST(StatisticsBound, RademacherExamples) {
    const auto x = sample_matrix(EntryDistribution::rademacher(), 6, 3);
    const WeightContext ctx(x, 0.5, 1.0, 2);
    MultiDigraph loop;
    loop.add_edge(1, 1, 2);
    const auto a = statistics_bound_check(ctx, RootedMultiDigraph(loop, {1, 1}));
    EXPECT_EQ(a.S, 1.0);
    EXPECT_EQ(a.k, 1);
    EXPECT_EQ(a.x, 1);
    EXPECT_TRUE(a.ok);
    EXPECT_FALSE(a.hypothesis_met);
    EXPECT_TRUE(a.informational);
    const auto b = statistics_bound_check(ctx, RootedMultiDigraph(two_double_cycles(), {1, 2}));
    EXPECT_EQ(b.S, 1.0);
    EXPECT_EQ(b.k, 6);
    EXPECT_TRUE(b.ok);
    EXPECT_TRUE(b.ak_holds);
}

TEST(StatisticsBound, LogFormula) {
    // B = 1: c = 0, y = k - x, bound = N^(k-x) N^(-eps(k-x)/16) k^2
    const double lb = log_statistics_bound(100, 4, 2, 0.5, 1.0);
    EXPECT_NEAR(lb, 2 * std::log(100.0) - 0.5 * 2 / 16 * std::log(100.0) + 2 * std::log(4.0), 1e-12);
}

TEST(StatisticsBound, RejectsNonEven) {
    MultiDigraph g;
    g.add_edge(1, 2, 1);
    g.add_edge(2, 1, 1);
    const auto x = sample_matrix(EntryDistribution::rademacher(), 4, 3);
    EXPECT_THROW(statistics_bound_check(WeightContext(x, 0.5, 1.0, 2), RootedMultiDigraph(g, {1, 2})), ConfigError);
}

TEST(InductionChain, FigureExample) {
    const auto x = sample_matrix(EntryDistribution::gaussian_real(), 5, 8);
    const auto steps = induction_chain_check(WeightContext(x, 0.5, 1.0, 2), RootedMultiDigraph(two_double_cycles(), {1, 2}));
    ASSERT_EQ(steps.size(), 1u);
    EXPECT_EQ(steps[0].r, 2);
    EXPECT_EQ(steps[0].m, 3);
    EXPECT_TRUE(steps[0].ok_general);
    EXPECT_GE(steps[0].S_cur, 1.0);
}
