#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "specrad/spectral.hpp"

using namespace specrad;

namespace {

std::vector<double> sorted_moduli(const Spectrum& s) {
    std::vector<double> m;
    for (auto z : s.eigenvalues) m.push_back(std::abs(z));
    std::sort(m.begin(), m.end());
    return m;
}

}  // namespace

TEST(Eigenvalues, Diagonal) {
    ComplexMatrix m = ComplexMatrix::Zero(3, 3);
    m(0, 0) = 2.0;
    m(1, 1) = -5.0;
    m(2, 2) = Complex(0.0, 3.0);
    EXPECT_NEAR(spectral_radius(m), 5.0, 1e-12);
}

TEST(Eigenvalues, Rotation) {
    RealMatrix r(2, 2);
    r << 0, -1, 1, 0;
    const auto s = eigenvalues(ComplexMatrix(r.cast<Complex>()));
    ASSERT_EQ(s.eigenvalues.size(), 2u);
    for (auto z : s.eigenvalues) {
        EXPECT_NEAR(z.real(), 0.0, 1e-14);
        EXPECT_NEAR(std::abs(z.imag()), 1.0, 1e-14);
    }
}

TEST(Eigenvalues, NilpotentShift) {
    const int n = 10;
    ComplexMatrix m = ComplexMatrix::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) m(i, i + 1) = 1.0;
    EXPECT_LE(spectral_radius(m), 1e-12);
}

TEST(Eigenvalues, CyclicPermutationHasUnitRoots) {
    const int n = 6;
    ComplexMatrix m = ComplexMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i) m(i, (i + 1) % n) = 1.0;
    for (double a : sorted_moduli(eigenvalues(m))) EXPECT_NEAR(a, 1.0, 1e-12);
}

TEST(Eigenvalues, RealAndComplexPathsAgree) {
    const auto x = sample_matrix(EntryDistribution::gaussian_real(), 30, 4);
    const ComplexMatrix perturbed = x.dense_storage();
    const auto a = sorted_moduli(eigenvalues(perturbed));
    // same matrix forced through the complex solver by a zero-imaginary detour
    ComplexMatrix c = perturbed;
    c(0, 0) += Complex(0.0, 1e-300);
    const auto b = sorted_moduli(eigenvalues(c));
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-9);
}

TEST(Eigenvalues, TraceAndDeterminant) {
    const auto x = sample_matrix(EntryDistribution::gaussian_complex(), 12, 8);
    const auto s = eigenvalues(x);
    Complex sum(0.0), prod(1.0);
    for (auto z : s.eigenvalues) {
        sum += z;
        prod *= z;
    }
    EXPECT_NEAR(std::abs(sum - x.dense_storage().trace()), 0.0, 1e-10);
    EXPECT_NEAR(std::abs(prod - x.dense_storage().determinant()) / std::abs(prod), 0.0, 1e-9);
}

TEST(Eigenvalues, Cap) {
    const auto x = sample_matrix(EntryDistribution::rademacher(), 20, 1);
    EXPECT_THROW(eigenvalues(x, 10), UnsupportedError);
    EXPECT_THROW(eigenvalues(sample_matrix(EntryDistribution::sparse_toy(0.5, 0.5), 5, 1, Storage::sparse)),
                 UnsupportedError);
}

TEST(Esd, ScalesBySqrtN) {
    const auto x = sample_matrix(EntryDistribution::rademacher(), 16, 2);
    const auto s = eigenvalues(x);
    const auto e = esd(s);
    for (std::size_t i = 0; i < e.size(); ++i) EXPECT_NEAR(std::abs(e[i] * 4.0 - s.eigenvalues[i]), 0.0, 1e-14);
}

TEST(Esd, CircularLawAtModerateN) {
    const auto x = sample_matrix(EntryDistribution::rademacher(), 400, 3);
    const auto e = esd(eigenvalues(x));
    std::size_t inside = 0, inner = 0;
    for (auto z : e) {
        inside += std::abs(z) <= 1.05;
        inner += std::abs(z) <= std::sqrt(0.5);
    }
    EXPECT_GE(inside, 0.99 * e.size());
    // uniform on the disc puts half the mass inside radius 1/sqrt(2)
    EXPECT_NEAR(static_cast<double>(inner) / e.size(), 0.5, 0.05);
}

TEST(Outliers, StrictlyOutside) {
    Spectrum s;
    s.eigenvalues = {Complex(1.0), Complex(0.0, 2.0), Complex(3.0)};
    s.n = 3;
    EXPECT_EQ(outlier_count(s, 2.0), 1u);
    EXPECT_EQ(outlier_count(s, 0.5), 3u);
}

TEST(TraceBound, ZeroMatrix) {
    RealMatrix z = RealMatrix::Zero(5, 5);
    EXPECT_EQ(trace_moment_bound(z, 3), 0.0);
    EXPECT_EQ(power_norm_bound(z, 2).value, 0.0);
}

TEST(TraceBound, IdentityIsSharpUpToDimension) {
    // Tr(I) = n, so the bound is n^(1/(2k-2))
    RealMatrix id = RealMatrix::Identity(8, 8);
    EXPECT_NEAR(trace_moment_bound(id, 2), std::sqrt(8.0), 1e-12);
    EXPECT_NEAR(trace_moment_bound(id, 5), std::pow(8.0, 1.0 / 8.0), 1e-12);
}

TEST(TraceBound, MatchesDirectComputation) {
    const auto x = sample_matrix(EntryDistribution::gaussian_complex(), 10, 13);
    const ComplexMatrix& m = x.dense_storage();
    for (int k = 2; k <= 6; ++k) {
        ComplexMatrix p = ComplexMatrix::Identity(10, 10);
        for (int i = 0; i < k - 1; ++i) p = p * m;
        const double tr = (p.adjoint() * p).trace().real();
        EXPECT_NEAR(log_trace_moment(m, k), std::log(tr), 1e-10) << k;
        EXPECT_NEAR(trace_moment_bound(x, k), std::pow(tr, 1.0 / (2.0 * k - 2.0)), 1e-10 * std::pow(tr, 0.1));
    }
}

TEST(TraceBound, NoOverflowAtHighPower) {
    const auto x = sample_matrix(EntryDistribution::pareto(2.2), 60, 5);
    const double b = trace_moment_bound(x, 200);
    EXPECT_TRUE(std::isfinite(b));
    EXPECT_GE(b * (1 + 1e-9), spectral_radius(x));
}

TEST(TraceBound, RejectsSmallK) {
    EXPECT_THROW(trace_moment_bound(RealMatrix(RealMatrix::Identity(2, 2)), 1), ConfigError);
}

TEST(ScaledPower, ReconstructsPower) {
    const auto x = sample_matrix(EntryDistribution::gaussian_real(), 6, 2);
    const RealMatrix m = x.dense_storage().real();
    for (int p : {1, 2, 3, 7}) {
        RealMatrix direct = RealMatrix::Identity(6, 6);
        for (int i = 0; i < p; ++i) direct = direct * m;
        const auto sp = scaled_power(m, p);
        const RealMatrix back = std::exp(sp.log_scale) * sp.matrix;
        EXPECT_LE((back - direct).norm(), 1e-10 * direct.norm()) << p;
        EXPECT_NEAR(sp.matrix.cwiseAbs().maxCoeff(), 1.0, 1e-15);
    }
}

TEST(PowerBound, SpectralNormForM1) {
    const auto x = sample_matrix(EntryDistribution::gaussian_real(), 25, 9);
    const RealMatrix m = x.dense_storage().real();
    Eigen::JacobiSVD<RealMatrix> svd(m);
    const auto r = power_norm_bound(m, 1);
    EXPECT_NEAR(r.value, svd.singularValues()(0), 1e-6 * svd.singularValues()(0));
    EXPECT_LE(r.lower, r.upper);
    EXPECT_EQ(r.value, r.lower);
}

TEST(PowerBound, BracketsTheTrueNorm) {
    const auto x = sample_matrix(EntryDistribution::gaussian_complex(), 20, 10);
    ComplexMatrix p = x.dense_storage() * x.dense_storage() * x.dense_storage();
    Eigen::JacobiSVD<ComplexMatrix> svd(p);
    const double truth = std::cbrt(svd.singularValues()(0));
    const auto r = power_norm_bound(x, 3);
    EXPECT_NEAR(r.value, truth, 1e-8 * truth);
}

TEST(Bounds, DominateRadius) {
    for (std::uint64_t s = 0; s < 5; ++s) {
        const auto x = sample_matrix(EntryDistribution::gaussian_real(), 40, s);
        const auto b = radius_bounds(x, {2, 4, 6}, {1, 2, 4, 8}, true);
        ASSERT_TRUE(b.rho_exact.has_value());
        for (const auto& [k, v] : b.trace_bound_k) EXPECT_LE(*b.rho_exact, v * (1 + 1e-9)) << k;
        for (const auto& [m, v] : b.power_bound_m) EXPECT_LE(*b.rho_exact, v * (1 + 1e-9)) << m;
        const auto j = to_json(b);
        EXPECT_EQ(j.at("bounds").size(), 7u);
        EXPECT_EQ(j.at("bounds")[0].at("kind"), "trace_moment");
        EXPECT_EQ(j.at("bounds")[3].at("kind"), "power_norm");
    }
}

TEST(Markov, TailBound) {
    // E Tr / ((1+delta)^(2k-2) n^(k-1))
    EXPECT_NEAR(markov_tail_bound(3, 100.0, 0.5, 1e4), 1e4 / (std::pow(1.5, 4) * 1e4), 1e-15);
    EXPECT_EQ(markov_tail_bound(3, 100.0, 0.5, 0.0), 0.0);
}

TEST(DefaultK, LogSquared) {
    EXPECT_EQ(default_k(1000), 48);
    EXPECT_EQ(default_k(100), 22);
    EXPECT_EQ(default_k(2), 2);
}
