#pragma once

// Eigenvalues, spectral radius, and the moment/norm upper bounds
//   rho(X)^(2k-2) <= Tr((X*)^(k-1) X^(k-1)) = ||X^(k-1)||_F^2
//   rho(X)        <= ||X^m||^(1/m)
// Matrix powers are carried as  exp(log_scale) * M  with M renormalized to
// unit max entry after every product, since entries of X^p grow like n^(p/2).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <lapacke.h>

#include "specrad/ensemble.hpp"
#include "specrad/errors.hpp"
#include "specrad/rng.hpp"

namespace specrad {

inline constexpr std::size_t kDefaultEigenCap = 4096;

struct Spectrum {
    std::vector<Complex> eigenvalues;
    std::size_t n = 0;
    bool scaled = false;  // divided by sqrt(n)
};

namespace detail {

inline std::vector<Complex> real_geev(RealMatrix a) {
    const auto n = static_cast<lapack_int>(a.rows());
    std::vector<double> wr(static_cast<std::size_t>(n)), wi(static_cast<std::size_t>(n));
    const lapack_int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'N', n, a.data(), n, wr.data(),
                                          wi.data(), nullptr, 1, nullptr, 1);
    if (info < 0) throw Error("dgeev: invalid argument " + std::to_string(-info));
    if (info > 0) throw NumericalError("QR iteration failed to converge in dgeev", info);
    std::vector<Complex> out(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = Complex(wr[i], wi[i]);
    return out;
}

inline std::vector<Complex> complex_geev(ComplexMatrix a) {
    const auto n = static_cast<lapack_int>(a.rows());
    std::vector<Complex> w(static_cast<std::size_t>(n));
    const lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n,
                                          reinterpret_cast<lapack_complex_double*>(a.data()), n,
                                          reinterpret_cast<lapack_complex_double*>(w.data()),
                                          nullptr, 1, nullptr, 1);
    if (info < 0) throw Error("zgeev: invalid argument " + std::to_string(-info));
    if (info > 0) throw NumericalError("QR iteration failed to converge in zgeev", info);
    return w;
}

}  // namespace detail

/// All eigenvalues of a general square matrix (Hessenberg reduction followed
/// by shifted QR to Schur form). Real input takes the real-arithmetic path.
inline Spectrum eigenvalues(const ComplexMatrix& x, std::size_t cap = kDefaultEigenCap) {
    if (x.rows() != x.cols()) throw ConfigError("eigenvalues need a square matrix");
    const auto n = static_cast<std::size_t>(x.rows());
    if (n > cap)
        throw UnsupportedError("dense eigensolver capped at n = " + std::to_string(cap) +
                               "; use the moment bounds instead");
    Spectrum s;
    s.n = n;
    if (n == 0) return s;
    if (x.imag().isZero(0.0))
        s.eigenvalues = detail::real_geev(x.real());
    else
        s.eigenvalues = detail::complex_geev(x);
    return s;
}

inline Spectrum eigenvalues(const MatrixSample& x, std::size_t cap = kDefaultEigenCap) {
    if (x.storage() != Storage::dense)
        throw UnsupportedError("eigenvalues need dense storage");
    return eigenvalues(x.dense_storage(), cap);
}

inline double spectral_radius(const Spectrum& s) {
    double r = 0.0;
    for (const auto& z : s.eigenvalues) r = std::max(r, std::abs(z));
    return r;
}

inline double spectral_radius(const ComplexMatrix& x) { return spectral_radius(eigenvalues(x)); }
inline double spectral_radius(const MatrixSample& x) { return spectral_radius(eigenvalues(x)); }

/// Eigenvalues scaled by 1/sqrt(n).
inline std::vector<Complex> esd(const Spectrum& s) {
    std::vector<Complex> out = s.eigenvalues;
    if (s.scaled || s.n == 0) return out;
    const double inv = 1.0 / std::sqrt(static_cast<double>(s.n));
    for (auto& z : out) z *= inv;
    return out;
}

inline std::vector<Complex> esd(const ComplexMatrix& x) { return esd(eigenvalues(x)); }

/// Number of eigenvalues of modulus strictly greater than `radius`.
inline std::size_t outlier_count(const Spectrum& s, double radius) {
    return static_cast<std::size_t>(std::count_if(s.eigenvalues.begin(), s.eigenvalues.end(),
                                                  [&](const Complex& z) { return std::abs(z) > radius; }));
}

// ---------------------------------------------------------------------------
// Scaled matrix powers

/// X^p = exp(log_scale) * matrix. `zero` marks an exactly vanishing power.
template <class M>
struct ScaledPower {
    M matrix;
    double log_scale = 0.0;
    bool zero = false;
};

namespace detail {

template <class M>
void renormalize(M& m, double& log_scale, bool& zero) {
    const double s = m.cwiseAbs().maxCoeff();
    if (s == 0.0) {
        zero = true;
        return;
    }
    m /= s;
    log_scale += std::log(s);
}

}  // namespace detail

/// Binary exponentiation with renormalization after each product. For p a
/// power of two this is pure repeated squaring.
template <class M>
ScaledPower<M> scaled_power(const M& x, int p) {
    if (p < 1) throw ConfigError("matrix power exponent must be >= 1");
    ScaledPower<M> base{x, 0.0, false};
    detail::renormalize(base.matrix, base.log_scale, base.zero);
    if (base.zero) return base;
    std::optional<ScaledPower<M>> acc;
    int e = p;
    while (true) {
        if (e & 1) {
            if (!acc) {
                acc = base;
            } else {
                acc->matrix = (acc->matrix * base.matrix).eval();
                acc->log_scale += base.log_scale;
                detail::renormalize(acc->matrix, acc->log_scale, acc->zero);
                if (acc->zero) return *acc;
            }
        }
        e >>= 1;
        if (e == 0) break;
        base.matrix = (base.matrix * base.matrix).eval();
        base.log_scale *= 2.0;
        detail::renormalize(base.matrix, base.log_scale, base.zero);
        if (base.zero) return base;
    }
    return *acc;
}

/// log Tr((X*)^(k-1) X^(k-1)); -infinity when X^(k-1) = 0.
template <class M>
double log_trace_moment(const M& x, int k) {
    if (k < 2) throw ConfigError("trace moment bound needs k >= 2");
    const auto pw = scaled_power(x, k - 1);
    if (pw.zero) return -std::numeric_limits<double>::infinity();
    const double fro2 = pw.matrix.squaredNorm();
    if (fro2 == 0.0) return -std::numeric_limits<double>::infinity();
    return 2.0 * pw.log_scale + std::log(fro2);
}

/// (Tr((X*)^(k-1) X^(k-1)))^(1/(2k-2)).
template <class M>
double trace_moment_bound(const M& x, int k) {
    const double lt = log_trace_moment(x, k);
    const double v = std::exp(lt / (2.0 * k - 2.0));
    if (!std::isfinite(v))
        throw NumericalError("trace moment bound overflows double; use log_trace_moment", 0);
    return v;
}

inline double trace_moment_bound(const MatrixSample& x, int k) {
    const auto d = x.dense();
    if (x.is_real()) return trace_moment_bound(RealMatrix(d.real()), k);
    return trace_moment_bound(d, k);
}

struct PowerIterationOptions {
    double tolerance = 1e-12;  // relative change of the Rayleigh quotient
    int consecutive = 3;       // iterations in a row below tolerance
    long max_iterations = 200000;
    std::uint64_t seed = 0x5eedULL;
};

/// ||X^m||^(1/m) with the Rayleigh bracket of the top eigenvalue of
/// (X^m)*(X^m): lower is the Rayleigh quotient, upper adds the residual norm.
struct PowerNormResult {
    double value = 0.0;  // equals lower
    double lower = 0.0;
    double upper = 0.0;
    long iterations = 0;
};

template <class M>
PowerNormResult power_norm_bound(const M& x, int m, const PowerIterationOptions& opt = {}) {
    using Scalar = typename M::Scalar;
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    const auto pw = scaled_power(x, m);
    PowerNormResult res;
    if (pw.zero) return res;
    const auto& a = pw.matrix;

    Engine g(opt.seed);
    Vec v(a.cols());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const auto z = standard_normal_pair(g);
        if constexpr (std::is_same_v<Scalar, Complex>)
            v(i) = Complex(z.first, z.second);
        else
            v(i) = z.first;
    }
    v.normalize();

    double theta_prev = -1.0;
    int calm = 0;
    double theta = 0.0, resid = 0.0;
    for (long it = 1; it <= opt.max_iterations; ++it) {
        const Vec w = a * v;
        theta = w.squaredNorm();
        const Vec u = a.adjoint() * w;
        resid = (u - theta * v).norm();
        const double un = u.norm();
        if (un == 0.0 || theta == 0.0) {
            // v landed in the kernel; the top singular value is still positive
            // because the power is nonzero, so restart from a new direction
            for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = standard_normal_pair(g).first;
            v.normalize();
            theta_prev = -1.0;
            calm = 0;
            continue;
        }
        v = u / un;
        if (theta_prev > 0.0 && std::abs(theta - theta_prev) <= opt.tolerance * theta) {
            if (++calm >= opt.consecutive) {
                res.iterations = it;
                const double inv_m = 1.0 / m;
                res.lower = std::exp((pw.log_scale + 0.5 * std::log(theta)) * inv_m);
                res.upper = std::exp((pw.log_scale + 0.5 * std::log(theta + resid)) * inv_m);
                res.value = res.lower;
                return res;
            }
        } else {
            calm = 0;
        }
        theta_prev = theta;
    }
    throw NumericalError("power iteration stagnated", opt.max_iterations);
}

inline PowerNormResult power_norm_bound(const MatrixSample& x, int m,
                                        const PowerIterationOptions& opt = {}) {
    const auto d = x.dense();
    if (x.is_real()) return power_norm_bound(RealMatrix(d.real()), m, opt);
    return power_norm_bound(d, m, opt);
}

/// (1+delta)^(-2k+2) n^(-k+1) E[rho^(2k-2)], evaluated in log domain.
inline double markov_tail_bound_log_moment(int k, double n, double delta, double log_moment) {
    return std::exp((-2.0 * k + 2.0) * std::log1p(delta) + (-k + 1.0) * std::log(n) + log_moment);
}

inline double markov_tail_bound(int k, double n, double delta, double moment) {
    if (moment == 0.0) return 0.0;
    return markov_tail_bound_log_moment(k, n, delta, std::log(moment));
}

/// Default moment order: ceil((ln n)^2), at least 2.
inline int default_k(std::size_t n) {
    const double l = std::log(static_cast<double>(std::max<std::size_t>(n, 1)));
    return std::max(2, static_cast<int>(std::ceil(l * l)));
}

// ---------------------------------------------------------------------------

struct RadiusBounds {
    std::optional<double> rho_exact;
    std::map<int, double> trace_bound_k;
    std::map<int, double> power_bound_m;
};

inline RadiusBounds radius_bounds(const MatrixSample& x, const std::vector<int>& ks,
                                  const std::vector<int>& ms, bool with_rho = true) {
    RadiusBounds b;
    if (with_rho) b.rho_exact = spectral_radius(x);
    for (int k : ks) b.trace_bound_k[k] = trace_moment_bound(x, k);
    for (int m : ms) b.power_bound_m[m] = power_norm_bound(x, m).value;
    return b;
}

inline nlohmann::json to_json(const RadiusBounds& b) {
    nlohmann::json j;
    j["rho"] = b.rho_exact ? nlohmann::json(*b.rho_exact) : nlohmann::json(nullptr);
    auto arr = nlohmann::json::array();
    for (const auto& [k, v] : b.trace_bound_k)
        arr.push_back({{"kind", "trace_moment"}, {"k_or_m", k}, {"value", v}});
    for (const auto& [m, v] : b.power_bound_m)
        arr.push_back({{"kind", "power_norm"}, {"k_or_m", m}, {"value", v}});
    j["bounds"] = arr;
    return j;
}

}  // namespace specrad
