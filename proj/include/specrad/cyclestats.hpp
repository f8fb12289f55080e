#pragma once

// Weights of paths and even digraphs, and the dyadic statistics
//   S_h(U) = 2^h |{G ~ U : p(G) >= 2^h}| / |{G ~ U}|,   S(U) = max(1, max_h S_h(U))
// of isomorphism classes U, truncated at H = floor(4k log2 N).
//
// Vertex labels are 1-based: vertex v addresses row/column v-1 of the matrix.
//
// Double-cycle classes are evaluated from the support of X: an unrooted
// double cycle has p(C) = prod |X_e|^2 over its m edges, which vanishes unless
// every edge is nonzero; a rooted one has p_r(C) = prod over the m-1 non-root
// edges, which vanishes unless that open path is in the support. Exact
// evaluation therefore walks only support cycles (resp. support paths) and
// divides by the closed-form class size.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "specrad/digraph.hpp"
#include "specrad/ensemble.hpp"
#include "specrad/errors.hpp"
#include "specrad/report.hpp"
#include "specrad/rng.hpp"

namespace specrad {

/// floor(4k log2 N).
inline int h_cutoff(int k, std::size_t n) {
    return static_cast<int>(std::floor(4.0 * k * std::log2(static_cast<double>(n))));
}

struct WeightContext {
    RealMatrix moduli;  // |X_ij|
    std::size_t n = 0;
    double eps = 0.5;
    double B = 1.0;
    int k = 2;

    WeightContext(const MatrixSample& x, double eps_, double B_, int k_)
        : moduli(x.abs()), n(x.n()), eps(eps_), B(B_), k(k_) {
        if (!(eps > 0.0)) throw ConfigError("eps must be > 0");
        if (!(B > 0.0)) throw ConfigError("B must be > 0");
        if (k < 1) throw ConfigError("k must be >= 1");
    }

    WeightContext with_k(int k_) const {
        WeightContext c = *this;
        c.k = k_;
        return c;
    }

    int H() const { return h_cutoff(k, n); }

    double modulus(Vertex i, Vertex j) const {
        return moduli(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(j - 1));
    }
};

// ---------------------------------------------------------------------------
// Weights

inline void check_vertices_in_range(const Path& p, std::size_t n) {
    for (Vertex v : p)
        if (v < 1 || static_cast<std::size_t>(v) > n)
            throw ConfigError("path vertex " + std::to_string(v) + " outside [1, " + std::to_string(n) + "]");
}

/// Product of X over the adjacent pairs of the path.
inline Complex path_weight(const ComplexMatrix& x, const Path& p) {
    check_vertices_in_range(p, static_cast<std::size_t>(x.rows()));
    Complex w(1.0);
    for (std::size_t i = 0; i + 1 < p.size(); ++i) w *= x(p[i] - 1, p[i + 1] - 1);
    return w;
}

/// prod over distinct edges of |X_ij|^(n_ij).
inline double digraph_weight(const RealMatrix& moduli, const MultiDigraph& g) {
    double w = 1.0;
    for (const auto& [e, n] : g.edges()) w *= std::pow(moduli(e.first - 1, e.second - 1), n);
    return w;
}

/// Same as digraph_weight with the root exponent lowered by two; the root
/// factor is |X_root|^(n_root - 2), so a zero root entry with n_root = 2 gives 1.
inline double rooted_weight(const RealMatrix& moduli, const RootedMultiDigraph& g) {
    if (g.base.multiplicity(g.root) < 2) throw ConfigError("rooted weight needs root multiplicity >= 2");
    double w = 1.0;
    for (const auto& [e, n] : g.base.edges())
        w *= std::pow(moduli(e.first - 1, e.second - 1), e == g.root ? n - 2 : n);
    return w;
}

inline double digraph_weight(const MatrixSample& x, const MultiDigraph& g) {
    return digraph_weight(x.abs(), g);
}
inline double rooted_weight(const MatrixSample& x, const RootedMultiDigraph& g) {
    return rooted_weight(x.abs(), g);
}

// ---------------------------------------------------------------------------
// Dyadic bookkeeping

/// (1/2) sum_h 2^h 1{a >= 2^h}  and  1 + 2 sum_h 2^h 1{a >= 2^h}, h = 0..H.
inline std::pair<double, double> dyadic_sandwich(double a, int H) {
    double s = 0.0;
    for (int h = 0; h <= H; ++h)
        if (a >= std::ldexp(1.0, h)) s += std::ldexp(1.0, h);
    return {0.5 * s, 1.0 + 2.0 * s};
}

/// Largest h in [0, H] with p >= 2^h, or -1 when p < 1.
inline int dyadic_level(double p, int H) {
    if (!(p >= 1.0)) return -1;
    if (std::isinf(p)) return H;
    return std::min(std::ilogb(p), H);
}

namespace detail {

/// Histogram of dyadic levels; count_at_least(h) = #{p >= 2^h}.
class LevelHistogram {
public:
    explicit LevelHistogram(int H) : hist_(static_cast<std::size_t>(H) + 1, 0.0) {}
    void add(double p, double weight = 1.0) {
        const int lvl = dyadic_level(p, static_cast<int>(hist_.size()) - 1);
        if (lvl >= 0) hist_[static_cast<std::size_t>(lvl)] += weight;
    }
    std::vector<double> count_at_least() const {
        std::vector<double> out(hist_.size(), 0.0);
        double acc = 0.0;
        for (std::size_t h = hist_.size(); h-- > 0;) {
            acc += hist_[h];
            out[h] = acc;
        }
        return out;
    }

private:
    std::vector<double> hist_;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Double cycle classes

/// binom(N, m) (m-1)!, the number of labeled double cycles with 2m edges.
inline double cycle_class_size(std::size_t n, int m) {
    if (m < 1 || static_cast<std::size_t>(m) > n) return 0.0;
    double c = 1.0;
    for (int i = 0; i < m; ++i) c *= static_cast<double>(n - static_cast<std::size_t>(i)) / (i + 1);
    return std::round(c) * factorial(m - 1);
}

/// m binom(N, m) (m-1)! = N! / (N-m)!, the number of labeled rooted double cycles.
inline double rooted_cycle_class_size(std::size_t n, int m) { return m * cycle_class_size(n, m); }

/// The double cycle on vertices 1..m; rooted versions use the root (m, 1).
inline MultiDigraph double_cycle(int m) {
    MultiDigraph g;
    for (int i = 1; i <= m; ++i) g.add_edge(i, i % m + 1, 2);
    return g;
}

inline double support_density(const RealMatrix& moduli) {
    const double nnz = static_cast<double>((moduli.array() != 0.0).count());
    return nnz / static_cast<double>(moduli.size());
}

/// Expected number of support cycles (or rooted support paths) an exact pass visits.
inline double exact_work_estimate(const RealMatrix& moduli, int m, bool rooted) {
    const auto n = static_cast<std::size_t>(moduli.rows());
    const double d = support_density(moduli);
    return rooted ? rooted_cycle_class_size(n, m) * std::pow(d, m - 1)
                  : cycle_class_size(n, m) * std::pow(d, m);
}

/// Each simple directed cycle with m vertices whose edges are all nonzero,
/// once, starting from its smallest vertex. Callback gets (cycle, p(C)).
inline void for_each_support_cycle(const RealMatrix& moduli, int m,
                                   const std::function<void(const Cycle&, double)>& visit) {
    const int n = static_cast<int>(moduli.rows());
    if (m < 1 || m > n) return;
    std::vector<std::vector<int>> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (moduli(i, j) != 0.0) out[static_cast<std::size_t>(i)].push_back(j);
    Cycle cyc;
    std::vector<char> on(static_cast<std::size_t>(n), 0);
    std::function<void(int, int, double)> dfs = [&](int start, int at, double p) {
        if (static_cast<int>(cyc.size()) == m) {
            const double close = moduli(at, start);
            if (close != 0.0) visit(cyc, p * close * close);
            return;
        }
        for (int w : out[static_cast<std::size_t>(at)]) {
            if (w <= start || on[static_cast<std::size_t>(w)]) continue;
            on[static_cast<std::size_t>(w)] = 1;
            cyc.push_back(w + 1);
            const double e = moduli(at, w);
            dfs(start, w, p * e * e);
            cyc.pop_back();
            on[static_cast<std::size_t>(w)] = 0;
        }
    };
    for (int s = 0; s < n; ++s) {
        cyc.assign(1, s + 1);
        on[static_cast<std::size_t>(s)] = 1;
        dfs(s, s, 1.0);
        on[static_cast<std::size_t>(s)] = 0;
    }
}

/// Each rooted double cycle with 2m edges and nonzero rooted weight, once.
/// The sequence (v1..vm) has the root (vm, v1); p_r = prod_{i<m} |X_{vi,vi+1}|^2.
inline void for_each_support_rooted_cycle(const RealMatrix& moduli, int m,
                                          const std::function<void(const Cycle&, double)>& visit) {
    const int n = static_cast<int>(moduli.rows());
    if (m < 1 || m > n) return;
    std::vector<std::vector<int>> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (moduli(i, j) != 0.0 && i != j) out[static_cast<std::size_t>(i)].push_back(j);
    Cycle seq;
    std::vector<char> on(static_cast<std::size_t>(n), 0);
    std::function<void(int, double)> dfs = [&](int at, double p) {
        if (static_cast<int>(seq.size()) == m) {
            visit(seq, p);
            return;
        }
        for (int w : out[static_cast<std::size_t>(at)]) {
            if (on[static_cast<std::size_t>(w)]) continue;
            on[static_cast<std::size_t>(w)] = 1;
            seq.push_back(w + 1);
            const double e = moduli(at, w);
            dfs(w, p * e * e);
            seq.pop_back();
            on[static_cast<std::size_t>(w)] = 0;
        }
    };
    for (int s = 0; s < n; ++s) {
        seq.assign(1, s + 1);
        on[static_cast<std::size_t>(s)] = 1;
        dfs(s, 1.0);
        on[static_cast<std::size_t>(s)] = 0;
    }
}

enum class StatsMode { exact, montecarlo, automatic };

struct StatsOptions {
    StatsMode mode = StatsMode::automatic;
    std::uint64_t samples = 20000;
    std::uint64_t seed = 0x51a7;
    double exact_cap = 1e7;
};

struct StatisticsRecord {
    CanonicalKey class_key;
    int m = 0;
    bool rooted = false;
    int H = 0;
    std::vector<double> S_h;      // h = 0..H
    std::vector<double> stderr_h;  // zero when exact
    double S = 1.0;
    bool exact = true;
    double class_size = 0.0;
    std::uint64_t samples = 0;

    double sum() const {
        double s = 0.0;
        for (double v : S_h) s += v;
        return s;
    }
    /// sum_h 2^(h eps / 2) S_h
    double weighted_sum(double eps) const {
        double s = 0.0;
        for (std::size_t h = 0; h < S_h.size(); ++h) s += std::exp2(static_cast<double>(h) * eps / 2.0) * S_h[h];
        return s;
    }
};

namespace detail {

inline void finish_record(StatisticsRecord& r, const std::vector<double>& at_least, double denom,
                          std::optional<std::uint64_t> samples) {
    r.S_h.assign(at_least.size(), 0.0);
    r.stderr_h.assign(at_least.size(), 0.0);
    r.S = 1.0;
    for (std::size_t h = 0; h < at_least.size(); ++h) {
        const double scale = std::ldexp(1.0, static_cast<int>(h));
        const double frac = denom > 0.0 ? at_least[h] / denom : 0.0;
        r.S_h[h] = scale * frac;
        if (samples) r.stderr_h[h] = scale * std::sqrt(frac * (1.0 - frac) / static_cast<double>(*samples));
        r.S = std::max(r.S, r.S_h[h]);
    }
}

/// m distinct vertices (1-based), uniformly, in uniform order.
inline Cycle sample_distinct(Engine& g, std::size_t n, int m) {
    Cycle c;
    while (static_cast<int>(c.size()) < m) {
        const Vertex v = static_cast<Vertex>(uniform_below(g, n)) + 1;
        if (std::find(c.begin(), c.end(), v) == c.end()) c.push_back(v);
    }
    return c;
}

inline double cycle_p(const WeightContext& ctx, const Cycle& c, bool rooted) {
    double p = 1.0;
    const std::size_t last = rooted ? c.size() - 1 : c.size();
    for (std::size_t i = 0; i < last; ++i) {
        const double e = ctx.modulus(c[i], c[(i + 1) % c.size()]);
        p *= e * e;
    }
    return p;
}

}  // namespace detail

/// S_h(C_m) or S_h(C*_m) for the matrix in `ctx`, h = 0..H.
inline StatisticsRecord cycle_class_statistics(const WeightContext& ctx, int m, bool rooted,
                                               const StatsOptions& opt = {}) {
    if (m < 1) throw ConfigError("cycle length must be >= 1");
    StatisticsRecord r;
    r.m = m;
    r.rooted = rooted;
    r.H = ctx.H();
    const MultiDigraph dc = double_cycle(m);
    r.class_key = rooted ? canonical_key(RootedMultiDigraph(dc, {m, 1})) : canonical_key(dc);
    r.class_size = rooted ? rooted_cycle_class_size(ctx.n, m) : cycle_class_size(ctx.n, m);
    detail::LevelHistogram hist(r.H);
    if (r.class_size == 0.0) {
        detail::finish_record(r, hist.count_at_least(), 0.0, std::nullopt);
        return r;
    }

    const double work = exact_work_estimate(ctx.moduli, m, rooted);
    StatsMode mode = opt.mode;
    if (mode == StatsMode::automatic) mode = work <= opt.exact_cap ? StatsMode::exact : StatsMode::montecarlo;
    if (mode == StatsMode::exact) {
        if (work > opt.exact_cap)
            throw CapacityError("exact class enumeration would visit ~" + fmt(work) +
                                " cycles (cap " + fmt(opt.exact_cap) + "); use montecarlo mode");
        auto add = [&](const Cycle&, double p) { hist.add(p); };
        if (rooted)
            for_each_support_rooted_cycle(ctx.moduli, m, add);
        else
            for_each_support_cycle(ctx.moduli, m, add);
        r.exact = true;
        detail::finish_record(r, hist.count_at_least(), r.class_size, std::nullopt);
        return r;
    }
    if (opt.samples < 1) throw ConfigError("monte carlo statistics need samples >= 1");
    Engine g(derive_seed(opt.seed, static_cast<std::uint64_t>(2 * m + (rooted ? 1 : 0))));
    for (std::uint64_t s = 0; s < opt.samples; ++s)
        hist.add(detail::cycle_p(ctx, detail::sample_distinct(g, ctx.n, m), rooted));
    r.exact = false;
    r.samples = opt.samples;
    detail::finish_record(r, hist.count_at_least(), static_cast<double>(opt.samples), opt.samples);
    return r;
}

inline nlohmann::json to_json(const StatisticsRecord& r) {
    return {{"m", r.m},           {"rooted", r.rooted},   {"H", r.H},
            {"S_h", r.S_h},       {"stderr", r.stderr_h}, {"S", r.S},
            {"exact", r.exact},   {"class_size", r.class_size},
            {"samples", r.samples}};
}

// ---------------------------------------------------------------------------
// Event A_k

struct EventAkRow {
    int m = 0;
    double sum_cycle = 0.0;     // sum_h S_h(C_m)
    double sum_rooted = 0.0;    // sum_h S_h(C*_m)
    double sum_weighted = 0.0;  // sum_h 2^(h eps/2) S_h(C_m)
    bool exact = true;
};

struct EventAkReport {
    int k = 0;
    std::vector<EventAkRow> per_m;
    bool A1 = true;
    bool A2 = true;
    bool A3 = true;
    bool Ak = true;
};

inline EventAkReport check_event_Ak(const WeightContext& ctx, const StatsOptions& opt = {}) {
    EventAkReport rep;
    rep.k = ctx.k;
    const double k2 = static_cast<double>(ctx.k) * ctx.k;
    for (int m = 1; m <= ctx.k; ++m) {
        const auto c = cycle_class_statistics(ctx, m, false, opt);
        const auto cr = cycle_class_statistics(ctx, m, true, opt);
        EventAkRow row;
        row.m = m;
        row.sum_cycle = c.sum();
        row.sum_rooted = cr.sum();
        row.sum_weighted = c.weighted_sum(ctx.eps);
        row.exact = c.exact && cr.exact;
        rep.A1 = rep.A1 && row.sum_cycle <= k2;
        rep.A2 = rep.A2 && row.sum_rooted <= k2;
        rep.A3 = rep.A3 && row.sum_weighted <= k2 * std::pow(ctx.B, m);
        rep.per_m.push_back(row);
    }
    rep.Ak = rep.A1 && rep.A2 && rep.A3;
    return rep;
}

inline nlohmann::json to_json(const EventAkReport& r) {
    auto rows = nlohmann::json::array();
    for (const auto& row : r.per_m)
        rows.push_back({{"m", row.m},
                        {"sum_cycle", row.sum_cycle},
                        {"sum_rooted", row.sum_rooted},
                        {"sum_weighted", row.sum_weighted},
                        {"exact", row.exact}});
    return {{"k", r.k}, {"per_m", rows}, {"A1", r.A1}, {"A2", r.A2}, {"A3", r.A3}, {"Ak", r.Ak}};
}

// ---------------------------------------------------------------------------
// Cycle empirical moments

struct CycleMoment {
    double value = 0.0;
    double stderr_ = 0.0;
    bool exact = true;
};

/// nu_m[p^t] for several exponents from one pass over the class (or one sample set).
inline std::vector<CycleMoment> cycle_empirical_moments(const WeightContext& ctx, int m,
                                                        const std::vector<double>& ts,
                                                        const StatsOptions& opt = {}) {
    std::vector<CycleMoment> out(ts.size());
    const double size = cycle_class_size(ctx.n, m);
    if (size == 0.0) return out;
    const double work = exact_work_estimate(ctx.moduli, m, false);
    StatsMode mode = opt.mode;
    if (mode == StatsMode::automatic) mode = work <= opt.exact_cap ? StatsMode::exact : StatsMode::montecarlo;
    if (mode == StatsMode::exact) {
        if (work > opt.exact_cap) throw CapacityError("cycle moment: class too large for exact mode");
        std::vector<double> acc(ts.size(), 0.0);
        for_each_support_cycle(ctx.moduli, m, [&](const Cycle&, double p) {
            for (std::size_t i = 0; i < ts.size(); ++i) acc[i] += std::pow(p, ts[i]);
        });
        for (std::size_t i = 0; i < ts.size(); ++i) out[i].value = acc[i] / size;
        return out;
    }
    if (opt.samples < 1) throw ConfigError("monte carlo moments need samples >= 1");
    Engine g(derive_seed(opt.seed, 0x6d6f6d00ULL + static_cast<std::uint64_t>(m)));
    std::vector<double> mean(ts.size(), 0.0), m2(ts.size(), 0.0);
    for (std::uint64_t s = 0; s < opt.samples; ++s) {
        const double p = detail::cycle_p(ctx, detail::sample_distinct(g, ctx.n, m), false);
        for (std::size_t i = 0; i < ts.size(); ++i) {
            const double v = std::pow(p, ts[i]);
            const double d = v - mean[i];
            mean[i] += d / static_cast<double>(s + 1);
            m2[i] += d * (v - mean[i]);
        }
    }
    const double ns = static_cast<double>(opt.samples);
    for (std::size_t i = 0; i < ts.size(); ++i) {
        out[i].value = mean[i];
        out[i].stderr_ = opt.samples > 1 ? std::sqrt(m2[i] / (ns - 1.0) / ns) : 0.0;
        out[i].exact = false;
    }
    return out;
}

/// nu_m[|w(C)|^(2t)]: the mean of p(C)^t over the labeled double cycles C_m.
inline CycleMoment cycle_empirical_moment(const WeightContext& ctx, int m, double t,
                                          const StatsOptions& opt = {}) {
    return cycle_empirical_moments(ctx, m, {t}, opt).front();
}

/// nu_m[|w|^2] <= k^2 and nu_m[|w|^(2+eps)] <= k^2 B^m for all m <= k.
struct EventEkReport {
    int k = 0;
    std::vector<std::pair<double, double>> per_m;  // (nu_m[p], nu_m[p^(1+eps/2)])
    bool holds = true;
};

inline EventEkReport check_event_Ek(const WeightContext& ctx, const StatsOptions& opt = {}) {
    EventEkReport r;
    r.k = ctx.k;
    const double k2 = static_cast<double>(ctx.k) * ctx.k;
    for (int m = 1; m <= ctx.k; ++m) {
        const auto mom = cycle_empirical_moments(ctx, m, {1.0, 1.0 + ctx.eps / 2.0}, opt);
        const double a = mom[0].value;
        const double b = mom[1].value;
        r.per_m.push_back({a, b});
        r.holds = r.holds && a <= k2 && b <= k2 * std::pow(ctx.B, m);
    }
    return r;
}

struct CycleMomentBoundCheck {
    double moment = 0.0;
    double bound = 0.0;  // N^(m t (1 - eps/8))
    bool ok = true;
};

inline CycleMomentBoundCheck cycle_moment_bound_check(const WeightContext& ctx, int m, double t,
                                                      const StatsOptions& opt = {}) {
    CycleMomentBoundCheck c;
    c.moment = cycle_empirical_moment(ctx, m, t, opt).value;
    c.bound = std::pow(static_cast<double>(ctx.n), m * t * (1.0 - ctx.eps / 8.0));
    c.ok = c.moment <= c.bound;
    return c;
}

struct WMaxCheck {
    double w_max = 0.0;
    double rhs = 0.0;  // (sum_C |w(C)|^(2+eps))^(1/(1+eps/2))
    bool ok = true;
};

/// Exact max cycle weight against the l^(2+eps) mass of all cycle weights.
inline WMaxCheck w_max_bound_check(const WeightContext& ctx, int m, double exact_cap = 1e7) {
    if (exact_work_estimate(ctx.moduli, m, false) > exact_cap)
        throw CapacityError("w_max check needs exact cycle enumeration");
    WMaxCheck c;
    double pmax = 0.0, acc = 0.0;
    const double expo = 1.0 + ctx.eps / 2.0;
    for_each_support_cycle(ctx.moduli, m, [&](const Cycle&, double p) {
        pmax = std::max(pmax, p);
        acc += std::pow(p, expo);
    });
    c.w_max = std::sqrt(pmax);
    c.rhs = std::pow(acc, 1.0 / expo);
    c.ok = c.w_max * c.w_max <= c.rhs * (1.0 + 1e-12);
    return c;
}

// ---------------------------------------------------------------------------
// Statistics of general rooted classes

inline constexpr double kDefaultRelabelCap = 2e7;

/// S_h over the class of `g` as the average over all injective relabelings
/// V -> [N]; each labeled class member is hit |Aut| times, which cancels.
inline StatisticsRecord rooted_class_statistics(const WeightContext& ctx, const RootedMultiDigraph& g,
                                                int H, double cap = kDefaultRelabelCap) {
    const std::vector<Vertex> verts(g.base.vertices().begin(), g.base.vertices().end());
    const std::size_t x = verts.size();
    StatisticsRecord r;
    r.rooted = true;
    r.H = H;
    r.class_key = canonical_key(g);
    if (x > ctx.n) {
        detail::finish_record(r, std::vector<double>(static_cast<std::size_t>(H) + 1, 0.0), 0.0, std::nullopt);
        return r;
    }
    double injections = 1.0;
    for (std::size_t i = 0; i < x; ++i) injections *= static_cast<double>(ctx.n - i);
    if (injections > cap)
        throw CapacityError("class enumeration over " + fmt(injections) + " relabelings exceeds cap");

    std::map<Vertex, std::size_t> idx;
    for (std::size_t i = 0; i < x; ++i) idx[verts[i]] = i;
    struct Term {
        std::size_t a, b;
        int expo;
    };
    std::vector<Term> terms;
    for (const auto& [e, n] : g.base.edges())
        terms.push_back({idx[e.first], idx[e.second], e == g.root ? n - 2 : n});

    detail::LevelHistogram hist(H);
    std::vector<int> image(x, 0);
    std::vector<char> used(ctx.n, 0);
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == x) {
            double p = 1.0;
            for (const auto& t : terms)
                if (t.expo > 0) p *= std::pow(ctx.moduli(image[t.a], image[t.b]), t.expo);
            hist.add(p);
            return;
        }
        for (std::size_t v = 0; v < ctx.n; ++v) {
            if (used[v]) continue;
            used[v] = 1;
            image[i] = static_cast<int>(v);
            rec(i + 1);
            used[v] = 0;
        }
    };
    rec(0);
    r.exact = true;
    r.class_size = injections;
    detail::finish_record(r, hist.count_at_least(), injections, std::nullopt);
    return r;
}

inline StatisticsRecord rooted_class_statistics(const WeightContext& ctx, const RootedMultiDigraph& g) {
    return rooted_class_statistics(ctx, g, ctx.H());
}

struct StatisticsBoundCheck {
    double S = 1.0;
    double bound = 0.0;
    double log_bound = 0.0;
    int k = 0;
    int x = 0;
    bool hypothesis_met = false;  // N^(eps/16) >= 5 e k^2
    bool ak_holds = false;
    bool event_b = false;
    bool ok = true;               // S <= bound
    bool informational = true;    // true when a hypothesis is unmet
};

/// N^(k-x) N^(-eps y/16) k^2 (3ek^2)^(4k log B / (eps log N)), y = max(0, k - x - 4k log B/(eps log N)).
inline double log_statistics_bound(std::size_t n, int k, int x, double eps, double B) {
    const double ln = std::log(static_cast<double>(n));
    const double c = 4.0 * k * std::log(B) / (eps * ln);
    const double y = std::max(0.0, k - x - c);
    return (k - x) * ln - eps * y / 16.0 * ln + 2.0 * std::log(static_cast<double>(k)) +
           c * std::log(3.0 * std::numbers::e * k * k);
}

/// Exact S(U) for the class of `g` compared with the deterministic estimate
/// that holds on A_k when N^(eps/16) >= 5ek^2. Here k = |E(g)|/2.
inline StatisticsBoundCheck statistics_bound_check(const WeightContext& ctx, const RootedMultiDigraph& g,
                                                   const StatsOptions& opt = {}) {
    if (!is_even_digraph(g.base)) throw ConfigError("statistics bound needs a rooted even digraph");
    StatisticsBoundCheck c;
    c.k = static_cast<int>(g.base.edge_count() / 2);
    c.x = static_cast<int>(g.base.vertices().size());
    const WeightContext kctx = ctx.with_k(c.k);
    const double n = static_cast<double>(ctx.n);
    c.hypothesis_met = std::pow(n, ctx.eps / 16.0) >= 5.0 * std::numbers::e * c.k * c.k;
    c.ak_holds = check_event_Ak(kctx, opt).Ak;
    c.event_b = kctx.moduli.maxCoeff() <= n * n;
    c.S = rooted_class_statistics(kctx, g).S;
    c.log_bound = log_statistics_bound(ctx.n, c.k, c.x, ctx.eps, ctx.B);
    c.bound = std::exp(c.log_bound);
    c.ok = c.S <= c.bound;
    c.informational = !(c.hypothesis_met && c.ak_holds);
    return c;
}

struct InductionStep {
    int i = 0;   // 1-based position of the added cycle
    int m = 0;   // cycle length
    int r = 0;   // vertices shared with the earlier union
    double S_prev = 1.0;
    double S_cur = 1.0;
    double bound_general = 0.0;  // 3ek^2 N^r S_prev
    bool ok_general = true;
    bool light_case = false;     // m log B <= (eps/4) r log N
    double bound_light = 0.0;    // 5ek^2 N^(r(1-eps/8)) S_prev
    bool ok_light = true;
};

/// Evaluates S along U_i = C_1 u ... u C_i from the ordered double cycle
/// decomposition of `g` (root in C_1) and compares consecutive steps with
/// the one-cycle growth estimates. k = |E(g)|/2 is the global edge budget.
inline std::vector<InductionStep> induction_chain_check(const WeightContext& ctx, const RootedMultiDigraph& g) {
    const auto cycles = double_cycle_decomposition(g.base, g.root);
    if (!cycles) throw ConfigError("induction chain needs a rooted even digraph");
    const int k = static_cast<int>(g.base.edge_count() / 2);
    const WeightContext kctx = ctx.with_k(k);
    const auto shared = shared_vertex_counts(*cycles);
    const double n = static_cast<double>(ctx.n);
    const double e = std::numbers::e;
    std::vector<InductionStep> steps;
    std::vector<Cycle> prefix{cycles->front()};
    double s_prev = rooted_class_statistics(kctx, RootedMultiDigraph(union_of_double_cycles(prefix), g.root)).S;
    for (std::size_t i = 1; i < cycles->size(); ++i) {
        prefix.push_back((*cycles)[i]);
        InductionStep st;
        st.i = static_cast<int>(i) + 1;
        st.m = static_cast<int>((*cycles)[i].size());
        st.r = shared[i];
        st.S_prev = s_prev;
        st.S_cur = rooted_class_statistics(kctx, RootedMultiDigraph(union_of_double_cycles(prefix), g.root)).S;
        st.bound_general = 3.0 * e * k * k * std::pow(n, st.r) * s_prev;
        st.ok_general = st.S_cur <= st.bound_general;
        st.light_case = st.m * std::log(ctx.B) <= ctx.eps / 4.0 * st.r * std::log(n);
        st.bound_light = 5.0 * e * k * k * std::pow(n, st.r * (1.0 - ctx.eps / 8.0)) * s_prev;
        st.ok_light = !st.light_case || st.S_cur <= st.bound_light;
        steps.push_back(st);
        s_prev = st.S_cur;
    }
    return steps;
}

}  // namespace specrad
