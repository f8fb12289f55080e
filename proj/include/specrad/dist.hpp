#pragma once

// Symmetric entry laws with analytic moments.
//
// Every law is sampled as  sign * magnitude  where the sign is an independent
// uniform +-1 draw taken first from the stream. The magnitude draw follows:
//   pareto           |x| = U^(-1/alpha), U uniform on (0, 1]
//   sparse_toy       |x| = q^(-(1-eps)/2) if U < q, else 0
//   rademacher       |x| = 1 (no further draw)
//   gaussian_real    |x| = |Z|, Z standard normal (Box-Muller, two uniforms)
//   gaussian_complex (Z1 + i Z2) / sqrt(2) from one Box-Muller pair
//   tabulated        inverse of the cumulative table sorted by magnitude
// The whole sample is finally multiplied by the descriptor's scale.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "specrad/errors.hpp"
#include "specrad/rng.hpp"

namespace specrad {

using Complex = std::complex<double>;

struct ParetoSymmetric {
    double alpha;
    bool operator==(const ParetoSymmetric&) const = default;
};

struct SparseToy {
    double q;
    double eps;
    bool operator==(const SparseToy&) const = default;
};

struct Rademacher {
    bool operator==(const Rademacher&) const = default;
};

struct GaussianReal {
    bool operator==(const GaussianReal&) const = default;
};

struct GaussianComplex {
    bool operator==(const GaussianComplex&) const = default;
};

/// Finite law on magnitudes; the sign is symmetric as for every other kind.
class Tabulated {
public:
    using Entry = std::pair<double, double>;  // (magnitude, probability)

    explicit Tabulated(std::vector<Entry> values) : values_(std::move(values)) {
        if (values_.empty()) throw ConfigError("tabulated law needs at least one value");
        double total = 0.0;
        for (const auto& [mag, prob] : values_) {
            if (!(mag >= 0.0) || !std::isfinite(mag))
                throw ConfigError("tabulated magnitude must be finite and >= 0");
            if (!(prob >= 0.0)) throw ConfigError("tabulated probability must be >= 0");
            total += prob;
        }
        if (std::abs(total - 1.0) > 1e-12)
            throw ConfigError("tabulated probabilities sum to " + std::to_string(total) +
                              ", expected 1");
        for (const auto& e : values_)
            if (e.second > 0.0) table_.push_back(e);
        std::stable_sort(table_.begin(), table_.end(),
                         [](const Entry& a, const Entry& b) { return a.first < b.first; });
        double acc = 0.0;
        for (const auto& e : table_) {
            acc += e.second;
            cumulative_.push_back(acc);
        }
    }

    const std::vector<Entry>& values() const { return values_; }

    /// Magnitude for a uniform draw u in [0, 1). A draw landing exactly on a
    /// cumulative boundary goes to the smaller magnitude.
    double magnitude_at(double u) const {
        // zero-probability rows are not in the table, so u = 0 never lands on one
        auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), u);
        if (it == cumulative_.end()) return table_.back().first;
        return table_[static_cast<std::size_t>(it - cumulative_.begin())].first;
    }

    bool operator==(const Tabulated& o) const { return values_ == o.values_; }

private:
    std::vector<Entry> values_;
    std::vector<Entry> table_;
    std::vector<double> cumulative_;
};

using DistributionKind =
    std::variant<ParetoSymmetric, SparseToy, Rademacher, GaussianReal, GaussianComplex, Tabulated>;

/// A symmetric scalar law, optionally multiplied by a positive scale.
class EntryDistribution {
public:
    EntryDistribution(DistributionKind kind, double scale = 1.0)
        : kind_(std::move(kind)), scale_(scale) {
        if (!(scale_ > 0.0) || !std::isfinite(scale_))
            throw ConfigError("distribution scale must be finite and > 0");
        if (const auto* p = std::get_if<ParetoSymmetric>(&kind_); p && !(p->alpha > 0.0))
            throw ConfigError("pareto alpha must be > 0");
        if (const auto* s = std::get_if<SparseToy>(&kind_)) {
            if (!(s->q > 0.0 && s->q <= 1.0)) throw ConfigError("sparse_toy q must lie in (0, 1]");
            if (!(s->eps > 0.0 && s->eps < 1.0))
                throw ConfigError("sparse_toy eps must lie in (0, 1)");
        }
    }

    static EntryDistribution pareto(double alpha) { return {ParetoSymmetric{alpha}}; }
    static EntryDistribution sparse_toy(double q, double eps) { return {SparseToy{q, eps}}; }
    static EntryDistribution rademacher() { return {Rademacher{}}; }
    static EntryDistribution gaussian_real() { return {GaussianReal{}}; }
    static EntryDistribution gaussian_complex() { return {GaussianComplex{}}; }
    static EntryDistribution tabulated(std::vector<Tabulated::Entry> v) {
        return {Tabulated(std::move(v))};
    }
    /// The point mass at zero.
    static EntryDistribution zero() { return tabulated({{0.0, 1.0}}); }

    const DistributionKind& kind() const { return kind_; }
    double scale() const { return scale_; }

    EntryDistribution with_scale(double s) const { return {kind_, s}; }

    template <class K>
    bool is() const {
        return std::holds_alternative<K>(kind_);
    }

    /// True when every draw is real.
    bool is_real() const { return !is<GaussianComplex>(); }

    std::string kind_name() const {
        return std::visit(
            [](const auto& k) -> std::string {
                using K = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<K, ParetoSymmetric>) return "pareto";
                else if constexpr (std::is_same_v<K, SparseToy>) return "sparse_toy";
                else if constexpr (std::is_same_v<K, Rademacher>) return "rademacher";
                else if constexpr (std::is_same_v<K, GaussianReal>) return "gaussian_real";
                else if constexpr (std::is_same_v<K, GaussianComplex>) return "gaussian_complex";
                else return "tabulated";
            },
            kind_);
    }

    bool operator==(const EntryDistribution&) const = default;

private:
    DistributionKind kind_;
    double scale_;
};

// ---------------------------------------------------------------------------
// JSON descriptor

inline nlohmann::json to_json(const EntryDistribution& d) {
    nlohmann::json j;
    j["kind"] = d.kind_name();
    std::visit(
        [&](const auto& k) {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, ParetoSymmetric>) {
                j["alpha"] = k.alpha;
            } else if constexpr (std::is_same_v<K, SparseToy>) {
                j["q"] = k.q;
                j["eps"] = k.eps;
            } else if constexpr (std::is_same_v<K, Tabulated>) {
                auto arr = nlohmann::json::array();
                for (const auto& [m, p] : k.values()) arr.push_back({m, p});
                j["values"] = arr;
            }
        },
        d.kind());
    if (d.scale() != 1.0) j["scale"] = d.scale();
    return j;
}

inline EntryDistribution distribution_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
        throw ConfigError("distribution descriptor needs a string \"kind\"");
    const std::string kind = j["kind"];
    auto allow = [&](std::initializer_list<const char*> keys) {
        for (const auto& [key, _] : j.items()) {
            if (key == "kind" || key == "scale") continue;
            if (std::find_if(keys.begin(), keys.end(), [&](const char* k) { return key == k; }) ==
                keys.end())
                throw ConfigError("unknown key \"" + key + "\" for distribution " + kind);
        }
    };
    auto number = [&](const char* key) -> double {
        if (!j.contains(key) || !j[key].is_number())
            throw ConfigError(std::string("distribution ") + kind + " needs numeric \"" + key + "\"");
        return j[key].get<double>();
    };
    const double scale = j.contains("scale") ? j.at("scale").get<double>() : 1.0;

    if (kind == "pareto") {
        allow({"alpha"});
        return {ParetoSymmetric{number("alpha")}, scale};
    }
    if (kind == "sparse_toy") {
        allow({"q", "eps"});
        return {SparseToy{number("q"), number("eps")}, scale};
    }
    if (kind == "rademacher") {
        allow({});
        return {Rademacher{}, scale};
    }
    if (kind == "gaussian_real") {
        allow({});
        return {GaussianReal{}, scale};
    }
    if (kind == "gaussian_complex") {
        allow({});
        return {GaussianComplex{}, scale};
    }
    if (kind == "tabulated") {
        allow({"values"});
        if (!j.contains("values") || !j["values"].is_array())
            throw ConfigError("tabulated law needs a \"values\" array");
        std::vector<Tabulated::Entry> values;
        for (const auto& e : j["values"]) {
            if (!e.is_array() || e.size() != 2)
                throw ConfigError("tabulated entries are [magnitude, probability] pairs");
            values.emplace_back(e[0].get<double>(), e[1].get<double>());
        }
        return {Tabulated(std::move(values)), scale};
    }
    throw ConfigError("unknown distribution kind \"" + kind + "\"");
}

// ---------------------------------------------------------------------------
// Sampling

inline Complex sample(const EntryDistribution& dist, Engine& g) {
    const double sign = random_sign(g);
    const Complex value = std::visit(
        [&](const auto& k) -> Complex {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, ParetoSymmetric>) {
                return std::pow(uniform01_open_left(g), -1.0 / k.alpha);
            } else if constexpr (std::is_same_v<K, SparseToy>) {
                const double u = uniform01(g);
                return u < k.q ? std::pow(k.q, -(1.0 - k.eps) / 2.0) : 0.0;
            } else if constexpr (std::is_same_v<K, Rademacher>) {
                return 1.0;
            } else if constexpr (std::is_same_v<K, GaussianReal>) {
                return std::abs(standard_normal_pair(g).first);
            } else if constexpr (std::is_same_v<K, GaussianComplex>) {
                const auto z = standard_normal_pair(g);
                return Complex(z.first, z.second) * std::numbers::sqrt2 * 0.5;
            } else {
                return k.magnitude_at(uniform01(g));
            }
        },
        dist.kind());
    return sign * dist.scale() * value;
}

// ---------------------------------------------------------------------------
// Moments

enum class MomentMethod { closed_form, monte_carlo };

struct MomentReport {
    double p = 0.0;
    double value = 0.0;  // +infinity is a legal value
    MomentMethod method = MomentMethod::closed_form;
    std::optional<double> mc_stderr;
};

/// E|x|^p in closed form. Every supported kind has one.
inline MomentReport moment(const EntryDistribution& dist, double p) {
    if (!(p >= 0.0)) throw ConfigError("moment order must be >= 0");
    const double inf = std::numeric_limits<double>::infinity();
    const double base = std::visit(
        [&](const auto& k) -> double {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, ParetoSymmetric>) {
                return p < k.alpha ? k.alpha / (k.alpha - p) : inf;
            } else if constexpr (std::is_same_v<K, SparseToy>) {
                if (p == 0.0) return 1.0;
                return std::pow(k.q, 1.0 - p * (1.0 - k.eps) / 2.0);
            } else if constexpr (std::is_same_v<K, Rademacher>) {
                return 1.0;
            } else if constexpr (std::is_same_v<K, GaussianReal>) {
                return std::pow(2.0, p / 2.0) * std::tgamma((p + 1.0) / 2.0) /
                       std::sqrt(std::numbers::pi);
            } else if constexpr (std::is_same_v<K, GaussianComplex>) {
                // |z|^2 is Exp(1)
                return std::tgamma(1.0 + p / 2.0);
            } else {
                double acc = 0.0;
                for (const auto& [m, prob] : k.values()) acc += prob * std::pow(m, p);
                return acc;
            }
        },
        dist.kind());
    MomentReport r;
    r.p = p;
    r.value = std::isinf(base) ? inf : base * std::pow(dist.scale(), p);
    r.method = MomentMethod::closed_form;
    return r;
}

/// Monte Carlo estimate of E|x|^p with its standard error.
inline MomentReport moment_monte_carlo(const EntryDistribution& dist, double p, std::size_t samples,
                                       std::uint64_t seed) {
    if (samples < 2) throw ConfigError("monte carlo moment needs at least 2 samples");
    Engine g(seed);
    double mean = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        const double v = std::pow(std::abs(sample(dist, g)), p);
        const double delta = v - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (v - mean);
    }
    MomentReport r;
    r.p = p;
    r.value = mean;
    r.method = MomentMethod::monte_carlo;
    r.mc_stderr = std::sqrt(m2 / static_cast<double>(samples - 1) / static_cast<double>(samples));
    return r;
}

struct Normalization {
    double scale;                  // c with E|c x|^2 = 1
    EntryDistribution distribution;  // the law of c x
};

inline Normalization normalize_to_unit_second_moment(const EntryDistribution& dist) {
    const double m2 = moment(dist, 2.0).value;
    if (!std::isfinite(m2))
        throw UnsupportedError("cannot normalize a law with infinite second moment");
    if (!(m2 > 0.0)) throw UnsupportedError("cannot normalize the point mass at zero");
    const double c = 1.0 / std::sqrt(m2);
    return {c, dist.with_scale(dist.scale() * c)};
}

}  // namespace specrad
