#pragma once

// N x N i.i.d. matrices with provenance, dense or sparse.
//
// Entries are drawn from one engine seeded with the sample seed, in row-major
// order X(0,0), X(0,1), ..., X(n-1,n-1). Sparse storage consumes the same
// stream and keeps only the nonzero draws, so both storages of one
// (law, n, seed) triple hold the same matrix.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>
#include <tuple>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "specrad/dist.hpp"
#include "specrad/errors.hpp"
#include "specrad/rng.hpp"

namespace specrad {

using ComplexMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;

enum class Storage : std::uint8_t { dense = 0, sparse = 1 };

struct Triplet {
    std::uint32_t row;
    std::uint32_t col;
    Complex value;
    bool operator==(const Triplet&) const = default;
};

class MatrixSample {
public:
    /// Wraps an explicit dense matrix. Used for hand-built fixtures; the
    /// descriptor is optional and the seed is informational.
    static MatrixSample from_dense(ComplexMatrix m, std::optional<EntryDistribution> dist = {},
                                   std::uint64_t seed = 0) {
        if (m.rows() != m.cols() || m.rows() == 0)
            throw ConfigError("matrix sample must be square and nonempty");
        MatrixSample s(static_cast<std::size_t>(m.rows()), Storage::dense, std::move(dist), seed);
        s.dense_ = std::move(m);
        return s;
    }

    /// Sparse sample from triplets. Triplets are sorted row-major; duplicate
    /// positions and out-of-range indices are rejected.
    static MatrixSample from_triplets(std::size_t n, std::vector<Triplet> triplets,
                                      std::optional<EntryDistribution> dist = {},
                                      std::uint64_t seed = 0) {
        if (n == 0) throw ConfigError("matrix dimension must be >= 1");
        std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
            return std::tie(a.row, a.col) < std::tie(b.row, b.col);
        });
        for (std::size_t t = 0; t < triplets.size(); ++t) {
            if (triplets[t].row >= n || triplets[t].col >= n)
                throw ConfigError("triplet index out of range");
            if (t > 0 && triplets[t].row == triplets[t - 1].row &&
                triplets[t].col == triplets[t - 1].col)
                throw ConfigError("duplicate triplet position");
        }
        MatrixSample s(n, Storage::sparse, std::move(dist), seed);
        s.triplets_ = std::move(triplets);
        return s;
    }

    std::size_t n() const { return n_; }
    Storage storage() const { return storage_; }
    const std::optional<EntryDistribution>& distribution() const { return dist_; }
    std::uint64_t seed() const { return seed_; }

    /// Dense view; materializes sparse storage.
    ComplexMatrix dense() const {
        if (storage_ == Storage::dense) return dense_;
        ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(n_),
                                              static_cast<Eigen::Index>(n_));
        for (const auto& t : triplets_) m(t.row, t.col) = t.value;
        return m;
    }

    const ComplexMatrix& dense_storage() const { return dense_; }
    const std::vector<Triplet>& triplets() const { return triplets_; }

    /// Row-major list of the nonzero entries, whatever the storage.
    std::vector<Triplet> nonzeros() const {
        if (storage_ == Storage::sparse) return triplets_;
        std::vector<Triplet> out;
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) {
                const Complex v = dense_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                if (v != Complex(0.0)) out.push_back({static_cast<std::uint32_t>(i),
                                                     static_cast<std::uint32_t>(j), v});
            }
        return out;
    }

    /// Entrywise moduli as a dense real matrix.
    RealMatrix abs() const {
        if (storage_ == Storage::dense) return dense_.cwiseAbs();
        RealMatrix m = RealMatrix::Zero(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
        for (const auto& t : triplets_) m(t.row, t.col) = std::abs(t.value);
        return m;
    }

    double max_abs() const {
        double best = 0.0;
        if (storage_ == Storage::dense) {
            if (n_ > 0) best = dense_.cwiseAbs().maxCoeff();
        } else {
            for (const auto& t : triplets_) best = std::max(best, std::abs(t.value));
        }
        return best;
    }

    bool is_real() const {
        if (storage_ == Storage::dense) return dense_.imag().isZero(0.0);
        return std::all_of(triplets_.begin(), triplets_.end(),
                           [](const Triplet& t) { return t.value.imag() == 0.0; });
    }

    /// Same dimension and entries (storage and provenance ignored).
    bool same_entries(const MatrixSample& o) const {
        return n_ == o.n_ && nonzeros() == o.nonzeros();
    }

private:
    MatrixSample(std::size_t n, Storage storage, std::optional<EntryDistribution> dist,
                 std::uint64_t seed)
        : n_(n), storage_(storage), dist_(std::move(dist)), seed_(seed) {}

    std::size_t n_;
    Storage storage_;
    std::optional<EntryDistribution> dist_;
    std::uint64_t seed_;
    ComplexMatrix dense_;
    std::vector<Triplet> triplets_;
};

inline MatrixSample sample_matrix(const EntryDistribution& dist, std::size_t n, std::uint64_t seed,
                                  Storage storage = Storage::dense) {
    if (n == 0) throw ConfigError("matrix dimension must be >= 1");
    if (storage == Storage::sparse && !dist.is<SparseToy>())
        throw UnsupportedError("sparse storage is only available for the sparse_toy law");
    Engine g(seed);
    if (storage == Storage::dense) {
        const auto en = static_cast<Eigen::Index>(n);
        ComplexMatrix m(en, en);
        for (Eigen::Index i = 0; i < en; ++i)
            for (Eigen::Index j = 0; j < en; ++j) m(i, j) = sample(dist, g);
        return MatrixSample::from_dense(std::move(m), dist, seed);
    }
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const Complex v = sample(dist, g);
            if (v != Complex(0.0))
                t.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), v});
        }
    return MatrixSample::from_triplets(n, std::move(t), dist, seed);
}

/// All entries bounded by n^2 in modulus.
inline bool event_B_holds(const MatrixSample& x) {
    const double n = static_cast<double>(x.n());
    return x.max_abs() <= n * n;
}

// ---------------------------------------------------------------------------
// Binary matrix file
//
//   offset  size  field
//   0       4     magic "SPRM"
//   4       4     u32 format version (1)
//   8       1     u8 storage (0 dense, 1 sparse)
//   9       3     zero padding
//   12      8     u64 n
//   20      8     u64 seed
//   28      4     u32 descriptor length L (0 when absent)
//   32      L     descriptor JSON, UTF-8
//   then    dense:  n*n records (f64 re, f64 im), row-major
//           sparse: u64 count, then count records (u32 row, u32 col, f64 re, f64 im)
// All integers and doubles are little-endian.

inline constexpr std::array<char, 4> kMatrixMagic{'S', 'P', 'R', 'M'};
inline constexpr std::uint32_t kMatrixFormatVersion = 1;

namespace detail {

class ByteWriter {
public:
    template <class T>
    void put(T v) {
        static_assert(std::is_trivially_copyable_v<T>);
        std::array<unsigned char, sizeof(T)> raw;
        std::memcpy(raw.data(), &v, sizeof(T));
        if constexpr (std::endian::native == std::endian::big) std::reverse(raw.begin(), raw.end());
        bytes.insert(bytes.end(), raw.begin(), raw.end());
    }
    void put_bytes(const void* p, std::size_t len) {
        const auto* c = static_cast<const unsigned char*>(p);
        bytes.insert(bytes.end(), c, c + len);
    }
    std::vector<unsigned char> bytes;
};

class ByteReader {
public:
    explicit ByteReader(const std::vector<unsigned char>& b) : bytes_(b) {}

    template <class T>
    T get(const char* what) {
        need(sizeof(T), what);
        std::array<unsigned char, sizeof(T)> raw;
        std::copy_n(bytes_.begin() + static_cast<std::ptrdiff_t>(pos_), sizeof(T), raw.begin());
        if constexpr (std::endian::native == std::endian::big) std::reverse(raw.begin(), raw.end());
        T v;
        std::memcpy(&v, raw.data(), sizeof(T));
        pos_ += sizeof(T);
        return v;
    }
    std::string get_string(std::size_t len, const char* what) {
        need(len, what);
        std::string s(bytes_.begin() + static_cast<std::ptrdiff_t>(pos_),
                      bytes_.begin() + static_cast<std::ptrdiff_t>(pos_ + len));
        pos_ += len;
        return s;
    }
    std::size_t offset() const { return pos_; }
    std::size_t remaining() const { return bytes_.size() - pos_; }

private:
    void need(std::size_t len, const char* what) {
        if (remaining() < len)
            throw ParseError(std::string("truncated matrix file while reading ") + what, pos_);
    }
    const std::vector<unsigned char>& bytes_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline std::vector<unsigned char> serialize(const MatrixSample& x) {
    detail::ByteWriter w;
    w.put_bytes(kMatrixMagic.data(), kMatrixMagic.size());
    w.put<std::uint32_t>(kMatrixFormatVersion);
    w.put<std::uint8_t>(static_cast<std::uint8_t>(x.storage()));
    for (int i = 0; i < 3; ++i) w.put<std::uint8_t>(0);
    w.put<std::uint64_t>(x.n());
    w.put<std::uint64_t>(x.seed());
    const std::string desc = x.distribution() ? to_json(*x.distribution()).dump() : std::string();
    w.put<std::uint32_t>(static_cast<std::uint32_t>(desc.size()));
    w.put_bytes(desc.data(), desc.size());
    if (x.storage() == Storage::dense) {
        const auto& m = x.dense_storage();
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j) {
                w.put<double>(m(i, j).real());
                w.put<double>(m(i, j).imag());
            }
    } else {
        w.put<std::uint64_t>(x.triplets().size());
        for (const auto& t : x.triplets()) {
            w.put<std::uint32_t>(t.row);
            w.put<std::uint32_t>(t.col);
            w.put<double>(t.value.real());
            w.put<double>(t.value.imag());
        }
    }
    return std::move(w.bytes);
}

inline MatrixSample deserialize(const std::vector<unsigned char>& bytes) {
    detail::ByteReader r(bytes);
    const std::string magic = r.get_string(4, "magic");
    if (!std::equal(magic.begin(), magic.end(), kMatrixMagic.begin()))
        throw ParseError("bad magic", 0);
    const auto version_at = r.offset();
    if (r.get<std::uint32_t>("version") != kMatrixFormatVersion)
        throw ParseError("unsupported format version", version_at);
    const auto storage_at = r.offset();
    const auto storage_flag = r.get<std::uint8_t>("storage flag");
    if (storage_flag > 1) throw ParseError("bad storage flag", storage_at);
    for (int i = 0; i < 3; ++i) r.get<std::uint8_t>("padding");
    const auto n_at = r.offset();
    const auto n = r.get<std::uint64_t>("n");
    if (n == 0 || n > (1u << 20)) throw ParseError("implausible dimension", n_at);
    const auto seed = r.get<std::uint64_t>("seed");
    const auto len = r.get<std::uint32_t>("descriptor length");
    const auto desc_at = r.offset();
    const std::string desc = r.get_string(len, "descriptor");
    std::optional<EntryDistribution> dist;
    if (!desc.empty()) {
        try {
            dist = distribution_from_json(nlohmann::json::parse(desc));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("bad descriptor JSON: ") + e.what(), desc_at);
        } catch (const ConfigError& e) {
            throw ParseError(std::string("bad descriptor: ") + e.what(), desc_at);
        }
    }
    if (storage_flag == 0) {
        if (r.remaining() < n * n * 16)
            throw ParseError("truncated matrix file while reading dense entries", r.offset());
        const auto en = static_cast<Eigen::Index>(n);
        ComplexMatrix m(en, en);
        for (Eigen::Index i = 0; i < en; ++i)
            for (Eigen::Index j = 0; j < en; ++j) {
                const double re = r.get<double>("entry");
                const double im = r.get<double>("entry");
                m(i, j) = Complex(re, im);
            }
        if (r.remaining() != 0) throw ParseError("trailing bytes", r.offset());
        return MatrixSample::from_dense(std::move(m), std::move(dist), seed);
    }
    const auto count = r.get<std::uint64_t>("triplet count");
    if (count > n * n) throw ParseError("triplet count exceeds n^2", r.offset() - 8);
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(count));
    for (std::uint64_t c = 0; c < count; ++c) {
        const auto at = r.offset();
        Triplet tr;
        tr.row = r.get<std::uint32_t>("triplet row");
        tr.col = r.get<std::uint32_t>("triplet col");
        const double re = r.get<double>("triplet value");
        const double im = r.get<double>("triplet value");
        tr.value = Complex(re, im);
        if (tr.row >= n || tr.col >= n) throw ParseError("triplet index out of range", at);
        if (!t.empty() && std::tie(t.back().row, t.back().col) >= std::tie(tr.row, tr.col))
            throw ParseError("triplets not strictly row-major", at);
        t.push_back(tr);
    }
    if (r.remaining() != 0) throw ParseError("trailing bytes", r.offset());
    return MatrixSample::from_triplets(n, std::move(t), std::move(dist), seed);
}

inline void save(const MatrixSample& x, const std::string& path) {
    const auto bytes = serialize(x);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("write failed for " + path);
}

inline MatrixSample load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    return deserialize(bytes);
}

}  // namespace specrad
