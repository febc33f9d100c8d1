#pragma once

// Binary model container, little-endian throughout.
//
//   offset  field
//   0       magic "HONAMMDL" (8 bytes)
//   8       u32 format version (kModelFormatVersion)
//           u32 m, u32 k, u32 order, u32 task (0 regression, 1 binary)
//           u64 schema hash
//           u32 unit kind (0 linear, 1 exu, 2 expdive)
//           u32 hidden-layer count H, then H x u32 hidden sizes
//           u32 hidden activation kind, f64 its parameter
//           u32 unit activation kind,  f64 its parameter
//           u8 trainable shift, u8 unit in all layers, u8 activate output
//           u32 ablated-feature count A, then A x u32 feature indices
//           u64 metadata byte length L, then L bytes of metadata
//           u32 tensor count T, then T x (u32 rows, u32 cols, rows*cols x f64)
//   end-8   u64 FNV-1a checksum over every preceding byte
//
// Tensor order: for each feature net, for each layer: weight then bias;
// then the head weight ((order*k) x 1) and head bias (1 x 1).

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>
#include <string>
#include <vector>

#include "honam/errors.hpp"
#include "honam/model.hpp"
#include "honam/random.hpp"

namespace honam {

inline constexpr std::uint32_t kModelFormatVersion = 1;
inline constexpr char kModelMagic[8] = {'H', 'O', 'N', 'A', 'M', 'M', 'D', 'L'};

static_assert(std::endian::native == std::endian::little, "model files assume a little-endian host");

namespace detail {

class ByteWriter {
public:
    template <typename T>
    void put(T v) {
        const auto* p = reinterpret_cast<const char*>(&v);
        buf_.insert(buf_.end(), p, p + sizeof(T));
    }
    void put_bytes(const void* data, std::size_t n) {
        const auto* p = static_cast<const char*>(data);
        buf_.insert(buf_.end(), p, p + n);
    }
    std::vector<char>& bytes() { return buf_; }

private:
    std::vector<char> buf_;
};

class ByteReader {
public:
    ByteReader(const char* data, std::size_t size) : data_(data), size_(size) {}

    template <typename T>
    T get() {
        T v;
        need(sizeof(T));
        std::memcpy(&v, data_ + pos_, sizeof(T));
        pos_ += sizeof(T);
        return v;
    }
    std::string get_string(std::size_t n) {
        need(n);
        std::string s(data_ + pos_, n);
        pos_ += n;
        return s;
    }
    std::size_t remaining() const { return size_ - pos_; }

private:
    void need(std::size_t n) const {
        if (size_ - pos_ < n) throw LoadError("model file is truncated or corrupt");
    }
    const char* data_;
    std::size_t size_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline std::vector<char> serialize_model(const HonamModel& model) {
    const ModelConfig& cfg = model.config();
    detail::ByteWriter w;
    w.put_bytes(kModelMagic, sizeof(kModelMagic));
    w.put<std::uint32_t>(kModelFormatVersion);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(cfg.m));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(model.k()));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(cfg.order));
    w.put<std::uint32_t>(cfg.task == Task::regression ? 0u : 1u);
    w.put<std::uint64_t>(model.schema_hash());
    w.put<std::uint32_t>(static_cast<std::uint32_t>(cfg.net.unit));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(cfg.net.hidden.size()));
    for (auto h : cfg.net.hidden) w.put<std::uint32_t>(static_cast<std::uint32_t>(h));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(cfg.net.hidden_act.kind));
    w.put<double>(cfg.net.hidden_act.param);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(cfg.net.unit_act.kind));
    w.put<double>(cfg.net.unit_act.param);
    w.put<std::uint8_t>(cfg.net.trainable_shift ? 1 : 0);
    w.put<std::uint8_t>(cfg.net.unit_in_all_layers ? 1 : 0);
    w.put<std::uint8_t>(cfg.net.activate_output ? 1 : 0);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(model.ablated().size()));
    for (auto a : model.ablated()) w.put<std::uint32_t>(static_cast<std::uint32_t>(a));
    w.put<std::uint64_t>(model.metadata().size());
    w.put_bytes(model.metadata().data(), model.metadata().size());
    const auto tensors = model.stored_tensors();
    w.put<std::uint32_t>(static_cast<std::uint32_t>(tensors.size()));
    for (const auto& t : tensors) {
        w.put<std::uint32_t>(static_cast<std::uint32_t>(t.rows()));
        w.put<std::uint32_t>(static_cast<std::uint32_t>(t.cols()));
        w.put_bytes(t.values().data(), t.size() * sizeof(double));
    }
    const std::uint64_t sum = fnv1a64(w.bytes().data(), w.bytes().size());
    w.put<std::uint64_t>(sum);
    return std::move(w.bytes());
}

/// Optional checks applied while loading.
struct LoadExpectations {
    std::optional<std::size_t> m;
    std::optional<std::uint64_t> schema_hash;
};

inline HonamModel deserialize_model(const std::vector<char>& bytes, const LoadExpectations& expect = {}) {
    if (bytes.size() < sizeof(kModelMagic) + sizeof(std::uint32_t) + sizeof(std::uint64_t)) {
        throw LoadError("model file is truncated or corrupt");
    }
    if (std::memcmp(bytes.data(), kModelMagic, sizeof(kModelMagic)) != 0) {
        throw LoadError("not a model file (bad magic)");
    }
    std::uint32_t version;
    std::memcpy(&version, bytes.data() + sizeof(kModelMagic), sizeof(version));
    if (version != kModelFormatVersion) {
        throw LoadError("model format version " + std::to_string(version) + " unsupported (expected " +
                        std::to_string(kModelFormatVersion) + ")");
    }
    const std::size_t body = bytes.size() - sizeof(std::uint64_t);
    std::uint64_t stored_sum;
    std::memcpy(&stored_sum, bytes.data() + body, sizeof(stored_sum));
    if (fnv1a64(bytes.data(), body) != stored_sum) throw LoadError("model file is truncated or corrupt (checksum)");

    detail::ByteReader r(bytes.data() + sizeof(kModelMagic) + sizeof(version), body - sizeof(kModelMagic) - sizeof(version));
    ModelConfig cfg;
    cfg.m = r.get<std::uint32_t>();
    const std::size_t k = r.get<std::uint32_t>();
    cfg.order = r.get<std::uint32_t>();
    cfg.task = r.get<std::uint32_t>() == 0 ? Task::regression : Task::binary_classification;
    const std::uint64_t schema_hash = r.get<std::uint64_t>();
    const auto unit = r.get<std::uint32_t>();
    if (unit > 2) throw LoadError("model file: bad unit kind");
    cfg.net.unit = static_cast<UnitKind>(unit);
    cfg.net.k = k;
    cfg.net.hidden.resize(r.get<std::uint32_t>());
    for (auto& h : cfg.net.hidden) h = r.get<std::uint32_t>();
    auto read_act = [&r] {
        const auto kind = r.get<std::uint32_t>();
        if (kind > 3) throw LoadError("model file: bad activation kind");
        Activation a{static_cast<ActivationKind>(kind), r.get<double>()};
        return a;
    };
    cfg.net.hidden_act = read_act();
    cfg.net.unit_act = read_act();
    cfg.net.trainable_shift = r.get<std::uint8_t>() != 0;
    cfg.net.unit_in_all_layers = r.get<std::uint8_t>() != 0;
    cfg.net.activate_output = r.get<std::uint8_t>() != 0;

    if (expect.m && *expect.m != cfg.m) {
        throw ContractError("model schema mismatch: file has m=" + std::to_string(cfg.m) + ", expected m=" +
                            std::to_string(*expect.m));
    }
    if (expect.schema_hash && *expect.schema_hash != schema_hash) {
        throw ContractError("model schema mismatch: schema hash differs");
    }

    std::set<std::size_t> ablated;
    const auto n_ablated = r.get<std::uint32_t>();
    for (std::uint32_t i = 0; i < n_ablated; ++i) ablated.insert(r.get<std::uint32_t>());
    const auto meta_len = r.get<std::uint64_t>();
    if (meta_len > r.remaining()) throw LoadError("model file is truncated or corrupt");
    std::string metadata = r.get_string(static_cast<std::size_t>(meta_len));

    Rng rng(0);
    HonamModel model;
    try {
        model = HonamModel::init(cfg, rng);
    } catch (const ConfigError& e) {
        throw LoadError(std::string("model file: invalid architecture: ") + e.what());
    }
    auto tensors = model.stored_tensors();
    const auto n_tensors = r.get<std::uint32_t>();
    if (n_tensors != tensors.size()) throw LoadError("model file: tensor count does not match architecture");
    for (auto& t : tensors) {
        const auto rows = r.get<std::uint32_t>();
        const auto cols = r.get<std::uint32_t>();
        if (rows != t.rows() || cols != t.cols()) {
            throw LoadError("model file: tensor shape " + detail::shape_str(rows, cols) +
                            " does not match architecture " + t.shape_str());
        }
        for (auto& v : t.mutable_values()) v = r.get<double>();
    }
    if (r.remaining() != 0) throw LoadError("model file: trailing bytes");
    try {
        model.ablate(ablated);
    } catch (const ConfigError&) {
        throw LoadError("model file: ablated feature index out of range");
    }
    model.set_metadata(std::move(metadata));
    model.set_schema_hash(schema_hash);
    return model;
}

inline void save_model(const HonamModel& model, const std::string& path) {
    const auto bytes = serialize_model(model);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw ConfigError("failed writing '" + path + "'");
}

inline HonamModel load_model(const std::string& path, const LoadExpectations& expect = {}) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError("cannot open model file '" + path + "'");
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize_model(bytes, expect);
}

}  // namespace honam
