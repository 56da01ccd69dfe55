#pragma once

#include <zlib.h>

#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "spectre/errors.hpp"

namespace spectre {

static_assert(std::endian::native == std::endian::little, "container I/O assumes a little-endian host");

enum class DType { f32, f64 };

inline std::string_view to_string(DType d) { return d == DType::f32 ? "f32" : "f64"; }

inline DType parse_dtype(std::string_view s) {
    if (s == "f32") return DType::f32;
    if (s == "f64") return DType::f64;
    throw FormatError("unknown dtype '" + std::string(s) + "'");
}

inline std::size_t dtype_size(DType d) { return d == DType::f32 ? 4 : 8; }

template <typename T>
constexpr DType dtype_of() {
    static_assert(std::is_same_v<T, float> || std::is_same_v<T, double>, "container stores f32 or f64 only");
    return std::is_same_v<T, float> ? DType::f32 : DType::f64;
}

inline std::uint32_t crc32_of(std::span<const char> bytes) {
    uLong crc = ::crc32(0L, Z_NULL, 0);
    // zlib takes uInt lengths; feed in chunks
    std::size_t offset = 0;
    while (offset < bytes.size()) {
        const std::size_t chunk = std::min<std::size_t>(bytes.size() - offset, 1u << 30);
        crc = ::crc32(crc, reinterpret_cast<const Bytef*>(bytes.data() + offset), static_cast<uInt>(chunk));
        offset += chunk;
    }
    return static_cast<std::uint32_t>(crc);
}

struct TensorRecord {
    std::string name;
    DType dtype = DType::f32;
    std::vector<std::uint64_t> shape;
    std::string bytes;  // raw little-endian row-major payload

    std::uint64_t elements() const {
        return std::accumulate(shape.begin(), shape.end(), std::uint64_t{1}, std::multiplies<>());
    }
};

/// SPCW tensor container:
///   "SPCW" | u32 version (1) | u64 header length | JSON header |
///   payload (tensors back to back) | u32 CRC32 of the payload.
/// The header is {"metadata": {...}, "tensors": [{name, dtype, shape, byte_offset}]}
/// with byte_offset relative to the start of the payload.
class Container {
public:
    static constexpr std::uint32_t kVersion = 1;
    static constexpr char kMagic[4] = {'S', 'P', 'C', 'W'};

    nlohmann::json metadata = nlohmann::json::object();

    const std::vector<TensorRecord>& tensors() const noexcept { return tensors_; }

    template <typename T>
    void add(std::string name, std::vector<std::uint64_t> shape, std::span<const T> values) {
        TensorRecord rec{std::move(name), dtype_of<T>(), std::move(shape), {}};
        if (rec.elements() != values.size()) throw ShapeError("container: tensor '" + rec.name + "' shape/data mismatch");
        rec.bytes.assign(reinterpret_cast<const char*>(values.data()), values.size_bytes());
        tensors_.push_back(std::move(rec));
    }

    const TensorRecord& get(std::string_view name) const {
        for (const auto& t : tensors_) {
            if (t.name == name) return t;
        }
        throw FormatError("container: missing tensor '" + std::string(name) + "'");
    }

    bool contains(std::string_view name) const {
        for (const auto& t : tensors_) {
            if (t.name == name) return true;
        }
        return false;
    }

    /// Reads tensor `name` into `out`, converting between f32/f64 if needed.
    template <typename T>
    void read_into(std::string_view name, std::span<T> out, const std::vector<std::uint64_t>& expected_shape) const {
        const auto& rec = get(name);
        if (rec.shape != expected_shape) {
            throw FormatError("container: tensor '" + rec.name + "' has unexpected shape");
        }
        if (rec.dtype == dtype_of<T>()) {
            std::memcpy(out.data(), rec.bytes.data(), out.size_bytes());
        } else if (rec.dtype == DType::f32) {
            for (std::size_t i = 0; i < out.size(); ++i) {
                float v;
                std::memcpy(&v, rec.bytes.data() + 4 * i, 4);
                out[i] = static_cast<T>(v);
            }
        } else {
            for (std::size_t i = 0; i < out.size(); ++i) {
                double v;
                std::memcpy(&v, rec.bytes.data() + 8 * i, 8);
                out[i] = static_cast<T>(v);
            }
        }
    }

    std::string serialize() const {
        nlohmann::json header;
        header["metadata"] = metadata;
        header["tensors"] = nlohmann::json::array();
        std::uint64_t offset = 0;
        for (const auto& t : tensors_) {
            header["tensors"].push_back({{"name", t.name},
                                         {"dtype", std::string(to_string(t.dtype))},
                                         {"shape", t.shape},
                                         {"byte_offset", offset}});
            offset += t.bytes.size();
        }
        const std::string text = header.dump();

        std::string out;
        out.append(kMagic, 4);
        put_u32(out, kVersion);
        put_u64(out, text.size());
        out += text;
        const std::size_t payload_start = out.size();
        for (const auto& t : tensors_) out += t.bytes;
        put_u32(out, crc32_of(std::span<const char>(out.data() + payload_start, out.size() - payload_start)));
        return out;
    }

    static Container parse(std::string_view bytes) {
        if (bytes.size() < 16) throw FormatError("container: truncated preamble");
        if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError("container: bad magic");
        const std::uint32_t version = get_u32(bytes.data() + 4);
        if (version != kVersion) throw FormatError("container: unsupported version " + std::to_string(version));
        const std::uint64_t header_len = get_u64(bytes.data() + 8);
        if (header_len > bytes.size() - 16 || bytes.size() - 16 - header_len < 4) {
            throw FormatError("container: truncated header");
        }
        nlohmann::json header;
        try {
            header = nlohmann::json::parse(bytes.substr(16, header_len));
        } catch (const nlohmann::json::exception& e) {
            throw FormatError(std::string("container: malformed header: ") + e.what());
        }
        const std::size_t payload_start = 16 + header_len;
        const std::size_t payload_len = bytes.size() - payload_start - 4;
        const std::string_view payload = bytes.substr(payload_start, payload_len);

        Container c;
        try {
            c.metadata = header.at("metadata");
            std::uint64_t expected_offset = 0;
            for (const auto& entry : header.at("tensors")) {
                TensorRecord rec;
                rec.name = entry.at("name").get<std::string>();
                rec.dtype = parse_dtype(entry.at("dtype").get<std::string>());
                rec.shape = entry.at("shape").get<std::vector<std::uint64_t>>();
                const auto offset = entry.at("byte_offset").get<std::uint64_t>();
                const std::uint64_t nbytes = rec.elements() * dtype_size(rec.dtype);
                if (offset != expected_offset) {
                    throw FormatError("container: tensor '" + rec.name + "' has non-contiguous byte_offset");
                }
                if (offset > payload.size() || nbytes > payload.size() - offset) {
                    throw FormatError("container: tensor '" + rec.name + "' declares " + std::to_string(nbytes) +
                                      " bytes beyond the payload");
                }
                rec.bytes.assign(payload.substr(offset, nbytes));
                expected_offset = offset + nbytes;
                c.tensors_.push_back(std::move(rec));
            }
            if (expected_offset != payload.size()) {
                throw FormatError("container: payload has " + std::to_string(payload.size() - expected_offset) +
                                  " unclaimed bytes");
            }
        } catch (const nlohmann::json::exception& e) {
            throw FormatError(std::string("container: malformed header: ") + e.what());
        }
        const std::uint32_t stored = get_u32(bytes.data() + payload_start + payload_len);
        if (stored != crc32_of(std::span<const char>(payload.data(), payload.size()))) {
            throw ChecksumError("container: payload CRC32 mismatch");
        }
        return c;
    }

    void save(const std::string& path) const {
        const std::string bytes = serialize();
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open '" + path + "' for writing");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw IoError("write to '" + path + "' failed");
    }

    static Container load(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw IoError("cannot open '" + path + "' for reading");
        std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        if (in.bad()) throw IoError("read from '" + path + "' failed");
        return parse(bytes);
    }

private:
    static void put_u32(std::string& out, std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
    }
    static void put_u64(std::string& out, std::uint64_t v) {
        for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
    }
    static std::uint32_t get_u32(const char* p) {
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(p[i])) << (8 * i);
        return v;
    }
    static std::uint64_t get_u64(const char* p) {
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
        return v;
    }

    std::vector<TensorRecord> tensors_;
};

}  // namespace spectre
