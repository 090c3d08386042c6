#pragma once

// PGWT weight files, little-endian:
//
//   "PGWT"            4 bytes magic
//   format_version    u32
//   repeated until end of stream:
//     name_len        u16
//     name            name_len bytes, printable ASCII
//     dtype           u8   (0 = f32, 1 = f16)
//     rank            u8
//     dims            rank x u32
//     payload         product(dims) x dtype_size bytes, row-major
//
// There is no record count, trailer or padding.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "phishguard/error.hpp"
#include "phishguard/fp16.hpp"
#include "phishguard/tensor.hpp"

namespace phishguard {

inline constexpr std::array<std::uint8_t, 4> kWeightMagic{'P', 'G', 'W', 'T'};

namespace detail {

class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::size_t offset() const noexcept { return pos_; }
    bool at_end() const noexcept { return pos_ == bytes_.size(); }
    std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

    std::span<const std::uint8_t> take(std::size_t n, const char* what) {
        if (remaining() < n)
            throw Error(ErrorCode::truncated_stream, std::string("stream ends while reading ") + what + " at offset " +
                                                         std::to_string(pos_));
        auto out = bytes_.subspan(pos_, n);
        pos_ += n;
        return out;
    }

    template <typename UInt>
    UInt read(const char* what) {
        auto raw = take(sizeof(UInt), what);
        UInt v = 0;
        for (std::size_t i = 0; i < sizeof(UInt); ++i) v |= static_cast<UInt>(raw[i]) << (8 * i);
        return v;
    }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

template <typename UInt>
void put(std::vector<std::uint8_t>& out, UInt v) {
    for (std::size_t i = 0; i < sizeof(UInt); ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

} // namespace detail

inline WeightStore load_weights(std::span<const std::uint8_t> bytes) {
    // A stream too short for the magic cannot begin with it either.
    if (bytes.size() < kWeightMagic.size() || !std::equal(kWeightMagic.begin(), kWeightMagic.end(), bytes.begin()))
        throw Error(ErrorCode::bad_magic, "expected \"PGWT\" at offset 0");
    detail::ByteReader in(bytes);
    in.take(4, "magic");
    const auto version = in.read<std::uint32_t>("format_version");
    if (version != WeightStore::kFormatVersion)
        throw Error(ErrorCode::unsupported_version, "format_version " + std::to_string(version) + " at offset 4");

    WeightStore store;
    while (!in.at_end()) {
        const std::size_t record_offset = in.offset();
        const auto name_len = in.read<std::uint16_t>("name_len");
        auto name_bytes = in.take(name_len, "tensor name");
        std::string name(name_bytes.begin(), name_bytes.end());
        const std::string where = "tensor '" + name + "' at offset " + std::to_string(record_offset);

        const auto dtype_tag = in.read<std::uint8_t>("dtype");
        if (dtype_tag > 1) throw Error(ErrorCode::unknown_dtype, where + ": dtype tag " + std::to_string(dtype_tag));
        const auto dtype = static_cast<DType>(dtype_tag);
        const auto rank = in.read<std::uint8_t>("rank");

        std::vector<std::size_t> dims(rank);
        for (auto& d : dims) {
            d = in.read<std::uint32_t>("dims");
            if (d == 0) throw Error(ErrorCode::invalid_dims, where + ": zero extent");
        }
        std::size_t count = 0;
        try {
            count = element_count(dims);
        } catch (const Error&) {
            throw Error(ErrorCode::dim_overflow, where + ": element count overflows");
        }
        if (count > std::numeric_limits<std::size_t>::max() / dtype_size(dtype))
            throw Error(ErrorCode::dim_overflow, where + ": payload size overflows");
        if (in.remaining() < count * dtype_size(dtype))
            throw Error(ErrorCode::truncated_stream, where + ": payload needs " + std::to_string(count * dtype_size(dtype)) +
                                                         " bytes, " + std::to_string(in.remaining()) + " remain");

        std::vector<float> values(count);
        auto payload = in.take(count * dtype_size(dtype), "payload");
        for (std::size_t i = 0; i < count; ++i) {
            if (dtype == DType::f32) {
                std::uint32_t b = 0;
                for (int k = 0; k < 4; ++k) b |= static_cast<std::uint32_t>(payload[4 * i + k]) << (8 * k);
                values[i] = std::bit_cast<float>(b);
            } else {
                const auto h = static_cast<std::uint16_t>(payload[2 * i] | (payload[2 * i + 1] << 8));
                values[i] = half_bits_to_float(h);
            }
            if (!std::isfinite(values[i]))
                throw Error(ErrorCode::non_finite, where + ": element " + std::to_string(i) + " is NaN or Inf");
        }
        try {
            store.insert(std::move(name), Tensor(std::move(dims), std::move(values), dtype));
        } catch (const Error& e) {
            throw Error(e.code(), where + ": " + e.detail());
        }
    }
    return store;
}

/// Canonical encoding; equal stores always produce equal bytes.
inline std::vector<std::uint8_t> save_weights(const WeightStore& store) {
    std::vector<std::uint8_t> out(kWeightMagic.begin(), kWeightMagic.end());
    detail::put<std::uint32_t>(out, store.format_version());
    for (const auto& [name, tensor] : store.entries()) {
        detail::put<std::uint16_t>(out, static_cast<std::uint16_t>(name.size()));
        out.insert(out.end(), name.begin(), name.end());
        out.push_back(static_cast<std::uint8_t>(tensor.dtype()));
        out.push_back(static_cast<std::uint8_t>(tensor.rank()));
        for (std::size_t d : tensor.dims()) detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(d));
        for (float v : tensor.data()) {
            if (tensor.dtype() == DType::f32)
                detail::put<std::uint32_t>(out, std::bit_cast<std::uint32_t>(v));
            else
                detail::put<std::uint16_t>(out, float_to_half_bits(v));
        }
    }
    return out;
}

inline std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::io_error, "cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::io_error, "short write to " + path.string());
}

inline WeightStore read_weight_file(const std::filesystem::path& path) {
    const auto bytes = read_file_bytes(path);
    try {
        return load_weights(bytes);
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.detail());
    }
}

inline void write_weight_file(const std::filesystem::path& path, const WeightStore& store) {
    write_file_bytes(path, save_weights(store));
}

} // namespace phishguard
