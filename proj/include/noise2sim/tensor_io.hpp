// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "noise2sim/tensor.hpp"

// Binary tensor container ("N2ST"):
//   magic "N2ST" | version u32 LE | dtype u8 (0 = f32) | ndim u8 |
//   dims ndim x u32 LE | domain u8 | payload: raw little-endian f32.
// Also imports/exports binary PGM (P5) grayscale images mapped to [0,1].

namespace n2s {

inline constexpr std::uint32_t kTensorFormatVersion = 1;

namespace detail {

inline void put_u32le(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 24) & 0xff));
}

inline std::uint32_t get_u32le(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline void put_f32le(std::string& out, float f) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    put_u32le(out, bits);
}

inline float get_f32le(const unsigned char* p) {
    const std::uint32_t bits = get_u32le(p);
    float f;
    std::memcpy(&f, &bits, 4);
    return f;
}

inline std::vector<unsigned char> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailure("cannot open " + path);
    in.seekg(0, std::ios::end);
    const auto len = in.tellg();
    in.seekg(0, std::ios::beg);
    std::vector<unsigned char> buf(static_cast<std::size_t>(len));
    if (len > 0) in.read(reinterpret_cast<char*>(buf.data()), len);
    if (!in) throw IoFailure("read failed for " + path);
    return buf;
}

inline void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoFailure("cannot open " + path + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw IoFailure("write failed for " + path);
}

} // namespace detail

inline std::string encode_tensor(const Tensor& t) {
    std::string out;
    out.reserve(14 + 4 * t.order() + 4 * t.size());
    out += "N2ST";
    detail::put_u32le(out, kTensorFormatVersion);
    out.push_back(0); // dtype f32
    out.push_back(static_cast<char>(t.order()));
    for (std::size_t d : t.dims()) detail::put_u32le(out, static_cast<std::uint32_t>(d));
    out.push_back(static_cast<char>(t.domain()));
    for (std::size_t i = 0; i < t.size(); ++i) detail::put_f32le(out, t[i]);
    return out;
}

inline Tensor decode_tensor(const unsigned char* p, std::size_t len) {
    if (len < 4 || std::memcmp(p, "N2ST", 4) != 0)
        throw BadMagic("not an N2ST file");
    if (len < 10) throw TruncatedPayload("N2ST header truncated");
    const std::uint32_t version = detail::get_u32le(p + 4);
    if (version != kTensorFormatVersion)
        throw UnsupportedVersion("N2ST version " + std::to_string(version) + " not supported");
    const unsigned dtype = p[8];
    if (dtype != 0) throw UnsupportedDtype("N2ST dtype code " + std::to_string(dtype));
    const unsigned ndim = p[9];
    if (ndim < 1 || ndim > 4) throw UnsupportedDtype("N2ST order must be 1..4");
    const std::size_t header = 10 + 4 * ndim + 1;
    if (len < header) throw TruncatedPayload("N2ST header truncated");
    std::vector<std::size_t> dims(ndim);
    std::size_t count = 1;
    for (unsigned i = 0; i < ndim; ++i) {
        dims[i] = detail::get_u32le(p + 10 + 4 * i);
        if (dims[i] == 0) throw TruncatedPayload("N2ST zero dimension");
        count *= dims[i];
    }
    const unsigned domain_code = p[10 + 4 * ndim];
    if (domain_code > 2) throw UnsupportedDtype("N2ST domain code " + std::to_string(domain_code));
    if (len != header + 4 * count)
        throw TruncatedPayload("N2ST payload length mismatch");
    std::vector<float> data(count);
    for (std::size_t i = 0; i < count; ++i) data[i] = detail::get_f32le(p + header + 4 * i);
    return Tensor(std::move(dims), std::move(data), static_cast<Domain>(domain_code));
}

// --- PGM (P5) ---

namespace detail {

inline std::size_t pgm_token(const std::vector<unsigned char>& buf, std::size_t pos, long& value) {
    // skip whitespace and '#' comments
    while (pos < buf.size()) {
        if (buf[pos] == '#') {
            while (pos < buf.size() && buf[pos] != '\n') ++pos;
        } else if (std::isspace(buf[pos])) {
            ++pos;
        } else {
            break;
        }
    }
    if (pos >= buf.size() || !std::isdigit(buf[pos]))
        throw TruncatedPayload("malformed PGM header");
    value = 0;
    while (pos < buf.size() && std::isdigit(buf[pos])) {
        value = value * 10 + (buf[pos] - '0');
        ++pos;
    }
    return pos;
}

} // namespace detail

inline Tensor decode_pgm(const std::vector<unsigned char>& buf) {
    if (buf.size() < 2 || buf[0] != 'P' || buf[1] != '5')
        throw BadMagic("not a P5 PGM file");
    long w = 0, h = 0, maxval = 0;
    std::size_t pos = 2;
    pos = detail::pgm_token(buf, pos, w);
    pos = detail::pgm_token(buf, pos, h);
    pos = detail::pgm_token(buf, pos, maxval);
    if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535)
        throw TruncatedPayload("bad PGM dimensions");
    ++pos; // single whitespace after maxval
    const bool wide = maxval > 255;
    const std::size_t count = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
    const std::size_t need = count * (wide ? 2 : 1);
    if (buf.size() < pos + need) throw TruncatedPayload("PGM pixel data truncated");
    std::vector<float> data(count);
    const float scale = 1.0f / static_cast<float>(maxval);
    for (std::size_t i = 0; i < count; ++i) {
        unsigned v = wide ? (static_cast<unsigned>(buf[pos + 2 * i]) << 8) | buf[pos + 2 * i + 1]
                          : buf[pos + i];
        data[i] = static_cast<float>(v) * scale;
    }
    return Tensor({static_cast<std::size_t>(h), static_cast<std::size_t>(w)}, std::move(data),
                  Domain::UnitInterval);
}

inline std::string encode_pgm(const Tensor& t) {
    if (t.order() != 2) throw DimMismatch("PGM export requires a 2D tensor");
    std::string out = "P5\n" + std::to_string(t.dim(1)) + " " + std::to_string(t.dim(0)) + "\n255\n";
    out.reserve(out.size() + t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        float v = t[i];
        if (v < 0.0f) v = 0.0f;
        if (v > 1.0f) v = 1.0f;
        out.push_back(static_cast<char>(static_cast<int>(v * 255.0f + 0.5f)));
    }
    return out;
}

/// Loads an N2ST or PGM (P5) file, dispatching on the leading magic bytes.
inline Tensor load_tensor(const std::string& path) {
    const auto buf = detail::read_file(path);
    if (buf.size() >= 4 && std::memcmp(buf.data(), "N2ST", 4) == 0)
        return decode_tensor(buf.data(), buf.size());
    if (buf.size() >= 2 && buf[0] == 'P' && buf[1] == '5')
        return decode_pgm(buf);
    throw BadMagic("unrecognized file magic in " + path);
}

/// Saves to PGM when the path ends in .pgm, otherwise to N2ST. Byte output is
/// a pure function of the tensor, so identical tensors produce identical files.
inline void save_tensor(const Tensor& t, const std::string& path) {
    const bool pgm = path.size() >= 4 && path.compare(path.size() - 4, 4, ".pgm") == 0;
    detail::write_file(path, pgm ? encode_pgm(t) : encode_tensor(t));
}

} // namespace n2s
