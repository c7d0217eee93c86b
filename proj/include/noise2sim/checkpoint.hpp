// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <string>

#include "noise2sim/net.hpp"
#include "noise2sim/optim.hpp"

// Model checkpoint ("N2SM"):
//   magic "N2SM" | version u32 | arch u8 | arch params 3 x u32 |
//   block count u32 | blocks (len u32 + f32 data) |
//   has_opt u8 | [step u64 | lr0 f32 | horizon u32 | m blocks | v blocks]

namespace n2s {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointInfo {
    std::uint8_t arch = 0;
    std::array<std::uint32_t, 3> params{};
    bool has_optimizer = false;
};

namespace detail {

inline void put_block(std::string& out, const std::vector<float>& blk) {
    put_u32le(out, static_cast<std::uint32_t>(blk.size()));
    for (float f : blk) put_f32le(out, f);
}

inline std::size_t get_block(const unsigned char* p, std::size_t len, std::size_t pos,
                             std::vector<float>& blk) {
    if (pos + 4 > len) throw TruncatedPayload("N2SM block header truncated");
    const std::uint32_t n = get_u32le(p + pos);
    pos += 4;
    if (pos + 4ull * n > len) throw TruncatedPayload("N2SM block data truncated");
    if (blk.size() != n) throw ShapeMismatch("N2SM block length does not match architecture");
    for (std::uint32_t i = 0; i < n; ++i) blk[i] = get_f32le(p + pos + 4ull * i);
    return pos + 4ull * n;
}

} // namespace detail

template <class Model>
void save_checkpoint(const std::string& path, const Model& model, const AdamState* opt = nullptr) {
    std::string out;
    out += "N2SM";
    detail::put_u32le(out, kCheckpointVersion);
    out.push_back(static_cast<char>(Model::kArchCode));
    for (std::uint32_t p : model.arch_params()) detail::put_u32le(out, p);
    auto blocks = model.param_blocks();
    detail::put_u32le(out, static_cast<std::uint32_t>(blocks.size()));
    for (const auto* blk : blocks) detail::put_block(out, *blk);
    out.push_back(opt ? 1 : 0);
    if (opt) {
        detail::put_u32le(out, static_cast<std::uint32_t>(opt->step & 0xffffffffu));
        detail::put_u32le(out, static_cast<std::uint32_t>(opt->step >> 32));
        detail::put_f32le(out, static_cast<float>(opt->lr0));
        detail::put_u32le(out, static_cast<std::uint32_t>(opt->horizon));
        for (const auto& blk : opt->m) detail::put_block(out, blk);
        for (const auto& blk : opt->v) detail::put_block(out, blk);
    }
    detail::write_file(path, out);
}

inline CheckpointInfo peek_checkpoint(const std::string& path) {
    const auto buf = detail::read_file(path);
    if (buf.size() < 4 || std::memcmp(buf.data(), "N2SM", 4) != 0)
        throw BadMagic("not an N2SM checkpoint");
    if (buf.size() < 21) throw TruncatedPayload("N2SM header truncated");
    if (detail::get_u32le(buf.data() + 4) != kCheckpointVersion)
        throw UnsupportedVersion("unsupported N2SM version");
    CheckpointInfo info;
    info.arch = buf[8];
    for (int i = 0; i < 3; ++i) info.params[i] = detail::get_u32le(buf.data() + 9 + 4 * i);
    return info;
}

/// Fills a model constructed with the matching architecture. Returns the
/// optimizer state too when present and requested.
template <class Model>
void load_checkpoint(const std::string& path, Model& model, AdamState* opt = nullptr) {
    const auto buf = detail::read_file(path);
    const unsigned char* p = buf.data();
    const std::size_t len = buf.size();
    if (len < 4 || std::memcmp(p, "N2SM", 4) != 0) throw BadMagic("not an N2SM checkpoint");
    if (len < 25) throw TruncatedPayload("N2SM header truncated");
    if (detail::get_u32le(p + 4) != kCheckpointVersion)
        throw UnsupportedVersion("unsupported N2SM version");
    if (p[8] != Model::kArchCode) throw ShapeMismatch("checkpoint architecture mismatch");
    std::array<std::uint32_t, 3> params;
    for (int i = 0; i < 3; ++i) params[i] = detail::get_u32le(p + 9 + 4 * i);
    if (params != model.arch_params())
        model = Model::from_arch(params);
    auto blocks = model.param_blocks();
    std::size_t pos = 21;
    const std::uint32_t nblocks = detail::get_u32le(p + pos);
    pos += 4;
    if (nblocks != blocks.size()) throw ShapeMismatch("checkpoint block count mismatch");
    for (auto* blk : blocks) pos = detail::get_block(p, len, pos, *blk);
    if (pos + 1 > len) throw TruncatedPayload("N2SM optimizer flag missing");
    const bool has_opt = p[pos++] != 0;
    if (has_opt && opt) {
        if (pos + 12 > len) throw TruncatedPayload("N2SM optimizer header truncated");
        const std::uint64_t lo = detail::get_u32le(p + pos);
        const std::uint64_t hi = detail::get_u32le(p + pos + 4);
        opt->step = static_cast<long>(lo | (hi << 32));
        opt->lr0 = detail::get_f32le(p + pos + 8);
        pos += 12;
        opt->horizon = static_cast<long>(detail::get_u32le(p + pos));
        pos += 4;
        opt->m.clear();
        opt->v.clear();
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            opt->m.emplace_back(blocks[b]->size(), 0.0f);
            pos = detail::get_block(p, len, pos, opt->m.back());
        }
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            opt->v.emplace_back(blocks[b]->size(), 0.0f);
            pos = detail::get_block(p, len, pos, opt->v.back());
        }
    }
}

} // namespace n2s
