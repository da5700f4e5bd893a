// dynconsent: Consent-driven data sharing on a simulated ledger
// Copyright 2026 The dynconsent Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "common.hpp"
#include <string>
#include <string_view>

namespace dynconsent
{
/// Canonical byte encoding: big-endian fixed-width integers, u32 length prefixes on
/// variable fields, fields written in declaration order. Hashes over this encoding are
/// stable across runs and platforms.
class Encoder
{
public:
    Encoder& u8(uint8_t v);
    Encoder& u16(uint16_t v);
    Encoder& u32(uint32_t v);
    Encoder& u64(uint64_t v);
    Encoder& i64(int64_t v) { return u64(static_cast<uint64_t>(v)); }
    Encoder& boolean(bool v) { return u8(v ? 1 : 0); }
    Encoder& wei(Wei v);
    Encoder& blob(bytes_view v);
    Encoder& str(std::string_view v);

    template <std::size_t N>
    Encoder& fixed(const FixedBytes<N>& v)
    {
        out_.insert(out_.end(), v.bytes.begin(), v.bytes.end());
        return *this;
    }

    [[nodiscard]] const bytes& data() const& noexcept { return out_; }
    [[nodiscard]] bytes data() && noexcept { return std::move(out_); }

private:
    bytes out_;
};

/// Strict reader for the Encoder format. Every malformed input throws Error{Errc::Decode}:
/// truncation, booleans other than 0/1, and (via finish) trailing bytes.
class Decoder
{
public:
    explicit Decoder(bytes_view in) noexcept : in_{in} {}

    uint8_t u8();
    uint16_t u16();
    uint32_t u32();
    uint64_t u64();
    int64_t i64() { return static_cast<int64_t>(u64()); }
    bool boolean();
    Wei wei();
    bytes blob();
    std::string str();

    template <std::size_t N>
    FixedBytes<N> fixed()
    {
        FixedBytes<N> v;
        const auto src = take(N);
        std::copy(src.begin(), src.end(), v.bytes.begin());
        return v;
    }

    /// Upper bound for element counts read from the stream; guards allocation on garbage.
    uint32_t count(std::size_t min_element_size = 1);

    [[nodiscard]] bool done() const noexcept { return pos_ == in_.size(); }
    void finish() const;

private:
    bytes_view take(std::size_t n);

    bytes_view in_;
    std::size_t pos_ = 0;
};
}  // namespace dynconsent
