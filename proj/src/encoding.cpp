// dynconsent: Consent-driven data sharing on a simulated ledger
// Copyright 2026 The dynconsent Authors.
// SPDX-License-Identifier: Apache-2.0

#include <dynconsent/encoding.hpp>
#include <dynconsent/errors.hpp>
#include <openssl/evp.h>
#include <dynconsent/crypto.hpp>
#include <bit>

namespace dynconsent
{
Encoder& Encoder::u8(uint8_t v)
{
    out_.push_back(v);
    return *this;
}

Encoder& Encoder::u16(uint16_t v)
{
    out_.push_back(static_cast<uint8_t>(v >> 8));
    out_.push_back(static_cast<uint8_t>(v));
    return *this;
}

Encoder& Encoder::u32(uint32_t v)
{
    for (int shift = 24; shift >= 0; shift -= 8)
        out_.push_back(static_cast<uint8_t>(v >> shift));
    return *this;
}

Encoder& Encoder::u64(uint64_t v)
{
    for (int shift = 56; shift >= 0; shift -= 8)
        out_.push_back(static_cast<uint8_t>(v >> shift));
    return *this;
}

Encoder& Encoder::wei(Wei v)
{
    u64(static_cast<uint64_t>(v.value >> 64));
    return u64(static_cast<uint64_t>(v.value));
}

Encoder& Encoder::blob(bytes_view v)
{
    u32(static_cast<uint32_t>(v.size()));
    out_.insert(out_.end(), v.begin(), v.end());
    return *this;
}

Encoder& Encoder::str(std::string_view v)
{
    u32(static_cast<uint32_t>(v.size()));
    out_.insert(out_.end(), v.begin(), v.end());
    return *this;
}

bytes_view Decoder::take(std::size_t n)
{
    if (in_.size() - pos_ < n)
        throw Error{Errc::Decode, "truncated input"};
    const auto s = in_.subspan(pos_, n);
    pos_ += n;
    return s;
}

uint8_t Decoder::u8()
{
    return take(1)[0];
}

uint16_t Decoder::u16()
{
    const auto s = take(2);
    return static_cast<uint16_t>((s[0] << 8) | s[1]);
}

uint32_t Decoder::u32()
{
    uint32_t v = 0;
    for (const auto b : take(4))
        v = (v << 8) | b;
    return v;
}

uint64_t Decoder::u64()
{
    uint64_t v = 0;
    for (const auto b : take(8))
        v = (v << 8) | b;
    return v;
}

bool Decoder::boolean()
{
    const auto b = u8();
    if (b > 1)
        throw Error{Errc::Decode, "boolean out of range"};
    return b == 1;
}

Wei Decoder::wei()
{
    const auto hi = u64();
    const auto lo = u64();
    return Wei{(static_cast<unsigned __int128>(hi) << 64) | lo};
}

bytes Decoder::blob()
{
    const auto n = u32();
    const auto s = take(n);
    return {s.begin(), s.end()};
}

std::string Decoder::str()
{
    const auto n = u32();
    const auto s = take(n);
    return {s.begin(), s.end()};
}

uint32_t Decoder::count(std::size_t min_element_size)
{
    const auto n = u32();
    if (min_element_size != 0 && n > (in_.size() - pos_) / min_element_size)
        throw Error{Errc::Decode, "element count exceeds input"};
    return n;
}

void Decoder::finish() const
{
    if (!done())
        throw Error{Errc::Decode, "trailing bytes"};
}

Hash256 sha256(bytes_view data)
{
    Hash256 h;
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), h.bytes.data(), &len, EVP_sha256(), nullptr) != 1 ||
        len != h.bytes.size())
        throw std::runtime_error{"EVP_Digest failed"};
    return h;
}

unsigned leading_zero_bits(const Hash256& h) noexcept
{
    unsigned n = 0;
    for (const auto b : h.bytes)
    {
        if (b == 0)
        {
            n += 8;
            continue;
        }
        n += static_cast<unsigned>(std::countl_zero(b));
        break;
    }
    return n;
}
}  // namespace dynconsent
