// dynconsent: Consent-driven data sharing on a simulated ledger
// Copyright 2026 The dynconsent Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dynconsent
{
using bytes = std::vector<uint8_t>;
using bytes_view = std::span<const uint8_t>;

/// Fixed-size byte string with hex rendering and total ordering.
template <std::size_t N>
struct FixedBytes
{
    std::array<uint8_t, N> bytes{};

    static constexpr std::size_t size = N;

    [[nodiscard]] std::string hex() const;
    [[nodiscard]] bool is_zero() const noexcept;

    /// Throws Error{Errc::Decode} on bad length or non-hex characters.
    static FixedBytes from_hex(std::string_view text);

    friend auto operator<=>(const FixedBytes&, const FixedBytes&) = default;
};

using Hash256 = FixedBytes<32>;
using Address = FixedBytes<20>;

/// Wei-denominated ether amount. 128 bits so prefunded balances of many ether fit.
struct Wei
{
    unsigned __int128 value = 0;

    constexpr Wei() = default;
    constexpr explicit Wei(unsigned __int128 v) : value{v} {}

    friend constexpr Wei operator+(Wei a, Wei b) noexcept { return Wei{a.value + b.value}; }
    friend constexpr Wei operator-(Wei a, Wei b) noexcept { return Wei{a.value - b.value}; }
    friend constexpr Wei operator*(Wei a, uint64_t k) noexcept { return Wei{a.value * k}; }
    Wei& operator+=(Wei o) noexcept
    {
        value += o.value;
        return *this;
    }
    Wei& operator-=(Wei o) noexcept
    {
        value -= o.value;
        return *this;
    }
    friend constexpr auto operator<=>(const Wei&, const Wei&) = default;

    /// Decimal integer rendering of the wei amount.
    [[nodiscard]] std::string to_string() const;
};

inline constexpr unsigned __int128 wei_per_gwei = 1'000'000'000;
inline constexpr unsigned __int128 wei_per_ether = wei_per_gwei * 1'000'000'000;

constexpr Wei gwei(uint64_t n) noexcept
{
    return Wei{n * wei_per_gwei};
}
constexpr Wei ether(uint64_t n) noexcept
{
    return Wei{n * wei_per_ether};
}

std::string to_hex(bytes_view data);
bytes from_hex(std::string_view text);

/// Lower-case, surrounding whitespace removed.
std::string normalize_tag(std::string_view text);
std::string to_upper(std::string_view text);
std::string trim(std::string_view text);
}  // namespace dynconsent
