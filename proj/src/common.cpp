// dynconsent: Consent-driven data sharing on a simulated ledger
// Copyright 2026 The dynconsent Authors.
// SPDX-License-Identifier: Apache-2.0

#include <dynconsent/common.hpp>
#include <dynconsent/errors.hpp>
#include <algorithm>
#include <cctype>

namespace dynconsent
{
namespace
{
int hex_value(char c) noexcept
{
    if (c >= '0' && c <= '9')
        return c - '0';
    if (c >= 'a' && c <= 'f')
        return c - 'a' + 10;
    if (c >= 'A' && c <= 'F')
        return c - 'A' + 10;
    return -1;
}
}  // namespace

std::string to_hex(bytes_view data)
{
    static constexpr char digits[] = "0123456789abcdef";
    std::string s;
    s.reserve(data.size() * 2);
    for (const auto b : data)
    {
        s.push_back(digits[b >> 4]);
        s.push_back(digits[b & 0xf]);
    }
    return s;
}

bytes from_hex(std::string_view text)
{
    if (text.size() % 2 != 0)
        throw Error{Errc::Decode, "odd hex length"};
    bytes out(text.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i)
    {
        const int hi = hex_value(text[2 * i]);
        const int lo = hex_value(text[2 * i + 1]);
        if (hi < 0 || lo < 0)
            throw Error{Errc::Decode, "non-hex character"};
        out[i] = static_cast<uint8_t>((hi << 4) | lo);
    }
    return out;
}

template <std::size_t N>
std::string FixedBytes<N>::hex() const
{
    return to_hex(bytes);
}

template <std::size_t N>
bool FixedBytes<N>::is_zero() const noexcept
{
    return std::ranges::all_of(bytes, [](uint8_t b) { return b == 0; });
}

template <std::size_t N>
FixedBytes<N> FixedBytes<N>::from_hex(std::string_view text)
{
    if (text.starts_with("0x"))
        text.remove_prefix(2);
    const auto raw = dynconsent::from_hex(text);
    if (raw.size() != N)
        throw Error{Errc::Decode, "expected " + std::to_string(N) + " bytes"};
    FixedBytes<N> v;
    std::ranges::copy(raw, v.bytes.begin());
    return v;
}

template struct FixedBytes<20>;
template struct FixedBytes<32>;

std::string Wei::to_string() const
{
    if (value == 0)
        return "0";
    std::string s;
    auto v = value;
    while (v != 0)
    {
        s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
        v /= 10;
    }
    std::ranges::reverse(s);
    return s;
}

std::string trim(std::string_view text)
{
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos)
        return {};
    const auto last = text.find_last_not_of(" \t\r\n");
    return std::string{text.substr(first, last - first + 1)};
}

std::string normalize_tag(std::string_view text)
{
    auto s = trim(text);
    std::ranges::transform(s, s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::string to_upper(std::string_view text)
{
    std::string s{text};
    std::ranges::transform(s, s.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return s;
}

std::string_view to_string(Errc code) noexcept
{
    switch (code)
    {
    case Errc::None: return "None";
    case Errc::UnknownCode: return "UnknownCode";
    case Errc::MalformedDiseaseTag: return "MalformedDiseaseTag";
    case Errc::InvalidStatement: return "InvalidStatement";
    case Errc::InsufficientFunds: return "InsufficientFunds";
    case Errc::UnknownSender: return "UnknownSender";
    case Errc::Duplicate: return "Duplicate";
    case Errc::EmptyPool: return "EmptyPool";
    case Errc::ReadOnlyRole: return "ReadOnlyRole";
    case Errc::OutOfGas: return "OutOfGas";
    case Errc::NotOwner: return "NotOwner";
    case Errc::Revoked: return "Revoked";
    case Errc::PrimaryMissing: return "PrimaryMissing";
    case Errc::ConflictingFragment: return "ConflictingFragment";
    case Errc::PurposeIncomplete: return "PurposeIncomplete";
    case Errc::TermsNotAcknowledged: return "TermsNotAcknowledged";
    case Errc::UnknownAddress: return "UnknownAddress";
    case Errc::MalformedPayload: return "MalformedPayload";
    case Errc::UnknownFunction: return "UnknownFunction";
    case Errc::DigestMismatch: return "DigestMismatch";
    case Errc::DuplicateId: return "DuplicateId";
    case Errc::RevokedContract: return "RevokedContract";
    case Errc::UnknownGrant: return "UnknownGrant";
    case Errc::InvalidToken: return "InvalidToken";
    case Errc::Deleted: return "Deleted";
    case Errc::UnknownId: return "UnknownId";
    case Errc::InvalidMix: return "InvalidMix";
    case Errc::IoFailure: return "IoFailure";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::RunAborted: return "RunAborted";
    case Errc::Decode: return "Decode";
    }
    return "Unknown";
}
}  // namespace dynconsent
