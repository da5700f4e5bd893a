// dynconsent: Consent-driven data sharing on a simulated ledger
// Copyright 2026 The dynconsent Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <dynconsent/common.hpp>
#include <dynconsent/errors.hpp>
#include <filesystem>
#include <random>
#include <string>
#include <unistd.h>

namespace dynconsent::test
{
/// Fresh directory under the system temp dir, removed on destruction.
class TempDir
{
public:
    explicit TempDir(std::string_view tag = "dc")
    {
        static std::mt19937_64 salt{std::random_device{}()};
        path_ = std::filesystem::temp_directory_path() /
                (std::string{tag} + "-" + std::to_string(::getpid()) + "-" + std::to_string(salt()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir()
    {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    [[nodiscard]] const std::filesystem::path& path() const noexcept { return path_; }
    [[nodiscard]] std::filesystem::path operator/(std::string_view name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

/// Small helper over mt19937_64 for hand-rolled property tests.
class Gen
{
public:
    explicit Gen(uint64_t seed) : rng_{seed} {}

    /// Uniform in [lo, hi].
    uint64_t range(uint64_t lo, uint64_t hi) { return std::uniform_int_distribution<uint64_t>{lo, hi}(rng_); }
    bool coin() { return range(0, 1) == 1; }
    template <typename C>
    const auto& pick(const C& c)
    {
        return *std::next(std::begin(c), static_cast<std::ptrdiff_t>(range(0, std::size(c) - 1)));
    }
    bytes blob(std::size_t n)
    {
        bytes b(n);
        for (auto& x : b)
            x = static_cast<uint8_t>(range(0, 255));
        return b;
    }
    std::mt19937_64& engine() noexcept { return rng_; }

private:
    std::mt19937_64 rng_;
};

template <typename F>
Errc error_of(F&& f)
{
    try
    {
        f();
    }
    catch (const Error& e)
    {
        return e.code();
    }
    return Errc::None;
}

inline std::filesystem::path data_dir()
{
    return DYNCONSENT_DATA_DIR;
}
}  // namespace dynconsent::test
