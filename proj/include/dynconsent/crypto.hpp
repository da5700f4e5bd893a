// dynconsent: Consent-driven data sharing on a simulated ledger
// Copyright 2026 The dynconsent Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "common.hpp"

namespace dynconsent
{
/// SHA-256 of data.
Hash256 sha256(bytes_view data);

/// Number of leading zero bits in h, MSB of byte 0 first.
unsigned leading_zero_bits(const Hash256& h) noexcept;
}  // namespace dynconsent
