// dynconsent: Consent-driven data sharing on a simulated ledger
// Copyright 2026 The dynconsent Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

/// DUO consent codes (what a data provider allows) and ADA-M purpose codes (what a data
/// requester intends), their canonical text forms, and the category hierarchy that decides
/// whether a consent code covers a purpose.

#include "common.hpp"
#include <chrono>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace dynconsent::ontology
{
using Date = std::chrono::year_month_day;

/// "YYYY-MM-DD". Throws Error{Errc::InvalidConfig} on anything else.
Date parse_date(std::string_view text);
std::string format_date(const Date& d);

enum class ConsentCode : uint8_t
{
    NRES,
    GRU_CC,
    HMB_CC,
    POA,
    DS_CC,
};
inline constexpr ConsentCode all_consent_codes[] = {
    ConsentCode::NRES, ConsentCode::GRU_CC, ConsentCode::HMB_CC, ConsentCode::POA, ConsentCode::DS_CC};

struct ConsentPrimaryCategory
{
    ConsentCode code = ConsentCode::NRES;
    /// Normalized (trimmed, lower-case). Non-empty exactly when code == DS_CC.
    std::string disease_tag;

    /// Normalizes the tag and validates. Throws MalformedDiseaseTag.
    static ConsentPrimaryCategory make(ConsentCode code, std::string_view disease_tag = {});
    void validate() const;

    friend bool operator==(const ConsentPrimaryCategory&, const ConsentPrimaryCategory&) = default;
};

enum class SecondaryKind : uint8_t
{
    NonProfitOnly,
    GeographicRestriction,
    TimeLimit,
};

struct ConsentSecondaryCategory
{
    SecondaryKind kind = SecondaryKind::NonProfitOnly;
    std::set<std::string> geography_blocklist;  ///< upper-case region codes
    std::optional<Date> expiry;

    static ConsentSecondaryCategory non_profit_only();
    static ConsentSecondaryCategory geographic_restriction(const std::set<std::string>& regions);
    static ConsentSecondaryCategory time_limit(Date expiry);
    void validate() const;

    friend bool operator==(const ConsentSecondaryCategory&, const ConsentSecondaryCategory&) = default;
};

using ConsentCategory = std::variant<ConsentPrimaryCategory, ConsentSecondaryCategory>;

struct ConsentStatement
{
    std::optional<ConsentPrimaryCategory> primary;
    std::vector<ConsentSecondaryCategory> secondary;  ///< kinds unique
    std::set<std::string> requirements;

    /// Throws Error{Errc::InvalidStatement} on a broken invariant.
    void validate() const;
    [[nodiscard]] const ConsentSecondaryCategory* find(SecondaryKind kind) const noexcept;
    [[nodiscard]] bool has(SecondaryKind kind) const noexcept { return find(kind) != nullptr; }

    friend bool operator==(const ConsentStatement&, const ConsentStatement&) = default;
};

/// Parses one consent token: NRES, GRU-CC, HMB-CC, POA, DS-<tag>-CC, or a secondary token
/// NPU, GS-<REGION>[+<REGION>...], TS-<YYYY-MM-DD>. Case-insensitive.
/// Throws UnknownCode or MalformedDiseaseTag.
ConsentCategory parse_consent_code(std::string_view text);

std::string render_consent_code(const ConsentPrimaryCategory& cat);
std::string render_consent_code(const ConsentSecondaryCategory& cat);
std::string render_consent_code(const ConsentCategory& cat);

/// Comma-separated consent tokens; exactly one primary, secondaries after it, and
/// requirement tags written as REQ:<tag>.
ConsentStatement parse_consent_statement(std::string_view text);
std::string render_consent_statement(const ConsentStatement& s);

enum class PurposeCode : uint8_t
{
    GRU,
    HMB,
    CC,
};
inline constexpr PurposeCode all_purpose_codes[] = {PurposeCode::GRU, PurposeCode::HMB, PurposeCode::CC};

enum class SubpurposeCode : uint8_t
{
    NMDS,
    RS,
    PO,
    ANS,
    HMB_SUB,
    FB,
    GSO,
    DD,
    DS_SUB,
    AGE,
    GEN,
    DSO,
    DS_CLIN,
};
inline constexpr SubpurposeCode all_subpurpose_codes[] = {SubpurposeCode::NMDS, SubpurposeCode::RS,
    SubpurposeCode::PO, SubpurposeCode::ANS, SubpurposeCode::HMB_SUB, SubpurposeCode::FB,
    SubpurposeCode::GSO, SubpurposeCode::DD, SubpurposeCode::DS_SUB, SubpurposeCode::AGE,
    SubpurposeCode::GEN, SubpurposeCode::DSO, SubpurposeCode::DS_CLIN};

PurposeCode parent_of(SubpurposeCode code) noexcept;
/// RS, DS_SUB and DS_CLIN may carry a disease tag.
bool accepts_disease_tag(SubpurposeCode code) noexcept;

struct PurposeSubcategory
{
    SubpurposeCode code = SubpurposeCode::NMDS;
    std::string disease_tag;  ///< normalized; may be empty

    static PurposeSubcategory make(SubpurposeCode code, std::string_view disease_tag = {});
    void validate() const;

    friend bool operator==(const PurposeSubcategory&, const PurposeSubcategory&) = default;
};

struct Cohort
{
    enum class Kind : uint8_t
    {
        Any,
        Healthy,
        Disease,
    };
    Kind kind = Kind::Any;
    std::string disease;  ///< normalized; non-empty iff kind == Disease

    static Cohort any() { return {}; }
    static Cohort healthy() { return {Kind::Healthy, {}}; }
    static Cohort disease_of(std::string_view tag);

    /// "any", "healthy", "disease:<tag>".
    static Cohort parse(std::string_view text);
    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const Cohort&, const Cohort&) = default;
};

struct PurposeStatement
{
    PurposeCode category = PurposeCode::GRU;
    std::vector<PurposeSubcategory> subcategories;
    bool profit_intent = false;
    std::string requester_geography;  ///< upper-case region code; empty = undeclared
    Cohort target_cohort;

    /// Throws Error{Errc::InvalidStatement} on a broken invariant.
    void validate() const;

    friend bool operator==(const PurposeStatement&, const PurposeStatement&) = default;
};

std::string_view render_purpose_code(PurposeCode code) noexcept;
PurposeCode parse_purpose_category(std::string_view text);
std::string render_subpurpose(const PurposeSubcategory& sub);
/// Parses a subcategory token in the context of its parent; "DS-<tag>" means DS_SUB under
/// HMB and DS_CLIN under CC.
PurposeSubcategory parse_subpurpose(PurposeCode parent, std::string_view text);

struct PurposeCodeText
{
    PurposeCode category;
    std::vector<PurposeSubcategory> subcategories;
};
/// "<CAT>[:<SUB>[,<SUB>...]]", e.g. "HMB:FB" or "HMB:DS-diabetes".
PurposeCodeText parse_purpose_code(std::string_view text);
std::string render_purpose_code(PurposeCode category, const std::vector<PurposeSubcategory>& subs);

/// Whether a primary consent category covers a purpose (category, optional subcategory).
/// Pure hierarchy decision; profit, geography, time and cohort are the matcher's business.
bool category_permits(const ConsentPrimaryCategory& consent, PurposeCode category,
    const std::optional<PurposeSubcategory>& sub);

/// Machine-readable vocabulary, shipped as data/vocabulary.json.
struct Vocabulary
{
    struct Entry
    {
        std::string code;
        std::string label;
        std::string parent;  ///< empty for top-level entries
        bool disease_tag = false;

        friend bool operator==(const Entry&, const Entry&) = default;
    };
    std::vector<Entry> consent_primary;
    std::vector<Entry> consent_secondary;
    std::vector<Entry> purpose_categories;
    std::vector<Entry> purpose_subcategories;

    [[nodiscard]] std::string to_json() const;
    static Vocabulary from_json(std::string_view text);
    static Vocabulary load(const std::filesystem::path& path);

    /// Whether a purpose subcategory token is listed under the given category.
    [[nodiscard]] bool lists_subcategory(std::string_view category, std::string_view code) const;

    friend bool operator==(const Vocabulary&, const Vocabulary&) = default;
};

Vocabulary builtin_vocabulary();
}  // namespace dynconsent::ontology
