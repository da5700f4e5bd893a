// dynconsent: Consent-driven data sharing on a simulated ledger
// Copyright 2026 The dynconsent Authors.
// SPDX-License-Identifier: Apache-2.0

#include <dynconsent/errors.hpp>
#include <dynconsent/ontology.hpp>
#include <nlohmann/json.hpp>
#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace dynconsent::ontology
{
namespace
{
std::vector<std::string> split(std::string_view text, char sep)
{
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true)
    {
        const auto pos = text.find(sep, start);
        parts.emplace_back(text.substr(start, pos - start));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return parts;
}

bool is_region_code(std::string_view s) noexcept
{
    return !s.empty() && std::ranges::all_of(s, [](char c) {
        return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
    });
}
}  // namespace

Date parse_date(std::string_view text)
{
    const auto t = trim(text);
    int y = 0;
    unsigned m = 0;
    unsigned d = 0;
    const auto parse_field = [&](std::size_t off, std::size_t len, auto& out) {
        const auto* first = t.data() + off;
        const auto [ptr, ec] = std::from_chars(first, first + len, out);
        return ec == std::errc{} && ptr == first + len;
    };
    if (t.size() != 10 || t[4] != '-' || t[7] != '-' || !parse_field(0, 4, y) ||
        !parse_field(5, 2, m) || !parse_field(8, 2, d))
        throw Error{Errc::InvalidConfig, "bad date '" + t + "'"};
    const Date date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!date.ok())
        throw Error{Errc::InvalidConfig, "bad date '" + t + "'"};
    return date;
}

std::string format_date(const Date& d)
{
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
        static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
    return buf;
}

ConsentPrimaryCategory ConsentPrimaryCategory::make(ConsentCode code, std::string_view disease_tag)
{
    ConsentPrimaryCategory c{code, normalize_tag(disease_tag)};
    c.validate();
    return c;
}

void ConsentPrimaryCategory::validate() const
{
    if ((code == ConsentCode::DS_CC) == disease_tag.empty())
        throw Error{Errc::MalformedDiseaseTag,
            code == ConsentCode::DS_CC ? "DS consent requires a disease tag" :
                                         "disease tag given for a non-DS consent"};
    if (disease_tag != normalize_tag(disease_tag))
        throw Error{Errc::MalformedDiseaseTag, "disease tag not normalized"};
}

ConsentSecondaryCategory ConsentSecondaryCategory::non_profit_only()
{
    return {SecondaryKind::NonProfitOnly, {}, std::nullopt};
}

ConsentSecondaryCategory ConsentSecondaryCategory::geographic_restriction(
    const std::set<std::string>& regions)
{
    ConsentSecondaryCategory c{SecondaryKind::GeographicRestriction, {}, std::nullopt};
    for (const auto& r : regions)
        c.geography_blocklist.insert(to_upper(trim(r)));
    c.validate();
    return c;
}

ConsentSecondaryCategory ConsentSecondaryCategory::time_limit(Date expiry)
{
    ConsentSecondaryCategory c{SecondaryKind::TimeLimit, {}, expiry};
    c.validate();
    return c;
}

void ConsentSecondaryCategory::validate() const
{
    const bool geo = kind == SecondaryKind::GeographicRestriction;
    const bool time = kind == SecondaryKind::TimeLimit;
    if (geo != !geography_blocklist.empty())
        throw Error{Errc::InvalidStatement, "geography blocklist only on, and required for, GS"};
    if (time != expiry.has_value())
        throw Error{Errc::InvalidStatement, "expiry only on, and required for, TS"};
    if (expiry && !expiry->ok())
        throw Error{Errc::InvalidStatement, "invalid expiry date"};
    for (const auto& r : geography_blocklist)
        if (!is_region_code(r))
            throw Error{Errc::InvalidStatement, "bad region code '" + r + "'"};
}

void ConsentStatement::validate() const
{
    if (primary)
        primary->validate();
    else if (!secondary.empty())
        throw Error{Errc::InvalidStatement, "secondary categories require a primary category"};
    std::set<SecondaryKind> kinds;
    for (const auto& s : secondary)
    {
        s.validate();
        if (!kinds.insert(s.kind).second)
            throw Error{Errc::InvalidStatement, "duplicate secondary kind"};
    }
    for (const auto& r : requirements)
        if (r.empty() || r != trim(r))
            throw Error{Errc::InvalidStatement, "bad requirement tag '" + r + "'"};
}

const ConsentSecondaryCategory* ConsentStatement::find(SecondaryKind kind) const noexcept
{
    const auto it = std::ranges::find(secondary, kind, &ConsentSecondaryCategory::kind);
    return it == secondary.end() ? nullptr : &*it;
}

ConsentCategory parse_consent_code(std::string_view text)
{
    const auto token = trim(text);
    const auto upper = to_upper(token);

    if (upper == "NRES")
        return ConsentPrimaryCategory{ConsentCode::NRES, {}};
    if (upper == "GRU-CC")
        return ConsentPrimaryCategory{ConsentCode::GRU_CC, {}};
    if (upper == "HMB-CC")
        return ConsentPrimaryCategory{ConsentCode::HMB_CC, {}};
    if (upper == "POA")
        return ConsentPrimaryCategory{ConsentCode::POA, {}};
    if (upper == "NPU")
        return ConsentSecondaryCategory::non_profit_only();

    if (upper == "DS" || upper == "DS-CC" || upper.starts_with("DS-"))
    {
        if (upper.size() < 7 || !upper.ends_with("-CC"))
            throw Error{Errc::MalformedDiseaseTag, "expected DS-<tag>-CC, got '" + token + "'"};
        const auto tag = normalize_tag(std::string_view{token}.substr(3, token.size() - 6));
        if (tag.empty() || tag.front() == '-' || tag.back() == '-')
            throw Error{Errc::MalformedDiseaseTag, "empty disease tag in '" + token + "'"};
        return ConsentPrimaryCategory{ConsentCode::DS_CC, tag};
    }
    if (upper.starts_with("GS-"))
    {
        std::set<std::string> regions;
        for (const auto& r : split(std::string_view{upper}.substr(3), '+'))
        {
            if (!is_region_code(r))
                throw Error{Errc::UnknownCode, "bad region in '" + token + "'"};
            regions.insert(r);
        }
        return ConsentSecondaryCategory::geographic_restriction(regions);
    }
    if (upper.starts_with("TS-"))
    {
        try
        {
            return ConsentSecondaryCategory::time_limit(parse_date(std::string_view{upper}.substr(3)));
        }
        catch (const Error&)
        {
            throw Error{Errc::UnknownCode, "bad time limit '" + token + "'"};
        }
    }
    throw Error{Errc::UnknownCode, "'" + token + "'"};
}

std::string render_consent_code(const ConsentPrimaryCategory& cat)
{
    switch (cat.code)
    {
    case ConsentCode::NRES: return "NRES";
    case ConsentCode::GRU_CC: return "GRU-CC";
    case ConsentCode::HMB_CC: return "HMB-CC";
    case ConsentCode::POA: return "POA";
    case ConsentCode::DS_CC: return "DS-" + cat.disease_tag + "-CC";
    }
    return {};
}

std::string render_consent_code(const ConsentSecondaryCategory& cat)
{
    switch (cat.kind)
    {
    case SecondaryKind::NonProfitOnly: return "NPU";
    case SecondaryKind::GeographicRestriction:
    {
        std::string s = "GS-";
        bool first = true;
        for (const auto& r : cat.geography_blocklist)
        {
            if (!first)
                s += '+';
            s += r;
            first = false;
        }
        return s;
    }
    case SecondaryKind::TimeLimit: return "TS-" + format_date(*cat.expiry);
    }
    return {};
}

std::string render_consent_code(const ConsentCategory& cat)
{
    return std::visit([](const auto& c) { return render_consent_code(c); }, cat);
}

ConsentStatement parse_consent_statement(std::string_view text)
{
    ConsentStatement s;
    for (const auto& raw : split(text, ','))
    {
        const auto token = trim(raw);
        if (token.empty())
            continue;
        if (to_upper(token).starts_with("REQ:"))
        {
            const auto tag = trim(std::string_view{token}.substr(4));
            if (tag.empty())
                throw Error{Errc::InvalidStatement, "empty requirement tag"};
            s.requirements.insert(tag);
            continue;
        }
        auto cat = parse_consent_code(token);
        if (auto* p = std::get_if<ConsentPrimaryCategory>(&cat))
        {
            if (s.primary)
                throw Error{Errc::InvalidStatement, "more than one primary category"};
            s.primary = std::move(*p);
        }
        else
        {
            s.secondary.push_back(std::get<ConsentSecondaryCategory>(std::move(cat)));
        }
    }
    std::ranges::sort(s.secondary, {}, &ConsentSecondaryCategory::kind);
    s.validate();
    return s;
}

std::string render_consent_statement(const ConsentStatement& s)
{
    std::string out = s.primary ? render_consent_code(*s.primary) : std::string{};
    for (const auto& sec : s.secondary)
        out += (out.empty() ? "" : ",") + render_consent_code(sec);
    for (const auto& r : s.requirements)
        out += (out.empty() ? "REQ:" : ",REQ:") + r;
    return out;
}

PurposeCode parent_of(SubpurposeCode code) noexcept
{
    switch (code)
    {
    case SubpurposeCode::NMDS:
    case SubpurposeCode::RS:
    case SubpurposeCode::PO:
    case SubpurposeCode::ANS:
    case SubpurposeCode::HMB_SUB: return PurposeCode::GRU;
    case SubpurposeCode::FB:
    case SubpurposeCode::GSO:
    case SubpurposeCode::DD:
    case SubpurposeCode::DS_SUB:
    case SubpurposeCode::AGE:
    case SubpurposeCode::GEN: return PurposeCode::HMB;
    case SubpurposeCode::DSO:
    case SubpurposeCode::DS_CLIN: return PurposeCode::CC;
    }
    return PurposeCode::GRU;
}

bool accepts_disease_tag(SubpurposeCode code) noexcept
{
    return code == SubpurposeCode::RS || code == SubpurposeCode::DS_SUB ||
           code == SubpurposeCode::DS_CLIN;
}

PurposeSubcategory PurposeSubcategory::make(SubpurposeCode code, std::string_view disease_tag)
{
    PurposeSubcategory s{code, normalize_tag(disease_tag)};
    s.validate();
    return s;
}

void PurposeSubcategory::validate() const
{
    if (!disease_tag.empty() && !accepts_disease_tag(code))
        throw Error{Errc::MalformedDiseaseTag, "subcategory does not take a disease tag"};
    if (disease_tag != normalize_tag(disease_tag))
        throw Error{Errc::MalformedDiseaseTag, "disease tag not normalized"};
}

Cohort Cohort::disease_of(std::string_view tag)
{
    Cohort c{Kind::Disease, normalize_tag(tag)};
    if (c.disease.empty())
        throw Error{Errc::InvalidStatement, "disease cohort requires a tag"};
    return c;
}

Cohort Cohort::parse(std::string_view text)
{
    const auto t = normalize_tag(text);
    if (t == "any")
        return any();
    if (t == "healthy")
        return healthy();
    if (t.starts_with("disease:"))
        return disease_of(std::string_view{t}.substr(8));
    throw Error{Errc::UnknownCode, "cohort '" + t + "'"};
}

std::string Cohort::to_string() const
{
    switch (kind)
    {
    case Kind::Any: return "any";
    case Kind::Healthy: return "healthy";
    case Kind::Disease: return "disease:" + disease;
    }
    return {};
}

void PurposeStatement::validate() const
{
    for (std::size_t i = 0; i < subcategories.size(); ++i)
    {
        const auto& s = subcategories[i];
        s.validate();
        if (parent_of(s.code) != category)
            throw Error{Errc::InvalidStatement,
                render_subpurpose(s) + " is not a subcategory of " +
                    std::string{render_purpose_code(category)}};
        for (std::size_t j = 0; j < i; ++j)
            if (subcategories[j] == s)
                throw Error{Errc::InvalidStatement, "duplicate subcategory"};
    }
    if (target_cohort.kind == Cohort::Kind::Disease && target_cohort.disease.empty())
        throw Error{Errc::InvalidStatement, "disease cohort requires a tag"};
    if (target_cohort.kind != Cohort::Kind::Disease && !target_cohort.disease.empty())
        throw Error{Errc::InvalidStatement, "disease tag on a non-disease cohort"};
    if (!requester_geography.empty() && !is_region_code(requester_geography))
        throw Error{Errc::InvalidStatement, "bad requester geography"};
}

std::string_view render_purpose_code(PurposeCode code) noexcept
{
    switch (code)
    {
    case PurposeCode::GRU: return "GRU";
    case PurposeCode::HMB: return "HMB";
    case PurposeCode::CC: return "CC";
    }
    return {};
}

PurposeCode parse_purpose_category(std::string_view text)
{
    const auto upper = to_upper(trim(text));
    for (const auto c : all_purpose_codes)
        if (upper == render_purpose_code(c))
            return c;
    throw Error{Errc::UnknownCode, "purpose category '" + trim(text) + "'"};
}

std::string render_subpurpose(const PurposeSubcategory& sub)
{
    const auto tagged = [&](std::string base) {
        return sub.disease_tag.empty() ? base : base + "-" + sub.disease_tag;
    };
    switch (sub.code)
    {
    case SubpurposeCode::NMDS: return "NMDS";
    case SubpurposeCode::RS: return tagged("RS");
    case SubpurposeCode::PO: return "PO";
    case SubpurposeCode::ANS: return "ANS";
    case SubpurposeCode::HMB_SUB: return "HMB";
    case SubpurposeCode::FB: return "FB";
    case SubpurposeCode::GSO: return "GSO";
    case SubpurposeCode::DD: return "DD";
    case SubpurposeCode::DS_SUB: return tagged("DS");
    case SubpurposeCode::AGE: return "AGE";
    case SubpurposeCode::GEN: return "GEN";
    case SubpurposeCode::DSO: return "DSO";
    case SubpurposeCode::DS_CLIN: return tagged("DS");
    }
    return {};
}

PurposeSubcategory parse_subpurpose(PurposeCode parent, std::string_view text)
{
    const auto token = trim(text);
    const auto upper = to_upper(token);
    const auto dash = upper.find('-');
    const auto head = upper.substr(0, dash);
    const auto tag = dash == std::string::npos ? std::string{} : normalize_tag(token.substr(dash + 1));
    if (dash != std::string::npos && tag.empty())
        throw Error{Errc::MalformedDiseaseTag, "empty disease tag in '" + token + "'"};

    std::optional<SubpurposeCode> code;
    if (head == "DS")
        code = parent == PurposeCode::CC ? SubpurposeCode::DS_CLIN : SubpurposeCode::DS_SUB;
    else if (head == "HMB")
        code = SubpurposeCode::HMB_SUB;
    else
    {
        for (const auto c : all_subpurpose_codes)
            if (c != SubpurposeCode::HMB_SUB && !accepts_disease_tag(c) &&
                render_subpurpose({c, {}}) == head)
                code = c;
        if (head == "RS")
            code = SubpurposeCode::RS;
    }
    if (!code || parent_of(*code) != parent)
        throw Error{Errc::UnknownCode, "'" + token + "' under " + std::string{render_purpose_code(parent)}};
    return PurposeSubcategory::make(*code, tag);
}

PurposeCodeText parse_purpose_code(std::string_view text)
{
    const auto t = trim(text);
    const auto colon = t.find(':');
    PurposeCodeText out{parse_purpose_category(t.substr(0, colon)), {}};
    if (colon != std::string::npos)
    {
        for (const auto& part : split(std::string_view{t}.substr(colon + 1), ','))
        {
            if (trim(part).empty())
                throw Error{Errc::UnknownCode, "empty subcategory in '" + t + "'"};
            out.subcategories.push_back(parse_subpurpose(out.category, part));
        }
    }
    return out;
}

std::string render_purpose_code(PurposeCode category, const std::vector<PurposeSubcategory>& subs)
{
    std::string s{render_purpose_code(category)};
    for (std::size_t i = 0; i < subs.size(); ++i)
        s += (i == 0 ? ":" : ",") + render_subpurpose(subs[i]);
    return s;
}

bool category_permits(const ConsentPrimaryCategory& consent, PurposeCode category,
    const std::optional<PurposeSubcategory>& sub)
{
    switch (consent.code)
    {
    case ConsentCode::NRES:
    case ConsentCode::GRU_CC:
        return true;
    case ConsentCode::HMB_CC:
        // Health research in the broad sense; population/ancestry and methods work excluded.
        if (category != PurposeCode::GRU)
            return true;
        return sub && (sub->code == SubpurposeCode::HMB_SUB || sub->code == SubpurposeCode::RS);
    case ConsentCode::POA:
        return sub && (sub->code == SubpurposeCode::PO || sub->code == SubpurposeCode::ANS);
    case ConsentCode::DS_CC:
        return sub && accepts_disease_tag(sub->code) && !sub->disease_tag.empty() &&
               sub->disease_tag == consent.disease_tag;
    }
    return false;
}

std::string Vocabulary::to_json() const
{
    const auto dump = [](const std::vector<Entry>& entries) {
        auto arr = nlohmann::ordered_json::array();
        for (const auto& e : entries)
        {
            nlohmann::ordered_json j;
            j["code"] = e.code;
            j["label"] = e.label;
            if (!e.parent.empty())
                j["parent"] = e.parent;
            j["disease_tag"] = e.disease_tag;
            arr.push_back(std::move(j));
        }
        return arr;
    };
    nlohmann::ordered_json doc;
    doc["consent_primary"] = dump(consent_primary);
    doc["consent_secondary"] = dump(consent_secondary);
    doc["purpose_categories"] = dump(purpose_categories);
    doc["purpose_subcategories"] = dump(purpose_subcategories);
    return doc.dump(2) + "\n";
}

Vocabulary Vocabulary::from_json(std::string_view text)
{
    Vocabulary v;
    try
    {
        const auto doc = nlohmann::json::parse(text);
        const auto load = [&](const char* key, std::vector<Entry>& out) {
            for (const auto& j : doc.at(key))
                out.push_back({j.at("code").get<std::string>(), j.at("label").get<std::string>(),
                    j.value("parent", std::string{}), j.value("disease_tag", false)});
        };
        load("consent_primary", v.consent_primary);
        load("consent_secondary", v.consent_secondary);
        load("purpose_categories", v.purpose_categories);
        load("purpose_subcategories", v.purpose_subcategories);
    }
    catch (const nlohmann::json::exception& e)
    {
        throw Error{Errc::InvalidConfig, std::string{"vocabulary: "} + e.what()};
    }
    return v;
}

Vocabulary Vocabulary::load(const std::filesystem::path& path)
{
    std::ifstream in{path};
    if (!in)
        throw Error{Errc::IoFailure, "cannot open " + path.string()};
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

bool Vocabulary::lists_subcategory(std::string_view category, std::string_view code) const
{
    return std::ranges::any_of(purpose_subcategories,
        [&](const Entry& e) { return e.parent == category && e.code == code; });
}

Vocabulary builtin_vocabulary()
{
    Vocabulary v;
    v.consent_primary = {
        {"NRES", "No restrictions", "", false},
        {"GRU-CC", "General research use and clinical care", "", false},
        {"HMB-CC", "Health, Medical or Biomedical research and clinical care", "", false},
        {"POA", "Population and ancestry research", "", false},
        {"DS-[XX]-CC", "Disease specific research and clinical care", "", true},
    };
    v.consent_secondary = {
        {"NPU", "Non-profit use only", "", false},
        {"GS-[REGIONS]", "Geographical restriction (blocked regions)", "", false},
        {"TS-[YYYY-MM-DD]", "Time limit on use", "", false},
    };
    v.purpose_categories = {
        {"GRU", "Research purpose", "", false},
        {"HMB", "Health, Medical or Biomedical research purpose", "", false},
        {"CC", "Clinical purpose", "", false},
    };
    v.purpose_subcategories = {
        {"NMDS", "Methods development", "GRU", false},
        {"RS", "Reference or control material", "GRU", true},
        {"PO", "Research concerning populations", "GRU", false},
        {"ANS", "Ancestry research", "GRU", false},
        {"HMB", "Biomedical research", "GRU", false},
        {"FB", "Fundamental biology", "HMB", false},
        {"GSO", "Genetics", "HMB", false},
        {"DD", "Drug development", "HMB", false},
        {"DS", "Research concerning a disease", "HMB", true},
        {"AGE", "Age categories", "HMB", false},
        {"GEN", "Gender categories", "HMB", false},
        {"DSO", "Decision support", "CC", false},
        {"DS", "Disease support", "CC", true},
    };
    return v;
}
}  // namespace dynconsent::ontology
