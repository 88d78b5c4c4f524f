#pragma once

#include <span>
#include <string>
#include <vector>

#include "scratchkit/attack.hpp"

namespace scratchkit {

// JSON-lines persistence for attack records: one record per line, schema
// versioned via a "v" field. Numbers round-trip exactly (shortest-exact
// formatting), so parsing a written file reproduces the records
// field-for-field.

inline constexpr int kRecordSchemaVersion = 1;

std::string record_to_json_line(const AttackRecord& record);
AttackRecord record_from_json_line(const std::string& line);

void write_records(const std::string& path,
                   std::span<const AttackRecord> records);
std::vector<AttackRecord> read_records(const std::string& path);

// Deterministic summary document: metrics only, no timestamps, keys sorted.
// Identical campaigns serialize byte-identically.
std::string summary_to_json(const CampaignSummary& summary);

}  // namespace scratchkit
