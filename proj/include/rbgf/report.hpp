#pragma once

#include <string>
#include <vector>

#include "rbgf/coupling.hpp"

namespace rbgf {

inline const char* tool_version() { return "0.1.0"; }

/// JSON per the report schema {lemma, clause, samples, C_fit, pass}; one
/// object per clause, wrapped in a list.
std::string lemma_report_json(const LemmaReport& rep, std::uint64_t config_hash);

/// Writes text atomically (temp file in the same directory, then rename).
void write_text_atomic(const std::string& path, const std::string& content);

/// CSV with a header row, comma-delimited UTF-8.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

}  // namespace rbgf
