#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "quest/profile/corpus.hpp"
#include "quest/profile/reference.hpp"

namespace quest::profile {

enum class ReportFormat { text, csv, json, svg };

/// Throws UnsupportedFormat for anything but text|csv|json|svg.
ReportFormat parse_report_format(std::string_view name);

std::string render_report(const CorpusProfile& profile, ReportFormat format);
std::string render_report(const std::vector<ProfileRow>& rows, ReportFormat format);
std::string render_report(const ProfileDelta& delta, ReportFormat format);

/// "80.4", "<1", "" for unknown.
std::string format_cell(const Cell& cell);

}  // namespace quest::profile
