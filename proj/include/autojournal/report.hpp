#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "autojournal/evaluator.hpp"
#include "autojournal/journal.hpp"

namespace autojournal::pipeline {

struct ReportRow {
  std::string participant;
  std::string date;
  journal::StreamTag stream = journal::StreamTag::Text;
  eval::EvalScores scores;
};

struct EvalReport {
  std::vector<ReportRow> rows;  // sorted by (participant, date, stream)

  void sort();
};

struct ParticipantMean {
  std::string participant;
  journal::StreamTag stream;
  double event_overall = 0.0;
  double feeling_overall = 0.0;
  std::size_t days = 0;
};

std::vector<ParticipantMean> participant_means(const EvalReport& report);

// Full-precision CSV; parse_report_csv(to_csv(r)) reproduces every value.
std::string to_csv(const EvalReport& report);
// Throws Error(MalformedReport).
EvalReport parse_report_csv(const std::string& text);
EvalReport read_report_csv(const std::filesystem::path& path);

// One day x {event, feeling} grid per stream, participants side by side,
// two decimals, with a per-participant mean row.
std::string render_report(const EvalReport& report);

}  // namespace autojournal::pipeline
