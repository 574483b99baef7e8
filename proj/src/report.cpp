#include "autojournal/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "autojournal/error.hpp"

namespace autojournal::pipeline {

namespace {

constexpr const char* kHeader =
    "participant,date,stream,event_t,event_p,event_overall,feeling_t,feeling_p,feeling_overall,"
    "event_warning,feeling_warning";

int stream_rank(journal::StreamTag s) { return s == journal::StreamTag::Text ? 0 : 1; }

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt2(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  std::stringstream ss(line);
  while (std::getline(ss, cur, ',')) fields.push_back(cur);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_score(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !(v >= -1.0 && v <= 1.0)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::MalformedReport, "line " + std::to_string(line) + ": bad score \"" + s + "\"");
  }
}

bool parse_flag(const std::string& s, std::size_t line) {
  if (s == "0") return false;
  if (s == "1") return true;
  throw Error(ErrorCode::MalformedReport, "line " + std::to_string(line) + ": bad flag \"" + s + "\"");
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string rstrip(std::string s) {
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s;
}

}  // namespace

void EvalReport::sort() {
  std::sort(rows.begin(), rows.end(), [](const ReportRow& l, const ReportRow& r) {
    return std::make_tuple(l.participant, l.date, stream_rank(l.stream)) <
           std::make_tuple(r.participant, r.date, stream_rank(r.stream));
  });
}

std::vector<ParticipantMean> participant_means(const EvalReport& report) {
  std::map<std::pair<std::string, int>, ParticipantMean> acc;
  for (const auto& row : report.rows) {
    auto& m = acc[{row.participant, stream_rank(row.stream)}];
    m.participant = row.participant;
    m.stream = row.stream;
    m.event_overall += row.scores.event_overall;
    m.feeling_overall += row.scores.feeling_overall;
    ++m.days;
  }
  std::vector<ParticipantMean> out;
  for (auto& [key, m] : acc) {
    m.event_overall /= static_cast<double>(m.days);
    m.feeling_overall /= static_cast<double>(m.days);
    out.push_back(m);
  }
  return out;
}

std::string to_csv(const EvalReport& report) {
  std::string out = std::string(kHeader) + "\n";
  for (const auto& r : report.rows) {
    const auto& s = r.scores;
    out += r.participant + "," + r.date + "," + std::string(journal::to_string(r.stream)) + "," +
           fmt17(s.event_t) + "," + fmt17(s.event_p) + "," + fmt17(s.event_overall) + "," +
           fmt17(s.feeling_t) + "," + fmt17(s.feeling_p) + "," + fmt17(s.feeling_overall) + "," +
           (s.event_warning ? "1" : "0") + "," + (s.feeling_warning ? "1" : "0") + "\n";
  }
  return out;
}

EvalReport parse_report_csv(const std::string& text) {
  std::stringstream ss(text);
  std::string line;
  if (!std::getline(ss, line) || line != kHeader) {
    throw Error(ErrorCode::MalformedReport, "missing or unexpected CSV header");
  }
  EvalReport report;
  for (std::size_t n = 2; std::getline(ss, line); ++n) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 11) {
      throw Error(ErrorCode::MalformedReport, "line " + std::to_string(n) + ": expected 11 fields");
    }
    const auto stream = journal::parse_stream_tag(f[2]);
    if (!stream || *stream == journal::StreamTag::GroundTruth) {
      throw Error(ErrorCode::MalformedReport, "line " + std::to_string(n) + ": bad stream \"" + f[2] + "\"");
    }
    if (f[0].empty() || f[1].empty()) {
      throw Error(ErrorCode::MalformedReport, "line " + std::to_string(n) + ": empty participant or date");
    }
    ReportRow row{f[0], f[1], *stream, {}};
    row.scores = {parse_score(f[3], n), parse_score(f[4], n), parse_score(f[6], n), parse_score(f[7], n),
                  parse_score(f[5], n), parse_score(f[8], n), parse_flag(f[9], n), parse_flag(f[10], n)};
    report.rows.push_back(std::move(row));
  }
  if (report.rows.empty()) throw Error(ErrorCode::MalformedReport, "report has no rows");
  report.sort();
  return report;
}

EvalReport read_report_csv(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::MalformedReport, "cannot read " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_report_csv(ss.str());
}

std::string render_report(const EvalReport& input) {
  if (input.rows.empty()) throw Error(ErrorCode::MalformedReport, "report has no rows");
  EvalReport report = input;
  report.sort();
  const auto means = participant_means(report);

  std::string out;
  for (const auto stream : {journal::StreamTag::Text, journal::StreamTag::Video}) {
    // participant -> dates in order -> row
    std::vector<std::string> participants;
    std::map<std::string, std::vector<const ReportRow*>> by_participant;
    for (const auto& row : report.rows) {
      if (row.stream != stream) continue;
      if (!by_participant.contains(row.participant)) participants.push_back(row.participant);
      by_participant[row.participant].push_back(&row);
    }
    if (participants.empty()) continue;
    std::size_t days = 0;
    for (const auto& [p, rows] : by_participant) days = std::max(days, rows.size());

    constexpr std::size_t kDayWidth = 6;
    std::vector<std::size_t> block;
    for (const auto& p : participants) block.push_back(std::max<std::size_t>(16, p.size() + 2));

    if (!out.empty()) out += "\n";
    out += "Stream: " + std::string(journal::to_string(stream)) + "\n";
    std::string names = pad("", kDayWidth);
    std::string header = pad("Day", kDayWidth);
    for (std::size_t k = 0; k < participants.size(); ++k) {
      names += pad(participants[k], block[k]);
      header += pad("event", block[k] / 2) + pad("feeling", block[k] - block[k] / 2);
    }
    out += rstrip(names) + "\n" + rstrip(header) + "\n";
    for (std::size_t d = 0; d < days; ++d) {
      std::string line = pad(std::to_string(d + 1), kDayWidth);
      for (std::size_t k = 0; k < participants.size(); ++k) {
        const auto& rows = by_participant[participants[k]];
        if (d < rows.size()) {
          line += pad(fmt2(rows[d]->scores.event_overall), block[k] / 2) +
                  pad(fmt2(rows[d]->scores.feeling_overall), block[k] - block[k] / 2);
        } else {
          line += pad("-", block[k] / 2) + pad("-", block[k] - block[k] / 2);
        }
      }
      out += rstrip(line) + "\n";
    }
    std::string mean_line = pad("Mean", kDayWidth);
    for (std::size_t k = 0; k < participants.size(); ++k) {
      const auto it = std::find_if(means.begin(), means.end(), [&](const ParticipantMean& m) {
        return m.participant == participants[k] && m.stream == stream;
      });
      mean_line += pad(fmt2(it->event_overall), block[k] / 2) + pad(fmt2(it->feeling_overall), block[k] - block[k] / 2);
    }
    out += rstrip(mean_line) + "\n";
  }
  return out;
}

}  // namespace autojournal::pipeline
