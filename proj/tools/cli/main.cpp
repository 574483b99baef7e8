// autojournal: generate, evaluate, report, inspect.
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "autojournal/error.hpp"
#include "autojournal/pipeline.hpp"
#include "autojournal/timefmt.hpp"

namespace aj = autojournal;
namespace pl = autojournal::pipeline;

namespace {

constexpr int kOk = 0;
constexpr int kPartial = 1;
constexpr int kConfig = 2;

struct Args {
  std::string config;
  std::string participant;
  std::string date;
  std::string stream;
  std::string report_csv;
  std::string dir;
};

pl::DayFilter make_filter(const Args& a) {
  pl::DayFilter f;
  if (!a.participant.empty()) f.participant = a.participant;
  if (!a.date.empty()) {
    if (!aj::parse_date(a.date)) throw aj::Error(aj::ErrorCode::ConfigError, "bad --date " + a.date);
    f.date = a.date;
  }
  if (!a.stream.empty()) {
    auto s = aj::journal::parse_stream_tag(a.stream);
    if (!s || *s == aj::journal::StreamTag::GroundTruth) {
      throw aj::Error(aj::ErrorCode::ConfigError, "bad --stream " + a.stream);
    }
    f.stream = *s;
  }
  return f;
}

int run_generate(const Args& a) {
  const auto cfg = pl::load_config(a.config);
  const auto manifest = pl::cmd_generate(cfg, make_filter(a));
  std::size_t failed = 0;
  for (const auto& e : manifest.entries) {
    if (e.ok) continue;
    ++failed;
    std::cerr << e.participant << " " << e.date << " " << aj::journal::to_string(e.stream) << ": " << e.error
              << "\n";
  }
  std::cout << "generated " << manifest.entries.size() - failed << "/" << manifest.entries.size()
            << " journals; manifest " << (cfg.out_dir / "manifest.json").string() << "\n";
  return failed ? kPartial : kOk;
}

int run_evaluate(const Args& a) {
  const auto cfg = pl::load_config(a.config);
  const auto result = pl::cmd_evaluate(cfg);
  for (const auto& err : result.errors) std::cerr << err << "\n";
  std::cout << "scored " << result.report.rows.size() << " rows; report " << (cfg.out_dir / "report.csv").string()
            << "\n";
  if (!result.report.rows.empty()) std::cout << pl::render_report(result.report);
  return result.errors.empty() ? kOk : kPartial;
}

void print_stats(const pl::InspectRow& row) {
  if (!row.stats) {
    std::printf("%-12s %-10s  error: %s\n", row.participant.c_str(), row.date.c_str(), row.error.c_str());
    return;
  }
  const auto& s = *row.stats;
  std::printf("%-12s %-10s  found %6zu  invalid %6zu  duplicate %6zu  retained %6zu\n", row.participant.c_str(),
              row.date.c_str(), s.total_found, s.invalid_dropped, s.duplicates_dropped, s.retained);
}

int run_inspect(const Args& a) {
  if (!a.dir.empty()) {
    pl::InspectRow row{"-", "-", std::nullopt, {}};
    try {
      row.stats = aj::ingest::load_stream(a.dir).stats;
    } catch (const std::exception& ex) {
      row.error = ex.what();
    }
    print_stats(row);
    return row.stats ? kOk : kPartial;
  }
  const auto cfg = pl::load_config(a.config);
  bool all_ok = true;
  for (const auto& row : pl::cmd_inspect(cfg, make_filter(a))) {
    print_stats(row);
    all_ok = all_ok && row.stats.has_value();
  }
  return all_ok ? kOk : kPartial;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Screenshot streams to daily journals, and journal scoring"};
  app.require_subcommand(1);
  Args args;

  auto* gen = app.add_subcommand("generate", "Build text and/or video journals");
  gen->add_option("--config", args.config, "YAML run config")->required();
  gen->add_option("--participant", args.participant);
  gen->add_option("--date", args.date, "YYYY-MM-DD");
  gen->add_option("--stream", args.stream)->check(CLI::IsMember({"text", "video"}));

  auto* ev = app.add_subcommand("evaluate", "Score generated journals against ground truth");
  ev->add_option("--config", args.config, "YAML run config")->required();

  auto* rep = app.add_subcommand("report", "Render a report.csv as tables");
  rep->add_option("report", args.report_csv)->required();

  auto* ins = app.add_subcommand("inspect", "Print ingest statistics");
  auto* cfg_opt = ins->add_option("--config", args.config, "YAML run config");
  ins->add_option("--dir", args.dir, "a single screenshot directory")->excludes(cfg_opt);
  ins->add_option("--participant", args.participant);
  ins->add_option("--date", args.date);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    if (*gen) return run_generate(args);
    if (*ev) return run_evaluate(args);
    if (*rep) {
      std::cout << pl::cmd_report(args.report_csv);
      return kOk;
    }
    if (ins->parsed()) {
      if (args.config.empty() && args.dir.empty()) {
        std::cerr << "inspect needs --config or --dir\n";
        return kConfig;
      }
      return run_inspect(args);
    }
  } catch (const aj::Error& e) {
    std::cerr << e.what() << "\n";
    return e.code() == aj::ErrorCode::ConfigError ? kConfig : kPartial;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kPartial;
  }
  return kConfig;
}
