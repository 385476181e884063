#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "tos/engine.hpp"

namespace fs = std::filesystem;

namespace {

int write_outputs(const tos::RunOutputs& outputs, const std::string& out_dir) {
  fs::create_directories(out_dir);
  for (const auto& [name, content] : outputs.files)
    tos::write_text_file((fs::path(out_dir) / name).string(), content);
  return 0;
}

int cmd_run(const std::string& scenario, const std::string& layout, const std::string& tariffs,
            const std::string& master, const std::string& out_dir, tos::i64 seed,
            const std::string& snapshot_at, const std::string& resume,
            const std::string& user) {
  tos::Engine engine = [&] {
    if (!resume.empty()) return tos::Engine::restore(tos::read_text_file(resume));
    std::string master_dir = master;
    if (master_dir.empty())
      master_dir = (fs::path(scenario).parent_path() / "master").string();
    return tos::Engine(tos::gather_inputs(scenario, layout, tariffs, master_dir, seed));
  }();

  {  // the run itself is a gated command
    tos::AuditLog gate_log;
    if (engine.master().find_user(user)) {
      if (tos::authorize(user, "run", engine.master(), gate_log, 0) ==
          tos::AuthOutcome::Deny) {
        std::cerr << "user " << user << " is not allowed to run scenarios\n";
        return 1;
      }
    }
  }

  if (!snapshot_at.empty()) engine.set_snapshot_at(tos::parse_iso8601(snapshot_at));
  tos::RunOutputs outputs = engine.run();
  write_outputs(outputs, out_dir);
  if (!engine.pending_snapshot().empty())
    tos::write_text_file((fs::path(out_dir) / "snapshot.qsnap").string(),
                         engine.pending_snapshot());
  std::cout << "run complete: " << outputs.files.size() << " output files in " << out_dir
            << "\n";
  return 0;
}

int cmd_validate_edi(const std::string& path) {
  auto doc = tos::tokenize(tos::read_text_file(path));
  std::cout << "segments: " << doc.segments.size() << "\n";
  std::cout << "message type: "
            << (doc.message_type().empty() ? "(none)" : doc.message_type()) << "\n";
  tos::EdiMapping mapping = tos::EdiMapping::builtin();
  if (doc.message_type() == "BAPLIE") {
    auto parsed = tos::parse_baplie(doc, mapping);
    std::cout << "stow entries: " << parsed.entries.size() << "\n";
    for (const auto& w : parsed.warnings) std::cout << "warning: " << w << "\n";
  } else if (doc.message_type() == "MOVINS" || doc.message_type() == "PRESTOW") {
    auto parsed = tos::parse_movins(doc, mapping);
    std::cout << "instructions: " << parsed.instructions.size() << "\n";
    for (const auto& w : parsed.warnings) std::cout << "warning: " << w << "\n";
  } else if (doc.message_type() == "COARRI") {
    std::cout << "confirmed moves: " << tos::parse_coarri(doc).size() << "\n";
  } else if (doc.message_type() == "CODECO") {
    std::cout << "gate events: " << tos::parse_codeco(doc).size() << "\n";
  }
  std::cout << "envelope: ok\n";
  return 0;
}

int cmd_report(const std::string& snapshot_path, const std::string& period,
               const std::string& out_dir) {
  auto range = tos::split(period, '.');
  // accepted form: A..B with ISO-8601 endpoints
  if (range.size() != 3 || !range[1].empty())
    tos::fail(tos::Err::ParseError, "period must be <from>..<to>");
  tos::TimeMs from = tos::parse_iso8601(range[0]);
  tos::TimeMs to = tos::parse_iso8601(range[2]);

  tos::Engine engine = tos::Engine::restore(tos::read_text_file(snapshot_path));
  tos::KpiReport kpi =
      tos::compute_kpis(engine.history(), engine.yard(), engine.layout(), from, to);
  if (out_dir.empty()) {
    std::cout << tos::kpi_to_kv(kpi);
  } else {
    fs::create_directories(out_dir);
    tos::write_text_file((fs::path(out_dir) / "kpi.txt").string(), tos::kpi_to_kv(kpi));
    tos::write_text_file((fs::path(out_dir) / "kpi_report.psv").string(), tos::kpi_to_psv(kpi));
  }
  return 0;
}

int cmd_archive(const std::string& records_path, const std::string& cutoff_now,
                const std::string& out_dir) {
  auto records = tos::import_longterm(tos::read_text_file(records_path));
  tos::TimeMs now = tos::parse_iso8601(cutoff_now);
  tos::ArchivePartition parts = tos::partition_archive(records, now);
  fs::create_directories(out_dir);
  tos::write_text_file((fs::path(out_dir) / "operational.psv").string(),
                       tos::export_longterm(parts.operational));
  tos::write_text_file((fs::path(out_dir) / "midterm.psv").string(),
                       tos::export_longterm(parts.midterm));
  tos::write_text_file((fs::path(out_dir) / "longterm.psv").string(),
                       tos::export_longterm(parts.longterm));
  std::cout << "operational: " << parts.operational.size()
            << ", midterm: " << parts.midterm.size() << ", longterm: " << parts.longterm.size()
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quayside - container terminal operations engine"};
  app.require_subcommand(1);

  std::string scenario, layout, tariffs, master, out_dir = "out", seed_str;
  std::string snapshot_at, resume, user = "admin";
  tos::i64 seed = 0;

  auto* run = app.add_subcommand("run", "run a scenario end to end");
  run->add_option("--scenario", scenario, "scenario file");
  run->add_option("--layout", layout, "terminal definition file");
  run->add_option("--tariffs", tariffs, "tariff/contract file");
  run->add_option("--master", master, "master data directory (default: <scenario dir>/master)");
  run->add_option("--out", out_dir, "output directory")->required();
  run->add_option("--seed", seed, "seed recorded in the summary (generators only)");
  run->add_option("--snapshot-at", snapshot_at, "write snapshot.qsnap before this time");
  run->add_option("--resume", resume, "resume from a snapshot file instead of a fresh start");
  run->add_option("--user", user, "acting user for authorization");

  std::string edi_path;
  auto* validate = app.add_subcommand("validate-edi", "tokenize and check an EDIFACT file");
  validate->add_option("file", edi_path, "EDIFACT file")->required();

  std::string snap_path, period, report_out;
  auto* report = app.add_subcommand("report", "KPI report from a snapshot");
  report->add_option("--snapshot", snap_path, "snapshot file")->required();
  report->add_option("--period", period, "reporting period <from>..<to>")->required();
  report->add_option("--out", report_out, "output directory (default: stdout)");

  std::string records_path, cutoff_now, archive_out = "archive_out";
  auto* archive = app.add_subcommand("archive", "partition records into archive tiers");
  archive->add_option("--records", records_path, "records file (long-term dump format)")
      ->required();
  archive->add_option("--cutoff-now", cutoff_now, "reference 'now' timestamp")->required();
  archive->add_option("--out", archive_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      if (resume.empty() && (scenario.empty() || layout.empty() || tariffs.empty())) {
        std::cerr << "--scenario, --layout and --tariffs are required unless --resume is given\n";
        return 1;
      }
      return cmd_run(scenario, layout, tariffs, master, out_dir, seed, snapshot_at, resume,
                     user);
    }
    if (validate->parsed()) return cmd_validate_edi(edi_path);
    if (report->parsed()) return cmd_report(snap_path, period, report_out);
    if (archive->parsed()) return cmd_archive(records_path, cutoff_now, archive_out);
  } catch (const tos::TosError& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.code()) {
      case tos::Err::IoError:
        return 2;
      default:
        return 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
