#include <cstdio>

#include "hsc/harness.hpp"

namespace hsc::harness {

namespace {

std::string pct(double rate) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", 100.0 * rate);
  return buf;
}

std::string hex32(Word v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "0x%08x", v);
  return buf;
}

// Fields containing separators are quoted for CSV consumers.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string detections(const ExperimentReport& r) {
  std::string out;
  for (std::size_t i = 0; i < r.member_labels.size(); ++i) {
    if (i) out += ';';
    out += r.member_labels[i] + "=" + std::to_string(r.member_detections[i]);
  }
  return out;
}

}  // namespace

std::string_view csv_header() {
  return "benchmark,preset,model,fp_pct,fn_pct,fn_ci95_low_pct,fn_ci95_high_pct,runs_clean,"
         "fp_runs,runs_attacked,fn_runs,image_size,base,depth,coupling,depth_policy,"
         "unconfigured_policy,trace_mode,trace_length,seed,codes,member_detections";
}

std::string emit_report(std::span<const ExperimentReport> reports, ReportFormat format) {
  std::string out;
  if (format == ReportFormat::kCsv) {
    out += csv_header();
    out += '\n';
    for (const auto& r : reports) {
      const std::string fields[] = {
          csv_field(r.benchmark),
          r.preset,
          r.model,
          pct(r.fp.rate),
          pct(r.fn.rate),
          pct(r.fn.ci_low),
          pct(r.fn.ci_high),
          std::to_string(r.fp.trials),
          std::to_string(r.fp.events),
          std::to_string(r.fn.trials),
          std::to_string(r.fn.events),
          std::to_string(r.image_size),
          hex32(r.base),
          std::to_string(r.depth),
          r.coupling,
          r.depth_policy,
          r.unconfigured_policy,
          r.trace_mode,
          std::to_string(r.trace_length),
          std::to_string(r.seed),
          csv_field(r.codes),
          csv_field(detections(r)),
      };
      for (std::size_t i = 0; i < std::size(fields); ++i) {
        if (i) out += ',';
        out += fields[i];
      }
      out += '\n';
    }
    return out;
  }

  out += "| Benchmark | Preset | Model | FP (%) | FN (%) | CI95 (%) |\n";
  out += "|---|---|---|---|---|---|\n";
  for (const auto& r : reports) {
    out += "| " + r.benchmark + " | " + r.preset + " | " + r.model + " | " + pct(r.fp.rate) +
           " | " + pct(r.fn.rate) + " | [" + pct(r.fn.ci_low) + ", " + pct(r.fn.ci_high) +
           "] |\n";
  }
  for (const auto& r : reports) {
    out += "\n**" + r.benchmark + " / " + r.preset + " / " + r.model + "**\n\n";
    out += "- image size: " + std::to_string(r.image_size) + " words at base " + hex32(r.base) + "\n";
    out += "- depth: " + std::to_string(r.depth) + " (" + r.depth_policy + ")\n";
    out += "- coupling: " + r.coupling + ", unconfigured entries: " + r.unconfigured_policy + "\n";
    out += "- trace: " + r.trace_mode + ", " + std::to_string(r.trace_length) + " fetches\n";
    out += "- runs: " + std::to_string(r.fp.trials) + " clean (" + std::to_string(r.fp.events) +
           " alarmed), " + std::to_string(r.fn.trials) + " attacked (" +
           std::to_string(r.fn.events) + " missed)\n";
    out += "- seed: " + std::to_string(r.seed) + "\n";
    out += "- codes: " + r.codes + "\n";
    out += "- detections per member: " + detections(r) + "\n";
  }
  return out;
}

}  // namespace hsc::harness
