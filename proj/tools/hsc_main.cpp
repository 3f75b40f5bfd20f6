// hsc: command-line front end for the checker simulator.
//
// Exit codes: 0 success / no alarm, 2 alarm raised (run, attack),
// 1 usage or data error. Results go to stdout, diagnostics to stderr.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>

#include "hsc/checker.hpp"
#include "hsc/error.hpp"
#include "hsc/harness.hpp"

namespace {

using namespace hsc;
using harness::TraceMode;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitAlarm = 2;

std::string hex32(Word v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "0x%08x", v);
  return buf;
}

std::vector<std::uint8_t> read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << text;
}

std::optional<Word> parse_base(const std::string& text) {
  if (text.empty()) return std::nullopt;
  std::size_t used = 0;
  const auto v = std::stoull(text, &used, 0);
  if (used != text.size() || v > 0xFFFFFFFFULL) throw ParameterError("bad base '" + text + "'");
  return static_cast<Word>(v);
}

TraceMode parse_mode(const std::string& s) {
  if (s == "LINEAR") return TraceMode::kLinear;
  if (s == "CFG_WALK") return TraceMode::kCfgWalk;
  throw ParameterError("mode must be LINEAR or CFG_WALK");
}

struct GeometryFlags {
  std::string depth_policy = "EXACT";
  std::string unconfigured = "ZERO_INIT";
  std::string coupling = "XOR";

  void add_to(CLI::App* cmd) {
    cmd->add_option("--depth-policy", depth_policy, "EXACT or POW2");
    cmd->add_option("--unconfigured", unconfigured, "VALID_BIT or ZERO_INIT");
    cmd->add_option("--coupling", coupling, "XOR or CONCAT");
  }

  HscConfig config(Preset preset, const riscv::ProgramImage& image) const {
    GeometryOptions opts;
    opts.coupling = parse_coupling(coupling);
    opts.unconfigured = parse_unconfigured_policy(unconfigured);
    opts.base = image.base;
    return make_preset(preset, depth_for(parse_depth_policy(depth_policy), image.size()), opts);
  }
};

void print_version() {
  std::cout << "hsc 1.0.0\n"
            << "hamming: " << codec::kHammingConstructionId << "\n"
            << "crc8: poly=0x07 init=0 refin=false refout=false xorout=0\n"
            << "crc16: poly=0x1021 init=0 refin=false refout=false xorout=0\n"
            << "crc32: poly=0x04C11DB7 init=0 refin=false refout=false xorout=0\n";
}

std::string member_list(const Checker& checker, std::uint32_t mask) {
  std::string out;
  for (std::size_t i = 0; i < checker.members().size(); ++i) {
    if (!((mask >> i) & 1U)) continue;
    if (!out.empty()) out += ';';
    out += checker.members()[i].spec().label();
  }
  return out.empty() ? "-" : out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hardware security checker simulator"};
  app.require_subcommand(0, 1);
  bool show_version = false;
  app.add_flag("--version", show_version, "Print codec parameters and exit");

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a synthetic RV32I image");
  std::size_t gen_size = 0;
  std::uint64_t gen_seed = 1;
  std::string gen_out, gen_base, gen_name;
  double gen_compact = riscv::InstructionMix{}.compact_fraction;
  gen->add_option("--size", gen_size, "Image size in words")->required();
  gen->add_option("--seed", gen_seed, "Generator seed");
  gen->add_option("--out", gen_out, "Output path (.hex for text, otherwise binary)")->required();
  gen->add_option("--base", gen_base, "Base address");
  gen->add_option("--name", gen_name, "Image name");
  gen->add_option("--compact-fraction", gen_compact, "Fraction of compact encodings");

  // install
  auto* inst = app.add_subcommand("install", "Install an image and write a checker snapshot");
  std::string inst_image, inst_preset = "PAPER_COMBINED", inst_out, inst_base;
  bool inst_allow = false;
  GeometryFlags inst_geo;
  inst->add_option("--image", inst_image, "Image path or synthetic:SIZE[:SEED[:COMPACT]]")->required();
  inst->add_option("--preset", inst_preset, "Checker preset");
  inst->add_option("--out", inst_out, "Snapshot path")->required();
  inst->add_option("--base", inst_base, "Override the image base address");
  inst->add_flag("--allow-collisions", inst_allow, "Accept memory index collisions");
  inst_geo.add_to(inst);

  // run
  auto* run = app.add_subcommand("run", "Replay a fetch trace against a snapshot");
  std::string run_snapshot, run_trace, run_mode, run_image, run_base;
  std::uint64_t run_seed = 1;
  std::size_t run_length = 512;
  run->add_option("--snapshot", run_snapshot, "Checker snapshot")->required();
  auto* run_trace_opt = run->add_option("--trace", run_trace, "Trace CSV file");
  auto* run_mode_opt = run->add_option("--mode", run_mode, "Generate a LINEAR or CFG_WALK trace");
  run_trace_opt->excludes(run_mode_opt);
  run->add_option("--image", run_image, "Image for --mode");
  run->add_option("--base", run_base, "Override the image base address");
  run->add_option("--seed", run_seed, "Trace seed for --mode");
  run->add_option("--length", run_length, "Trace length for --mode");

  // attack
  auto* atk = app.add_subcommand("attack", "Run one trace with a single injected Trojan");
  std::string atk_snapshot, atk_image, atk_model = "M1", atk_variant, atk_mode = "CFG_WALK",
                                       atk_base;
  std::uint64_t atk_seed = 1;
  std::size_t atk_length = 512;
  atk->add_option("--snapshot", atk_snapshot, "Checker snapshot")->required();
  atk->add_option("--image", atk_image, "Installed image")->required();
  atk->add_option("--base", atk_base, "Override the image base address");
  atk->add_option("--model", atk_model, "M1 or M2");
  atk->add_option("--variant", atk_variant, "Attack variant");
  atk->add_option("--seed", atk_seed, "Seed for trace and injection");
  atk->add_option("--mode", atk_mode, "LINEAR or CFG_WALK");
  atk->add_option("--length", atk_length, "Trace length");

  // experiment
  auto* exp = app.add_subcommand("experiment", "Run a Monte Carlo FP/FN campaign");
  std::string exp_config, exp_csv, exp_md;
  unsigned exp_workers = 1;
  std::size_t exp_length = 0;
  exp->add_option("--config", exp_config, "Experiment config file")->required();
  exp->add_option("--out-csv", exp_csv, "CSV report path");
  exp->add_option("--out-md", exp_md, "Markdown report path");
  exp->add_option("--workers", exp_workers, "Worker threads")->check(CLI::Range(1u, 256u));
  exp->add_option("--trace-length", exp_length, "Fetches per generated trace");

  // predict
  auto* pred = app.add_subcommand("predict", "Estimate FN by sampling check-bit collisions");
  std::string pred_image, pred_preset = "PAPER_COMBINED", pred_model = "M1", pred_variant,
                          pred_base;
  std::uint64_t pred_seed = 1, pred_samples = 100000;
  GeometryFlags pred_geo;
  pred->add_option("--image", pred_image, "Image path or synthetic:SIZE[:SEED[:COMPACT]]")->required();
  pred->add_option("--preset", pred_preset, "Checker preset");
  pred->add_option("--base", pred_base, "Override the image base address");
  pred->add_option("--model", pred_model, "M1 or M2");
  pred->add_option("--variant", pred_variant, "Attack variant");
  pred->add_option("--seed", pred_seed, "Sampling seed");
  pred->add_option("--samples", pred_samples, "Attacker draws")->check(CLI::PositiveNumber);
  pred_geo.add_to(pred);

  // estimate
  auto* est = app.add_subcommand("estimate", "Report ECC storage bits for a preset");
  std::string est_preset = "PAPER_COMBINED", est_policy = "EXACT", est_unconfigured = "ZERO_INIT";
  std::size_t est_size = 0;
  est->add_option("--preset", est_preset, "Checker preset");
  est->add_option("--size", est_size, "Image size in words")->required();
  est->add_option("--depth-policy", est_policy, "EXACT or POW2");
  est->add_option("--unconfigured", est_unconfigured, "VALID_BIT or ZERO_INIT");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitError;
  }

  if (show_version) {
    print_version();
    return kExitOk;
  }
  if (app.get_subcommands().empty()) {
    std::cerr << app.help();
    return kExitError;
  }

  auto default_variant = [](const std::string& model, const std::string& variant) {
    if (!variant.empty()) return variant;
    return std::string(model == "M2" ? "RANDOM_WORD" : "OUT_OF_IMAGE");
  };

  try {
    if (*gen) {
      riscv::InstructionMix mix;
      mix.compact_fraction = gen_compact;
      const auto image = riscv::gen_synthetic(gen_size, gen_seed, mix,
                                              parse_base(gen_base).value_or(0), gen_name);
      riscv::save_image_file(image, gen_out);
      std::cout << "# seed=" << gen_seed << "\n"
                << "wrote " << image.size() << " words to " << gen_out << "\n";
      return kExitOk;
    }

    if (*inst) {
      const auto image = harness::load_image_source(inst_image, {}, parse_base(inst_base));
      auto config = inst_geo.config(parse_preset(inst_preset), image);
      config.allow_collisions = inst_allow;
      const auto checker = install(image, config);
      const auto bytes = checker.serialize();
      std::ofstream out(inst_out, std::ios::binary);
      if (!out) throw DataError("cannot write '" + inst_out + "'");
      out.write(reinterpret_cast<const char*>(bytes.data()),
                static_cast<std::streamsize>(bytes.size()));
      std::cout << "installed " << image.size() << " words into " << checker.name() << " ("
                << checker.storage_bits() << " storage bits)\n";
      for (const auto& m : checker.members()) {
        std::cout << "  " << m.spec().label() << " depth=" << m.spec().depth
                  << " collisions=" << m.collisions() << "\n";
      }
      return kExitOk;
    }

    if (*run) {
      const auto checker = Checker::deserialize(read_bytes(run_snapshot));
      std::vector<FetchEvent> trace;
      if (!run_trace.empty()) {
        trace = harness::load_trace_file(run_trace);
      } else {
        if (run_mode.empty() || run_image.empty()) {
          throw ParameterError("run needs --trace, or --mode with --image");
        }
        const auto image = harness::load_image_source(run_image, {}, parse_base(run_base));
        trace = harness::gen_trace(image, parse_mode(run_mode), run_seed, run_length);
        std::cout << "# mode=" << run_mode << " seed=" << run_seed << "\n";
      }
      std::uint64_t alarms = 0;
      std::cout << "cycle,address,instruction,alarming_members\n";
      for (const auto& e : trace) {
        const auto mask = checker.alarm_mask(e.address, e.instruction);
        if (!mask) continue;
        ++alarms;
        std::cout << e.cycle << ',' << hex32(e.address) << ',' << hex32(e.instruction) << ','
                  << member_list(checker, mask) << '\n';
      }
      std::cout << "# fetches=" << trace.size() << " alarms=" << alarms << "\n";
      return alarms ? kExitAlarm : kExitOk;
    }

    if (*atk) {
      const auto checker = Checker::deserialize(read_bytes(atk_snapshot));
      const auto image = harness::load_image_source(atk_image, {}, parse_base(atk_base));
      const auto spec =
          harness::parse_attack(atk_model, default_variant(atk_model, atk_variant), atk_seed);
      Rng rng = make_rng(atk_seed);
      std::vector<FetchEvent> trace;
      harness::TraceGenerator(image).generate(parse_mode(atk_mode), rng, atk_length, trace);
      const auto inj = harness::inject(trace, spec, image, rng);
      const auto& hit = trace[inj.cycle];
      const auto mask = checker.alarm_mask(hit.address, hit.instruction);
      std::cout << "# attack=" << spec.label() << " seed=" << atk_seed << " mode=" << atk_mode
                << "\n"
                << "injected_cycle=" << inj.cycle << "\n"
                << "original=" << hex32(inj.original.address) << ':'
                << hex32(inj.original.instruction) << "\n"
                << "tampered=" << hex32(hit.address) << ':' << hex32(hit.instruction) << "\n"
                << "verdict=" << (mask ? "ALARM" : "MISSED") << "\n"
                << "alarming_members=" << member_list(checker, mask) << "\n";
      return mask ? kExitAlarm : kExitOk;
    }

    if (*exp) {
      auto config = harness::load_experiment_config(exp_config);
      config.workers = exp_workers;
      if (exp_length) config.trace_length = exp_length;
      const auto report = harness::run_experiment(config);
      const std::span<const harness::ExperimentReport> reports(&report, 1);
      const auto md = harness::emit_report(reports, harness::ReportFormat::kMarkdown);
      if (!exp_csv.empty()) write_text(exp_csv, harness::emit_report(reports, harness::ReportFormat::kCsv));
      if (!exp_md.empty()) write_text(exp_md, md);
      std::cout << md;
      return kExitOk;
    }

    if (*pred) {
      const auto image = harness::load_image_source(pred_image, {}, parse_base(pred_base));
      auto config = pred_geo.config(parse_preset(pred_preset), image);
      config.allow_collisions = true;
      const auto checker = install(image, config);
      const auto spec =
          harness::parse_attack(pred_model, default_variant(pred_model, pred_variant), pred_seed);
      const auto p = harness::predict_fn(checker, image, spec, pred_samples);
      std::printf("# preset=%s attack=%s seed=%llu samples=%llu\n", checker.name().c_str(),
                  spec.label().c_str(), static_cast<unsigned long long>(pred_seed),
                  static_cast<unsigned long long>(p.samples));
      for (std::size_t i = 0; i < p.bank_labels.size(); ++i) {
        std::printf("bank %s match_pct=%.3f\n", p.bank_labels[i].c_str(),
                    100.0 * p.bank_match_rate[i]);
      }
      std::printf("independence_product_pct=%.6f\n", 100.0 * p.independence_product);
      std::printf("joint_fn_pct=%.3f\n", 100.0 * p.joint_rate);
      std::printf("uniform_baseline_pct=%.6g\n", 100.0 * p.uniform_baseline);
      return kExitOk;
    }

    if (*est) {
      if (est_size == 0) throw ParameterError("--size must be at least 1");
      GeometryOptions opts;
      opts.unconfigured = parse_unconfigured_policy(est_unconfigured);
      const auto config =
          make_preset(parse_preset(est_preset), depth_for(parse_depth_policy(est_policy), est_size),
                      opts);
      std::uint64_t total = 0;
      for (const auto& spec : config.members) {
        const Hsm hsm(spec);
        std::cout << spec.label() << " depth=" << spec.depth << " banks=" << hsm.banks()
                  << " bits=" << hsm.storage_bits() << "\n";
        total += hsm.storage_bits();
      }
      std::cout << "total_bits=" << total << "\n";
      return kExitOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitOk;
}
