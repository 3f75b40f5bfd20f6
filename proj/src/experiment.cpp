#include <algorithm>
#include <boost/math/distributions/beta.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include <thread>

#include "hsc/error.hpp"
#include "hsc/harness.hpp"

namespace hsc::harness {

RateEstimate estimate_rate(std::uint64_t events, std::uint64_t trials) {
  RateEstimate est;
  est.events = events;
  est.trials = trials;
  if (trials == 0) return est;
  const double n = static_cast<double>(trials);
  const double x = static_cast<double>(events);
  est.rate = x / n;
  if (events < 5 || trials - events < 5) {
    constexpr double kAlpha = 0.05;
    est.ci_low = events == 0 ? 0.0
                             : boost::math::quantile(boost::math::beta_distribution<>(x, n - x + 1),
                                                     kAlpha / 2);
    est.ci_high = events == trials
                      ? 1.0
                      : boost::math::quantile(boost::math::beta_distribution<>(x + 1, n - x),
                                              1 - kAlpha / 2);
  } else {
    const double half = 1.959963984540054 * std::sqrt(est.rate * (1 - est.rate) / n);
    est.ci_low = std::max(0.0, est.rate - half);
    est.ci_high = std::min(1.0, est.rate + half);
  }
  return est;
}

HscConfig ExperimentConfig::checker_config() const {
  GeometryOptions opts;
  opts.coupling = coupling;
  opts.unconfigured = unconfigured;
  opts.base = image.base;
  return make_preset(preset, depth_for(depth_policy, image.size()), opts);
}

// ---------------------------------------------------------------------------
// Config files

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::uint64_t parse_u64(std::string_view s) {
  int radix = 10;
  if (s.starts_with("0x") || s.starts_with("0X")) {
    s.remove_prefix(2);
    radix = 16;
  }
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, radix);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ParameterError("expected an unsigned integer, got '" + std::string(s) + "'");
  }
  return v;
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) throw ParameterError("expected a number, got '" + s + "'");
  return v;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto p = s.find(sep, start);
    out.emplace_back(s.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

constexpr std::string_view kKeys[] = {"image",         "base",          "preset",
                                      "coupling",      "depth_policy",  "unconfigured_policy",
                                      "trace_mode",    "runs_attacked", "runs_clean",
                                      "attack_model",  "attack_variant", "seed"};

}  // namespace

riscv::ProgramImage load_image_source(std::string_view source,
                                      const std::filesystem::path& base_dir,
                                      std::optional<Word> base) {
  riscv::ProgramImage image;
  if (source.starts_with("synthetic:")) {
    const auto parts = split(source.substr(10), ':');
    if (parts.empty() || parts.size() > 3) {
      throw ParameterError("expected synthetic:SIZE[:SEED[:COMPACT_FRACTION]]");
    }
    const auto size = parse_u64(parts[0]);
    const auto seed = parts.size() > 1 ? parse_u64(parts[1]) : 1;
    riscv::InstructionMix mix;
    if (parts.size() > 2) mix.compact_fraction = parse_double(parts[2]);
    image = riscv::gen_synthetic(size, seed, mix, base.value_or(0),
                                 "synthetic-" + std::to_string(size));
  } else {
    std::filesystem::path p(source);
    if (p.is_relative()) p = base_dir / p;
    image = riscv::load_image_file(p);
    if (base) image.base = *base;
  }
  image.validate();
  return image;
}

ExperimentConfig parse_experiment_config(std::string_view text,
                                         const std::filesystem::path& base_dir) {
  std::map<std::string, std::pair<std::string, std::size_t>> values;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw FormatError("config line " + std::to_string(line_no) + ": expected key=value", line_no);
    }
    const std::string key(trim(line.substr(0, eq)));
    if (std::find(std::begin(kKeys), std::end(kKeys), key) == std::end(kKeys)) {
      throw FormatError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'",
                        line_no);
    }
    if (values.count(key)) {
      throw FormatError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'",
                        line_no);
    }
    values[key] = {std::string(trim(line.substr(eq + 1))), line_no};
  }

  ExperimentConfig cfg;
  auto with = [&](const char* key, auto&& apply) {
    const auto it = values.find(key);
    if (it == values.end()) return;
    try {
      apply(it->second.first);
    } catch (const FormatError&) {
      throw;
    } catch (const Error& e) {
      throw FormatError("config line " + std::to_string(it->second.second) + " (" + key +
                            "): " + e.what(),
                        it->second.second);
    }
  };

  if (!values.count("image")) throw FormatError("config is missing the 'image' key", line_no);
  std::optional<Word> base;
  with("base", [&](const std::string& v) {
    const auto b = parse_u64(v);
    if (b > 0xFFFFFFFFULL || b % 4 != 0) throw ParameterError("base must be a word-aligned 32-bit address");
    base = static_cast<Word>(b);
  });
  with("image", [&](const std::string& v) {
    cfg.image_source = v;
    cfg.image = load_image_source(v, base_dir, base);
  });
  with("preset", [&](const std::string& v) { cfg.preset = parse_preset(v); });
  with("coupling", [&](const std::string& v) { cfg.coupling = parse_coupling(v); });
  with("depth_policy", [&](const std::string& v) { cfg.depth_policy = parse_depth_policy(v); });
  with("unconfigured_policy",
       [&](const std::string& v) { cfg.unconfigured = parse_unconfigured_policy(v); });
  with("trace_mode", [&](const std::string& v) {
    if (v == "LINEAR") {
      cfg.trace_mode = TraceMode::kLinear;
    } else if (v == "CFG_WALK") {
      cfg.trace_mode = TraceMode::kCfgWalk;
    } else if (v.starts_with("FILE:")) {
      cfg.trace_mode = TraceMode::kFile;
      std::filesystem::path p(v.substr(5));
      if (p.is_relative()) p = base_dir / p;
      cfg.trace_path = p.string();
      cfg.file_trace = load_trace_file(p, &cfg.image);
      if (cfg.file_trace.empty()) throw ParameterError("trace file has no events");
    } else {
      throw ParameterError("trace_mode must be LINEAR, CFG_WALK or FILE:<path>");
    }
  });
  with("runs_attacked", [&](const std::string& v) {
    cfg.runs_attacked = static_cast<std::uint32_t>(std::min<std::uint64_t>(parse_u64(v), 0xFFFFFFFFULL));
  });
  with("runs_clean", [&](const std::string& v) {
    cfg.runs_clean = static_cast<std::uint32_t>(std::min<std::uint64_t>(parse_u64(v), 0xFFFFFFFFULL));
  });
  with("seed", [&](const std::string& v) { cfg.seed = parse_u64(v); });
  std::string model = "M1";
  std::string variant = "OUT_OF_IMAGE";
  with("attack_model", [&](const std::string& v) { model = v; });
  with("attack_variant", [&](const std::string& v) { variant = v; });
  if (values.count("attack_model") && !values.count("attack_variant")) {
    variant = model == "M2" ? "RANDOM_WORD" : "OUT_OF_IMAGE";
  }
  with(values.count("attack_variant") ? "attack_variant" : "attack_model",
       [&](const std::string&) { cfg.attack = parse_attack(model, variant, cfg.seed); });
  if (!values.count("attack_variant") && !values.count("attack_model")) {
    cfg.attack = parse_attack(model, variant, cfg.seed);
  }
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open config '" + path.string() + "'");
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse_experiment_config(text, path.parent_path());
}

// ---------------------------------------------------------------------------
// Campaigns

ExperimentReport run_experiment(const ExperimentConfig& config) {
  return run_experiment(config, install(config.image, config.checker_config()));
}

ExperimentReport run_experiment(const ExperimentConfig& config, const Checker& checker) {
  if (config.trace_mode == TraceMode::kFile && config.file_trace.empty()) {
    throw ParameterError("FILE trace mode needs a loaded trace");
  }
  if (config.trace_length == 0) throw ParameterError("trace length must be at least 1");
  const TraceGenerator gen(config.image);
  const std::size_t clean_runs = config.runs_clean;
  const std::size_t total = clean_runs + config.runs_attacked;
  // Clean runs store 1 on any alarm; attacked runs store the member alarm
  // mask at the injected cycle (0 = missed).
  std::vector<std::uint32_t> outcome(total, 0);

  auto work = [&](std::size_t begin, std::size_t end) {
    std::vector<FetchEvent> trace;
    for (std::size_t r = begin; r < end; ++r) {
      Rng rng = make_rng(config.seed + r);
      if (config.trace_mode == TraceMode::kFile) {
        trace = config.file_trace;
      } else {
        gen.generate(config.trace_mode, rng, config.trace_length, trace);
      }
      if (r < clean_runs) {
        std::uint32_t alarm = 0;
        for (const auto& e : trace) {
          if (checker.alarm_mask(e.address, e.instruction)) {
            alarm = 1;
            break;
          }
        }
        outcome[r] = alarm;
      } else {
        const auto inj = inject(trace, config.attack, config.image, rng);
        // Events before the injection are legitimate; replay them so a
        // spurious alarm there would still surface as a failed run.
        std::uint32_t mask = 0;
        for (std::size_t c = 0; c <= inj.cycle; ++c) {
          mask = checker.alarm_mask(trace[c].address, trace[c].instruction);
          if (c < inj.cycle && mask) break;
        }
        outcome[r] = mask;
      }
    }
  };

  const unsigned workers =
      static_cast<unsigned>(std::clamp<std::size_t>(config.workers, 1, std::max<std::size_t>(total, 1)));
  if (workers == 1) {
    work(0, total);
  } else {
    std::vector<std::thread> pool;
    const std::size_t block = (total + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t begin = std::min(total, w * block);
      const std::size_t end = std::min(total, begin + block);
      pool.emplace_back(work, begin, end);
    }
    for (auto& t : pool) t.join();
  }

  ExperimentReport rep;
  const auto& members = checker.members();
  rep.member_labels.reserve(members.size());
  for (const auto& m : members) rep.member_labels.push_back(m.spec().label());
  rep.member_detections.assign(members.size(), 0);

  std::uint64_t clean_alarms = 0;
  for (std::size_t r = 0; r < clean_runs; ++r) clean_alarms += outcome[r];
  std::uint64_t missed = 0;
  for (std::size_t r = clean_runs; r < total; ++r) {
    if (outcome[r] == 0) ++missed;
    for (std::size_t i = 0; i < members.size(); ++i) {
      if ((outcome[r] >> i) & 1U) ++rep.member_detections[i];
    }
  }

  rep.benchmark = config.image.name;
  rep.preset = checker.name();
  rep.model = config.attack.label();
  rep.fp = estimate_rate(clean_alarms, config.runs_clean);
  rep.fn = estimate_rate(missed, config.runs_attacked);
  rep.image_size = config.image.size();
  rep.base = config.image.base;
  rep.depth = members.front().spec().depth;
  rep.coupling = std::string(to_string(members.front().spec().chunking.coupling));
  rep.depth_policy = std::string(to_string(config.depth_policy));
  rep.unconfigured_policy = std::string(to_string(members.front().spec().unconfigured));
  rep.trace_mode = std::string(to_string(config.trace_mode));
  rep.trace_length = config.trace_mode == TraceMode::kFile ? config.file_trace.size()
                                                           : config.trace_length;
  rep.seed = config.seed;
  for (const auto& m : members) {
    if (!rep.codes.empty()) rep.codes += '+';
    rep.codes += codec::describe(m.spec().code, m.spec().chunking.codec_width()) + "x" +
                 std::to_string(m.spec().chunking.fragments);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Sampling estimator

Prediction predict_fn(const Checker& checker, const riscv::ProgramImage& image,
                      const AttackSpec& spec, std::uint64_t samples) {
  image.validate();
  if (samples == 0) throw ParameterError("prediction needs at least one sample");
  Prediction pred;
  pred.samples = samples;
  int total_bits = 0;
  for (const auto& m : checker.members()) {
    for (int b = 0; b < m.banks(); ++b) {
      pred.bank_labels.push_back(m.spec().label() + "[" + std::to_string(b) + "]");
    }
    total_bits += m.banks() * m.spec().entry_width();
  }
  std::vector<std::uint64_t> hits(pred.bank_labels.size(), 0);
  std::uint64_t joint = 0;

  Rng rng = make_rng(spec.seed);
  for (std::uint64_t s = 0; s < samples; ++s) {
    const auto j = uniform_below(rng, image.size());
    const FetchEvent legit{s, image.address_of(j), image.words[j], false, kNotTampered};
    const auto attack = mutate(legit, spec, image, rng);
    bool all = true;
    std::size_t slot = 0;
    for (const auto& m : checker.members()) {
      const auto mask = m.match_mask(attack.address, attack.instruction);
      for (int b = 0; b < m.banks(); ++b, ++slot) {
        if ((mask >> b) & 1U) {
          ++hits[slot];
        } else {
          all = false;
        }
      }
    }
    if (all) ++joint;
  }

  pred.independence_product = 1.0;
  for (auto h : hits) {
    const double rate = static_cast<double>(h) / static_cast<double>(samples);
    pred.bank_match_rate.push_back(rate);
    pred.independence_product *= rate;
  }
  pred.joint_rate = static_cast<double>(joint) / static_cast<double>(samples);
  pred.uniform_baseline = std::ldexp(1.0, -total_bits);
  return pred;
}

}  // namespace hsc::harness
