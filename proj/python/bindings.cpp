#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hsc/checker.hpp"
#include "hsc/codec.hpp"
#include "hsc/error.hpp"
#include "hsc/harness.hpp"

namespace py = pybind11;
using namespace hsc;

namespace {

HscConfig preset_config(const std::string& preset, const riscv::ProgramImage& image,
                        const std::string& depth_policy, const std::string& unconfigured,
                        const std::string& coupling) {
  GeometryOptions opts;
  opts.coupling = parse_coupling(coupling);
  opts.unconfigured = parse_unconfigured_policy(unconfigured);
  opts.base = image.base;
  return make_preset(parse_preset(preset), depth_for(parse_depth_policy(depth_policy), image.size()),
                     opts);
}

py::dict report_dict(const harness::ExperimentReport& r) {
  py::dict d;
  d["benchmark"] = r.benchmark;
  d["preset"] = r.preset;
  d["model"] = r.model;
  d["fp_rate"] = r.fp.rate;
  d["fp_runs"] = r.fp.events;
  d["runs_clean"] = r.fp.trials;
  d["fn_rate"] = r.fn.rate;
  d["fn_runs"] = r.fn.events;
  d["runs_attacked"] = r.fn.trials;
  d["fn_ci95"] = py::make_tuple(r.fn.ci_low, r.fn.ci_high);
  py::dict det;
  for (std::size_t i = 0; i < r.member_labels.size(); ++i) det[py::str(r.member_labels[i])] = r.member_detections[i];
  d["member_detections"] = det;
  d["image_size"] = r.image_size;
  d["base"] = r.base;
  d["depth"] = r.depth;
  d["coupling"] = r.coupling;
  d["depth_policy"] = r.depth_policy;
  d["unconfigured_policy"] = r.unconfigured_policy;
  d["trace_mode"] = r.trace_mode;
  d["trace_length"] = r.trace_length;
  d["seed"] = r.seed;
  d["codes"] = r.codes;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bindings for the hardware security checker simulator";

  auto base_error = py::register_exception<Error>(m, "HscError", PyExc_RuntimeError);
  py::register_exception<ParameterError>(m, "ParameterError", base_error);
  py::register_exception<AlignmentError>(m, "AlignmentError", base_error);
  py::register_exception<ModeError>(m, "ModeError", base_error);
  py::register_exception<DataError>(m, "DataError", base_error);
  py::register_exception<CollisionError>(m, "CollisionError", base_error);
  py::register_exception<FormatError>(m, "FormatError", base_error);

  m.attr("HAMMING_CONSTRUCTION") = codec::kHammingConstructionId;

  m.def("hamming_parity_width", &codec::hamming_parity_width, py::arg("data_width"));
  m.def(
      "hamming_parity",
      [](std::uint64_t value, int width) { return codec::hamming_parity({value, width}).value; },
      py::arg("value"), py::arg("width"));
  m.def(
      "crc_checkbits",
      [](std::uint64_t value, int width, std::uint64_t poly, int check_width) {
        return codec::crc_checkbits({value, width}, {poly, check_width}).value;
      },
      py::arg("value"), py::arg("width"), py::arg("poly"), py::arg("check_width"));
  m.def(
      "make_chunks",
      [](Word address, Word instruction, int fragments, const std::string& coupling) {
        const auto v = make_chunks(address, instruction, {32, fragments, parse_coupling(coupling)});
        return std::vector<std::uint64_t>(v.values().begin(), v.values().end());
      },
      py::arg("address"), py::arg("instruction"), py::arg("fragments") = 1,
      py::arg("coupling") = "XOR");
  m.def(
      "decode",
      [](Word word) {
        const auto d = riscv::decode(word);
        py::dict out;
        out["op"] = std::string(riscv::to_string(d.op));
        out["rd"] = d.rd;
        out["rs1"] = d.rs1;
        out["rs2"] = d.rs2;
        out["funct3"] = d.funct3;
        out["funct7"] = d.funct7;
        out["imm"] = d.imm;
        out["control_flow"] = d.control_flow;
        return out;
      },
      py::arg("word"));

  py::class_<riscv::ProgramImage>(m, "ProgramImage")
      .def(py::init([](std::vector<Word> words, Word base, std::string name) {
             riscv::ProgramImage img{std::move(name), base, std::move(words)};
             img.validate();
             return img;
           }),
           py::arg("words"), py::arg("base") = 0, py::arg("name") = "image")
      .def_readonly("name", &riscv::ProgramImage::name)
      .def_readonly("base", &riscv::ProgramImage::base)
      .def_readonly("words", &riscv::ProgramImage::words)
      .def("__len__", &riscv::ProgramImage::size)
      .def("address_of", &riscv::ProgramImage::address_of)
      .def("save", [](const riscv::ProgramImage& img, const std::string& path) {
        riscv::save_image_file(img, path);
      });

  m.def(
      "gen_synthetic",
      [](std::size_t size, std::uint64_t seed, Word base, double compact_fraction) {
        riscv::InstructionMix mix;
        mix.compact_fraction = compact_fraction;
        return riscv::gen_synthetic(size, seed, mix, base);
      },
      py::arg("size"), py::arg("seed") = 1, py::arg("base") = 0,
      py::arg("compact_fraction") = riscv::InstructionMix{}.compact_fraction);
  m.def(
      "load_image", [](const std::string& path) { return riscv::load_image_file(path); },
      py::arg("path"));

  py::class_<Checker>(m, "Checker")
      .def_property_readonly("name", &Checker::name)
      .def_property_readonly("members",
                             [](const Checker& c) {
                               std::vector<std::string> out;
                               for (const auto& h : c.members()) out.push_back(h.spec().label());
                               return out;
                             })
      .def(
          "check",
          [](const Checker& c, Word address, Word instruction) {
            const auto mask = c.alarm_mask(address, instruction);
            return py::make_tuple(mask != 0, mask);
          },
          py::arg("address"), py::arg("instruction"),
          "Returns (alarm, mask) where bit i of mask is set when member i alarmed.")
      .def("storage_bits", &Checker::storage_bits)
      .def("serialize",
           [](const Checker& c) {
             const auto b = c.serialize();
             return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
           })
      .def_static("deserialize", [](py::bytes data) {
        const std::string s = data;
        return Checker::deserialize(
            std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
      });

  m.def(
      "install",
      [](const riscv::ProgramImage& image, const std::string& preset,
         const std::string& depth_policy, const std::string& unconfigured,
         const std::string& coupling) {
        return install(image, preset_config(preset, image, depth_policy, unconfigured, coupling));
      },
      py::arg("image"), py::arg("preset") = "PAPER_COMBINED", py::arg("depth_policy") = "EXACT",
      py::arg("unconfigured") = "ZERO_INIT", py::arg("coupling") = "XOR");

  m.def(
      "storage_bits",
      [](const std::string& preset, std::size_t size, const std::string& depth_policy,
         const std::string& unconfigured) {
        GeometryOptions opts;
        opts.unconfigured = parse_unconfigured_policy(unconfigured);
        std::uint64_t total = 0;
        for (const auto& spec :
             make_preset(parse_preset(preset), depth_for(parse_depth_policy(depth_policy), size), opts)
                 .members) {
          total += Hsm(spec).storage_bits();
        }
        return total;
      },
      py::arg("preset"), py::arg("size"), py::arg("depth_policy") = "EXACT",
      py::arg("unconfigured") = "ZERO_INIT");

  m.def(
      "run_experiment",
      [](const std::string& config_text, const std::string& base_dir, unsigned workers,
         std::size_t trace_length) {
        auto cfg = harness::parse_experiment_config(config_text, base_dir);
        cfg.workers = workers;
        cfg.trace_length = trace_length;
        harness::ExperimentReport rep;
        {
          py::gil_scoped_release release;
          rep = harness::run_experiment(cfg);
        }
        return py::make_tuple(report_dict(rep),
                              harness::emit_report(std::span(&rep, 1), harness::ReportFormat::kCsv),
                              harness::emit_report(std::span(&rep, 1),
                                                   harness::ReportFormat::kMarkdown));
      },
      py::arg("config"), py::arg("base_dir") = "", py::arg("workers") = 1,
      py::arg("trace_length") = 512,
      "Runs a campaign from key=value config text. Returns (report, csv, markdown).");

  m.def(
      "predict_fn",
      [](const Checker& checker, const riscv::ProgramImage& image, const std::string& model,
         const std::string& variant, std::uint64_t seed, std::uint64_t samples) {
        const auto p =
            harness::predict_fn(checker, image, harness::parse_attack(model, variant, seed), samples);
        py::dict d;
        d["samples"] = p.samples;
        d["bank_labels"] = p.bank_labels;
        d["bank_match_rate"] = p.bank_match_rate;
        d["independence_product"] = p.independence_product;
        d["joint_rate"] = p.joint_rate;
        d["uniform_baseline"] = p.uniform_baseline;
        return d;
      },
      py::arg("checker"), py::arg("image"), py::arg("model") = "M1",
      py::arg("variant") = "IN_IMAGE_ALIAS", py::arg("seed") = 1, py::arg("samples") = 100000);
}
