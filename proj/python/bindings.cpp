#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "rdh/bench.hpp"
#include "rdh/codec.hpp"
#include "rdh/error.hpp"
#include "rdh/image.hpp"
#include "rdh/metrics.hpp"
#include "rdh/predictor.hpp"

namespace py = pybind11;

namespace {

using U8Array = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

rdh::GrayImage to_image(const U8Array& a) {
  if (a.ndim() != 2) throw std::invalid_argument("expected a 2-D uint8 array");
  const auto h = static_cast<int>(a.shape(0));
  const auto w = static_cast<int>(a.shape(1));
  return rdh::GrayImage(w, h, std::vector<std::uint8_t>(a.data(), a.data() + a.size()));
}

U8Array to_array(const rdh::GrayImage& img) {
  U8Array out({img.height(), img.width()});
  std::copy(img.pixels().begin(), img.pixels().end(), out.mutable_data());
  return out;
}

U8Array to_array(const rdh::Bits& bits) {
  U8Array out(static_cast<py::ssize_t>(bits.size()));
  std::copy(bits.begin(), bits.end(), out.mutable_data());
  return out;
}

rdh::PredictorConfig predictor_config(const std::string& kind, int context_size, int train_radius, double gamma) {
  rdh::PredictorConfig c;
  c.kind = rdh::parse_predictor_kind(kind);
  c.context_size = context_size;
  c.train_radius = train_radius;
  c.gamma = gamma;
  rdh::validate(c);
  return c;
}

py::dict pass_dict(const rdh::PassReport& r) {
  py::dict d;
  d["threshold"] = r.plan.threshold;
  d["bin_neg"] = r.plan.bins.neg;
  d["bin_pos"] = r.plan.bins.pos;
  d["capacity"] = r.plan.capacity;
  d["modified_pixels"] = r.plan.modified_pixels;
  d["payload_bits"] = r.payload_bits;
  d["map_bits"] = r.map_bits;
  d["participating"] = r.participating;
  return d;
}

}  // namespace

PYBIND11_MODULE(_rdh, m) {
  m.doc() = "Reversible data hiding with a WLS predictor and dynamic histogram shifting";

  auto base = py::register_exception<rdh::Error>(m, "RdhError", PyExc_RuntimeError);
  py::register_exception<rdh::PgmError>(m, "PgmError", base.ptr());
  py::register_exception<rdh::CapacityError>(m, "CapacityError", base.ptr());
  py::register_exception<rdh::FormatError>(m, "FormatError", base.ptr());
  py::register_exception<rdh::ChecksumError>(m, "ChecksumError", base.ptr());

  m.def("read_pgm", [](const std::string& path) { return to_array(rdh::read_pgm(path)); }, py::arg("path"));
  m.def(
      "write_pgm", [](const std::string& path, const U8Array& image) { rdh::write_pgm(to_image(image), path); },
      py::arg("path"), py::arg("image"));

  m.def(
      "embed",
      [](const U8Array& cover, const U8Array& payload, const std::string& predictor, int context_size,
         int train_radius, double gamma, bool checksum, bool pixel_selection, std::optional<int> threshold_max) {
        rdh::EmbedConfig cfg;
        cfg.predictor = predictor_config(predictor, context_size, train_radius, gamma);
        cfg.checksum = checksum;
        cfg.pixel_selection = pixel_selection;
        cfg.threshold_max = threshold_max;
        const rdh::Bits bits(payload.data(), payload.data() + payload.size());
        rdh::EmbedResult res;
        {
          py::gil_scoped_release release;
          res = rdh::embed(to_image(cover), bits, cfg);
        }
        py::dict report;
        report["psnr"] = res.psnr;
        report["white"] = pass_dict(res.white);
        report["gray"] = pass_dict(res.gray);
        report["location_map_bits"] = res.location_map_bits;
        report["compressed_map_bits"] = res.compressed_map_bits;
        return py::make_tuple(to_array(res.marked), report);
      },
      py::arg("cover"), py::arg("payload"), py::kw_only(), py::arg("predictor") = "WLS",
      py::arg("context_size") = 10, py::arg("train_radius") = 10, py::arg("gamma") = 1.0,
      py::arg("checksum") = true, py::arg("pixel_selection") = true, py::arg("threshold_max") = py::none(),
      "Embeds a bit array (values 0/1) and returns (marked, report).");

  m.def(
      "extract",
      [](const U8Array& marked) {
        const auto img = to_image(marked);
        rdh::ExtractResult res;
        {
          py::gil_scoped_release release;
          res = rdh::extract(img);
        }
        return py::make_tuple(to_array(res.payload), to_array(res.restored));
      },
      py::arg("marked"), "Returns (payload bits, restored cover).");

  m.def(
      "estimate_capacity",
      [](const U8Array& cover, const std::string& predictor, int context_size, int train_radius, double gamma,
         bool checksum, bool pixel_selection) {
        rdh::EmbedConfig cfg;
        cfg.predictor = predictor_config(predictor, context_size, train_radius, gamma);
        cfg.checksum = checksum;
        cfg.pixel_selection = pixel_selection;
        return rdh::estimate_capacity(to_image(cover), cfg);
      },
      py::arg("cover"), py::kw_only(), py::arg("predictor") = "WLS", py::arg("context_size") = 10,
      py::arg("train_radius") = 10, py::arg("gamma") = 1.0, py::arg("checksum") = true,
      py::arg("pixel_selection") = true);

  m.def(
      "entropy",
      [](const U8Array& image, const std::string& predictor, int context_size, int train_radius, double gamma) {
        const auto cfg = predictor_config(predictor, context_size, train_radius, gamma);
        const auto img = to_image(image);
        py::gil_scoped_release release;
        return rdh::entropy(rdh::prediction_error_histogram(img, cfg));
      },
      py::arg("image"), py::kw_only(), py::arg("predictor") = "WLS", py::arg("context_size") = 10,
      py::arg("train_radius") = 10, py::arg("gamma") = 1.0,
      "Entropy in bits of the interior prediction errors.");

  m.def(
      "psnr", [](const U8Array& a, const U8Array& b) { return rdh::psnr(to_image(a), to_image(b)); },
      py::arg("a"), py::arg("b"));
}
