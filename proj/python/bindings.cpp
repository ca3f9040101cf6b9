#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "resplab/annotation.hpp"
#include "resplab/audio.hpp"
#include "resplab/detector.hpp"
#include "resplab/error.hpp"
#include "resplab/label_store.hpp"
#include "resplab/metrics.hpp"
#include "resplab/spectrogram.hpp"
#include "resplab/stats.hpp"

namespace py = pybind11;
using namespace resplab;

namespace {

using Samples = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::span<const double> as_span(const Samples& a) {
  if (a.ndim() != 1) throw py::value_error("expected a 1-D sample array");
  return {a.data(), static_cast<std::size_t>(a.shape(0))};
}

py::array_t<double> to_numpy(std::span<const double> v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

std::vector<Interval> intervals(const std::vector<std::pair<std::int64_t, std::int64_t>>& v) {
  std::vector<Interval> out;
  out.reserve(v.size());
  for (auto [s, e] : v) out.push_back({s, e});
  return out;
}

py::dict counts_dict(const Counts& c) {
  py::dict d;
  d["tp"] = c.tp;
  d["fp"] = c.fp;
  d["fn"] = c.fn;
  d["precision"] = c.precision();
  d["recall"] = c.recall();
  d["f1"] = c.f1();
  d["defined"] = c.defined();
  return d;
}

py::dict stats_dict(const StatsTable& t) {
  const auto rows = [](const std::vector<StatsRow>& v) {
    py::dict out;
    for (const StatsRow& r : v) {
      py::dict row;
      row["count"] = r.count;
      row["total_duration_min"] = r.total_duration_min();
      row["mean_duration_sec"] = r.mean_duration_sec() ? py::cast(*r.mean_duration_sec()) : py::none();
      out[py::str(r.name)] = row;
    }
    return out;
  };
  py::dict d;
  d["recordings"] = t.recordings;
  d["recording_total_min"] = t.recording_total_min();
  d["classes"] = rows(t.classes);
  d["groups"] = rows(t.groups);
  d["skipped"] = t.skipped;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "resplab native core";

  // Leaked on purpose: the type must outlive every translated exception.
  static PyObject* error_type = py::exception<Error>(m, "Error", PyExc_RuntimeError).release().ptr();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object inst = py::reinterpret_borrow<py::object>(error_type)(e.what());
      inst.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(error_type, inst.ptr());
    }
  });

  // --- audio
  py::class_<Recording>(m, "Recording")
      .def_readonly("id", &Recording::id)
      .def_readonly("source_path", &Recording::source_path)
      .def_readonly("sample_rate", &Recording::sample_rate)
      .def_readonly("bit_depth", &Recording::bit_depth)
      .def_readonly("channels", &Recording::channels)
      .def_readonly("duration_ms", &Recording::duration_ms)
      .def_property_readonly("samples", [](const Recording& r) { return to_numpy(r.samples); })
      .def("__len__", &Recording::sample_count)
      .def("__repr__", [](const Recording& r) {
        return "<Recording " + r.id + " " + std::to_string(r.sample_rate) + " Hz " +
               std::to_string(r.duration_ms) + " ms>";
      });

  py::class_<SegmentRef>(m, "SegmentRef")
      .def_readonly("recording_id", &SegmentRef::recording_id)
      .def_readonly("index", &SegmentRef::index)
      .def_readonly("start_ms", &SegmentRef::start_ms)
      .def_readonly("end_ms", &SegmentRef::end_ms);

  m.def("load_recording", &load_recording, py::arg("path"));
  m.def("decode_wav",
        [](py::bytes data, std::string id) {
          const std::string raw = data;
          return decode_wav(std::span(reinterpret_cast<const std::uint8_t*>(raw.data()), raw.size()), std::move(id));
        },
        py::arg("data"), py::arg("id") = "memory");
  m.def("make_recording",
        [](std::string id, const Samples& samples, int sample_rate) {
          const auto s = as_span(samples);
          return make_recording(std::move(id), std::vector<double>(s.begin(), s.end()), sample_rate);
        },
        py::arg("id"), py::arg("samples"), py::arg("sample_rate"));
  m.def("truncate_segments", &truncate_segments, py::arg("recording"), py::arg("segment_length_ms") = kDefaultSegmentLengthMs);
  m.def("sample_window",
        [](const Recording& r, std::int64_t s, std::int64_t e) { return to_numpy(sample_window(r, s, e)); },
        py::arg("recording"), py::arg("start_ms"), py::arg("end_ms"));
  m.def("write_wav16",
        [](const std::filesystem::path& p, const Samples& samples, int fs) { write_wav16(p, as_span(samples), fs); },
        py::arg("path"), py::arg("samples"), py::arg("sample_rate"));

  // --- spectrogram
  py::enum_<WindowFunction>(m, "WindowFunction")
      .value("hann", WindowFunction::Hann)
      .value("hamming", WindowFunction::Hamming)
      .value("rectangular", WindowFunction::Rectangular);

  py::class_<SpectrogramParams>(m, "SpectrogramParams")
      .def(py::init([](int window_size, int hop_size, WindowFunction fn, double floor_db, double epsilon) {
             SpectrogramParams p{window_size, hop_size, fn, floor_db, epsilon};
             p.validate();
             return p;
           }),
           py::arg("window_size") = 256, py::arg("hop_size") = 64, py::arg("window_fn") = WindowFunction::Hann,
           py::arg("floor_db") = -80.0, py::arg("epsilon") = 1e-12)
      .def_readwrite("window_size", &SpectrogramParams::window_size)
      .def_readwrite("hop_size", &SpectrogramParams::hop_size)
      .def_readwrite("window_fn", &SpectrogramParams::window_fn)
      .def_readwrite("floor_db", &SpectrogramParams::floor_db)
      .def_readwrite("epsilon", &SpectrogramParams::epsilon)
      .def("validate", &SpectrogramParams::validate);

  py::class_<Spectrogram>(m, "Spectrogram")
      .def_readonly("params", &Spectrogram::params)
      .def_readonly("sample_rate", &Spectrogram::sample_rate)
      .def_property_readonly("frame_times_ms", [](const Spectrogram& s) { return to_numpy(s.frame_times_ms); })
      .def_property_readonly("bin_freqs_hz", [](const Spectrogram& s) { return to_numpy(s.bin_freqs_hz); })
      .def_property_readonly("values_db", [](const Spectrogram& s) {
        py::array_t<double> out({static_cast<py::ssize_t>(s.bins()), static_cast<py::ssize_t>(s.frames())});
        std::copy(s.values_db.begin(), s.values_db.end(), out.mutable_data());
        return out;
      });

  m.def("compute_spectrogram",
        [](const Samples& samples, int sample_rate, const SpectrogramParams& p) {
          return compute_spectrogram(as_span(samples), sample_rate, p);
        },
        py::arg("samples"), py::arg("sample_rate"), py::arg("params") = SpectrogramParams{});
  m.def("frame_magnitudes",
        [](const Samples& samples, const SpectrogramParams& p) {
          const auto mags = frame_magnitudes(as_span(samples), p);
          const auto bins = static_cast<py::ssize_t>(p.window_size / 2 + 1);
          py::array_t<double> out({static_cast<py::ssize_t>(mags.size()), bins});
          double* dst = out.mutable_data();
          for (const auto& row : mags) dst = std::copy(row.begin(), row.end(), dst);
          return out;
        },
        py::arg("samples"), py::arg("params") = SpectrogramParams{});
  m.def("make_window", &make_window, py::arg("window_fn"), py::arg("n"));

  // --- annotation
  py::enum_<LabelClass> label_class(m, "LabelClass");
  for (LabelClass c : kAllLabelClasses) label_class.value(to_string(c).data(), c);
  py::enum_<ClassGroup> group(m, "ClassGroup");
  for (ClassGroup g : kAllClassGroups) group.value(to_string(g).data(), g);
  m.def("class_group", &class_group, py::arg("cls"));
  m.def("parse_label_class", &parse_label_class, py::arg("name"));

  py::class_<Annotation>(m, "Annotation")
      .def_readonly("id", &Annotation::id)
      .def_readonly("cls", &Annotation::cls)
      .def_readonly("track_id", &Annotation::track_id)
      .def_readonly("start_ms", &Annotation::start_ms)
      .def_readonly("end_ms", &Annotation::end_ms)
      .def_readonly("annotator", &Annotation::annotator)
      .def_property_readonly("duration_ms", &Annotation::duration_ms)
      .def("__repr__", [](const Annotation& a) {
        return "<Annotation " + std::string(to_string(a.cls)) + " [" + std::to_string(a.start_ms) + ", " +
               std::to_string(a.end_ms) + ")>";
      });

  py::class_<AnnotationSet>(m, "AnnotationSet")
      .def(py::init([](std::string rec, std::string annotator, std::optional<std::int64_t> duration) {
             return AnnotationSet(std::move(rec), std::move(annotator), TrackLayout::default_layout(), duration);
           }),
           py::arg("recording_id"), py::arg("annotator"), py::arg("duration_ms") = py::none())
      .def_property_readonly("recording_id", &AnnotationSet::recording_id)
      .def_property_readonly("annotator", &AnnotationSet::annotator)
      .def_property_readonly("revision", &AnnotationSet::revision)
      .def_property_readonly("annotations", &AnnotationSet::annotations)
      .def("__len__", &AnnotationSet::size)
      .def("add_label",
           [](AnnotationSet& s, LabelClass cls, std::int64_t a, std::int64_t b) { return s.add_label(cls, a, b, s.annotator()); },
           py::arg("cls"), py::arg("start_ms"), py::arg("end_ms"))
      .def("resize_label", &AnnotationSet::resize_label, py::arg("id"), py::arg("start_ms"), py::arg("end_ms"))
      .def("delete_label", &AnnotationSet::delete_label, py::arg("id"))
      .def("validate", [](const AnnotationSet& s) {
        py::list out;
        for (const Violation& v : validate_set(s)) {
          py::dict d;
          d["kind"] = std::string(to_string(v.kind));
          d["ids"] = v.ids;
          d["message"] = v.message;
          out.append(d);
        }
        return out;
      });

  m.def("load_labels",
        [](const std::filesystem::path& p, std::optional<std::int64_t> duration) {
          return load_labels(p, {}, {}, TrackLayout::default_layout(), duration);
        },
        py::arg("path"), py::arg("duration_ms") = py::none());
  m.def("snapshot_labels", &snapshot_labels, py::arg("labels"), py::arg("path"));

  // --- metrics
  using Pairs = std::vector<std::pair<std::int64_t, std::int64_t>>;
  m.def("segment_f1",
        [](const Pairs& ref, const Pairs& pred, std::int64_t horizon_ms, std::int64_t frame_ms) {
          EvalConfig cfg;
          cfg.frame_ms = frame_ms;
          return counts_dict(segment_f1(intervals(ref), intervals(pred), horizon_ms, cfg).rows.at(0).counts);
        },
        py::arg("ref"), py::arg("pred"), py::arg("horizon_ms"), py::arg("frame_ms") = 50);
  m.def("event_f1",
        [](const Pairs& ref, const Pairs& pred, double min_iou) {
          EvalConfig cfg;
          cfg.mode = EvalMode::Event;
          cfg.match_min_iou = min_iou;
          return counts_dict(event_f1(intervals(ref), intervals(pred), cfg).rows.at(0).counts);
        },
        py::arg("ref"), py::arg("pred"), py::arg("min_iou") = 0.5);
  m.def("match_events",
        [](const Pairs& ref, const Pairs& pred, double min_iou) {
          return match_events(intervals(ref), intervals(pred), min_iou);
        },
        py::arg("ref"), py::arg("pred"), py::arg("min_iou") = 0.5);

  // --- stats
  m.def("dataset_stats",
        [](const std::filesystem::path& root, std::int64_t recording_ms) {
          return stats_dict(dataset_stats_from_dir(root, recording_ms));
        },
        py::arg("labels_dir"), py::arg("recording_ms") = 15000);

  // --- detector
  m.def("detect_events",
        [](const Samples& samples, int sample_rate, double band_low_hz, double band_high_hz,
           std::int64_t envelope_window_ms, double threshold_k, std::int64_t min_event_ms, std::int64_t merge_gap_ms) {
          DetectorConfig cfg{band_low_hz, band_high_hz, envelope_window_ms, threshold_k, min_event_ms, merge_gap_ms,
                             LabelClass::Inspiration};
          Pairs out;
          for (const Interval& iv : detect_events(as_span(samples), sample_rate, cfg).events)
            out.emplace_back(iv.start_ms, iv.end_ms);
          return out;
        },
        py::arg("samples"), py::arg("sample_rate"), py::arg("band_low_hz") = 100.0, py::arg("band_high_hz") = 1800.0,
        py::arg("envelope_window_ms") = 50, py::arg("threshold_k") = 3.0, py::arg("min_event_ms") = 100,
        py::arg("merge_gap_ms") = 50);
}
