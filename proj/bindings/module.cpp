#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "tos/engine.hpp"

namespace py = pybind11;
using namespace tos;

namespace {

py::dict run_scenario(const std::string& scenario, const std::string& layout,
                      const std::string& tariffs, const std::string& master, i64 seed) {
  Engine engine(gather_inputs(scenario, layout, tariffs, master, seed));
  RunOutputs out = engine.run();
  py::dict files;
  for (const auto& [name, content] : out.files) files[py::str(name)] = py::bytes(content);
  return files;
}

}  // namespace

PYBIND11_MODULE(_quayside, m) {
  m.doc() = "container terminal operations engine";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const TosError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  // container identity
  py::class_<ContainerId>(m, "ContainerId")
      .def_property_readonly("owner", [](const ContainerId& c) { return c.owner; })
      .def_property_readonly("category", [](const ContainerId& c) { return std::string(1, c.category); })
      .def_property_readonly("serial", [](const ContainerId& c) { return c.serial; })
      .def_property_readonly("check_digit", [](const ContainerId& c) { return c.check_digit; })
      .def("__str__", &ContainerId::str)
      .def("__repr__", [](const ContainerId& c) { return "ContainerId('" + c.str() + "')"; });

  m.def("validate_container_id",
        [](const std::string& text) { return validate_container_id(text); },
        py::arg("text"), "Parse and verify an ISO 6346 container number.");
  m.def("check_digit",
        [](const std::string& first10) { return iso6346_check_digit(first10); },
        py::arg("first10"), "Check digit for the first 10 characters of a container number.");

  // EDIFACT
  py::class_<EdifactDocument>(m, "EdifactDocument")
      .def_property_readonly("segment_count",
                             [](const EdifactDocument& d) { return d.segments.size(); })
      .def_property_readonly("message_type", &EdifactDocument::message_type)
      .def("serialize", [](const EdifactDocument& d) { return serialize(d); });

  m.def("tokenize", [](const std::string& text) { return tokenize(text); }, py::arg("text"),
        "Tokenize EDIFACT text into a document (envelope validated).");
  m.def("parse_baplie_file", [](const std::string& path) {
    auto doc = tokenize(read_text_file(path));
    auto parsed = parse_baplie(doc, EdiMapping::builtin());
    py::list entries;
    for (const auto& e : parsed.entries) {
      py::dict d;
      d["container"] = e.container.str();
      d["bay"] = e.position.bay;
      d["row"] = e.position.row;
      d["tier"] = e.position.tier;
      d["size_type"] = e.size_type;
      d["weight_kg"] = e.weight_kg;
      d["pod"] = e.pod;
      entries.append(d);
    }
    return entries;
  }, py::arg("path"), "Parse a BAPLIE file into stow entries.");

  // yard heuristics
  m.def("estimate_rehandles", &estimate_rehandles, py::arg("stack"), py::arg("retrieval_order"),
        py::arg("aux_stacks") = 1,
        "Greedy relocation count for digging a retrieval order out of a stack.");

  // archiving
  py::enum_<ArchiveTier>(m, "ArchiveTier")
      .value("Operational", ArchiveTier::Operational)
      .value("MidTerm", ArchiveTier::MidTerm)
      .value("LongTerm", ArchiveTier::LongTerm);
  m.def("tier_for_age_years",
        [](double years) { return tier_for_age(static_cast<TimeMs>(years * kMsPerYear)); },
        py::arg("years"), "Archive tier for a record of the given age.");

  // billing
  m.def("billable_storage_days", &billable_storage_days, py::arg("in_at_ms"),
        py::arg("out_at_ms"), py::arg("free_days"));
  m.def("line_amount", &line_amount, py::arg("qty"), py::arg("unit_price_cents"),
        py::arg("discount_pct"));

  // full pipeline
  m.def("run_scenario", &run_scenario, py::arg("scenario"), py::arg("layout"),
        py::arg("tariffs"), py::arg("master"), py::arg("seed") = 0,
        "Run a scenario end to end; returns {filename: bytes} outputs.");

  m.def("parse_iso8601", [](const std::string& s) { return parse_iso8601(s); });
  m.def("format_iso8601", [](TimeMs t) { return format_iso8601(t); });
}
