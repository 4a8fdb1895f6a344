// Python extension: thin wrappers that exchange JSON text with the core.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

#include "promocast/error.hpp"
#include "promocast/ingest.hpp"
#include "promocast/json_io.hpp"
#include "promocast/promo_parser.hpp"
#include "promocast/server.hpp"

namespace py = pybind11;
using namespace promocast;

namespace {

std::string parse_promotion_json(const std::string& text) {
  const ParsedPromotion p = parse_promotion(text);
  json j = {{"kind", std::string(to_string(p.kind))},
            {"k_d", p.k_d},
            {"p_t", p.p_t.to_double()},
            {"reward", p.reward},
            {"flash_hours", p.flash_hours},
            {"amount_off", p.amount_off.to_double()},
            {"canonical", render_promotion(p)}};
  return j.dump();
}

std::string generate_json(const std::string& out, const std::string& format,
                          const std::string& config_json) {
  SyntheticConfig c;
  const json j = json::parse(config_json.empty() ? "{}" : config_json);
  c.seed = j.value("seed", c.seed);
  c.n_products = j.value("n_products", c.n_products);
  c.n_days = j.value("n_days", c.n_days);
  c.base_demand = j.value("base_demand", c.base_demand);
  c.price_elasticity = j.value("price_elasticity", c.price_elasticity);
  c.promo_lift = j.value("promo_lift", c.promo_lift);
  c.season_amplitude = j.value("season_amplitude", c.season_amplitude);
  c.noise_sd = j.value("noise_sd", c.noise_sd);
  c.promotions_per_year = j.value("promotions_per_year", c.promotions_per_year);
  c.n_categories = j.value("n_categories", c.n_categories);
  if (j.contains("promotion_text")) c.fixed_promotion_text = j["promotion_text"].get<std::string>();
  const SyntheticDataset synth = generate_synthetic(c);
  save_dataset(synth.dataset, out, dataset_format_from_string(format));
  return json{{"path", out},
              {"products", synth.dataset.products.size()},
              {"promotions", synth.dataset.promotions.size()},
              {"fingerprint", hex64(dataset_fingerprint(synth.dataset))}}
      .dump();
}

std::string validate_json(const std::string& path, const std::string& format) {
  try {
    const LoadedDataset loaded = load_dataset(path, dataset_format_from_string(format));
    return json{{"valid", true},
                {"warnings", loaded.warnings},
                {"report", validate_dataset(loaded.dataset)}}
        .dump();
  } catch (const DatasetInvalid& e) {
    return json{{"valid", false}, {"report", e.report()}}.dump();
  }
}

class PyService {
 public:
  PyService(const std::string& path, const std::string& format, std::uint64_t seed,
            std::size_t workers) {
    ServiceOptions opts;
    opts.seed = seed;
    opts.workers = workers;
    service_ = std::make_unique<Service>(
        load_dataset(path, dataset_format_from_string(format)).dataset, opts);
  }

  std::pair<int, std::string> handle(const std::string& method, const std::string& path,
                                     const std::map<std::string, std::string>& query,
                                     const std::string& body) {
    py::gil_scoped_release release;
    const Response r = service_->handle(method, path, query, body);
    return {r.status, r.body.dump()};
  }

  void wait_idle() {
    py::gil_scoped_release release;
    service_->wait_idle();
  }

 private:
  std::unique_ptr<Service> service_;
};

}  // namespace

PYBIND11_MODULE(_promocast, m) {
  m.doc() = "Promotion-aware sales forecasting engine";

  static py::exception<Error> base(m, "PromocastError");
  py::register_exception<UnrecognizedPromotion>(m, "UnrecognizedPromotion", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<NotFound>(m, "NotFound", base.ptr());
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());

  m.def("parse_promotion", &parse_promotion_json, py::arg("text"),
        "Parse promotion text; returns a JSON object string.");
  m.def("generate", &generate_json, py::arg("out"), py::arg("format") = "csv-dir",
        py::arg("config") = "{}", "Write a synthetic dataset; returns a JSON summary.");
  m.def("validate", &validate_json, py::arg("path"), py::arg("format") = "csv-dir");

  py::class_<PyService>(m, "Service")
      .def(py::init<const std::string&, const std::string&, std::uint64_t, std::size_t>(),
           py::arg("path"), py::arg("format") = "csv-dir", py::arg("seed") = 42,
           py::arg("workers") = 2)
      .def("handle", &PyService::handle, py::arg("method"), py::arg("path"),
           py::arg("query") = std::map<std::string, std::string>{}, py::arg("body") = "")
      .def("wait_idle", &PyService::wait_idle);
}
