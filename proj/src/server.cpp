#include "promocast/server.hpp"

#include <algorithm>
#include <charconv>
#include <regex>

#include "promocast/error.hpp"
#include "promocast/ingest.hpp"

namespace promocast {

namespace {

json error_body(std::string_view type, std::string_view message) {
  return json{{"error", {{"type", type}, {"message", message}}}};
}

std::size_t parse_count(const std::string& text, const char* name) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || value == 0) {
    throw InvalidArgument(std::string("'") + name + "' must be a positive integer");
  }
  return value;
}

Date query_date(const std::map<std::string, std::string>& query, const char* key, Date fallback) {
  auto it = query.find(key);
  return it == query.end() ? fallback : Date::parse(it->second);
}

json parse_body(const std::string& body) {
  json j = json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw InvalidArgument("request body must be a JSON object");
  }
  return j;
}

}  // namespace

ErrorResponse error_response(const std::exception& e) {
  if (dynamic_cast<const NotFound*>(&e)) return {404, error_body("NotFound", e.what())};
  if (dynamic_cast<const UnrecognizedPromotion*>(&e)) {
    return {422, error_body("UnrecognizedPromotion", e.what())};
  }
  if (dynamic_cast<const InvalidScenario*>(&e)) {
    return {422, error_body("InvalidScenario", e.what())};
  }
  if (dynamic_cast<const ParseError*>(&e)) return {422, error_body("ParseError", e.what())};
  if (dynamic_cast<const UndefinedGrowth*>(&e)) {
    return {422, error_body("UndefinedGrowth", e.what())};
  }
  if (dynamic_cast<const InsufficientHistory*>(&e)) {
    return {422, error_body("InsufficientHistory", e.what())};
  }
  if (dynamic_cast<const InvalidArgument*>(&e)) {
    return {422, error_body("InvalidArgument", e.what())};
  }
  if (dynamic_cast<const LayoutMismatch*>(&e)) return {409, error_body("LayoutMismatch", e.what())};
  return {500, error_body("Internal", e.what())};
}

Service::Service(Dataset dataset, ServiceOptions options)
    : context_(std::make_shared<const ForecastContext>(std::move(dataset), options.pipeline)),
      options_(std::move(options)),
      engine_(context_) {
  const std::vector<StatsEntry>& entries = context_->stats_entries();
  if (!entries.empty()) {
    Matrix points(0, std::tuple_size_v<StatsVector>);
    for (const StatsEntry& e : entries) {
      points.append_row(e.normalized);
      projected_ids_.push_back(e.product_id);
    }
    projection_ = project_products(points, options_.projection);
  }
  auto training = std::make_shared<TrainingSet>(context_->training_set());
  background_ = std::make_shared<const Background>(context_->background(*training));
  training_ = std::move(training);

  const std::size_t n = std::max<std::size_t>(1, options_.workers);
  for (std::size_t i = 0; i < n; ++i) {
    workers_.emplace_back([this](std::stop_token stop) { worker_loop(stop); });
  }
}

Service::~Service() {
  for (std::jthread& w : workers_) w.request_stop();
  jobs_cv_.notify_all();
  workers_.clear();
}

void Service::register_model(std::shared_ptr<const TrainedModel> model,
                             std::uint64_t dataset_fingerprint) {
  if (!model) throw InvalidArgument("null model");
  if (dataset_fingerprint != context_->fingerprint()) {
    throw LayoutMismatch("model belongs to dataset " + hex64(dataset_fingerprint) +
                         ", service holds " + hex64(context_->fingerprint()));
  }
  const FeatureLayout& layout = FeatureLayout::standard();
  if (model->layout_fingerprint != layout.fingerprint() || model->input_dim != layout.size()) {
    throw LayoutMismatch("model was trained on a different feature layout");
  }
  ModelHandle handle{std::move(model), background_};
  std::unique_lock lock(registry_mutex_);
  registry_[{handle.model->kind, dataset_fingerprint}] = std::move(handle);
}

std::optional<ModelHandle> Service::model(ModelKind kind) const {
  std::shared_lock lock(registry_mutex_);
  auto it = registry_.find({kind, context_->fingerprint()});
  if (it == registry_.end()) return std::nullopt;
  return it->second;
}

ModelHandle Service::require_model(ModelKind kind) const {
  auto handle = model(kind);
  if (!handle) {
    throw NotFound("no trained " + std::string(to_string(kind)) +
                   " model; POST /train first");
  }
  return *handle;
}

void Service::wait_idle() {
  std::unique_lock lock(jobs_mutex_);
  idle_cv_.wait(lock, [this] { return queue_.empty() && active_ == 0; });
}

Response Service::handle(const std::string& method, const std::string& path,
                         const std::map<std::string, std::string>& query,
                         const std::string& body) {
  try {
    return route(method, path, query, body);
  } catch (const std::exception& e) {
    ErrorResponse err = error_response(e);
    return {err.status, std::move(err.body)};
  }
}

Response Service::route(const std::string& method, const std::string& path,
                        const std::map<std::string, std::string>& query,
                        const std::string& body) {
  static const std::regex kProduct(R"(^/products/([^/]+)(/(sales|promotions|competitors))?/?$)");
  static const std::regex kJob(R"(^/jobs/([^/]+)/?$)");

  std::smatch m;
  if (method == "GET") {
    if (path == "/health") {
      json models = json::array();
      {
        std::shared_lock lock(registry_mutex_);
        for (const auto& [key, handle] : registry_) {
          models.push_back(std::string(to_string(key.first)));
        }
      }
      return {200, json{{"status", "ok"},
                        {"dataset_fingerprint", hex64(context_->fingerprint())},
                        {"products", context_->dataset().products.size()},
                        {"models", std::move(models)}}};
    }
    if (path == "/products" || path == "/products/") return {200, products_json()};
    if (std::regex_match(path, m, kProduct)) {
      const std::string id = m[1];
      const std::string sub = m[3];
      if (sub.empty()) return {200, product_json(id)};
      if (sub == "sales") return {200, sales_json(id, query)};
      if (sub == "promotions") return {200, promotions_json(id)};
      return {200, competitors_json(id, query)};
    }
    if (std::regex_match(path, m, kJob)) return {200, job_json(m[1])};
  } else if (method == "POST") {
    if (path == "/train") return submit_training(parse_body(body));
    if (path == "/predict") return {200, predict_json(parse_body(body))};
    if (path == "/whatif") {
      json j = json::parse(body, nullptr, false);
      if (j.is_discarded()) throw InvalidScenario("scenario body is not valid JSON");
      return {200, whatif_json(j)};
    }
  }
  return {404, error_body("NotFound", "no route " + method + " " + path)};
}

json Service::products_json() const {
  std::map<std::string, std::size_t> projected;
  for (std::size_t i = 0; i < projected_ids_.size(); ++i) projected[projected_ids_[i]] = i;
  json products = json::array();
  for (const Product& p : context_->dataset().products) {
    json item = p;
    auto st = context_->stats().find(p.id);
    item["stats"] = st == context_->stats().end() ? json(nullptr) : json(st->second);
    auto pr = projected.find(p.id);
    item["projection"] = pr == projected.end()
                             ? json(nullptr)
                             : json::array({projection_.coords[pr->second][0],
                                            projection_.coords[pr->second][1]});
    products.push_back(std::move(item));
  }
  json projection = projection_;
  projection["product_ids"] = projected_ids_;
  return json{{"products", std::move(products)}, {"projection", std::move(projection)}};
}

json Service::product_json(const std::string& id) const {
  const Product& p = context_->product(id);
  json out{{"product", p}};
  auto st = context_->stats().find(id);
  out["stats"] = st == context_->stats().end() ? json(nullptr) : json(st->second);
  out["competitors"] = context_->competitors(id);
  const Dataset& ds = context_->dataset();
  const SalesSeries* s = ds.find_series(id);
  if (s && !s->days.empty()) {
    out["sales_span"] = {{"start", s->days.front().date.to_string()},
                         {"end", s->days.back().date.to_string()},
                         {"days", s->days.size()}};
  } else {
    out["sales_span"] = nullptr;
  }
  out["promotion_count"] = ds.promotions_for(id).size();
  return out;
}

json Service::sales_json(const std::string& id,
                         const std::map<std::string, std::string>& query) const {
  context_->product(id);
  const SalesSeries* s = context_->dataset().find_series(id);
  json days = json::array();
  if (s && !s->days.empty()) {
    const Date from = query_date(query, "from", s->days.front().date);
    const Date to = query_date(query, "to", s->days.back().date);
    if (from > to) throw InvalidArgument("'from' is after 'to'");
    for (const SalesDay& d : s->days) {
      if (d.date >= from && d.date <= to) days.push_back(d);
    }
  }
  return json{{"product_id", id}, {"days", std::move(days)}};
}

json Service::promotions_json(const std::string& id) const {
  return json{{"product_id", id}, {"promotions", context_->promotions(id)}};
}

json Service::competitors_json(const std::string& id,
                               const std::map<std::string, std::string>& query) const {
  context_->product(id);
  std::size_t k = context_->options().competitors;
  if (auto it = query.find("k"); it != query.end()) k = parse_count(it->second, "k");
  const std::vector<StatsEntry>& entries = context_->stats_entries();
  auto target = std::find_if(entries.begin(), entries.end(),
                             [&](const StatsEntry& e) { return e.product_id == id; });
  CompetitorList list{{}, {}, true};
  if (target != entries.end()) list = top_competitors(*target, entries, k);
  json out = list;
  out["product_id"] = id;
  out["k"] = k;
  return out;
}

Response Service::submit_training(const json& request) {
  Job job;
  try {
    job.kind = model_kind_from_string(request.at("model_kind").get<std::string>());
    TrainingConfig base = TrainingConfig::defaults(job.kind);
    base.seed = options_.seed;
    job.config = config_from_json(request.value("config", json::object()), base);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("bad training request: ") + e.what());
  }
  std::string id;
  {
    std::lock_guard lock(jobs_mutex_);
    id = "job-" + std::to_string(next_job_++);
    job.id = id;
    jobs_[id] = std::move(job);
    queue_.push_back(id);
  }
  jobs_cv_.notify_one();
  return {202, json{{"job_id", id}, {"status", "queued"}}};
}

json Service::job_json(const std::string& id) const {
  std::lock_guard lock(jobs_mutex_);
  auto it = jobs_.find(id);
  if (it == jobs_.end()) throw NotFound("unknown job '" + id + "'");
  const Job& job = it->second;
  return json{{"job_id", job.id},
              {"status", job.status},
              {"model_kind", std::string(to_string(job.kind))},
              {"label", job.config.label},
              {"error", job.error.empty() ? json(nullptr) : json(job.error)}};
}

void Service::worker_loop(std::stop_token stop) {
  while (true) {
    std::string id;
    {
      std::unique_lock lock(jobs_mutex_);
      if (!jobs_cv_.wait(lock, stop, [this] { return !queue_.empty(); })) return;
      id = queue_.front();
      queue_.pop_front();
      jobs_[id].status = "running";
      ++active_;
    }
    run_job(id);
    {
      std::lock_guard lock(jobs_mutex_);
      --active_;
    }
    idle_cv_.notify_all();
  }
}

void Service::run_job(const std::string& id) {
  ModelKind kind;
  TrainingConfig config;
  {
    std::lock_guard lock(jobs_mutex_);
    kind = jobs_[id].kind;
    config = jobs_[id].config;
  }
  std::string error;
  try {
    TrainedModel fitted = train(kind, training_->X, training_->y, config,
                                FeatureLayout::standard().fingerprint());
    fitted.dataset_fingerprint = context_->fingerprint();
    register_model(std::make_shared<const TrainedModel>(std::move(fitted)),
                   context_->fingerprint());
  } catch (const std::exception& e) {
    error = e.what();
  }
  std::lock_guard lock(jobs_mutex_);
  Job& job = jobs_[id];
  job.status = error.empty() ? "done" : "failed";
  job.error = std::move(error);
}

json Service::predict_json(const json& request) const {
  std::string product_id;
  Date start, end;
  ModelKind kind = ModelKind::RandomForest;
  try {
    product_id = request.at("product_id").get<std::string>();
    const json& h = request.at("horizon");
    start = Date::parse(h.at("start").get<std::string>());
    end = Date::parse(h.at("end").get<std::string>());
    if (request.contains("model_kind")) {
      kind = model_kind_from_string(request.at("model_kind").get<std::string>());
    }
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("bad predict request: ") + e.what());
  }
  context_->product(product_id);
  const ModelHandle handle = require_model(kind);
  return engine_.baseline(product_id, start, end, handle);
}

json Service::whatif_json(const json& request) const {
  const Scenario scenario = scenario_from_json(request);
  context_->product(scenario.product_id);
  const ModelHandle handle = require_model(scenario.model_kind);
  const ScenarioRun run = engine_.run(scenario, handle);
  return json{{"scenario", scenario_to_json(scenario)},
              {"baseline", run.baseline},
              {"result", run.scenario},
              {"comparison", run.comparison},
              {"promotions", run.edited_promotions}};
}

}  // namespace promocast
