#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <thread>
#include <vector>

#include "promocast/json_io.hpp"
#include "promocast/pipeline.hpp"
#include "promocast/whatif.hpp"

namespace promocast {

// Maps a thrown exception onto an HTTP status and a JSON error body of the
// form {"error": {"type": ..., "message": ...}}.
struct ErrorResponse {
  int status = 500;
  json body;
};
ErrorResponse error_response(const std::exception& e);

struct Response {
  int status = 200;
  json body;
};

struct ServiceOptions {
  PipelineOptions pipeline;
  // Default training seed for jobs whose config does not set one.
  std::uint64_t seed = 42;
  std::size_t workers = 2;
  TsneOptions projection;
};

// Transport-independent request handler behind `promocast serve`.
class Service {
 public:
  Service(Dataset dataset, ServiceOptions options = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // `path` excludes the query string; `query` holds decoded parameters.
  Response handle(const std::string& method, const std::string& path,
                  const std::map<std::string, std::string>& query,
                  const std::string& body);

  const ForecastContext& context() const { return *context_; }

  // Adds a model trained elsewhere. Throws LayoutMismatch when it was built
  // for another dataset or feature layout.
  void register_model(std::shared_ptr<const TrainedModel> model,
                      std::uint64_t dataset_fingerprint);
  std::optional<ModelHandle> model(ModelKind kind) const;

  // Blocks until every queued training job has finished.
  void wait_idle();

 private:
  struct Job {
    std::string id;
    ModelKind kind = ModelKind::RandomForest;
    TrainingConfig config;
    std::string status = "queued";  // queued | running | done | failed
    std::string error;
  };
  using Key = std::pair<ModelKind, std::uint64_t>;

  Response route(const std::string& method, const std::string& path,
                 const std::map<std::string, std::string>& query, const std::string& body);
  json products_json() const;
  json product_json(const std::string& id) const;
  json sales_json(const std::string& id, const std::map<std::string, std::string>& query) const;
  json promotions_json(const std::string& id) const;
  json competitors_json(const std::string& id,
                        const std::map<std::string, std::string>& query) const;
  Response submit_training(const json& request);
  json job_json(const std::string& id) const;
  json predict_json(const json& request) const;
  json whatif_json(const json& request) const;
  ModelHandle require_model(ModelKind kind) const;
  void worker_loop(std::stop_token stop);
  void run_job(const std::string& id);

  std::shared_ptr<const ForecastContext> context_;
  ServiceOptions options_;
  WhatIfEngine engine_;
  Projection2D projection_;
  std::vector<std::string> projected_ids_;
  std::shared_ptr<const TrainingSet> training_;
  std::shared_ptr<const Background> background_;

  mutable std::shared_mutex registry_mutex_;
  std::map<Key, ModelHandle> registry_;

  mutable std::mutex jobs_mutex_;
  std::condition_variable_any jobs_cv_;
  std::condition_variable idle_cv_;
  std::deque<std::string> queue_;
  std::map<std::string, Job> jobs_;
  std::size_t next_job_ = 1;
  std::size_t active_ = 0;
  std::vector<std::jthread> workers_;
};

}  // namespace promocast
