#include "http_server.hpp"

#include <httplib.h>

#include <iostream>

namespace promocast {

int run_http_server(Service& service, const std::string& host, int port) {
  httplib::Server server;
  auto dispatch = [&service](const httplib::Request& req, httplib::Response& res) {
    std::map<std::string, std::string> query;
    for (const auto& [key, value] : req.params) query.emplace(key, value);
    const Response out = service.handle(req.method, req.path, query, req.body);
    res.status = out.status;
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_content(out.body.dump(), "application/json");
  };
  server.Get(".*", dispatch);
  server.Post(".*", dispatch);
  server.Options(".*", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.status = 204;
  });
  std::cerr << "listening on http://" << host << ":" << port << "\n";
  if (!server.listen(host, port)) {
    std::cerr << "could not bind " << host << ":" << port << "\n";
    return 1;
  }
  return 0;
}

}  // namespace promocast
