#pragma once

#include <string>

#include "promocast/server.hpp"

namespace promocast {

// Serves `service` over HTTP until the process is interrupted.
int run_http_server(Service& service, const std::string& host, int port);

}  // namespace promocast
