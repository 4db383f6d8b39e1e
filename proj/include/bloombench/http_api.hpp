#pragma once

#include <functional>
#include <string>

#include "bloombench/curation.hpp"
#include "bloombench/error.hpp"

namespace httplib {
class Server;
}

namespace bloombench {

/// HTTP status for a library error: 404 unknown scene/session, 409 closed
/// session, 422 invalid input, 400 malformed body, 500 otherwise.
int http_status(ErrorCode code) noexcept;

/// Registers every curation endpoint on `server`.
void register_routes(httplib::Server& server, CurationService& service);

/// Blocks serving on cfg.host:cfg.port until `stop` is requested via SIGINT
/// or SIGTERM. Port 0 binds an ephemeral port. `on_ready` receives the bound
/// port once listening.
int serve(CurationService& service, const std::function<void(int port)>& on_ready);

}  // namespace bloombench
