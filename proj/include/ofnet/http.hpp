#pragma once

#include <functional>
#include <memory>
#include <string>

#include "ofnet/service.hpp"

// HTTP/1.1 surface of the report service.
//   POST /acsnservice/submit   body: binary submit batch; header X-Finder-Identity
//   POST /acsnservice/fetch    body: JSON fetch request; header Authorization
namespace ofnet::http {

inline constexpr const char* kSubmitPath = "/acsnservice/submit";
inline constexpr const char* kFetchPath = "/acsnservice/fetch";
inline constexpr const char* kFinderHeader = "X-Finder-Identity";
inline constexpr const char* kOwnerHeader = "Authorization";

class Server {
public:
    Server(service::ReportService& service, std::function<TimePoint()> clock);
    ~Server();

    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    /// Binds to `port` (0 picks a free port) and returns the bound port, or -1.
    int bind(const std::string& host, int port);
    /// Blocks until stop().
    bool serve();
    void stop();
    bool running() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Remote report endpoint.
class Client final : public service::ReportEndpoint {
public:
    Client(std::string host, int port);
    ~Client() override;

    service::HttpReply submit(ByteView body, const std::string& finder_id) override;
    service::HttpReply fetch(const std::string& body, const std::string& owner_token) override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Owner token as sent in the Authorization header: "Basic base64(user:token)".
std::string basic_auth(const std::string& user, const std::string& token);

}  // namespace ofnet::http
