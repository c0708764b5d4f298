#include "ofnet/http.hpp"

#include <httplib.h>

namespace ofnet::http {

struct Server::Impl {
    service::ReportService& service;
    std::function<TimePoint()> clock;
    httplib::Server server;

    Impl(service::ReportService& s, std::function<TimePoint()> c) : service(s), clock(std::move(c)) {}
};

Server::Server(service::ReportService& service, std::function<TimePoint()> clock)
    : impl_(std::make_unique<Impl>(service, std::move(clock))) {
    Impl& impl = *impl_;
    impl.server.Post(kSubmitPath, [&impl](const httplib::Request& req, httplib::Response& res) {
        ByteView body(reinterpret_cast<const std::uint8_t*>(req.body.data()), req.body.size());
        auto reply = impl.service.handle_submit(body, req.get_header_value(kFinderHeader), impl.clock());
        res.status = reply.status;
        res.set_content(reply.body, "application/json");
    });
    impl.server.Post(kFetchPath, [&impl](const httplib::Request& req, httplib::Response& res) {
        auto reply = impl.service.handle_fetch(req.body, req.get_header_value(kOwnerHeader), impl.clock());
        res.status = reply.status;
        res.set_content(reply.body, "application/json");
    });
}

Server::~Server() { stop(); }

int Server::bind(const std::string& host, int port) {
    if (port == 0) return impl_->server.bind_to_any_port(host);
    return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool Server::serve() { return impl_->server.listen_after_bind(); }

void Server::stop() {
    if (impl_) impl_->server.stop();
}

bool Server::running() const { return impl_->server.is_running(); }

struct Client::Impl {
    httplib::Client client;
    Impl(const std::string& host, int port) : client(host, port) {}
};

Client::Client(std::string host, int port) : impl_(std::make_unique<Impl>(host, port)) {}
Client::~Client() = default;

namespace {

service::HttpReply to_reply(const httplib::Result& result) {
    if (!result) {
        throw Error("HTTP request failed: " + httplib::to_string(result.error()));
    }
    return {result->status, result->body};
}

}  // namespace

service::HttpReply Client::submit(ByteView body, const std::string& finder_id) {
    httplib::Headers headers{{kFinderHeader, finder_id}};
    std::string content(reinterpret_cast<const char*>(body.data()), body.size());
    return to_reply(impl_->client.Post(kSubmitPath, headers, content, "application/octet-stream"));
}

service::HttpReply Client::fetch(const std::string& body, const std::string& owner_token) {
    httplib::Headers headers{{kOwnerHeader, owner_token}};
    return to_reply(impl_->client.Post(kFetchPath, headers, body, "application/json"));
}

std::string basic_auth(const std::string& user, const std::string& token) {
    std::string raw = user + ":" + token;
    return "Basic " + base64_encode(as_bytes(raw));
}

}  // namespace ofnet::http
