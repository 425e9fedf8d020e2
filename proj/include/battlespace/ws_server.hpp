#pragma once

// Websocket front end for SessionManager. One text frame carries one JSON
// message. All socket work runs on a single io thread; hint searches run on
// a worker pool and post their replies back.

#include <atomic>
#include <csignal>
#include <deque>
#include <map>
#include <memory>
#include <string>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "battlespace/session.hpp"

namespace battlespace {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace websocket = boost::beast::websocket;
using tcp = boost::asio::ip::tcp;

class WsServer {
 public:
  WsServer(SessionManager& manager, const std::string& address, unsigned short port, int hintThreads = 1)
      : manager_(manager), acceptor_(io_), hintPool_(static_cast<std::size_t>(std::max(1, hintThreads))) {
    const tcp::endpoint ep(net::ip::make_address(address), port);
    acceptor_.open(ep.protocol());
    acceptor_.set_option(net::socket_base::reuse_address(true));
    acceptor_.bind(ep);
    acceptor_.listen();
  }

  ~WsServer() { stop(); }

  unsigned short port() const { return acceptor_.local_endpoint().port(); }
  std::string address() const { return acceptor_.local_endpoint().address().to_string(); }

  // Serves on the calling thread until stop() or SIGINT/SIGTERM.
  void run() {
    signals_.async_wait([this](beast::error_code ec, int) {
      if (!ec) shutdown();
    });
    accept();
    io_.run();
  }

  void start() {
    thread_ = std::thread([this] { run(); });
  }

  void stop() {
    if (stopped_.exchange(true)) return;
    hintPool_.join();
    net::post(io_, [this] { shutdown(); });
    if (thread_.joinable()) thread_.join();
    io_.stop();
  }

 private:
  void shutdown() {
    beast::error_code ec;
    signals_.cancel(ec);
    acceptor_.close(ec);
    auto open = conns_;
    for (auto& [id, c] : open) c->ws.next_layer().close(ec);
  }

  struct Conn : std::enable_shared_from_this<Conn> {
    Conn(tcp::socket s, ConnectionId i) : ws(std::move(s)), id(i) {}
    websocket::stream<tcp::socket> ws;
    ConnectionId id;
    beast::flat_buffer buffer;
    std::deque<std::string> outbox;
    bool open = true;
  };

  void accept() {
    acceptor_.async_accept([this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;
      auto c = std::make_shared<Conn>(std::move(socket), ++nextId_);
      c->ws.async_accept([this, c](beast::error_code aec) {
        if (aec) return;
        c->ws.text(true);
        conns_[c->id] = c;
        read(c);
      });
      accept();
    });
  }

  void read(const std::shared_ptr<Conn>& c) {
    c->ws.async_read(c->buffer, [this, c](beast::error_code ec, std::size_t) {
      if (ec) {
        close(c);
        return;
      }
      const std::string text = beast::buffers_to_string(c->buffer.data());
      c->buffer.consume(c->buffer.size());
      dispatch(c->id, text);
      read(c);
    });
  }

  void dispatch(ConnectionId id, const std::string& text) {
    json msg;
    try {
      msg = json::parse(text);
    } catch (const json::exception&) {
      deliver({{id, error_message("", "bad_message", "frame is not JSON", "")}});
      return;
    }
    if (msg.is_object() && msg.contains("type") && msg["type"] == "request_hint") {
      net::post(hintPool_, [this, id, msg] {
        auto out = manager_.handle(id, msg);
        net::post(io_, [this, out = std::move(out)] { deliver(out); });
      });
      return;
    }
    deliver(msg.is_object() ? manager_.handle(id, msg)
                            : std::vector<Outbound>{{id, error_message("", "bad_message", "frame is not an object", "")}});
  }

  void close(const std::shared_ptr<Conn>& c) {
    if (!c->open) return;
    c->open = false;
    conns_.erase(c->id);
    deliver(manager_.disconnect(c->id));
  }

  void deliver(const std::vector<Outbound>& out) {
    for (const Outbound& o : out) {
      auto it = conns_.find(o.to);
      if (it == conns_.end()) continue;
      auto& c = it->second;
      c->outbox.push_back(o.message.dump());
      if (c->outbox.size() == 1) write(c);
    }
  }

  void write(const std::shared_ptr<Conn>& c) {
    c->ws.async_write(net::buffer(c->outbox.front()), [this, c](beast::error_code ec, std::size_t) {
      if (ec) {
        close(c);
        return;
      }
      c->outbox.pop_front();
      if (!c->outbox.empty()) write(c);
    });
  }

  SessionManager& manager_;
  net::io_context io_;
  tcp::acceptor acceptor_;
  net::thread_pool hintPool_;
  net::signal_set signals_{io_, SIGINT, SIGTERM};
  std::map<ConnectionId, std::shared_ptr<Conn>> conns_;
  ConnectionId nextId_ = 0;
  std::thread thread_;
  std::atomic<bool> stopped_{false};
};

}  // namespace battlespace
