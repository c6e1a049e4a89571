#include "firenav/demo_server.hpp"

#include <atomic>
#include <deque>
#include <fstream>
#include <mutex>
#include <set>
#include <system_error>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast.hpp>
#include <boost/beast/websocket.hpp>

#include "firenav/episode_log.hpp"

namespace firenav {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using nlohmann::json;

namespace {

char cell_char(const Cell& c) {
  switch (c.kind) {
    case CellKind::Free: return '.';
    case CellKind::Obstacle: return c.jumpable ? 'o' : '#';
    case CellKind::Fire: return 'F';
    case CellKind::Goal: return 'G';
  }
  return '?';
}

std::string_view mime_type(const std::filesystem::path& p) {
  const std::string ext = p.extension().string();
  if (ext == ".html") return "text/html";
  if (ext == ".js" || ext == ".mjs") return "application/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  return "application/octet-stream";
}

}  // namespace

json state_message(const FireEnv& env, double reward) {
  const Grid& g = env.grid();
  json grid = json::array();
  for (int y = 0; y < g.height(); ++y) {
    json row = json::array();
    for (int x = 0; x < g.width(); ++x) row.push_back(std::string(1, cell_char(g.at({x, y}))));
    grid.push_back(std::move(row));
  }
  const Frame& f = env.observation().newest();
  json frame = json::array();
  for (int r = 0; r < f.size; ++r) {
    json row = json::array();
    for (int c = 0; c < f.size; ++c) row.push_back(f.at(r, c));
    frame.push_back(std::move(row));
  }
  return {{"v", kProtocolVersion},
          {"type", "state"},
          {"grid", std::move(grid)},
          {"pose",
           {{"x", env.pose().position.x},
            {"y", env.pose().position.y},
            {"heading", std::string(1, heading_char(env.pose().heading))}}},
          {"frame", std::move(frame)},
          {"reward", reward},
          {"terminal", env.terminal()},
          {"outcome", std::string(outcome_name(env.outcome()))},
          {"t", env.t()}};
}

json error_message(const std::string& what) {
  return {{"v", kProtocolVersion}, {"type", "error"}, {"message", what}};
}

struct DemoServer::Impl {
  DemoServerOptions options;
  asio::io_context ioc{1};
  tcp::acceptor acceptor{ioc};
  std::thread worker;
  std::mutex log_mutex;
  std::atomic<std::size_t> recorded{0};
  std::atomic<std::uint64_t> sessions{0};
  std::atomic<bool> running{false};

  void append(const EpisodeRecord& e) {
    std::lock_guard lock(log_mutex);
    append_episode(options.demo_log, e);
    ++recorded;
  }

  void accept();
};

namespace {

class Session : public std::enable_shared_from_this<Session> {
 public:
  Session(DemoServer::Impl& server, tcp::socket socket, std::uint64_t index)
      : server_(server), ws_(std::move(socket)), index_(index) {}

  void start(http::request<http::string_body> req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
      if (ec) return;
      self->reset();
      self->send(state_message(*self->env_, 0.0));
      self->read();
    });
  }

 private:
  void reset() {
    const std::uint64_t seed = derive_seed(server_.options.seed, (index_ << 20) + episode_++);
    env_.emplace(episode_start(server_.options.scenario, server_.options.env, seed,
                               server_.options.coverage));
    recorder_.emplace(server_.options.scenario, seed, server_.options.coverage);
  }

  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return;  // closed or failed: a partial episode is simply dropped
      const std::string text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      self->send(self->handle(text));
      self->read();
    });
  }

  json handle(const std::string& text) {
    json msg;
    try {
      msg = json::parse(text);
    } catch (const json::exception&) {
      return error_message("message is not JSON");
    }
    if (!msg.is_object() || !msg.contains("v") || msg["v"] != kProtocolVersion)
      return error_message("expected protocol version 1");
    const std::string type = msg.value("type", "");
    if (type == "reset") {
      reset();
      return state_message(*env_, 0.0);
    }
    if (type != "action") return error_message("unknown message type '" + type + "'");
    if (!msg.contains("value") || !msg["value"].is_number_integer())
      return error_message("action value must be an integer 0..4");
    const auto action = action_from_index(msg["value"].get<long long>());
    if (!action) return error_message("action value must be an integer 0..4");
    if (env_->terminal()) return error_message("episode is over; send reset");
    const StepResult r = env_->step(*action);
    recorder_->record(*action, r);
    if (r.terminal) server_.append(recorder_->finish(r.outcome));
    return state_message(*env_, r.reward);
  }

  void send(const json& msg) {
    queue_.push_back(msg.dump());
    if (queue_.size() == 1) write_next();
  }

  void write_next() {
    ws_.text(true);
    ws_.async_write(asio::buffer(queue_.front()),
                    [self = shared_from_this()](beast::error_code ec, std::size_t) {
                      if (ec) return;
                      self->queue_.pop_front();
                      if (!self->queue_.empty()) self->write_next();
                    });
  }

  DemoServer::Impl& server_;
  websocket::stream<beast::tcp_stream> ws_;
  std::uint64_t index_;
  std::uint64_t episode_ = 0;
  beast::flat_buffer buffer_;
  std::deque<std::string> queue_;
  std::optional<FireEnv> env_;
  std::optional<EpisodeRecorder> recorder_;
};

// Reads one HTTP request; upgrades to WebSocket or serves a static file.
class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(DemoServer::Impl& server, tcp::socket socket)
      : server_(server), stream_(std::move(socket)) {}

  void start() {
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, req_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return;
      self->dispatch();
    });
  }

 private:
  void dispatch() {
    if (websocket::is_upgrade(req_)) {
      stream_.expires_never();
      std::make_shared<Session>(server_, stream_.release_socket(), server_.sessions++)->start(std::move(req_));
      return;
    }
    auto res = std::make_shared<http::response<http::string_body>>(http::status::not_found, req_.version());
    res->set(http::field::content_type, "text/plain");
    res->body() = "not found\n";
    if (server_.options.static_dir && req_.method() == http::verb::get) {
      std::string target(req_.target());
      if (const auto q = target.find('?'); q != std::string::npos) target.resize(q);
      if (target.empty() || target.back() == '/') target += "index.html";
      if (target.find("..") == std::string::npos) {
        const auto path = *server_.options.static_dir / target.substr(1);
        std::ifstream in(path, std::ios::binary);
        if (in) {
          res->result(http::status::ok);
          res->set(http::field::content_type, std::string(mime_type(path)));
          res->body().assign(std::istreambuf_iterator<char>(in), {});
        }
      }
    }
    res->prepare_payload();
    http::async_write(stream_, *res, [self = shared_from_this(), res](beast::error_code, std::size_t) {
      self->stream_.socket().shutdown(tcp::socket::shutdown_send);
    });
  }

  DemoServer::Impl& server_;
  beast::tcp_stream stream_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
};

}  // namespace

void DemoServer::Impl::accept() {
  acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
    if (ec) return;
    std::make_shared<HttpSession>(*this, std::move(socket))->start();
    accept();
  });
}

DemoServer::DemoServer(DemoServerOptions options) : impl_(std::make_unique<Impl>()) {
  validate(options.scenario);
  impl_->options = std::move(options);
}

DemoServer::~DemoServer() { stop(); }

void DemoServer::start(std::uint16_t port) {
  const tcp::endpoint ep(asio::ip::make_address(impl_->options.address), port);
  beast::error_code ec;
  auto check = [&](const char* what) {
    if (ec) throw std::system_error(std::error_code(ec.value(), std::system_category()), what);
  };
  impl_->acceptor.open(ep.protocol(), ec);
  check("open");
  impl_->acceptor.set_option(asio::socket_base::reuse_address(true), ec);
  check("setsockopt");
  impl_->acceptor.bind(ep, ec);
  check("bind");
  impl_->acceptor.listen(asio::socket_base::max_listen_connections, ec);
  check("listen");
  impl_->running = true;
  impl_->accept();
  impl_->worker = std::thread([this] { impl_->ioc.run(); });
}

std::uint16_t DemoServer::port() const { return impl_->acceptor.local_endpoint().port(); }

void DemoServer::stop() {
  if (!impl_->running.exchange(false)) return;
  impl_->ioc.stop();
  if (impl_->worker.joinable()) impl_->worker.join();
}

void DemoServer::wait() {
  asio::io_context signals_ctx;
  asio::signal_set signals(signals_ctx, SIGINT, SIGTERM);
  signals.async_wait([&](beast::error_code, int) { stop(); });
  while (impl_->running) signals_ctx.run_for(std::chrono::milliseconds(100));
}

std::size_t DemoServer::episodes_recorded() const { return impl_->recorded; }

}  // namespace firenav
