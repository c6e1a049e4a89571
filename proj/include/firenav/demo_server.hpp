#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "json.hpp"

#include "firenav/env.hpp"

namespace firenav {

inline constexpr int kProtocolVersion = 1;

struct DemoServerOptions {
  Scenario scenario;
  EnvOptions env;
  std::filesystem::path demo_log;
  std::uint64_t seed = 0;           // session i plays episodes seeded from (seed, i)
  double coverage = 0.0;            // fire seeded at the start of every episode
  std::optional<std::filesystem::path> static_dir;  // served over plain HTTP when set
  std::string address = "127.0.0.1";
};

// State message for the wire protocol.
nlohmann::json state_message(const FireEnv& env, double reward);
nlohmann::json error_message(const std::string& what);

// WebSocket server for recording demonstrations. Every connection plays its
// own environment; completed episodes are appended to the demo log in one
// write, partial ones are dropped.
//
// client -> server  {"v":1,"type":"action","value":0..4}  |  {"v":1,"type":"reset"}
// server -> client  {"v":1,"type":"state",...}  |  {"v":1,"type":"error","message":...}
class DemoServer {
 public:
  explicit DemoServer(DemoServerOptions options);
  ~DemoServer();
  DemoServer(const DemoServer&) = delete;
  DemoServer& operator=(const DemoServer&) = delete;

  // Binds and starts serving on a background thread. Port 0 picks a free
  // port. Throws std::system_error when the port cannot be bound.
  void start(std::uint16_t port);
  std::uint16_t port() const;
  void stop();
  // Blocks until stop() is called from another thread or a signal arrives.
  void wait();

  // Episodes appended to the log since start.
  std::size_t episodes_recorded() const;

  struct Impl;

 private:
  std::unique_ptr<Impl> impl_;
};

}  // namespace firenav
