#pragma once

// Newline-delimited JSON protocol exposing the environment to external agents.
//
//   {"cmd":"reset","instance":<name>,"seed":<int>,"perturb":<float>}
//       -> {"state_id":<int>,"features":{...},"eta0":<float>,"port_ids":[...],"vessel_classes":[...]}
//   {"cmd":"step","state_id":<int>,"vessel":<int>,"ports":[<UNLOCODE>...]}
//       -> {"features":{...},"reward":<float>,"done":<bool>,"profit":<float>}
//   {"cmd":"order_ports","ports":[...]}  (optional "state_id" or "instance")
//       -> {"ports":[...]}
//   {"cmd":"close","state_id":<int>} -> {"ok":true}
//
// Failures reply {"error":<message>} and leave the session usable.

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <functional>
#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <utility>

#include <nlohmann/json.hpp>

#include "lsndp/env.hpp"
#include "lsndp/error.hpp"
#include "lsndp/linerlib_io.hpp"
#include "lsndp/perturb.hpp"
#include "lsndp/search.hpp"

namespace lsndp {

inline nlohmann::json matrix_json(std::size_t rows, std::size_t cols, const std::vector<double>& data) {
  return {{"shape", {rows, cols}}, {"data", data}};
}

inline nlohmann::json features_json(const StateFeatures& f) {
  return {{"ports", matrix_json(f.port_rows, 2, f.ports)},
          {"edges", matrix_json(f.edge_rows, f.edge_count, f.edges)},
          {"vessels", matrix_json(f.vessel_rows, kVesselFeatureCount, f.vessels)}};
}

// Resolves instance names for `reset`. Thread-safe, caches parsed instances.
class InstanceCache {
 public:
  using Loader = std::function<Instance(const std::string&)>;

  explicit InstanceCache(Loader loader) : loader_(std::move(loader)) {}

  static std::shared_ptr<InstanceCache> from_directory(std::filesystem::path dir, ParseOptions options = {}) {
    return std::make_shared<InstanceCache>([dir = std::move(dir), options](const std::string& name) {
      return parse_instance(dir, name, options);
    });
  }

  std::shared_ptr<const Instance> get(const std::string& name) {
    std::lock_guard lock(mutex_);
    auto it = cache_.find(name);
    if (it != cache_.end()) return it->second;
    auto instance = std::make_shared<const Instance>(loader_(name));
    cache_.emplace(name, instance);
    return instance;
  }

 private:
  Loader loader_;
  std::mutex mutex_;
  std::map<std::string, std::shared_ptr<const Instance>> cache_;
};

// One connection's worth of environments. Not thread-safe; one session per client.
class ProtocolSession {
 public:
  ProtocolSession(std::shared_ptr<InstanceCache> instances, CostConfig costs = {})
      : instances_(std::move(instances)), costs_(costs) {}

  nlohmann::json handle(const nlohmann::json& request) {
    try {
      if (!request.is_object() || !request.contains("cmd") || !request["cmd"].is_string())
        throw InputError("request must be an object with a string 'cmd'");
      const std::string cmd = request["cmd"].get<std::string>();
      if (cmd == "reset") return reset(request);
      if (cmd == "step") return step(request);
      if (cmd == "order_ports") return order(request);
      if (cmd == "close") return close(request);
      throw InputError("unknown cmd '" + cmd + "'");
    } catch (const nlohmann::json::exception& e) {
      return {{"error", std::string("malformed request: ") + e.what()}};
    } catch (const std::exception& e) {
      return {{"error", e.what()}};
    }
  }

  std::string handle_line(const std::string& line) {
    nlohmann::json request;
    try {
      request = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      return nlohmann::json({{"error", std::string("invalid JSON: ") + e.what()}}).dump();
    }
    return handle(request).dump();
  }

  std::size_t open_states() const { return states_.size(); }

 private:
  struct Slot {
    std::shared_ptr<const Environment> env;
    EnvState state;
  };

  std::shared_ptr<const Environment> environment_for(const std::string& name, double perturb,
                                                     std::uint64_t seed) {
    auto base = instances_->get(name);
    if (perturb > 0)
      return std::make_shared<const Environment>(
          std::make_shared<const Instance>(perturb_one(*base, perturb, seed, 0)), costs_);
    auto it = envs_.find(name);
    if (it != envs_.end()) return it->second;
    auto env = std::make_shared<const Environment>(base, costs_);
    envs_.emplace(name, env);
    return env;
  }

  Slot& slot(const nlohmann::json& request) {
    const int id = request.at("state_id").get<int>();
    auto it = states_.find(id);
    if (it == states_.end()) throw InputError("unknown state_id " + std::to_string(id));
    return it->second;
  }

  nlohmann::json reset(const nlohmann::json& request) {
    const std::string name = request.at("instance").get<std::string>();
    const auto seed = request.value("seed", std::uint64_t{0});
    const double perturb = request.value("perturb", 0.0);
    if (perturb < 0) throw InputError("perturb must be >= 0");
    auto env = environment_for(name, perturb, seed);
    EnvState state = env->reset(seed);
    const int id = next_id_++;
    nlohmann::json reply = {{"state_id", id},
                            {"features", features_json(env->featurize(state))},
                            {"eta0", state.profit_history.front()}};
    auto ports = nlohmann::json::array();
    for (const auto& p : env->instance().ports()) ports.push_back(p.id);
    auto classes = nlohmann::json::array();
    for (const auto& v : env->instance().fleet()) classes.push_back(v.name);
    reply["port_ids"] = std::move(ports);
    reply["vessel_classes"] = std::move(classes);
    last_env_ = env;
    states_.emplace(id, Slot{std::move(env), std::move(state)});
    return reply;
  }

  nlohmann::json step(const nlohmann::json& request) {
    Slot& s = slot(request);
    const Instance& instance = s.env->instance();
    const int vessel = request.at("vessel").get<int>();
    if (vessel < 0 || static_cast<std::size_t>(vessel) >= instance.fleet().size())
      throw InputError("unknown vessel class index " + std::to_string(vessel));
    Action action{static_cast<ClassIndex>(vessel),
                  resolve_ports(instance, request.at("ports").get<std::vector<std::string>>())};
    StepResult result = s.env->step(s.state, action);
    s.state = std::move(result.state);
    return {{"features", features_json(s.env->featurize(s.state))},
            {"reward", result.reward},
            {"done", result.done},
            {"profit", s.state.profit_history.back()}};
  }

  nlohmann::json order(const nlohmann::json& request) {
    std::shared_ptr<const Environment> env;
    if (request.contains("state_id"))
      env = slot(request).env;
    else if (request.contains("instance"))
      env = environment_for(request["instance"].get<std::string>(), 0.0, 0);
    else
      env = last_env_;
    if (!env) throw InputError("order_ports needs a prior reset, a state_id or an instance");
    const Instance& instance = env->instance();
    const auto ordered =
        order_ports(resolve_ports(instance, request.at("ports").get<std::vector<std::string>>()), instance);
    auto ports = nlohmann::json::array();
    for (PortIndex p : ordered) ports.push_back(instance.port(p).id);
    return {{"ports", std::move(ports)}};
  }

  nlohmann::json close(const nlohmann::json& request) {
    const int id = request.at("state_id").get<int>();
    if (states_.erase(id) == 0) throw InputError("unknown state_id " + std::to_string(id));
    return {{"ok", true}};
  }

  std::shared_ptr<InstanceCache> instances_;
  CostConfig costs_;
  std::map<std::string, std::shared_ptr<const Environment>> envs_;
  std::map<int, Slot> states_;
  std::shared_ptr<const Environment> last_env_;
  int next_id_ = 1;
};

// Serves requests line by line until end of input.
inline void serve_stream(std::istream& in, std::ostream& out, ProtocolSession& session) {
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    out << session.handle_line(line) << '\n' << std::flush;
  }
}

namespace protocol_detail {

inline bool send_all(int fd, const std::string& data) {
  std::size_t sent = 0;
  while (sent < data.size()) {
    const ssize_t n = ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    sent += static_cast<std::size_t>(n);
  }
  return true;
}

inline void serve_connection(int fd, std::shared_ptr<InstanceCache> instances, CostConfig costs) {
  ProtocolSession session(std::move(instances), costs);
  std::string buffer;
  char chunk[4096];
  while (true) {
    const ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) break;
    buffer.append(chunk, static_cast<std::size_t>(n));
    std::size_t newline;
    while ((newline = buffer.find('\n')) != std::string::npos) {
      std::string line = buffer.substr(0, newline);
      buffer.erase(0, newline + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      if (!send_all(fd, session.handle_line(line) + "\n")) {
        ::close(fd);
        return;
      }
    }
  }
  ::close(fd);
}

}  // namespace protocol_detail

// Listens on 127.0.0.1:`port` (0 picks a free port); each connection gets its
// own session on its own thread. `on_listening` receives the bound port.
// Returns after `max_connections` connections have finished (0 = never).
inline void serve_tcp(std::uint16_t port, std::shared_ptr<InstanceCache> instances, CostConfig costs,
                      std::size_t max_connections = 0,
                      const std::function<void(std::uint16_t)>& on_listening = {}) {
  const int listener = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listener < 0) throw std::runtime_error(std::string("socket: ") + std::strerror(errno));
  const int yes = 1;
  ::setsockopt(listener, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(port);
  if (::bind(listener, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 || ::listen(listener, 16) < 0) {
    const std::string reason = std::strerror(errno);
    ::close(listener);
    throw std::runtime_error("cannot listen on port " + std::to_string(port) + ": " + reason);
  }
  socklen_t len = sizeof addr;
  ::getsockname(listener, reinterpret_cast<sockaddr*>(&addr), &len);
  if (on_listening) on_listening(ntohs(addr.sin_port));

  std::vector<std::thread> workers;
  std::size_t accepted = 0;
  while (max_connections == 0 || accepted < max_connections) {
    const int fd = ::accept(listener, nullptr, nullptr);
    if (fd < 0) {
      if (errno == EINTR) continue;
      break;
    }
    ++accepted;
    workers.emplace_back(protocol_detail::serve_connection, fd, instances, costs);
  }
  ::close(listener);
  for (auto& w : workers) w.join();
}

}  // namespace lsndp
