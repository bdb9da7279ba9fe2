#include <httplib.h>

#include <atomic>
#include <csignal>
#include <fstream>
#include <mutex>
#include <ostream>

#include "commands.hpp"
#include "common.hpp"
#include "dynspeckle/error.hpp"
#include "dynspeckle/stack_io.hpp"
#include "tuning_service.hpp"

namespace dynspeckle::cli {
namespace {

std::mutex g_server_mutex;
httplib::Server* g_server = nullptr;
std::atomic<bool> g_stop_requested{false};

extern "C" void on_signal(int) { g_stop_requested = true; }

}  // namespace

void stop_serving() {
  g_stop_requested = true;
  std::lock_guard lock(g_server_mutex);
  if (g_server) g_server->stop();
}

void run_serve(const ServeOptions& o, std::ostream& out) {
  if (o.host != "127.0.0.1" && o.host != "localhost" && o.host != "::1") {
    throw InvalidArgumentError("the service only binds to loopback addresses", "host");
  }
  if (o.port < 0 || o.port > 65535) throw InvalidArgumentError("port out of range", "port");

  service::ServiceOptions options;
  options.preview_factor = o.preview_factor;
  options.threads = o.threads;
  service::TuningService svc(options);
  for (const auto& in : o.inputs) {
    const auto h = svc.add_stack(load_stack(in));
    out << "loaded " << in.generic_string() << " as " << h.id << "\n";
  }

  httplib::Server server;
  svc.mount(server);
  const int port = o.port == 0 ? server.bind_to_any_port(o.host) : o.port;
  if (o.port != 0 && !server.bind_to_port(o.host, o.port)) {
    throw IoError("cannot bind " + o.host + ":" + std::to_string(o.port));
  }
  if (port < 0) throw IoError("cannot bind " + o.host);

  g_stop_requested = false;
  {
    std::lock_guard lock(g_server_mutex);
    g_server = &server;
  }
  auto previous_int = std::signal(SIGINT, on_signal);
  auto previous_term = std::signal(SIGTERM, on_signal);
  std::thread watcher([&] {
    while (!g_stop_requested) std::this_thread::sleep_for(std::chrono::milliseconds(50));
    server.stop();
  });

  if (o.port_file) {
    const std::string text = std::to_string(port) + "\n";
    write_file_atomic(*o.port_file, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
  }
  out << "listening on http://" << o.host << ":" << port << std::endl;
  server.listen_after_bind();

  g_stop_requested = true;
  watcher.join();
  {
    std::lock_guard lock(g_server_mutex);
    g_server = nullptr;
  }
  std::signal(SIGINT, previous_int);
  std::signal(SIGTERM, previous_term);
}

}  // namespace dynspeckle::cli
