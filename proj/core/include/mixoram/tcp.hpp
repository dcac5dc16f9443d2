#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <exception>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "mixoram/ports.hpp"
#include "mixoram/transport.hpp"

namespace mixoram {

// Length-prefixed frames over TCP. Every socket gets a reader thread that feeds one inbound
// queue; peers are learned from outbound connects and from the sender id of inbound frames,
// so replies travel back over the connection a request arrived on.
class TcpHub {
 public:
  TcpHub() = default;
  ~TcpHub();
  TcpHub(const TcpHub&) = delete;
  TcpHub& operator=(const TcpHub&) = delete;

  // Port 0 binds an ephemeral port. Returns the bound port.
  std::uint16_t listen(const Endpoint& ep);
  void connect(NodeId peer, const Endpoint& ep);
  bool connected(NodeId peer) const;
  void send(NodeId to, const Frame& frame);
  // Queues a frame as if it had arrived from the network.
  void push_local(Frame frame);
  std::optional<Frame> receive(std::chrono::milliseconds timeout);
  void close();

 private:
  struct Conn {
    int fd = -1;
    std::mutex write_mu;
  };

  void start_reader(std::shared_ptr<Conn> conn);
  void reader(std::shared_ptr<Conn> conn);
  void acceptor();

  int listen_fd_ = -1;
  std::atomic<bool> closing_{false};
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Frame> inbox_;
  std::map<NodeId, std::shared_ptr<Conn>> peers_;
  std::vector<std::shared_ptr<Conn>> conns_;
  std::vector<std::thread> threads_;
};

// Runs one Node behind a TcpHub: transport threads enqueue, a single thread drives the node.
class TcpNodeServer {
 public:
  TcpNodeServer(Node& node, const Endpoint& listen);
  ~TcpNodeServer();

  std::uint16_t port() const { return port_; }
  void start();
  // Blocks until stop() or a protocol error; rethrows the error.
  void run();
  void stop();
  std::exception_ptr error() const;

 private:
  void loop();

  Node& node_;
  TcpHub hub_;
  std::uint16_t port_ = 0;
  std::atomic<bool> running_{false};
  std::thread thread_;
  mutable std::mutex err_mu_;
  std::exception_ptr error_;
};

// Client side of the TCP transport.
class TcpPort : public FramePort {
 public:
  explicit TcpPort(std::chrono::milliseconds timeout = std::chrono::seconds(60))
      : timeout_(timeout) {}
  void connect(NodeId peer, const Endpoint& ep) { hub_.connect(peer, ep); }
  void send(NodeId to, const Frame& frame) override { hub_.send(to, frame); }
  Frame receive() override;

 private:
  TcpHub hub_;
  std::chrono::milliseconds timeout_;
};

}  // namespace mixoram
