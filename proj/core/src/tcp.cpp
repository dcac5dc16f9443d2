#include "mixoram/tcp.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <string>

#include <spdlog/spdlog.h>

namespace mixoram {
namespace {

constexpr std::uint32_t kMaxFrameBytes = 1u << 30;

[[noreturn]] void sys_fail(const std::string& what) {
  fail(Errc::kTransport, what + ": " + std::strerror(errno));
}

bool read_full(int fd, std::uint8_t* buf, std::size_t len) {
  while (len > 0) {
    auto got = ::recv(fd, buf, len, 0);
    if (got == 0) return false;
    if (got < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    buf += got;
    len -= static_cast<std::size_t>(got);
  }
  return true;
}

void write_full(int fd, const std::uint8_t* buf, std::size_t len) {
  while (len > 0) {
    auto put = ::send(fd, buf, len, MSG_NOSIGNAL);
    if (put < 0) {
      if (errno == EINTR) continue;
      sys_fail("send");
    }
    buf += put;
    len -= static_cast<std::size_t>(put);
  }
}

sockaddr_in resolve(const Endpoint& ep) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  auto host = ep.host.empty() ? std::string("127.0.0.1") : ep.host;
  if (::getaddrinfo(host.c_str(), nullptr, &hints, &res) != 0 || !res) {
    fail(Errc::kTransport, "cannot resolve " + host);
  }
  sockaddr_in addr{};
  std::memcpy(&addr, res->ai_addr, sizeof(addr));
  ::freeaddrinfo(res);
  addr.sin_port = htons(ep.port);
  return addr;
}

}  // namespace

TcpHub::~TcpHub() { close(); }

std::uint16_t TcpHub::listen(const Endpoint& ep) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) sys_fail("socket");
  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  auto addr = resolve(ep);
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0) sys_fail("bind");
  if (::listen(listen_fd_, 64) < 0) sys_fail("listen");
  socklen_t len = sizeof(addr);
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  std::lock_guard lock(mu_);
  threads_.emplace_back([this] { acceptor(); });
  return ntohs(addr.sin_port);
}

void TcpHub::acceptor() {
  while (!closing_) {
    int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) {
      if (closing_) return;
      if (errno == EINTR) continue;
      spdlog::warn("accept failed: {}", std::strerror(errno));
      return;
    }
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    auto conn = std::make_shared<Conn>();
    conn->fd = fd;
    start_reader(conn);
  }
}

void TcpHub::connect(NodeId peer, const Endpoint& ep) {
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) sys_fail("socket");
  auto addr = resolve(ep);
  // Peers may still be starting up; retry for a few seconds.
  int rc = -1;
  for (int attempt = 0; attempt < 100; ++attempt) {
    rc = ::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr));
    if (rc == 0) break;
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
  if (rc != 0) {
    ::close(fd);
    sys_fail("connect to " + to_string(ep));
  }
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  auto conn = std::make_shared<Conn>();
  conn->fd = fd;
  {
    std::lock_guard lock(mu_);
    peers_[peer] = conn;
  }
  start_reader(conn);
}

void TcpHub::start_reader(std::shared_ptr<Conn> conn) {
  std::lock_guard lock(mu_);
  conns_.push_back(conn);
  threads_.emplace_back([this, conn] { reader(conn); });
}

void TcpHub::reader(std::shared_ptr<Conn> conn) {
  for (;;) {
    std::uint8_t prefix[4];
    if (!read_full(conn->fd, prefix, 4)) return;
    auto len = static_cast<std::uint32_t>(load_be(ByteView(prefix, 4)));
    if (len > kMaxFrameBytes) {
      spdlog::warn("dropping connection: frame of {} bytes", len);
      return;
    }
    Bytes body(len);
    if (!read_full(conn->fd, body.data(), len)) return;
    Frame f;
    try {
      f = decode_frame_body(body);
    } catch (const Error& e) {
      spdlog::warn("dropping connection: {}", e.what());
      return;
    }
    std::lock_guard lock(mu_);
    peers_.try_emplace(f.from, conn);
    inbox_.push_back(std::move(f));
    cv_.notify_one();
  }
}

bool TcpHub::connected(NodeId peer) const {
  std::lock_guard lock(mu_);
  return peers_.count(peer) > 0;
}

void TcpHub::send(NodeId to, const Frame& frame) {
  std::shared_ptr<Conn> conn;
  {
    std::lock_guard lock(mu_);
    auto it = peers_.find(to);
    if (it == peers_.end()) fail(Errc::kTransport, "no connection to node " + std::to_string(to));
    conn = it->second;
  }
  auto bytes = encode_frame(frame);
  std::lock_guard lock(conn->write_mu);
  write_full(conn->fd, bytes.data(), bytes.size());
}

void TcpHub::push_local(Frame frame) {
  std::lock_guard lock(mu_);
  inbox_.push_back(std::move(frame));
  cv_.notify_one();
}

std::optional<Frame> TcpHub::receive(std::chrono::milliseconds timeout) {
  std::unique_lock lock(mu_);
  if (!cv_.wait_for(lock, timeout, [this] { return !inbox_.empty() || closing_; })) {
    return std::nullopt;
  }
  if (inbox_.empty()) return std::nullopt;
  auto f = std::move(inbox_.front());
  inbox_.pop_front();
  return f;
}

void TcpHub::close() {
  if (closing_.exchange(true)) return;
  std::vector<std::thread> threads;
  {
    std::lock_guard lock(mu_);
    if (listen_fd_ >= 0) {
      ::shutdown(listen_fd_, SHUT_RDWR);
      ::close(listen_fd_);
    }
    for (auto& c : conns_) ::shutdown(c->fd, SHUT_RDWR);
    threads.swap(threads_);
    cv_.notify_all();
  }
  for (auto& t : threads) {
    if (t.joinable()) t.join();
  }
  std::lock_guard lock(mu_);
  for (auto& c : conns_) ::close(c->fd);
  conns_.clear();
  peers_.clear();
}

// ---- node server ------------------------------------------------------------------------

TcpNodeServer::TcpNodeServer(Node& node, const Endpoint& listen) : node_(node) {
  port_ = hub_.listen(listen);
}

TcpNodeServer::~TcpNodeServer() { stop(); }

void TcpNodeServer::start() {
  running_ = true;
  thread_ = std::thread([this] { loop(); });
}

void TcpNodeServer::run() {
  running_ = true;
  loop();
  if (auto e = error()) std::rethrow_exception(e);
}

void TcpNodeServer::stop() {
  running_ = false;
  if (thread_.joinable()) thread_.join();
  hub_.close();
}

std::exception_ptr TcpNodeServer::error() const {
  std::lock_guard lock(err_mu_);
  return error_;
}

void TcpNodeServer::loop() {
  while (running_) {
    auto f = hub_.receive(std::chrono::milliseconds(50));
    if (!f) continue;
    try {
      for (auto& out : node_.handle(*f)) {
        if (out.to == node_.id()) {
          hub_.push_local(std::move(out.frame));
          continue;
        }
        if (!hub_.connected(out.to)) {
          auto ep = node_.endpoint_of(out.to);
          if (!ep) fail(Errc::kTransport, "no address for node " + std::to_string(out.to));
          hub_.connect(out.to, *ep);
        }
        hub_.send(out.to, out.frame);
      }
    } catch (const std::exception& e) {
      spdlog::error("node {} stopped: {}", static_cast<int>(node_.id()), e.what());
      std::lock_guard lock(err_mu_);
      error_ = std::current_exception();
      running_ = false;
    }
  }
}

Frame TcpPort::receive() {
  auto f = hub_.receive(timeout_);
  if (!f) fail(Errc::kTransport, "timed out waiting for a frame");
  return std::move(*f);
}

}  // namespace mixoram
