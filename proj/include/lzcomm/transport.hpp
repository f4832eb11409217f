#pragma once

#include "lzcomm/protocol.hpp"

#include <chrono>
#include <cstdint>
#include <string>

namespace lzcomm {

/// Owning wrapper around a connected TCP socket.
class Socket {
public:
    Socket() = default;
    explicit Socket(int fd) noexcept : fd_(fd) {}
    ~Socket();
    Socket(Socket&& other) noexcept;
    Socket& operator=(Socket&& other) noexcept;
    Socket(const Socket&) = delete;
    Socket& operator=(const Socket&) = delete;

    int fd() const noexcept { return fd_; }
    void send_all(const void* data, std::size_t size);
    void recv_all(void* data, std::size_t size);

private:
    int fd_ = -1;
};

class Listener {
public:
    /// Binds to all interfaces; port 0 picks an ephemeral port.
    explicit Listener(std::uint16_t port);
    ~Listener();
    Listener(const Listener&) = delete;
    Listener& operator=(const Listener&) = delete;

    std::uint16_t port() const noexcept { return port_; }
    Socket accept();

private:
    int fd_ = -1;
    std::uint16_t port_ = 0;
};

/// Retries until the peer accepts or `patience` runs out.
Socket connect_to(const std::string& host, std::uint16_t port,
                  std::chrono::milliseconds patience = std::chrono::seconds(10));

/// Splits "host:port".
std::pair<std::string, std::uint16_t> parse_endpoint(const std::string& endpoint);

// Frame: 4-byte big-endian payload bit count, then the payload bytes.
void send_frame(Socket& s, const Frame& f);
Frame recv_frame(Socket& s);

/// Session parameters swapped before the first counted message. This
/// exchange is setup, not protocol traffic, and never enters a transcript.
struct Hello {
    std::string protocol; // "lcp" or "hamming"
    std::uint64_t n = 0;  // own input length (lcp only)
    std::uint64_t sigma = 0;
    unsigned width = 0;
    std::uint64_t seed = 0;
    bool sentinel = false;
    bool verify = false;
};

/// Sends ours, reads theirs, and throws TransportError if the settings
/// other than n disagree.
Hello exchange_hello(Socket& s, const Hello& mine);

/// Drives one party over a connected socket until it finishes.
void run_over_socket(Party& party, Socket& s);

/// Connector plays Alice, listener plays Bob.
LcpOutcome lcp_over_socket(Speaker role, const Factorization& input, const ProtocolConfig& config, Socket& s);
HammingOutcome hamming_over_socket(Speaker role, const Factorization& input, const ProtocolConfig& config, Socket& s);

} // namespace lzcomm
