#include "lzcomm/transport.hpp"

#include "lzcomm/error.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <cstring>
#include <thread>

namespace lzcomm {

namespace {

constexpr std::uint32_t kMaxFrameBits = 4096;
constexpr std::array<std::uint8_t, 4> kMagic{'L', 'Z', 'C', '1'};

std::string os_error(const char* what) { return std::string(what) + ": " + std::strerror(errno); }

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v)
{
    for (int i = 7; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_u64(const std::uint8_t* p)
{
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | p[i];
    return v;
}

void set_nodelay(int fd)
{
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

} // namespace

Socket::~Socket()
{
    if (fd_ >= 0) ::close(fd_);
}

Socket::Socket(Socket&& other) noexcept : fd_(other.fd_) { other.fd_ = -1; }

Socket& Socket::operator=(Socket&& other) noexcept
{
    if (this != &other) {
        if (fd_ >= 0) ::close(fd_);
        fd_ = other.fd_;
        other.fd_ = -1;
    }
    return *this;
}

void Socket::send_all(const void* data, std::size_t size)
{
    const auto* p = static_cast<const std::uint8_t*>(data);
    while (size > 0) {
        const ssize_t k = ::send(fd_, p, size, MSG_NOSIGNAL);
        if (k < 0) {
            if (errno == EINTR) continue;
            throw TransportError(os_error("send"));
        }
        p += k;
        size -= static_cast<std::size_t>(k);
    }
}

void Socket::recv_all(void* data, std::size_t size)
{
    auto* p = static_cast<std::uint8_t*>(data);
    while (size > 0) {
        const ssize_t k = ::recv(fd_, p, size, 0);
        if (k < 0) {
            if (errno == EINTR) continue;
            throw TransportError(os_error("recv"));
        }
        if (k == 0) throw TransportError("peer closed the connection");
        p += k;
        size -= static_cast<std::size_t>(k);
    }
}

Listener::Listener(std::uint16_t port)
{
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) throw TransportError(os_error("socket"));
    int one = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_ANY);
    addr.sin_port = htons(port);
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0) {
        const std::string msg = os_error("bind");
        ::close(fd_);
        throw TransportError(msg);
    }
    if (::listen(fd_, 1) < 0) {
        const std::string msg = os_error("listen");
        ::close(fd_);
        throw TransportError(msg);
    }
    socklen_t len = sizeof addr;
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
}

Listener::~Listener()
{
    if (fd_ >= 0) ::close(fd_);
}

Socket Listener::accept()
{
    for (;;) {
        const int fd = ::accept(fd_, nullptr, nullptr);
        if (fd >= 0) {
            set_nodelay(fd);
            return Socket(fd);
        }
        if (errno != EINTR) throw TransportError(os_error("accept"));
    }
}

Socket connect_to(const std::string& host, std::uint16_t port, std::chrono::milliseconds patience)
{
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    const std::string service = std::to_string(port);
    if (const int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &res); rc != 0) {
        throw TransportError("cannot resolve " + host + ": " + ::gai_strerror(rc));
    }
    const auto deadline = std::chrono::steady_clock::now() + patience;
    std::string last = "no address";
    for (;;) {
        for (addrinfo* ai = res; ai; ai = ai->ai_next) {
            const int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
            if (fd < 0) continue;
            if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
                ::freeaddrinfo(res);
                set_nodelay(fd);
                return Socket(fd);
            }
            last = os_error("connect");
            ::close(fd);
        }
        if (std::chrono::steady_clock::now() >= deadline) break;
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
    ::freeaddrinfo(res);
    throw TransportError(last + " (" + host + ":" + service + ")");
}

std::pair<std::string, std::uint16_t> parse_endpoint(const std::string& endpoint)
{
    const auto colon = endpoint.rfind(':');
    if (colon == std::string::npos || colon + 1 == endpoint.size()) {
        throw Error("expected host:port, got '" + endpoint + "'");
    }
    const std::string host = colon == 0 ? "127.0.0.1" : endpoint.substr(0, colon);
    unsigned long port = 0;
    try {
        std::size_t used = 0;
        port = std::stoul(endpoint.substr(colon + 1), &used);
        if (used != endpoint.size() - colon - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
        throw Error("bad port in '" + endpoint + "'");
    }
    if (port == 0 || port > 65535) throw Error("port out of range in '" + endpoint + "'");
    return {host, static_cast<std::uint16_t>(port)};
}

void send_frame(Socket& s, const Frame& f)
{
    if (f.bytes.size() != (f.bits + 7) / 8) throw TransportError("frame size does not match its bit count");
    std::vector<std::uint8_t> buf(4 + f.bytes.size());
    buf[0] = static_cast<std::uint8_t>(f.bits >> 24);
    buf[1] = static_cast<std::uint8_t>(f.bits >> 16);
    buf[2] = static_cast<std::uint8_t>(f.bits >> 8);
    buf[3] = static_cast<std::uint8_t>(f.bits);
    std::memcpy(buf.data() + 4, f.bytes.data(), f.bytes.size());
    s.send_all(buf.data(), buf.size());
}

Frame recv_frame(Socket& s)
{
    std::array<std::uint8_t, 4> head{};
    s.recv_all(head.data(), head.size());
    Frame f;
    f.bits = (std::uint32_t{head[0]} << 24) | (std::uint32_t{head[1]} << 16) | (std::uint32_t{head[2]} << 8) |
             std::uint32_t{head[3]};
    if (f.bits > kMaxFrameBits) throw TransportError("frame of " + std::to_string(f.bits) + " bits is too large");
    f.bytes.resize((f.bits + 7) / 8);
    if (!f.bytes.empty()) s.recv_all(f.bytes.data(), f.bytes.size());
    return f;
}

Hello exchange_hello(Socket& s, const Hello& mine)
{
    std::vector<std::uint8_t> out(kMagic.begin(), kMagic.end());
    out.push_back(mine.protocol == "hamming" ? 1 : 0);
    put_u64(out, mine.n);
    put_u64(out, mine.sigma);
    out.push_back(static_cast<std::uint8_t>(mine.width));
    put_u64(out, mine.seed);
    out.push_back(static_cast<std::uint8_t>((mine.sentinel ? 1 : 0) | (mine.verify ? 2 : 0)));
    s.send_all(out.data(), out.size());

    std::vector<std::uint8_t> in(out.size());
    s.recv_all(in.data(), in.size());
    if (!std::equal(kMagic.begin(), kMagic.end(), in.begin())) throw TransportError("peer is not an lzcomm party");
    Hello peer;
    peer.protocol = in[4] == 1 ? "hamming" : "lcp";
    peer.n = get_u64(&in[5]);
    peer.sigma = get_u64(&in[13]);
    peer.width = in[21];
    peer.seed = get_u64(&in[22]);
    peer.sentinel = (in[30] & 1) != 0;
    peer.verify = (in[30] & 2) != 0;

    auto mismatch = [](const std::string& what) { throw TransportError("peer disagrees on " + what); };
    if (peer.protocol != mine.protocol) mismatch("the protocol");
    if (peer.sigma != mine.sigma) mismatch("sigma");
    if (peer.width != mine.width) mismatch("the fingerprint width");
    if (peer.seed != mine.seed) mismatch("the seed");
    if (peer.sentinel != mine.sentinel) mismatch("sentinel mode");
    if (peer.verify != mine.verify) mismatch("the verification pass");
    return peer;
}

void run_over_socket(Party& party, Socket& s)
{
    for (const auto& o : party.open()) send_frame(s, o.frame);
    while (!party.finished()) {
        const Frame f = recv_frame(s);
        const Message m = party.decode(f);
        for (const auto& o : party.receive(m)) send_frame(s, o.frame);
    }
}

namespace {

Hello hello_for(const std::string& protocol, std::uint64_t n, const ProtocolConfig& c)
{
    return Hello{protocol, n, c.sigma, c.width, c.seed, c.sentinel, c.verify};
}

} // namespace

LcpOutcome lcp_over_socket(Speaker role, const Factorization& input, const ProtocolConfig& config, Socket& s)
{
    config.validate();
    const std::uint64_t own = input.original_length();
    const Hello peer = exchange_hello(s, hello_for("lcp", own, config));
    auto party = make_lcp_party(role, input, std::max(own, peer.n), config);
    run_over_socket(*party, s);
    return lcp_outcome(*party);
}

HammingOutcome hamming_over_socket(Speaker role, const Factorization& input, const ProtocolConfig& config, Socket& s)
{
    config.validate();
    exchange_hello(s, hello_for("hamming", 0, config));
    auto party = make_hamming_party(role, input, config);
    run_over_socket(*party, s);
    HammingOutcome out = hamming_outcome(*party);
    if (out.aborted) throw ProtocolError("input lengths differ");
    return out;
}

} // namespace lzcomm
