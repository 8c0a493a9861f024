#include "ct2bc/channel.hpp"

#include "ct2bc/errors.hpp"
#include "ct2bc/wire.hpp"

#include <arpa/inet.h>
#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <mutex>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <string>
#include <sys/socket.h>
#include <unistd.h>

namespace ct2bc::session {

FdChannel::FdChannel(int read_fd, int write_fd, std::chrono::milliseconds timeout, bool owns_fds)
    : read_fd_(read_fd), write_fd_(write_fd), timeout_(timeout), owns_fds_(owns_fds) {}

FdChannel::~FdChannel() { close(); }

void FdChannel::send(std::span<const std::uint8_t> frame) {
    if (write_fd_ < 0) {
        throw ChannelClosed("channel closed");
    }
    std::size_t done = 0;
    while (done < frame.size()) {
        const ssize_t n = ::write(write_fd_, frame.data() + done, frame.size() - done);
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            throw ChannelClosed(std::string("write failed: ") + std::strerror(errno));
        }
        done += static_cast<std::size_t>(n);
    }
}

bool FdChannel::read_exact(std::uint8_t* out, std::size_t n) {
    const auto deadline = std::chrono::steady_clock::now() + timeout_;
    std::size_t done = 0;
    while (done < n) {
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0) {
            return false;
        }
        pollfd pfd{read_fd_, POLLIN, 0};
        const int ready = ::poll(&pfd, 1, static_cast<int>(left.count()));
        if (ready < 0 && errno == EINTR) {
            continue;
        }
        if (ready <= 0) {
            return false;
        }
        const ssize_t got = ::read(read_fd_, out + done, n - done);
        if (got < 0 && errno == EINTR) {
            continue;
        }
        if (got <= 0) {
            return false;
        }
        done += static_cast<std::size_t>(got);
    }
    return true;
}

std::optional<std::vector<std::uint8_t>> FdChannel::receive() {
    if (read_fd_ < 0) {
        return std::nullopt;
    }
    std::vector<std::uint8_t> frame(wire::kHeaderSize);
    if (!read_exact(frame.data(), frame.size())) {
        return std::nullopt;
    }
    const std::size_t total = *wire::frame_size(frame);
    if (total - wire::kHeaderSize > wire::kMaxBodySize) {
        return frame;
    }
    frame.resize(total);
    if (!read_exact(frame.data() + wire::kHeaderSize, total - wire::kHeaderSize)) {
        return std::nullopt;
    }
    return frame;
}

void FdChannel::close() {
    if (owns_fds_) {
        if (read_fd_ >= 0) {
            ::close(read_fd_);
        }
        if (write_fd_ >= 0 && write_fd_ != read_fd_) {
            ::close(write_fd_);
        }
    }
    read_fd_ = -1;
    write_fd_ = -1;
}

namespace {

struct Pipe {
    std::mutex mu;
    std::condition_variable cv;
    std::deque<std::vector<std::uint8_t>> frames;
    bool closed = false;
};

class MemoryChannel final : public Channel {
public:
    MemoryChannel(std::shared_ptr<Pipe> in, std::shared_ptr<Pipe> out, std::chrono::milliseconds timeout)
        : in_(std::move(in)), out_(std::move(out)), timeout_(timeout) {}
    ~MemoryChannel() override { close(); }

    void send(std::span<const std::uint8_t> frame) override {
        std::lock_guard lock(out_->mu);
        if (out_->closed) {
            throw ChannelClosed("peer closed");
        }
        out_->frames.emplace_back(frame.begin(), frame.end());
        out_->cv.notify_all();
    }

    std::optional<std::vector<std::uint8_t>> receive() override {
        std::unique_lock lock(in_->mu);
        in_->cv.wait_for(lock, timeout_, [&] { return !in_->frames.empty() || in_->closed; });
        if (in_->frames.empty()) {
            return std::nullopt;
        }
        auto frame = std::move(in_->frames.front());
        in_->frames.pop_front();
        return frame;
    }

    void close() override {
        for (const auto& p : {in_, out_}) {
            std::lock_guard lock(p->mu);
            p->closed = true;
            p->cv.notify_all();
        }
    }

private:
    std::shared_ptr<Pipe> in_;
    std::shared_ptr<Pipe> out_;
    std::chrono::milliseconds timeout_;
};

std::pair<std::string, std::string> split_address(std::string_view address) {
    const auto colon = address.rfind(':');
    if (colon == std::string_view::npos || colon + 1 == address.size()) {
        throw ParameterError("address must look like host:port, got '" + std::string(address) + "'");
    }
    std::string host(address.substr(0, colon));
    if (host.empty()) {
        host = "127.0.0.1";
    }
    return {host, std::string(address.substr(colon + 1))};
}

addrinfo* resolve(std::string_view address, bool passive) {
    const auto [host, port] = split_address(address);
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    if (passive) {
        hints.ai_flags = AI_PASSIVE;
    }
    addrinfo* res = nullptr;
    if (const int rc = ::getaddrinfo(host.c_str(), port.c_str(), &hints, &res); rc != 0) {
        throw Error("cannot resolve " + std::string(address) + ": " + ::gai_strerror(rc));
    }
    return res;
}

std::unique_ptr<Channel> socket_channel(int fd, std::chrono::milliseconds timeout) {
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    return std::make_unique<FdChannel>(fd, fd, timeout, true);
}

} // namespace

std::pair<std::unique_ptr<Channel>, std::unique_ptr<Channel>> memory_channel_pair(std::chrono::milliseconds timeout) {
    auto ab = std::make_shared<Pipe>();
    auto ba = std::make_shared<Pipe>();
    return {std::make_unique<MemoryChannel>(ba, ab, timeout), std::make_unique<MemoryChannel>(ab, ba, timeout)};
}

std::unique_ptr<Channel> tcp_listen(std::string_view address, std::chrono::milliseconds timeout) {
    addrinfo* res = resolve(address, true);
    int fd = -1;
    for (addrinfo* ai = res; ai != nullptr; ai = ai->ai_next) {
        fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
        if (fd < 0) {
            continue;
        }
        int one = 1;
        ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
        if (::bind(fd, ai->ai_addr, ai->ai_addrlen) == 0 && ::listen(fd, 1) == 0) {
            break;
        }
        ::close(fd);
        fd = -1;
    }
    ::freeaddrinfo(res);
    if (fd < 0) {
        throw Error("cannot listen on " + std::string(address) + ": " + std::strerror(errno));
    }
    pollfd pfd{fd, POLLIN, 0};
    if (::poll(&pfd, 1, static_cast<int>(timeout.count())) <= 0) {
        ::close(fd);
        throw Error("no connection on " + std::string(address) + " before the timeout");
    }
    const int conn = ::accept(fd, nullptr, nullptr);
    ::close(fd);
    if (conn < 0) {
        throw Error(std::string("accept failed: ") + std::strerror(errno));
    }
    return socket_channel(conn, timeout);
}

std::unique_ptr<Channel> tcp_connect(std::string_view address, std::chrono::milliseconds timeout) {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    for (;;) {
        addrinfo* res = resolve(address, false);
        int fd = -1;
        for (addrinfo* ai = res; ai != nullptr; ai = ai->ai_next) {
            fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
            if (fd < 0) {
                continue;
            }
            if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
                break;
            }
            ::close(fd);
            fd = -1;
        }
        ::freeaddrinfo(res);
        if (fd >= 0) {
            return socket_channel(fd, timeout);
        }
        // The listener may not be up yet.
        if (std::chrono::steady_clock::now() >= deadline) {
            throw Error("cannot connect to " + std::string(address));
        }
        ::usleep(50'000);
    }
}

} // namespace ct2bc::session
