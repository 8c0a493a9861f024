#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <utility>
#include <vector>

namespace ct2bc::session {

/// Reliable, in-order, frame-oriented byte transport for one session.
class Channel {
public:
    virtual ~Channel() = default;
    // Throws ChannelClosed when the peer is gone.
    virtual void send(std::span<const std::uint8_t> frame) = 0;
    // One frame (header + body as announced). nullopt on closure or timeout.
    // A header announcing an oversized body comes back as the bare header.
    virtual std::optional<std::vector<std::uint8_t>> receive() = 0;
    virtual void close() = 0;
};

class ChannelClosed : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Frames over a pair of file descriptors (pipes, stdio, sockets).
class FdChannel final : public Channel {
public:
    FdChannel(int read_fd, int write_fd, std::chrono::milliseconds timeout, bool owns_fds);
    ~FdChannel() override;
    FdChannel(const FdChannel&) = delete;
    FdChannel& operator=(const FdChannel&) = delete;

    void send(std::span<const std::uint8_t> frame) override;
    std::optional<std::vector<std::uint8_t>> receive() override;
    void close() override;

private:
    bool read_exact(std::uint8_t* out, std::size_t n);

    int read_fd_;
    int write_fd_;
    std::chrono::milliseconds timeout_;
    bool owns_fds_;
};

/// Two connected in-memory endpoints, safe to drive from two threads.
std::pair<std::unique_ptr<Channel>, std::unique_ptr<Channel>> memory_channel_pair(
    std::chrono::milliseconds timeout = std::chrono::seconds(10));

// "host:port". tcp_listen accepts a single connection.
std::unique_ptr<Channel> tcp_listen(std::string_view address, std::chrono::milliseconds timeout);
std::unique_ptr<Channel> tcp_connect(std::string_view address, std::chrono::milliseconds timeout);

} // namespace ct2bc::session
