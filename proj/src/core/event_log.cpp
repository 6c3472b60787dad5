#include "skintone/core/event_log.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "skintone/core/error.hpp"

namespace skintone {

namespace {

std::string read_all(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return {};
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::vector<Event> parse_lines(std::string_view text) {
    std::vector<Event> events;
    std::size_t start = 0;
    while (start < text.size()) {
        const auto end = text.find('\n', start);
        if (end == std::string_view::npos) break;  // torn tail
        const auto line = text.substr(start, end - start);
        if (!line.empty()) events.push_back(decode_event(line));
        start = end + 1;
    }
    return events;
}

void write_fully(int fd, std::string_view data) {
    while (!data.empty()) {
        const auto written = ::write(fd, data.data(), data.size());
        if (written < 0) {
            if (errno == EINTR) continue;
            throw Error(ErrorCode::Storage, std::string("event log write failed: ") + std::strerror(errno));
        }
        data.remove_prefix(static_cast<std::size_t>(written));
    }
}

}  // namespace

void check_sequence(std::span<const Event> events) {
    Seq expected = 1;
    for (const auto& event : events) {
        if (event.seq != expected) {
            throw Error(ErrorCode::CorruptLog, "expected seq " + std::to_string(expected) + ", found " +
                                                   std::to_string(event.seq));
        }
        ++expected;
    }
}

std::vector<Event> read_event_file(const std::filesystem::path& path) {
    auto events = parse_lines(read_all(path));
    check_sequence(events);
    return events;
}

EventLog::~EventLog() {
    if (fd_ >= 0) ::close(fd_);
}

EventLog::EventLog(EventLog&& other) noexcept
    : events_(std::move(other.events_)), fd_(other.fd_), fsync_each_(other.fsync_each_) {
    other.fd_ = -1;
}

EventLog& EventLog::operator=(EventLog&& other) noexcept {
    if (this != &other) {
        if (fd_ >= 0) ::close(fd_);
        events_ = std::move(other.events_);
        fd_ = other.fd_;
        fsync_each_ = other.fsync_each_;
        other.fd_ = -1;
    }
    return *this;
}

EventLog EventLog::open(const std::filesystem::path& path, bool fsync_each) {
    const std::string text = read_all(path);
    EventLog log;
    log.events_ = parse_lines(text);
    check_sequence(log.events_);

    const auto complete = text.rfind('\n') == std::string::npos ? 0 : text.rfind('\n') + 1;
    if (complete != text.size() && std::filesystem::exists(path)) {
        std::filesystem::resize_file(path, complete);
    }

    log.fd_ = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (log.fd_ < 0) {
        throw Error(ErrorCode::Storage, "cannot open event log " + path.string() + ": " + std::strerror(errno));
    }
    log.fsync_each_ = fsync_each;
    return log;
}

EventLog EventLog::from_events(std::vector<Event> events) {
    check_sequence(events);
    EventLog log;
    log.events_ = std::move(events);
    return log;
}

Seq EventLog::append(EventPayload payload) {
    Event event{last_seq() + 1, std::move(payload)};
    if (auto* submitted = std::get_if<AnnotationSubmitted>(&event.payload)) {
        submitted->annotation.submitted_at = event.seq;
    }
    if (fd_ >= 0) {
        write_fully(fd_, encode_event(event) + "\n");
        if (fsync_each_ && ::fsync(fd_) != 0) {
            throw Error(ErrorCode::Storage, std::string("fsync failed: ") + std::strerror(errno));
        }
    }
    events_.push_back(std::move(event));
    return events_.back().seq;
}

}  // namespace skintone
