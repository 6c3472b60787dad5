#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "skintone/core/events.hpp"

namespace skintone {

/// Append-only event log, optionally backed by a JSON Lines file.
///
/// Sequence numbers start at 1 and grow by exactly one per event. A
/// file-backed append returns only after the line has been written and
/// fsync'd; on failure the in-memory view is left untouched.
class EventLog {
public:
    EventLog() = default;
    ~EventLog();

    EventLog(EventLog&& other) noexcept;
    EventLog& operator=(EventLog&& other) noexcept;
    EventLog(const EventLog&) = delete;
    EventLog& operator=(const EventLog&) = delete;

    /// Opens (creating if needed) a file-backed log. An unterminated final
    /// line is an unacknowledged write and is truncated away.
    static EventLog open(const std::filesystem::path& path, bool fsync_each = true);

    /// In-memory log seeded with existing events (validated).
    static EventLog from_events(std::vector<Event> events);

    Seq append(EventPayload payload);

    const std::vector<Event>& events() const noexcept { return events_; }
    Seq last_seq() const noexcept { return events_.empty() ? 0 : events_.back().seq; }
    bool file_backed() const noexcept { return fd_ >= 0; }

private:
    std::vector<Event> events_;
    int fd_ = -1;
    bool fsync_each_ = true;
};

/// Throws CorruptLog unless seqs run 1, 2, 3, ... without gaps.
void check_sequence(std::span<const Event> events);

/// Reads every complete line of a JSON Lines event file.
std::vector<Event> read_event_file(const std::filesystem::path& path);

}  // namespace skintone
