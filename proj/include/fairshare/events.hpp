#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fairshare/types.hpp"

namespace fairshare {

/// One user being shown an article. Rows with t >= 2 arrived through a share and carry
/// the sharer's group; platform-seeded rows at t = 1 leave it empty.
struct EventRow {
    int t = 1;
    std::optional<Group> sharer_group;
    Group receiver_group = Group::A;
    Article article = Article::a;
    bool clicked = false;
    bool liked = false;
    std::optional<double> like_prob_sample;
    std::optional<long long> user_id;

    bool operator==(const EventRow&) const = default;
};

struct EventLog {
    std::vector<EventRow> rows;
};

/// CSV with header t,sharer_group,receiver_group,article,clicked,liked and optional
/// like_prob_sample and user_id columns in any order. Empty cells mean absent.
/// Throws ConfigError on schema violations, including an empty file.
EventLog read_event_log(std::istream& in);
EventLog read_event_log(const std::string& path);

void write_event_log(std::ostream& out, const EventLog& log);

}  // namespace fairshare
