#include "fairshare/events.hpp"

#include <fstream>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "fairshare/csv.hpp"
#include "fairshare/error.hpp"
#include "fairshare/simulator.hpp"

namespace fairshare {

namespace {

std::ifstream open_input(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
    return in;
}

std::ofstream open_output(const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
    return out;
}

int require_column(const CsvHeader& header, std::string_view name)
{
    const int col = header.find(name);
    if (col < 0) throw Error(ErrorCode::ConfigError, fmt::format("missing column '{}'", name));
    return col;
}

}  // namespace

EventLog read_event_log(std::istream& in)
{
    std::string line;
    if (!next_record(in, line)) throw Error(ErrorCode::ConfigError, "event log is empty");
    const CsvHeader header{split_csv(line)};
    const int c_t = require_column(header, "t");
    const int c_sharer = require_column(header, "sharer_group");
    const int c_recv = require_column(header, "receiver_group");
    const int c_art = require_column(header, "article");
    const int c_click = require_column(header, "clicked");
    const int c_like = require_column(header, "liked");
    const int c_prob = header.find("like_prob_sample");
    const int c_user = header.find("user_id");

    EventLog log;
    std::size_t line_no = 1;
    while (next_record(in, line)) {
        ++line_no;
        const auto cells = split_csv(line);
        if (cells.size() != header.names.size())
            throw Error(ErrorCode::ConfigError,
                        fmt::format("event log row {} has {} cells, header has {}", line_no, cells.size(),
                                    header.names.size()));
        auto cell = [&](int col) -> const std::string& { return cells[static_cast<std::size_t>(col)]; };
        EventRow row;
        row.t = static_cast<int>(parse_integer(cell(c_t), "t"));
        if (row.t < 1) throw Error(ErrorCode::ConfigError, fmt::format("row {}: t must be >= 1", line_no));
        if (!cell(c_sharer).empty()) row.sharer_group = parse_group(cell(c_sharer));
        row.receiver_group = parse_group(cell(c_recv));
        row.article = parse_article(cell(c_art));
        row.clicked = parse_flag(cell(c_click), "clicked");
        row.liked = parse_flag(cell(c_like), "liked");
        if (row.liked && !row.clicked)
            throw Error(ErrorCode::ConfigError, fmt::format("row {}: liked without a click", line_no));
        if (c_prob >= 0 && !cell(c_prob).empty()) {
            const double p = parse_real(cell(c_prob), "like_prob_sample");
            if (!(p >= 0.0 && p <= 1.0))
                throw Error(ErrorCode::ConfigError, fmt::format("row {}: like_prob_sample outside [0, 1]", line_no));
            row.like_prob_sample = p;
        }
        if (c_user >= 0 && !cell(c_user).empty()) row.user_id = parse_integer(cell(c_user), "user_id");
        log.rows.push_back(row);
    }
    if (log.rows.empty()) throw Error(ErrorCode::ConfigError, "event log has a header but no rows");
    return log;
}

EventLog read_event_log(const std::string& path)
{
    auto in = open_input(path);
    return read_event_log(in);
}

void write_event_log(std::ostream& out, const EventLog& log)
{
    out << "t,sharer_group,receiver_group,article,clicked,liked,like_prob_sample,user_id\n";
    for (const EventRow& r : log.rows) {
        fmt::print(out, "{},{},{},{},{:d},{:d},", r.t, r.sharer_group ? to_string(*r.sharer_group) : "",
                   to_string(r.receiver_group), to_string(r.article), r.clicked, r.liked);
        if (r.like_prob_sample) fmt::print(out, "{:.17g}", *r.like_prob_sample);
        out << ',';
        if (r.user_id) out << *r.user_id;
        out << '\n';
    }
}

SocialGraph read_graph(const std::string& edges_path, const std::string& groups_path)
{
    SocialGraph g;
    std::string line;
    {
        auto in = open_input(groups_path);
        if (!next_record(in, line)) throw Error(ErrorCode::ConfigError, "node-group file is empty");
        const CsvHeader header{split_csv(line)};
        const int c_node = require_column(header, "node");
        const int c_group = require_column(header, "group");
        std::vector<std::pair<long long, Group>> labels;
        while (next_record(in, line)) {
            const auto cells = split_csv(line);
            if (cells.size() != header.names.size())
                throw Error(ErrorCode::ConfigError, "node-group row has the wrong number of cells");
            labels.emplace_back(parse_integer(cells[static_cast<std::size_t>(c_node)], "node"),
                                parse_group(cells[static_cast<std::size_t>(c_group)]));
        }
        g.node_count = static_cast<int>(labels.size());
        g.groups.assign(labels.size(), Group::A);
        std::vector<bool> seen(labels.size(), false);
        for (auto [node, group] : labels) {
            if (node < 0 || node >= g.node_count || seen[static_cast<std::size_t>(node)])
                throw Error(ErrorCode::ConfigError, "node ids must be 0..n-1, each listed once");
            seen[static_cast<std::size_t>(node)] = true;
            g.groups[static_cast<std::size_t>(node)] = group;
        }
    }
    {
        auto in = open_input(edges_path);
        if (!next_record(in, line)) throw Error(ErrorCode::ConfigError, "edge file is empty");
        const CsvHeader header{split_csv(line)};
        const int c_u = require_column(header, "node_u");
        const int c_v = require_column(header, "node_v");
        while (next_record(in, line)) {
            const auto cells = split_csv(line);
            if (cells.size() != header.names.size())
                throw Error(ErrorCode::ConfigError, "edge row has the wrong number of cells");
            g.edges.emplace_back(static_cast<int>(parse_integer(cells[static_cast<std::size_t>(c_u)], "node_u")),
                                 static_cast<int>(parse_integer(cells[static_cast<std::size_t>(c_v)], "node_v")));
        }
    }
    try {
        g.finalize();
    } catch (const Error& e) {
        throw Error(ErrorCode::ConfigError, e.what());
    }
    return g;
}

void write_graph(const SocialGraph& graph, const std::string& edges_path, const std::string& groups_path)
{
    auto edges = open_output(edges_path);
    edges << "node_u,node_v\n";
    for (auto [u, v] : graph.edges) edges << u << ',' << v << '\n';
    auto groups = open_output(groups_path);
    groups << "node,group\n";
    for (int v = 0; v < graph.node_count; ++v)
        groups << v << ',' << to_string(graph.groups[static_cast<std::size_t>(v)]) << '\n';
}

}  // namespace fairshare
