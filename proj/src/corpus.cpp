#include "narmine/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <json.hpp>

#include "narmine/error.hpp"

namespace narmine::corpus {

namespace {

using nlohmann::json;

std::int64_t require_int(const json& j, const char* key, std::size_t line) {
    auto it = j.find(key);
    if (it == j.end())
        throw ParseError("line " + std::to_string(line) + ": missing field '" + key + "'");
    if (!it->is_number_integer())
        throw ParseError("line " + std::to_string(line) + ": field '" + key +
                         "' is not an integer timestamp/count");
    return it->get<std::int64_t>();
}

std::string require_string(const json& j, const char* key, std::size_t line) {
    auto it = j.find(key);
    if (it == j.end())
        throw ParseError("line " + std::to_string(line) + ": missing field '" + key + "'");
    if (!it->is_string())
        throw ParseError("line " + std::to_string(line) + ": field '" + key +
                         "' is not a string");
    return it->get<std::string>();
}

std::vector<Event> parse_events(const json& j, const char* key, std::size_t line) {
    std::vector<Event> out;
    auto it = j.find(key);
    if (it == j.end())
        throw ParseError("line " + std::to_string(line) + ": missing field '" + key + "'");
    if (!it->is_array())
        throw ParseError("line " + std::to_string(line) + ": field '" + key +
                         "' is not an array");
    out.reserve(it->size());
    for (const auto& e : *it) {
        if (!e.is_object())
            throw ParseError("line " + std::to_string(line) + ": malformed event in '" +
                             std::string(key) + "'");
        Event ev;
        ev.user = require_string(e, "user", line);
        ev.t = require_int(e, "t", line);
        if (ev.t < 0)
            throw ParseError("line " + std::to_string(line) + ": negative timestamp in '" +
                             std::string(key) + "'");
        out.push_back(std::move(ev));
    }
    return out;
}

void sort_events(std::vector<Event>& events) {
    std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
        if (a.t != b.t) return a.t < b.t;
        return a.user < b.user;
    });
}

void append_escaped(std::string& out, const std::string& s) {
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out.push_back(c);
                }
        }
    }
}

void append_events(std::string& out, const std::vector<Event>& events) {
    out.push_back('[');
    for (std::size_t i = 0; i < events.size(); ++i) {
        if (i) out.push_back(',');
        out += "{\"user\":\"";
        append_escaped(out, events[i].user);
        out += "\",\"t\":";
        out += std::to_string(events[i].t);
        out.push_back('}');
    }
    out.push_back(']');
}

}  // namespace

const Post& Corpus::post(const std::string& post_id) const {
    auto it = post_index.find(post_id);
    if (it == post_index.end()) throw Error("unknown post_id: " + post_id);
    return posts[it->second];
}

Corpus build(std::vector<Post> posts) {
    Corpus c;
    c.posts = std::move(posts);
    bool any_event = false;
    std::int64_t tmin = 0, tmax = 0;
    auto see_time = [&](std::int64_t t) {
        if (!any_event) {
            tmin = tmax = t;
            any_event = true;
        } else {
            tmin = std::min(tmin, t);
            tmax = std::max(tmax, t);
        }
    };
    for (std::size_t idx = 0; idx < c.posts.size(); ++idx) {
        Post& p = c.posts[idx];
        if (p.shares < 0) throw Error("negative share count on post " + p.post_id);
        if (!c.post_index.emplace(p.post_id, idx).second)
            throw Error("duplicate post_id '" + p.post_id + "'");
        sort_events(p.likes);
        sort_events(p.comments);
        c.page_index[p.page_id].push_back(idx);
        see_time(p.created_at);
        for (const auto& e : p.likes) {
            if (e.t < 0) throw Error("negative like timestamp on post " + p.post_id);
            c.user_index[e.user].liked.push_back(idx);
            see_time(e.t);
        }
        for (const auto& e : p.comments) {
            if (e.t < 0) throw Error("negative comment timestamp on post " + p.post_id);
            c.user_index[e.user].commented.push_back(idx);
            see_time(e.t);
        }
    }
    for (auto& [user, act] : c.user_index) {
        (void)user;
        std::sort(act.liked.begin(), act.liked.end());
        act.liked.erase(std::unique(act.liked.begin(), act.liked.end()), act.liked.end());
        std::sort(act.commented.begin(), act.commented.end());
        act.commented.erase(std::unique(act.commented.begin(), act.commented.end()),
                            act.commented.end());
    }
    c.window_min = tmin;
    c.window_max = tmax;
    return c;
}

Corpus ingest(std::istream& in, const std::string& schema_version) {
    if (schema_version != "v1")
        throw ConfigError("unsupported corpus schema version: " + schema_version);

    Corpus c;
    std::string line;
    std::size_t lineno = 0;
    bool any_event = false;
    std::int64_t tmin = 0, tmax = 0;

    auto see_time = [&](std::int64_t t) {
        if (!any_event) {
            tmin = tmax = t;
            any_event = true;
        } else {
            tmin = std::min(tmin, t);
            tmax = std::max(tmax, t);
        }
    };

    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError("line " + std::to_string(lineno) + ": malformed record: " +
                             e.what());
        }
        if (!j.is_object())
            throw ParseError("line " + std::to_string(lineno) + ": record is not an object");

        Post p;
        p.post_id = require_string(j, "post_id", lineno);
        p.page_id = require_string(j, "page_id", lineno);
        if (auto it = j.find("page_category"); it != j.end() && it->is_string())
            p.page_category = it->get<std::string>();
        p.created_at = require_int(j, "created_at", lineno);
        p.message = require_string(j, "message", lineno);
        p.likes = parse_events(j, "likes", lineno);
        p.comments = parse_events(j, "comments", lineno);
        p.shares = require_int(j, "shares", lineno);
        if (p.shares < 0)
            throw ParseError("line " + std::to_string(lineno) + ": negative share count");

        if (c.post_index.count(p.post_id))
            throw ParseError("line " + std::to_string(lineno) + ": duplicate post_id '" +
                             p.post_id + "'");

        sort_events(p.likes);
        sort_events(p.comments);

        std::size_t idx = c.posts.size();
        c.post_index.emplace(p.post_id, idx);
        c.page_index[p.page_id].push_back(idx);
        see_time(p.created_at);
        for (const auto& e : p.likes) {
            c.user_index[e.user].liked.push_back(idx);
            see_time(e.t);
        }
        for (const auto& e : p.comments) {
            c.user_index[e.user].commented.push_back(idx);
            see_time(e.t);
        }
        c.posts.push_back(std::move(p));
    }

    // Dedupe index buckets: a user liking the same post twice is one bucket entry.
    for (auto& [user, act] : c.user_index) {
        (void)user;
        std::sort(act.liked.begin(), act.liked.end());
        act.liked.erase(std::unique(act.liked.begin(), act.liked.end()), act.liked.end());
        std::sort(act.commented.begin(), act.commented.end());
        act.commented.erase(std::unique(act.commented.begin(), act.commented.end()),
                            act.commented.end());
    }

    c.window_min = tmin;
    c.window_max = tmax;
    return c;
}

Corpus ingest_file(const std::string& path, const std::string& schema_version) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open corpus file: " + path);
    return ingest(in, schema_version);
}

void serialize(const Corpus& c, std::ostream& out) {
    std::string buf;
    for (const auto& p : c.posts) {
        buf.clear();
        buf += "{\"post_id\":\"";
        append_escaped(buf, p.post_id);
        buf += "\",\"page_id\":\"";
        append_escaped(buf, p.page_id);
        buf += '"';
        if (!p.page_category.empty()) {
            buf += ",\"page_category\":\"";
            append_escaped(buf, p.page_category);
            buf += '"';
        }
        buf += ",\"created_at\":";
        buf += std::to_string(p.created_at);
        buf += ",\"message\":\"";
        append_escaped(buf, p.message);
        buf += "\",\"likes\":";
        append_events(buf, p.likes);
        buf += ",\"comments\":";
        append_events(buf, p.comments);
        buf += ",\"shares\":";
        buf += std::to_string(p.shares);
        buf += "}\n";
        out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    }
}

void serialize_file(const Corpus& c, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write corpus file: " + path);
    serialize(c, out);
}

CorpusSummary summarize(const Corpus& c) {
    CorpusSummary s;
    s.pages = static_cast<std::int64_t>(c.page_index.size());
    s.posts = static_cast<std::int64_t>(c.posts.size());
    std::set<std::string> likers, commenters;
    for (const auto& p : c.posts) {
        s.likes += static_cast<std::int64_t>(p.likes.size());
        s.comments += static_cast<std::int64_t>(p.comments.size());
        s.shares += p.shares;
        for (const auto& e : p.likes) likers.insert(e.user);
        for (const auto& e : p.comments) commenters.insert(e.user);
    }
    s.likers = static_cast<std::int64_t>(likers.size());
    s.commenters = static_cast<std::int64_t>(commenters.size());
    return s;
}

bool identical(const Corpus& a, const Corpus& b) {
    return a.posts == b.posts && a.user_index == b.user_index &&
           a.page_index == b.page_index && a.window_min == b.window_min &&
           a.window_max == b.window_max;
}

}  // namespace narmine::corpus
