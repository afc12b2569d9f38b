#pragma once

#include <atomic>
#include <chrono>
#include <ctime>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "askeda/config.hpp"
#include "askeda/error.hpp"
#include "askeda/pipeline.hpp"
#include "httplib.h"
#include "json.hpp"

namespace askeda {

using Clock = std::chrono::system_clock;

inline std::string iso8601_utc(Clock::time_point t) {
    const auto secs = Clock::to_time_t(t);
    std::tm tm{};
    gmtime_r(&secs, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct SessionTurn {
    std::string message_id;
    std::string question;
    std::string answer;
};

struct Session {
    std::string session_id;
    /// Full thread, oldest first.
    std::vector<SessionTurn> turns;
    Clock::time_point created_at;
    Clock::time_point last_active;

    /// The most recent `depth` turns, used as prompt history.
    std::vector<HistoryTurn> history(std::size_t depth) const {
        std::vector<HistoryTurn> out;
        const auto start = turns.size() > depth ? turns.size() - depth : 0;
        for (auto i = start; i < turns.size(); ++i) out.push_back({turns[i].question, turns[i].answer});
        return out;
    }
};

enum class Verdict { up, down };

struct FeedbackRecord {
    std::string session_id;
    std::string message_id;
    Verdict verdict = Verdict::up;
    std::optional<std::string> comment;
    std::string timestamp;
};

inline nlohmann::json to_json(const FeedbackRecord& r) {
    return {{"session_id", r.session_id},
            {"message_id", r.message_id},
            {"verdict", r.verdict == Verdict::up ? "up" : "down"},
            {"comment", r.comment ? nlohmann::json(*r.comment) : nlohmann::json(nullptr)},
            {"timestamp", r.timestamp}};
}

inline FeedbackRecord feedback_from_json(const nlohmann::json& j) {
    FeedbackRecord r;
    r.session_id = j.at("session_id").get<std::string>();
    r.message_id = j.at("message_id").get<std::string>();
    r.verdict = j.at("verdict").get<std::string>() == "down" ? Verdict::down : Verdict::up;
    if (j.contains("comment") && j["comment"].is_string()) r.comment = j["comment"].get<std::string>();
    r.timestamp = j.value("timestamp", "");
    return r;
}

/// Feedback keyed by message_id. Every submission is appended to a JSON
/// Lines log; a later line for the same message_id supersedes earlier ones.
class FeedbackStore {
public:
    /// Replays an existing log so verdicts survive restarts.
    explicit FeedbackStore(std::string path) : path_(std::move(path)) {
        if (path_.empty() || !std::filesystem::exists(path_)) return;
        try {
            for (const auto& [id, j] : read_log(path_)) records_[id] = feedback_from_json(j);
        } catch (const std::exception& e) {
            throw Error(Errc::parse, "feedback log '" + path_ + "': " + e.what());
        }
    }

    /// Returns true when an earlier verdict for the message was replaced.
    bool put(const FeedbackRecord& rec) {
        std::lock_guard lock(mu_);
        const bool updated = records_.contains(rec.message_id);
        records_[rec.message_id] = rec;
        if (!path_.empty()) {
            std::ofstream out(path_, std::ios::app);
            if (!out) throw Error(Errc::io, "cannot append feedback to '" + path_ + "'");
            out << to_json(rec).dump() << '\n';
            out.flush();
        }
        return updated;
    }

    std::optional<FeedbackRecord> get(const std::string& message_id) const {
        std::lock_guard lock(mu_);
        auto it = records_.find(message_id);
        if (it == records_.end()) return std::nullopt;
        return it->second;
    }

    std::size_t size() const {
        std::lock_guard lock(mu_);
        return records_.size();
    }

    /// Folds a log file: last line per message_id wins.
    static std::map<std::string, nlohmann::json> read_log(const std::string& path) {
        std::map<std::string, nlohmann::json> out;
        std::ifstream in(path);
        for (std::string line; std::getline(in, line);) {
            if (line.empty()) continue;
            auto j = nlohmann::json::parse(line);
            auto key = j.at("message_id").get<std::string>();  // read before j is moved from
            out[std::move(key)] = std::move(j);
        }
        return out;
    }

private:
    std::string path_;
    mutable std::mutex mu_;
    std::map<std::string, FeedbackRecord> records_;
};

/// Transport-independent request handling for the chat API. Index and
/// pipeline are shared read-only; sessions are the only mutable state.
class ChatService {
public:
    struct Reply {
        int status = 200;
        nlohmann::json body;
    };

    ChatService(const Pipeline& pipeline, ServiceConfig cfg, std::function<Clock::time_point()> now = Clock::now)
        : pipeline_(pipeline), cfg_(std::move(cfg)), now_(std::move(now)), feedback_(cfg_.feedback_path) {
        std::random_device rd;
        instance_ = std::to_string(rd() % 100000);
    }

    const FeedbackStore& feedback_store() const { return feedback_; }

    Reply health() const { return {200, {{"status", "ok"}, {"chunks", pipeline_.index().chunks().size()}}}; }

    Reply ask(const nlohmann::json& req) {
        if (!req.is_object() || !req.contains("question") || !req["question"].is_string())
            return error(400, "invalid_argument", "body must be an object with a string 'question'");
        const auto question = req["question"].get<std::string>();
        RetrievalMode mode = RetrievalMode::hybrid;
        if (auto it = req.find("mode"); it != req.end() && !it->is_null()) {
            const auto m = it->is_string() ? parse_mode(it->get<std::string>()) : std::nullopt;
            if (!m) return error(400, "invalid_argument", "mode must be one of hybrid, sparse, dense, none");
            mode = *m;
        }
        bool adh = true;
        if (auto it = req.find("adh"); it != req.end() && !it->is_null()) {
            if (!it->is_boolean()) return error(400, "invalid_argument", "adh must be a boolean");
            adh = it->get<bool>();
        }
        std::string sid;
        if (auto it = req.find("session_id"); it != req.end() && !it->is_null()) {
            if (!it->is_string() || it->get<std::string>().empty())
                return error(400, "invalid_argument", "session_id must be a non-empty string");
            sid = it->get<std::string>();
        }

        auto slot = acquire_session(sid);
        std::lock_guard turn_lock(slot->mu);  // one completion in flight per session
        PipelineAnswer result;
        try {
            result = pipeline_.answer(question, slot->session.history(cfg_.history_depth), mode, adh);
        } catch (const Error& e) {
            return from_error(e);
        }
        const auto message_id = "m" + instance_ + "-" + std::to_string(++message_counter_);
        const auto now = now_();
        {
            std::lock_guard lock(mu_);
            slot->session.turns.push_back({message_id, question, result.envelope.answer});
            slot->session.last_active = now;
            message_owner_[message_id] = slot->session.session_id;
        }

        auto sources = nlohmann::json::array();
        for (const auto& id : result.envelope.sources) {
            nlohmann::json s{{"chunk_id", id}, {"doc_id", nullptr}, {"uri", nullptr}};
            if (const auto* c = pipeline_.index().find_chunk(id)) {
                s["doc_id"] = c->doc_id;
                if (const auto* d = pipeline_.index().find_document(c->doc_id)) s["uri"] = d->uri;
            }
            sources.push_back(std::move(s));
        }
        nlohmann::json body{{"session_id", slot->session.session_id},
                            {"message_id", message_id},
                            {"answer", result.envelope.answer},
                            {"sources", sources},
                            {"usage",
                             {{"prompt_tokens", result.envelope.usage.prompt_tokens},
                              {"completion_tokens", result.envelope.usage.completion_tokens}}}};
        if (!cfg_.transcript_path.empty()) append_transcript(body, question, now);
        return {200, std::move(body)};
    }

    Reply feedback(const nlohmann::json& req) {
        if (!req.is_object()) return error(400, "invalid_argument", "body must be an object");
        for (const char* key : {"session_id", "message_id", "verdict"})
            if (!req.contains(key) || !req[key].is_string())
                return error(400, "invalid_argument", std::string("missing string field '") + key + "'");
        FeedbackRecord rec;
        rec.session_id = req["session_id"].get<std::string>();
        rec.message_id = req["message_id"].get<std::string>();
        const auto verdict = req["verdict"].get<std::string>();
        if (verdict == "up")
            rec.verdict = Verdict::up;
        else if (verdict == "down")
            rec.verdict = Verdict::down;
        else
            return error(400, "invalid_argument", "verdict must be 'up' or 'down'");
        if (auto it = req.find("comment"); it != req.end() && it->is_string()) rec.comment = it->get<std::string>();
        {
            std::lock_guard lock(mu_);
            auto it = message_owner_.find(rec.message_id);
            if (it == message_owner_.end() || it->second != rec.session_id)
                return error(404, "not_found", "no message '" + rec.message_id + "' in session '" + rec.session_id + "'");
        }
        rec.timestamp = iso8601_utc(now_());
        try {
            const bool updated = feedback_.put(rec);
            return {200, {{"ok", true}, {"updated", updated}}};
        } catch (const Error& e) {
            return from_error(e);
        }
    }

    Reply history(const std::string& session_id) {
        std::lock_guard lock(mu_);
        evict_locked();
        auto it = sessions_.find(session_id);
        if (it == sessions_.end()) return error(404, "not_found", "unknown session '" + session_id + "'");
        const auto& s = it->second->session;
        auto turns = nlohmann::json::array();
        for (const auto& t : s.turns) {
            nlohmann::json turn{{"message_id", t.message_id}, {"question", t.question}, {"answer", t.answer}};
            if (auto fb = feedback_.get(t.message_id))
                turn["feedback"] = fb->verdict == Verdict::up ? "up" : "down";
            turns.push_back(std::move(turn));
        }
        return {200,
                {{"session_id", s.session_id},
                 {"created_at", iso8601_utc(s.created_at)},
                 {"last_active", iso8601_utc(s.last_active)},
                 {"history", std::move(turns)}}};
    }

    /// Debug lookup used by the UI's source panel.
    Reply chunk(const std::string& chunk_id) const {
        const auto* c = pipeline_.index().find_chunk(chunk_id);
        if (!c) return error(404, "not_found", "unknown chunk '" + chunk_id + "'");
        nlohmann::json body = *c;
        if (const auto* d = pipeline_.index().find_document(c->doc_id)) body["uri"] = d->uri;
        return {200, std::move(body)};
    }

    std::size_t session_count() const {
        std::lock_guard lock(mu_);
        return sessions_.size();
    }

    static Reply error(int status, const std::string& code, const std::string& message) {
        return {status, {{"error", {{"code", code}, {"message", message}}}}};
    }

    static Reply from_error(const Error& e) {
        int status = 500;
        switch (e.code()) {
            case Errc::invalid_argument:
            case Errc::parse:
            case Errc::budget: status = 400; break;
            case Errc::not_found: status = 404; break;
            case Errc::provider:
            case Errc::backend: status = 502; break;
            default: break;
        }
        return error(status, to_string(e.code()), e.what());
    }

private:
    struct Slot {
        std::mutex mu;
        Session session;
    };

    std::shared_ptr<Slot> acquire_session(std::string sid) {
        std::lock_guard lock(mu_);
        evict_locked();
        if (sid.empty()) sid = "s" + instance_ + "-" + std::to_string(++session_counter_);
        auto& slot = sessions_[sid];
        if (!slot) {
            slot = std::make_shared<Slot>();
            slot->session.session_id = sid;
            slot->session.created_at = slot->session.last_active = now_();
        }
        return slot;
    }

    void evict_locked() {
        if (cfg_.session_ttl_s <= 0) return;
        const auto cutoff = now_() - std::chrono::seconds(cfg_.session_ttl_s);
        for (auto it = sessions_.begin(); it != sessions_.end();) {
            if (it->second->session.last_active < cutoff)
                it = sessions_.erase(it);
            else
                ++it;
        }
    }

    void append_transcript(const nlohmann::json& reply, const std::string& question, Clock::time_point t) {
        std::lock_guard lock(transcript_mu_);
        std::ofstream out(cfg_.transcript_path, std::ios::app);
        if (!out) return;
        nlohmann::json line = reply;
        line["question"] = question;
        line["timestamp"] = iso8601_utc(t);
        out << line.dump() << '\n';
    }

    const Pipeline& pipeline_;
    ServiceConfig cfg_;
    std::function<Clock::time_point()> now_;
    FeedbackStore feedback_;
    std::string instance_;

    mutable std::mutex mu_;
    std::unordered_map<std::string, std::shared_ptr<Slot>> sessions_;
    std::unordered_map<std::string, std::string> message_owner_;
    std::atomic<std::uint64_t> message_counter_{0};
    std::uint64_t session_counter_ = 0;
    std::mutex transcript_mu_;
};

/// Binds ChatService to an HTTP listener.
class HttpFrontend {
public:
    HttpFrontend(ChatService& service, const std::string& ui_dir = {}) : service_(service) {
        server_.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                     {"Access-Control-Allow-Headers", "Content-Type"},
                                     {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
        server_.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
        server_.Get("/health", [this](const httplib::Request&, httplib::Response& res) { send(res, service_.health()); });
        server_.Post("/ask", [this](const httplib::Request& req, httplib::Response& res) {
            with_json(req, res, [this](const nlohmann::json& j) { return service_.ask(j); });
        });
        server_.Post("/feedback", [this](const httplib::Request& req, httplib::Response& res) {
            with_json(req, res, [this](const nlohmann::json& j) { return service_.feedback(j); });
        });
        server_.Get(R"(/sessions/([^/]+)/history)", [this](const httplib::Request& req, httplib::Response& res) {
            send(res, service_.history(req.matches[1]));
        });
        server_.Get("/chunks", [this](const httplib::Request& req, httplib::Response& res) {
            send(res, service_.chunk(req.get_param_value("id")));
        });
        if (!ui_dir.empty()) server_.set_mount_point("/", ui_dir);
    }

    bool bind(const std::string& host, int port) { return server_.bind_to_port(host, port); }
    int bind_any(const std::string& host) { return server_.bind_to_any_port(host); }
    bool listen_after_bind() { return server_.listen_after_bind(); }
    void stop() { server_.stop(); }
    void wait_until_ready() const { server_.wait_until_ready(); }

private:
    static void send(httplib::Response& res, const ChatService::Reply& r) {
        res.status = r.status;
        res.set_content(r.body.dump(), "application/json");
    }

    template <typename Handler>
    static void with_json(const httplib::Request& req, httplib::Response& res, Handler&& h) {
        nlohmann::json body;
        try {
            body = nlohmann::json::parse(req.body);
        } catch (const nlohmann::json::exception&) {
            send(res, ChatService::error(400, "parse", "request body is not valid JSON"));
            return;
        }
        send(res, h(body));
    }

    ChatService& service_;
    httplib::Server server_;
};

}  // namespace askeda
