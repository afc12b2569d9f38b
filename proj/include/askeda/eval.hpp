#pragma once

#include <atomic>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "askeda/error.hpp"
#include "askeda/fusion.hpp"
#include "askeda/pipeline.hpp"
#include "askeda/rouge.hpp"
#include "json.hpp"

namespace askeda {

struct QaExample {
    std::string question;
    std::string answer;

    friend bool operator==(const QaExample&, const QaExample&) = default;
};

/// JSON Lines, one {"question", "answer"} object per line; blank lines skipped.
inline std::vector<QaExample> parse_dataset(std::istream& in, const std::string& origin = "dataset") {
    std::vector<QaExample> out;
    std::size_t lineno = 0;
    for (std::string line; std::getline(in, line);) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto where = origin + ":" + std::to_string(lineno);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw Error(Errc::parse, where + ": " + e.what());
        }
        if (!j.is_object() || !j.contains("question") || !j.contains("answer") || !j["question"].is_string() ||
            !j["answer"].is_string())
            throw Error(Errc::parse, where + ": expected {\"question\": string, \"answer\": string}");
        QaExample ex{j["question"].get<std::string>(), j["answer"].get<std::string>()};
        if (ex.question.empty() || ex.answer.empty()) throw Error(Errc::parse, where + ": empty question or answer");
        out.push_back(std::move(ex));
    }
    return out;
}

inline std::vector<QaExample> load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::io, "cannot read dataset '" + path + "'");
    auto out = parse_dataset(in, path);
    if (out.empty()) throw Error(Errc::parse, "dataset '" + path + "' has no examples");
    return out;
}

struct Arm {
    RetrievalMode mode = RetrievalMode::hybrid;
    bool adh = false;

    friend bool operator==(const Arm&, const Arm&) = default;
};

struct ExampleRecord {
    std::size_t index = 0;
    std::string question;
    std::string reference;
    std::string answer;
    RougeScore score;
    std::optional<std::string> error;

    friend bool operator==(const ExampleRecord&, const ExampleRecord&) = default;
};

struct ArmReport {
    Arm arm;
    RougeScore mean;
    std::size_t errors = 0;
    std::vector<ExampleRecord> records;

    friend bool operator==(const ArmReport&, const ArmReport&) = default;
};

struct AblationReport {
    std::string dataset;
    std::vector<ArmReport> arms;

    friend bool operator==(const AblationReport&, const AblationReport&) = default;
};

inline RougeScore mean_score(const std::vector<ExampleRecord>& records) {
    RougeScore m;
    if (records.empty()) return m;
    for (const auto& r : records) {
        m.precision += r.score.precision;
        m.recall += r.score.recall;
        m.f1 += r.score.f1;
    }
    const auto n = static_cast<double>(records.size());
    m.precision /= n;
    m.recall /= n;
    m.f1 /= n;
    return m;
}

/// Runs every arm over every example. A failing example is recorded with
/// its error and scored zero; the run continues. Results are ordered by
/// example index regardless of `parallelism`.
inline AblationReport run_eval(const std::string& dataset_name, const std::vector<QaExample>& dataset,
                               const Pipeline& pipeline, const std::vector<Arm>& arms, unsigned parallelism = 1) {
    AblationReport report;
    report.dataset = dataset_name;
    for (const auto& arm : arms) {
        ArmReport ar;
        ar.arm = arm;
        ar.records.resize(dataset.size());
        auto run_one = [&](std::size_t i) {
            auto& rec = ar.records[i];
            rec.index = i;
            rec.question = dataset[i].question;
            rec.reference = dataset[i].answer;
            try {
                rec.answer = pipeline.answer(dataset[i].question, {}, arm.mode, arm.adh).envelope.answer;
                rec.score = rouge_lsum(rec.reference, rec.answer);
            } catch (const std::exception& e) {
                rec.error = e.what();
                rec.score = {};
            }
        };
        const unsigned workers = std::max(1u, std::min<unsigned>(parallelism, static_cast<unsigned>(dataset.size())));
        if (workers <= 1) {
            for (std::size_t i = 0; i < dataset.size(); ++i) run_one(i);
        } else {
            std::atomic<std::size_t> next{0};
            std::vector<std::jthread> pool;
            for (unsigned w = 0; w < workers; ++w)
                pool.emplace_back([&] {
                    for (std::size_t i = next++; i < dataset.size(); i = next++) run_one(i);
                });
        }
        for (const auto& r : ar.records)
            if (r.error) ++ar.errors;
        ar.mean = mean_score(ar.records);
        report.arms.push_back(std::move(ar));
    }
    return report;
}

inline nlohmann::ordered_json score_json(const RougeScore& s) {
    return {{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}};
}

inline RougeScore score_from_json(const nlohmann::ordered_json& j) {
    return {j.at("precision").get<double>(), j.at("recall").get<double>(), j.at("f1").get<double>()};
}

inline nlohmann::ordered_json report_to_json(const AblationReport& r) {
    nlohmann::ordered_json arms = nlohmann::ordered_json::array();
    for (const auto& a : r.arms) {
        nlohmann::ordered_json records = nlohmann::ordered_json::array();
        for (const auto& rec : a.records) {
            nlohmann::ordered_json j{{"index", rec.index},     {"question", rec.question}, {"reference", rec.reference},
                                     {"answer", rec.answer},   {"precision", rec.score.precision},
                                     {"recall", rec.score.recall}, {"f1", rec.score.f1}};
            j["error"] = rec.error ? nlohmann::ordered_json(*rec.error) : nlohmann::ordered_json(nullptr);
            records.push_back(std::move(j));
        }
        arms.push_back({{"mode", to_string(a.arm.mode)},
                        {"adh", a.arm.adh},
                        {"mean", score_json(a.mean)},
                        {"errors", a.errors},
                        {"records", std::move(records)}});
    }
    return {{"dataset", r.dataset}, {"arms", std::move(arms)}};
}

inline AblationReport report_from_json(const nlohmann::ordered_json& j) {
    AblationReport r;
    r.dataset = j.at("dataset").get<std::string>();
    for (const auto& a : j.at("arms")) {
        ArmReport ar;
        const auto mode = parse_mode(a.at("mode").get<std::string>());
        if (!mode) throw Error(Errc::parse, "report: unknown mode");
        ar.arm = {*mode, a.at("adh").get<bool>()};
        ar.mean = score_from_json(a.at("mean"));
        ar.errors = a.at("errors").get<std::size_t>();
        for (const auto& rec : a.at("records")) {
            ExampleRecord e;
            e.index = rec.at("index").get<std::size_t>();
            e.question = rec.at("question").get<std::string>();
            e.reference = rec.at("reference").get<std::string>();
            e.answer = rec.at("answer").get<std::string>();
            e.score = score_from_json(rec);
            if (!rec.at("error").is_null()) e.error = rec.at("error").get<std::string>();
            ar.records.push_back(std::move(e));
        }
        r.arms.push_back(std::move(ar));
    }
    return r;
}

enum class ReportFormat { json, csv, markdown_table };

inline std::optional<ReportFormat> parse_report_format(std::string_view s) {
    if (s == "json") return ReportFormat::json;
    if (s == "csv") return ReportFormat::csv;
    if (s == "markdown" || s == "markdown_table" || s == "md") return ReportFormat::markdown_table;
    return std::nullopt;
}

namespace detail {

inline std::string fixed4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace detail

inline std::string render_report(const AblationReport& r, ReportFormat format) {
    switch (format) {
        case ReportFormat::json: return report_to_json(r).dump(2) + "\n";
        case ReportFormat::csv: {
            std::string out = "dataset,mode,adh,f1,recall\n";
            for (const auto& a : r.arms) {
                out += detail::csv_field(r.dataset) + "," + to_string(a.arm.mode) + "," + (a.arm.adh ? "on" : "off") +
                       "," + detail::fixed4(a.mean.f1) + "," + detail::fixed4(a.mean.recall) + "\n";
            }
            return out;
        }
        case ReportFormat::markdown_table: {
            std::string out = "| dataset | mode | adh | F1 | Recall |\n|---|---|---|---|---|\n";
            for (const auto& a : r.arms) {
                out += "| " + r.dataset + " | " + to_string(a.arm.mode) + " | " + (a.arm.adh ? "on" : "off") + " | " +
                       detail::fixed4(a.mean.f1) + " | " + detail::fixed4(a.mean.recall) + " |\n";
            }
            return out;
        }
    }
    return {};
}

/// "hybrid:on,sparse:off,..."; a bare mode means ADH off.
inline std::vector<Arm> parse_arms(std::string_view spec) {
    std::vector<Arm> arms;
    std::size_t start = 0;
    while (start <= spec.size()) {
        auto end = spec.find(',', start);
        if (end == std::string_view::npos) end = spec.size();
        auto item = spec.substr(start, end - start);
        start = end + 1;
        if (item.empty()) continue;
        const auto colon = item.find(':');
        const auto mode = parse_mode(item.substr(0, colon));
        if (!mode) throw Error(Errc::invalid_argument, "unknown retrieval mode in arm '" + std::string(item) + "'");
        bool adh = false;
        if (colon != std::string_view::npos) {
            const auto flag = item.substr(colon + 1);
            if (flag == "on" || flag == "adh")
                adh = true;
            else if (flag != "off" && flag != "noadh")
                throw Error(Errc::invalid_argument, "arm '" + std::string(item) + "': ADH flag must be on or off");
        }
        arms.push_back({*mode, adh});
    }
    return arms;
}

}  // namespace askeda
