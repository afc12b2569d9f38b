#pragma once

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <pthread.h>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "askeda/config.hpp"
#include "askeda/eval.hpp"
#include "askeda/retrieval.hpp"
#include "askeda/service.hpp"

namespace askeda::cli {

inline constexpr const char* kDefaultArms = "hybrid:off,sparse:off,dense:off,none:off,hybrid:on";

struct CommonOptions {
    std::string config;
    std::string index_dir;
    std::string backend;
};

inline AppConfig resolve_config(const CommonOptions& o) {
    AppConfig cfg = o.config.empty() ? AppConfig{} : load_config(o.config);
    if (!o.index_dir.empty()) cfg.index_dir = o.index_dir;
    if (!o.backend.empty()) {
        const auto kind = parse_backend(o.backend);
        if (!kind) throw Error(Errc::invalid_argument, "unknown backend '" + o.backend + "'");
        cfg.generation.backend = *kind;
    }
    return cfg;
}

/// Loaded snapshot plus everything a Pipeline borrows.
struct Runtime {
    AppConfig cfg;
    HybridIndex index;
    std::unique_ptr<EmbeddingProvider> provider;
    AbbreviationDictionary dictionary;
    std::unique_ptr<CompletionBackend> backend;
    std::vector<std::string> warnings;

    explicit Runtime(AppConfig c) : cfg(std::move(c)) {
        index = HybridIndex::load(cfg.index_dir);
        provider = make_provider(cfg.embedder);
        dictionary = load_dictionary_or_empty(cfg.dictionary, &warnings);
        backend = make_backend(cfg.generation.backend, cfg.llm);
    }

    Pipeline pipeline() const { return Pipeline(index, provider.get(), dictionary, *backend, pipeline_config(cfg)); }
};

inline std::optional<bool> parse_on_off(const std::string& s) {
    if (s == "on" || s == "true" || s == "1") return true;
    if (s == "off" || s == "false" || s == "0") return false;
    return std::nullopt;
}

inline int run_ingest(const CommonOptions& common, const std::string& manifest_flag, std::optional<std::size_t> chunk_size,
                      std::optional<std::size_t> chunk_overlap, const std::string& dump_chunks, std::ostream& out,
                      std::ostream& err) {
    AppConfig cfg = resolve_config(common);
    if (!manifest_flag.empty()) cfg.manifest = manifest_flag;
    if (chunk_size) cfg.chunking.chunk_size = *chunk_size;
    if (chunk_overlap) cfg.chunking.chunk_overlap = *chunk_overlap;
    if (cfg.manifest.empty()) {
        err << "error: no manifest given (use --manifest or set \"manifest\" in the config)\n";
        return 2;
    }
    if (!std::filesystem::exists(cfg.manifest)) {
        err << "error: manifest '" << cfg.manifest << "' does not exist\n";
        return 2;
    }
    const auto entries = load_manifest(cfg.manifest);
    const auto provider = make_provider(cfg.embedder);
    BuildSummary summary;
    const auto index = build_hybrid_index(entries, cfg.chunking, cfg.bm25, *provider, &summary);
    index.save(cfg.index_dir);
    if (!dump_chunks.empty()) {
        std::ofstream f(dump_chunks, std::ios::binary | std::ios::trunc);
        f << chunks_to_jsonl(index.chunks());
    }
    for (const auto& w : summary.warnings) err << "warning: " << w << '\n';
    out << "documents: " << summary.documents << "\nchunks: " << summary.chunks << "\nterms: " << summary.terms
        << "\ndimension: " << summary.dimension << "\nindex: " << cfg.index_dir << '\n';
    return 0;
}

struct AskOptions {
    std::string question;
    std::string mode = "hybrid";
    std::string adh = "on";
    std::optional<std::size_t> n_dense, n_sparse, n_hybrid;
    std::optional<double> rrf_k;
    bool debug = false;
};

inline int run_ask(const CommonOptions& common, const AskOptions& o, std::ostream& out, std::ostream& err) {
    const auto mode = parse_mode(o.mode);
    const auto adh = parse_on_off(o.adh);
    if (!mode || !adh) {
        err << "error: --mode must be hybrid|sparse|dense|none and --adh on|off\n";
        return 2;
    }
    AppConfig cfg = resolve_config(common);
    if (o.n_dense) cfg.retrieval.n_dense = *o.n_dense;
    if (o.n_sparse) cfg.retrieval.n_sparse = *o.n_sparse;
    if (o.n_hybrid) cfg.retrieval.n_hybrid = *o.n_hybrid;
    if (o.rrf_k) cfg.retrieval.rrf_k = *o.rrf_k;
    Runtime rt(std::move(cfg));
    for (const auto& w : rt.warnings) err << "warning: " << w << '\n';
    const auto result = rt.pipeline().answer(o.question, {}, *mode, *adh);
    out << result.envelope.answer << "\n\nSources:\n";
    std::size_t i = 0;
    for (const auto& id : result.envelope.sources) {
        out << "  " << ++i << ". " << id;
        if (const auto* c = rt.index.find_chunk(id))
            if (const auto* d = rt.index.find_document(c->doc_id)) out << "  (" << d->uri << ")";
        out << '\n';
    }
    if (o.debug) out << "\nCandidates:\n" << candidates_to_json(result.retrieval.candidates).dump(2) << '\n';
    return 0;
}

struct EvalOptions {
    std::string dataset;
    std::string arms = kDefaultArms;
    std::string format = "json";
    std::string output;
    std::string name;
};

inline int run_eval_cmd(const CommonOptions& common, const EvalOptions& o, std::ostream& out, std::ostream& err) {
    const auto format = parse_report_format(o.format);
    if (!format) {
        err << "error: --format must be json, csv or markdown\n";
        return 2;
    }
    const auto arms = parse_arms(o.arms);
    const auto dataset = load_dataset(o.dataset);
    Runtime rt(resolve_config(common));
    for (const auto& w : rt.warnings) err << "warning: " << w << '\n';
    const auto name = o.name.empty() ? std::filesystem::path(o.dataset).stem().string() : o.name;
    const auto pipeline = rt.pipeline();
    const auto report = run_eval(name, dataset, pipeline, arms, rt.cfg.eval_parallelism);
    const auto text = render_report(report, *format);
    if (o.output.empty()) {
        out << text;
    } else {
        std::ofstream f(o.output, std::ios::binary | std::ios::trunc);
        if (!f) throw Error(Errc::io, "cannot write '" + o.output + "'");
        f << text;
    }
    std::size_t errors = 0;
    for (const auto& a : report.arms) errors += a.errors;
    err << "evaluated " << dataset.size() << " example(s) x " << arms.size() << " arm(s); " << errors
        << " example error(s)\n";
    return 0;
}

struct ServeOptions {
    std::string host;
    std::optional<int> port;
};

inline int run_serve(const CommonOptions& common, const ServeOptions& o, std::ostream& out, std::ostream& err) {
    AppConfig cfg = resolve_config(common);
    if (!o.host.empty()) cfg.service.host = o.host;
    if (o.port) cfg.service.port = *o.port;
    cfg.require_paths();
    Runtime rt(std::move(cfg));
    for (const auto& w : rt.warnings) err << "warning: " << w << '\n';
    const auto pipeline = rt.pipeline();
    ChatService service(pipeline, rt.cfg.service);
    HttpFrontend http(service, rt.cfg.service.ui_dir);

    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    int port = rt.cfg.service.port;
    if (port == 0) {
        port = http.bind_any(rt.cfg.service.host);
        if (port < 0) {
            err << "error: cannot bind " << rt.cfg.service.host << '\n';
            return 1;
        }
    } else if (!http.bind(rt.cfg.service.host, port)) {
        err << "error: cannot bind " << rt.cfg.service.host << ':' << port << '\n';
        return 1;
    }
    out << "listening on http://" << rt.cfg.service.host << ':' << port << " (" << rt.index.chunks().size()
        << " chunks)" << std::endl;
    std::jthread waiter([&http, signals] {
        int sig = 0;
        sigwait(&signals, &sig);
        http.stop();
    });
    http.listen_after_bind();
    // Feedback is flushed per write; nothing else to persist.
    pthread_kill(waiter.native_handle(), SIGTERM);
    return 0;
}

/// Entry point shared by the askeda binary and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"askeda: hybrid retrieval question answering for design documentation"};
    app.require_subcommand(1);

    CommonOptions common;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("-c,--config", common.config, "JSON configuration file")->check(CLI::ExistingFile);
        sub->add_option("--index", common.index_dir, "index snapshot directory");
    };

    auto* ingest = app.add_subcommand("ingest", "ingest a corpus manifest into a hybrid index snapshot");
    add_common(ingest);
    std::string manifest, dump_chunks;
    std::optional<std::size_t> chunk_size, chunk_overlap;
    ingest->add_option("-m,--manifest", manifest, "corpus manifest (JSON array of {uri, format?, doc_id?})");
    ingest->add_option("--chunk-size", chunk_size);
    ingest->add_option("--chunk-overlap", chunk_overlap);
    ingest->add_option("--dump-chunks", dump_chunks, "write chunks as JSON Lines");

    auto* ask = app.add_subcommand("ask", "answer one question");
    add_common(ask);
    AskOptions ask_opts;
    ask->add_option("question", ask_opts.question)->required();
    ask->add_option("--mode", ask_opts.mode)->check(CLI::IsMember({"hybrid", "sparse", "dense", "none"}));
    ask->add_option("--adh", ask_opts.adh)->check(CLI::IsMember({"on", "off"}));
    ask->add_option("--backend", common.backend)->check(CLI::IsMember({"http_chat", "stub_echo", "stub_extractive"}));
    ask->add_option("--n-dense", ask_opts.n_dense)->check(CLI::PositiveNumber);
    ask->add_option("--n-sparse", ask_opts.n_sparse)->check(CLI::PositiveNumber);
    ask->add_option("--n-hybrid", ask_opts.n_hybrid)->check(CLI::PositiveNumber);
    ask->add_option("--rrf-k", ask_opts.rrf_k)->check(CLI::PositiveNumber);
    ask->add_flag("--debug", ask_opts.debug, "print the fused candidate table");

    auto* eval = app.add_subcommand("eval", "run a retrieval x ADH ablation over a QA dataset");
    add_common(eval);
    EvalOptions eval_opts;
    eval->add_option("-d,--dataset", eval_opts.dataset, "JSON Lines {question, answer}")->required();
    eval->add_option("--arms", eval_opts.arms, "comma list of mode:on|off")->capture_default_str();
    eval->add_option("--format", eval_opts.format)->check(CLI::IsMember({"json", "csv", "markdown"}));
    eval->add_option("-o,--output", eval_opts.output, "report file (default stdout)");
    eval->add_option("--name", eval_opts.name, "dataset name in the report");
    eval->add_option("--backend", common.backend)->check(CLI::IsMember({"http_chat", "stub_echo", "stub_extractive"}));

    auto* serve = app.add_subcommand("serve", "run the HTTP chat API");
    add_common(serve);
    ServeOptions serve_opts;
    serve->add_option("--host", serve_opts.host);
    serve->add_option("--port", serve_opts.port);
    serve->add_option("--backend", common.backend)->check(CLI::IsMember({"http_chat", "stub_echo", "stub_extractive"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (*ingest) return run_ingest(common, manifest, chunk_size, chunk_overlap, dump_chunks, out, err);
        if (*ask) return run_ask(common, ask_opts, out, err);
        if (*eval) return run_eval_cmd(common, eval_opts, out, err);
        if (*serve) return run_serve(common, serve_opts, out, err);
    } catch (const Error& e) {
        err << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

}  // namespace askeda::cli
