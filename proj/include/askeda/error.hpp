#pragma once

#include <stdexcept>
#include <string>

namespace askeda {

enum class Errc {
    io,
    unsupported_format,
    empty_document,
    invalid_argument,
    duplicate_id,
    all_documents_failed,
    parse,
    provider,
    provider_mismatch,
    backend,
    budget,
    missing_index,
    not_found,
};

inline const char* to_string(Errc e) {
    switch (e) {
        case Errc::io: return "io";
        case Errc::unsupported_format: return "unsupported_format";
        case Errc::empty_document: return "empty_document";
        case Errc::invalid_argument: return "invalid_argument";
        case Errc::duplicate_id: return "duplicate_id";
        case Errc::all_documents_failed: return "all_documents_failed";
        case Errc::parse: return "parse";
        case Errc::provider: return "provider";
        case Errc::provider_mismatch: return "provider_mismatch";
        case Errc::backend: return "backend";
        case Errc::budget: return "budget";
        case Errc::missing_index: return "missing_index";
        case Errc::not_found: return "not_found";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace askeda
