#include "blockloc/diag.hpp"

namespace blockloc {

const char* err_code_name(ErrCode code) {
    switch (code) {
    case ErrCode::SyntaxError: return "SyntaxError";
    case ErrCode::UnsupportedConstruct: return "UnsupportedConstruct";
    case ErrCode::UnknownModule: return "UnknownModule";
    case ErrCode::RecursiveInstantiation: return "RecursiveInstantiation";
    case ErrCode::UnresolvedIdentifier: return "UnresolvedIdentifier";
    case ErrCode::MultiDriver: return "MultiDriver";
    case ErrCode::UndrivenSignal: return "UndrivenSignal";
    case ErrCode::MalformedVcd: return "MalformedVcd";
    case ErrCode::ClockNotFound: return "ClockNotFound";
    case ErrCode::SignalNotRecorded: return "SignalNotRecorded";
    case ErrCode::CycleOutOfRange: return "CycleOutOfRange";
    case ErrCode::UnsupportedOperator: return "UnsupportedOperator";
    case ErrCode::MissingCoverage: return "MissingCoverage";
    case ErrCode::CombinationalLoop: return "CombinationalLoop";
    case ErrCode::LimitExceeded: return "LimitExceeded";
    case ErrCode::InvalidSignalName: return "InvalidSignalName";
    case ErrCode::BackendError: return "BackendError";
    case ErrCode::NoApplicableSite: return "NoApplicableSite";
    case ErrCode::ManifestError: return "ManifestError";
    case ErrCode::IoError: return "IoError";
    }
    return "Error";
}

std::string Error::format(ErrCode code, const std::string& message, const std::string& file,
                          int line) {
    std::string out = err_code_name(code);
    out += ": ";
    out += message;
    if (!file.empty()) {
        out += " (";
        out += file;
        if (line > 0) {
            out += ":";
            out += std::to_string(line);
        }
        out += ")";
    }
    return out;
}

} // namespace blockloc
