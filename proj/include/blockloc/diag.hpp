#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace blockloc {

/// Stable error categories; the CLI maps them onto exit codes.
enum class ErrCode {
    SyntaxError,
    UnsupportedConstruct,
    UnknownModule,
    RecursiveInstantiation,
    UnresolvedIdentifier,
    MultiDriver,
    UndrivenSignal,
    MalformedVcd,
    ClockNotFound,
    SignalNotRecorded,
    CycleOutOfRange,
    UnsupportedOperator,
    MissingCoverage,
    CombinationalLoop,
    LimitExceeded,
    InvalidSignalName,
    BackendError,
    NoApplicableSite,
    ManifestError,
    IoError,
};

const char* err_code_name(ErrCode code);

/// Structured diagnostic. `file`/`line` are filled whenever the error has a
/// source location; line 0 means "no location".
class Error : public std::runtime_error {
public:
    Error(ErrCode code, std::string message, std::string file = {}, int line = 0)
        : std::runtime_error(format(code, message, file, line)),
          code_(code),
          detail_(std::move(message)),
          file_(std::move(file)),
          line_(line) {}

    ErrCode code() const noexcept { return code_; }
    const std::string& detail() const noexcept { return detail_; }
    const std::string& file() const noexcept { return file_; }
    int line() const noexcept { return line_; }

private:
    static std::string format(ErrCode code, const std::string& message,
                              const std::string& file, int line);

    ErrCode code_;
    std::string detail_;
    std::string file_;
    int line_;
};

[[noreturn]] inline void raise(ErrCode code, std::string message, std::string file = {},
                               int line = 0) {
    throw Error(code, std::move(message), std::move(file), line);
}

} // namespace blockloc
