#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace codeprov {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Lexing failure; offset is the byte position of the offending construct.
struct LexError : Error {
    LexError(const std::string& what, std::size_t offset)
        : Error(what + " at offset " + std::to_string(offset)), offset(offset) {}
    // Reversed argument order: keeps the message verbatim, for rewrapping.
    LexError(std::size_t offset, const std::string& what) : Error(what), offset(offset) {}
    std::size_t offset;
};

struct RenameError : Error {
    using Error::Error;
};

struct NameCollisionError : RenameError {
    using RenameError::RenameError;
};

struct CorpusError : Error {
    using Error::Error;
};

struct ModelError : Error {
    using Error::Error;
};

struct StatError : Error {
    using Error::Error;
};

struct BaselineError : Error {
    using Error::Error;
};

struct ReplayMissError : BaselineError {
    using BaselineError::BaselineError;
};

struct CliError : Error {
    using Error::Error;
};

}  // namespace codeprov
