#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace archevol {

/// Base class for every error raised by the engine.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A graph refers to a node or edge type its type graph does not declare.
class UnknownTypeError : public Error {
public:
    using Error::Error;
};

/// A type graph or pattern is malformed.
class DefinitionError : public Error {
public:
    using Error::Error;
};

/// Rule application would leave dangling edges.
class GluingError : public Error {
public:
    GluingError(std::string message, std::vector<std::uint32_t> dangling)
        : Error(std::move(message)), dangling_edges(std::move(dangling)) {}
    std::vector<std::uint32_t> dangling_edges;
};

/// A match is applied to a graph other than the one it was computed on.
class StaleMatchError : public Error {
public:
    using Error::Error;
};

/// A rule needs a parameter value that was not supplied.
class UnboundParameterError : public Error {
public:
    using Error::Error;
};

/// A rule sequence could not be executed.
class SequenceError : public Error {
public:
    SequenceError(std::string message, std::size_t pos, std::string rule_name)
        : Error(std::move(message)), position(pos), rule(std::move(rule_name)) {}
    std::size_t position;
    std::string rule;
};

/// Critical pair analysis would enumerate overlaps larger than allowed.
class OverlapLimitError : public Error {
public:
    using Error::Error;
};

/// Architecture model invariants do not hold; `problems` lists each one.
class ArchitectureError : public Error {
public:
    explicit ArchitectureError(std::vector<std::string> list)
        : Error(join(list)), problems(std::move(list)) {}
    std::vector<std::string> problems;

private:
    static std::string join(const std::vector<std::string>& list) {
        std::string out = "invalid architecture";
        for (const auto& p : list) {
            out += "\n  - ";
            out += p;
        }
        return out;
    }
};

/// An evolution operation's precondition failed.
class OperationError : public Error {
public:
    using Error::Error;
};

/// A document could not be parsed or has the wrong format tag.
class FormatError : public Error {
public:
    using Error::Error;
};

}  // namespace archevol
