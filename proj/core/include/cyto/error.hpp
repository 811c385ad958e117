#ifndef CYTO_ERROR_HPP
#define CYTO_ERROR_HPP

#include <stdexcept>
#include <string>

namespace cyto {

// Violated precondition or invariant of a library operation.
class ContractError : public std::logic_error {
public:
    explicit ContractError(const std::string& what) : std::logic_error(what) {}
};

// Malformed input file; carries the 1-based line number when known.
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& what, long line = 0)
        : std::runtime_error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what),
          line_(line) {}
    long line() const { return line_; }

private:
    long line_;
};

// Missing or unreadable/unwritable file.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cyto

#endif
