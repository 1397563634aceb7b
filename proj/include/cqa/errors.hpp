// Copyright 2026 the cqabench authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cqa {

/// Base class for all cqabench errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

/// Malformed record or syntax error in an input file. Carries 1-based line number
/// (0 when the location is not line-addressable).
class ParseError : public Error {
public:
    ParseError(const std::string& file, int line, const std::string& msg)
        : Error(file + ":" + std::to_string(line) + ": " + msg), file_(file), line_(line) {}
    const std::string& file() const { return file_; }
    int line() const { return line_; }

private:
    std::string file_;
    int line_;
};

class DuplicateId : public Error {
public:
    DuplicateId(const std::string& id, int line)
        : Error("duplicate question id \"" + id + "\" at line " + std::to_string(line)),
          id_(id), line_(line) {}
    const std::string& id() const { return id_; }
    int line() const { return line_; }

private:
    std::string id_;
    int line_;
};

class InvalidK : public Error {
public:
    InvalidK(int k, std::size_t n)
        : Error("combination factor k=" + std::to_string(k) + " outside [1, N=" +
                std::to_string(n) + "]") {}
};

class DuplicateMember : public Error {
public:
    explicit DuplicateMember(const std::string& id)
        : Error("compound members must be pairwise distinct, got \"" + id + "\" twice") {}
};

class SlotCountMismatch : public Error {
public:
    SlotCountMismatch(std::size_t extracted, std::size_t golds)
        : Error("extracted " + std::to_string(extracted) + " slots but " +
                std::to_string(golds) + " gold answers") {}
};

class NoData : public Error {
public:
    explicit NoData(const std::string& what_for) : Error("no data: " + what_for) {}
};

class NoBaseline : public Error {
public:
    explicit NoBaseline(const std::string& dataset)
        : Error("dataset \"" + dataset + "\" has no k=1 baseline records") {}
};

class IncompleteRow : public Error {
public:
    explicit IncompleteRow(const std::string& msg) : Error(msg) {}
};

class InvalidRatio : public Error {
public:
    explicit InvalidRatio(double ratio)
        : Error("policy ratio must be > 0, got " + std::to_string(ratio)) {}
    explicit InvalidRatio(const std::string& msg) : Error(msg) {}
};

class InconsistentValues : public Error {
public:
    explicit InconsistentValues(std::size_t step)
        : Error("trajectory value chain broken at step " + std::to_string(step) +
                ": next_value differs from the following step's value") {}
};

/// Request would not fit the endpoint context budget. Never retried.
class ContextOverflow : public Error {
public:
    explicit ContextOverflow(const std::string& msg) : Error(msg) {}
};

/// All retry attempts exhausted.
class Unavailable : public Error {
public:
    explicit Unavailable(const std::string& msg) : Error(msg) {}
};

/// A single invariant violation found by a validator. Violations are data, not
/// exceptions: validators return the full list.
struct Violation {
    std::string code;     // e.g. "DuplicateId", "GoldNotInChoices"
    std::string subject;  // offending id / name
    std::string detail;

    bool operator==(const Violation& other) const = default;
};

using ValidationReport = std::vector<Violation>;

class ConfigInvalid : public Error {
public:
    explicit ConfigInvalid(const ValidationReport& report) : Error(join(report)), report_(report) {}
    const ValidationReport& report() const { return report_; }

private:
    static std::string join(const ValidationReport& report) {
        std::string msg = "invalid config:";
        for (const auto& v : report) {
            msg += " [" + v.code + " " + v.subject + (v.detail.empty() ? "" : ": " + v.detail) + "]";
        }
        return msg;
    }
    ValidationReport report_;
};

}  // namespace cqa
