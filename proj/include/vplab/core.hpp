// core.hpp
// Shared vocabulary for the volatility-persistence lab: error types, calendar
// dates, missing-value helpers and a deterministic parallel-for.

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace vplab {

// ============================================================================
// Errors
// ============================================================================

/// Invalid configuration or parameter outside a documented range.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input data violates a documented invariant (bad cell, duplicate key, ...).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed CSV row; carries the 1-based line number.
class ParseError : public DataError {
public:
    ParseError(const std::string& file, std::size_t line, const std::string& what)
        : DataError(file + ":" + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// An estimator could not produce a value (too few ordinates, no feasible start, ...).
class EstimationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Something that should be impossible happened (e.g. an embedding that is not PSD).
class InternalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ============================================================================
// Missing values
// ============================================================================

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double v) noexcept { return std::isnan(v); }
inline bool present(double v) noexcept { return !std::isnan(v); }

// ============================================================================
// Dates
// ============================================================================

/// Calendar day stored as days since 1970-01-01 (proleptic Gregorian).
struct Date {
    std::int32_t days = 0;

    static Date from_ymd(int y, unsigned m, unsigned d);
    /// Parses `YYYY-MM-DD`; throws DataError on anything else.
    static Date parse(std::string_view iso);

    int year() const;
    unsigned month() const;
    unsigned day() const;
    std::string iso() const;

    friend auto operator<=>(const Date&, const Date&) = default;
};

/// Adds `n` weekdays (Mon-Fri) after `start`; used by the synthetic panels.
std::vector<Date> business_days(Date start, std::size_t n);

// ============================================================================
// Threads
// ============================================================================

/// Process-wide worker count used by parallel_for (>= 1).
void set_thread_count(std::size_t n);
std::size_t thread_count();

/// Runs body(i) for i in [0, n). Work is split into contiguous blocks; each
/// index writes only to its own output slot, so results never depend on the
/// number of threads.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace vplab
