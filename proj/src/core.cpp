// core.cpp

#include "vplab/core.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>

namespace vplab {

namespace {

std::atomic<std::size_t> g_threads{1};

namespace chr = std::chrono;
using chr::sys_days;
using chr::year_month_day;

year_month_day to_ymd(Date d) { return year_month_day{sys_days{std::chrono::days{d.days}}}; }

}  // namespace

Date Date::from_ymd(int y, unsigned m, unsigned d) {
    const year_month_day ymd{chr::year{y}, chr::month{m}, chr::day{d}};
    if (!ymd.ok()) {
        throw DataError("invalid calendar date " + std::to_string(y) + "-" + std::to_string(m) +
                        "-" + std::to_string(d));
    }
    return Date{static_cast<std::int32_t>(sys_days{ymd}.time_since_epoch().count())};
}

Date Date::parse(std::string_view iso) {
    auto digits = [&](std::size_t pos, std::size_t len) {
        int v = 0;
        for (std::size_t i = pos; i < pos + len; ++i) {
            const char c = iso[i];
            if (c < '0' || c > '9') throw DataError("bad date '" + std::string(iso) + "'");
            v = v * 10 + (c - '0');
        }
        return v;
    };
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') {
        throw DataError("bad date '" + std::string(iso) + "' (expected YYYY-MM-DD)");
    }
    return from_ymd(digits(0, 4), static_cast<unsigned>(digits(5, 2)),
                    static_cast<unsigned>(digits(8, 2)));
}

int Date::year() const { return static_cast<int>(to_ymd(*this).year()); }
unsigned Date::month() const { return static_cast<unsigned>(to_ymd(*this).month()); }
unsigned Date::day() const { return static_cast<unsigned>(to_ymd(*this).day()); }

std::string Date::iso() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", year(), month(), day());
    return buf;
}

std::vector<Date> business_days(Date start, std::size_t n) {
    std::vector<Date> out;
    out.reserve(n);
    Date d = start;
    while (out.size() < n) {
        const std::chrono::weekday wd{sys_days{std::chrono::days{d.days}}};
        if (wd != std::chrono::Saturday && wd != std::chrono::Sunday) out.push_back(d);
        ++d.days;
    }
    return out;
}

void set_thread_count(std::size_t n) { g_threads = std::max<std::size_t>(1, n); }
std::size_t thread_count() { return g_threads; }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    const std::size_t workers = std::min(thread_count(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t block = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = w * block;
        const std::size_t hi = std::min(n, lo + block);
        pool.emplace_back([&, lo, hi] {
            try {
                for (std::size_t i = lo; i < hi; ++i) body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace vplab
