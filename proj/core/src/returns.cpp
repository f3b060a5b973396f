#include "mpp/returns.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>

#include "mpp/errors.hpp"

namespace mpp {

namespace {

bool parse_ymd(std::string_view s, std::chrono::year_month_day& out) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
    int y = 0;
    unsigned m = 0, d = 0;
    auto ok = [](std::from_chars_result r, const char* end) {
        return r.ec == std::errc{} && r.ptr == end;
    };
    const char* p = s.data();
    if (!ok(std::from_chars(p, p + 4, y), p + 4)) return false;
    if (!ok(std::from_chars(p + 5, p + 7, m), p + 7)) return false;
    if (!ok(std::from_chars(p + 8, p + 10, d), p + 10)) return false;
    out = std::chrono::year_month_day{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    return out.ok();
}

std::string format_ymd(const std::chrono::year_month_day& ymd) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

}  // namespace

bool is_iso_date(std::string_view s) {
    std::chrono::year_month_day ymd;
    return parse_ymd(s, ymd);
}

std::vector<std::string> weekly_dates(std::string_view start, std::size_t count) {
    std::chrono::year_month_day ymd;
    if (!parse_ymd(start, ymd)) {
        raise(ErrorCode::InvalidArgument, "weekly_dates: bad start date '" + std::string(start) + "'");
    }
    std::chrono::sys_days day{ymd};
    std::vector<std::string> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(format_ymd(std::chrono::year_month_day{day}));
        day += std::chrono::days{7};
    }
    return out;
}

ReturnsWindow::ReturnsWindow(std::vector<std::string> assets, std::vector<std::string> dates,
                             Matrix returns)
    : assets_(std::move(assets)), dates_(std::move(dates)), returns_(std::move(returns)) {
    if (returns_.cols() < 1) {
        raise(ErrorCode::InsufficientData, "returns window needs at least one asset");
    }
    if (returns_.rows() < 2) {
        raise(ErrorCode::InsufficientData, "returns window needs at least two observations, got " +
                                               std::to_string(returns_.rows()));
    }
    if (static_cast<Index>(assets_.size()) != returns_.cols()) {
        raise(ErrorCode::InvalidArgument, "asset label count does not match return columns");
    }
    if (static_cast<Index>(dates_.size()) != returns_.rows()) {
        raise(ErrorCode::InvalidArgument, "date label count does not match return rows");
    }
    if (!returns_.allFinite()) {
        raise(ErrorCode::InvalidArgument, "returns window contains missing or non-finite entries");
    }
    for (std::size_t i = 1; i < dates_.size(); ++i) {
        if (!(dates_[i - 1] < dates_[i])) {
            raise(ErrorCode::NonMonotoneDates,
                  "dates not strictly ascending at '" + dates_[i] + "' (after '" + dates_[i - 1] + "')");
        }
    }
}

ReturnsWindow::ReturnsWindow(Matrix returns)
    : ReturnsWindow(
          [&] {
              std::vector<std::string> labels;
              for (Index j = 0; j < returns.cols(); ++j) labels.push_back("A" + std::to_string(j + 1));
              return labels;
          }(),
          weekly_dates("2000-01-03", static_cast<std::size_t>(returns.rows())), returns) {}

ReturnsWindow ReturnsWindow::slice(Index first, Index count) const {
    if (first < 0 || count < 0 || first + count > n()) {
        raise(ErrorCode::InsufficientData, "slice [" + std::to_string(first) + ", " +
                                               std::to_string(first + count) + ") outside " +
                                               std::to_string(n()) + " rows");
    }
    std::vector<std::string> d(dates_.begin() + first, dates_.begin() + first + count);
    return ReturnsWindow(assets_, std::move(d), returns_.middleRows(first, count));
}

bool ReturnsWindow::operator==(const ReturnsWindow& other) const {
    return assets_ == other.assets_ && dates_ == other.dates_ &&
           returns_.rows() == other.returns_.rows() && returns_.cols() == other.returns_.cols() &&
           returns_ == other.returns_;
}

}  // namespace mpp
