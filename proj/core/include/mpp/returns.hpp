#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mpp/linalg.hpp"

namespace mpp {

/// n x k block of net simple returns with asset labels and ascending
/// ISO-8601 date labels (one per row).
class ReturnsWindow {
public:
    ReturnsWindow(std::vector<std::string> assets, std::vector<std::string> dates, Matrix returns);

    /// Synthetic labels: assets "A1".."Ak", weekly dates from 2000-01-03.
    explicit ReturnsWindow(Matrix returns);

    Index n() const noexcept { return returns_.rows(); }
    Index k() const noexcept { return returns_.cols(); }

    const std::vector<std::string>& assets() const noexcept { return assets_; }
    const std::vector<std::string>& dates() const noexcept { return dates_; }
    const Matrix& returns() const noexcept { return returns_; }
    Vector row(Index i) const { return returns_.row(i).transpose(); }

    /// Rows [first, first + count).
    ReturnsWindow slice(Index first, Index count) const;

    bool operator==(const ReturnsWindow& other) const;

private:
    std::vector<std::string> assets_;
    std::vector<std::string> dates_;
    Matrix returns_;
};

/// True if s is a valid calendar date in YYYY-MM-DD form.
bool is_iso_date(std::string_view s);

/// `count` dates spaced seven days apart starting at `start` (YYYY-MM-DD).
std::vector<std::string> weekly_dates(std::string_view start, std::size_t count);

}  // namespace mpp
