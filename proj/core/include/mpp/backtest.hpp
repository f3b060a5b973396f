#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mpp/linalg.hpp"
#include "mpp/posterior.hpp"
#include "mpp/predictive.hpp"
#include "mpp/returns.hpp"

namespace mpp {

/// Conjugate prior refitted every period from a presample that ends
/// `presample_offset` rows before the estimation window starts. Negative
/// offsets overlap the window; -window_n makes the presample end with it.
struct EmpiricalBayesPrior {
    Index presample_n = 0;
    std::optional<double> d0;  ///< default: presample_n
    std::optional<double> r0;  ///< default: presample_n
    Index presample_offset = 0;

    double d0_or_default() const { return d0.value_or(static_cast<double>(presample_n)); }
    double r0_or_default() const { return r0.value_or(static_cast<double>(presample_n)); }
};

using BacktestPrior = std::variant<DiffusePrior, ConjugatePrior, EmpiricalBayesPrior>;

enum class WeightPolicy { BayesEstimate, PluginSample, Zero };

std::string_view to_string(WeightPolicy policy) noexcept;

struct BacktestConfig {
    Index window_n = 104;
    int horizon_T = 13;
    double gamma = 1.0;
    double initial_wealth = 1.0;
    BacktestPrior prior = DiffusePrior{};
    Index B = 100000;
    std::uint64_t seed = 42;
    double credible_level = 0.95;
    WeightPolicy policy = WeightPolicy::BayesEstimate;
    /// Row of the first realized return; default data.n() - horizon_T.
    std::optional<Index> first_period_row;
};

struct PeriodRecord {
    int t = 0;
    std::string date;  ///< date of the realized return row
    double rf = 0.0;   ///< r_{f,t+1}
    double discount = 0.0;  ///< C_t
    double wealth_before = 0.0;
    double wealth_after = 0.0;
    Vector weights;
    Matrix weight_covariance;
    Vector realized_returns;
    CredibleBand band{};
    double default_probability = 0.0;
};

struct BacktestReport {
    BacktestConfig config;
    std::vector<std::string> assets;
    Index first_period_row = 0;
    std::vector<PeriodRecord> periods;

    double final_wealth() const { return periods.empty() ? config.initial_wealth : periods.back().wealth_after; }
    double mean_band_width() const;
};

/// Rolling-window backtest. Period t fits the posterior on rows
/// [s + t - window_n, s + t) with s the first period row, picks weights with
/// C_t evaluated at realized wealth, draws B predictive wealth values from
/// RngStream(seed, t), then advances wealth with row s + t.
/// `rf` holds r_f per data row.
BacktestReport run_backtest(const ReturnsWindow& data, const Vector& rf, const BacktestConfig& config);

BacktestReport run_backtest(const ReturnsWindow& data, double rf, const BacktestConfig& config);

struct PairedReport {
    BacktestReport diffuse;
    BacktestReport informative;
};

/// Runs `config` as given and again with the diffuse prior, same seed.
/// `config.prior` must not itself be diffuse.
PairedReport compare_priors(const ReturnsWindow& data, const Vector& rf, const BacktestConfig& config);

}  // namespace mpp
