#include "mpp/backtest.hpp"

#include <algorithm>
#include <string>

#include "mpp/errors.hpp"
#include "mpp/weights.hpp"

namespace mpp {

std::string_view to_string(WeightPolicy policy) noexcept {
    switch (policy) {
        case WeightPolicy::BayesEstimate: return "bayes";
        case WeightPolicy::PluginSample: return "plugin";
        case WeightPolicy::Zero: return "zero";
    }
    return "unknown";
}

double BacktestReport::mean_band_width() const {
    if (periods.empty()) return 0.0;
    double total = 0.0;
    for (const auto& p : periods) total += p.band.width();
    return total / static_cast<double>(periods.size());
}

namespace {

Index presample_rows(const BacktestPrior& prior) {
    if (const auto* eb = std::get_if<EmpiricalBayesPrior>(&prior)) {
        return std::max<Index>(0, eb->presample_n + eb->presample_offset);
    }
    return 0;
}

void validate_config(const ReturnsWindow& data, const Vector& rf, const BacktestConfig& cfg, Index start) {
    const Index k = data.k();
    if (rf.size() != data.n()) {
        raise(ErrorCode::DateMismatch, "risk-free series has " + std::to_string(rf.size()) + " rows, data has " +
                                           std::to_string(data.n()));
    }
    if (cfg.horizon_T < 1) raise(ErrorCode::InvalidArgument, "horizon_T must be >= 1");
    if (cfg.B < 1) raise(ErrorCode::InvalidArgument, "B must be >= 1");
    if (!(cfg.gamma > 0.0)) raise(ErrorCode::InvalidArgument, "gamma must be positive");
    if (cfg.window_n <= k) {
        raise(ErrorCode::InsufficientData, "window_n=" + std::to_string(cfg.window_n) + " must exceed k=" +
                                               std::to_string(k));
    }
    if (const auto* eb = std::get_if<EmpiricalBayesPrior>(&cfg.prior)) {
        if (eb->presample_n <= k) raise(ErrorCode::InsufficientData, "presample length must exceed k");
        // A negative offset overlaps the estimation window; it may not reach past it.
        if (eb->presample_offset < -cfg.window_n) {
            raise(ErrorCode::InvalidArgument, "presample offset must be >= -window_n");
        }
    }
    const Index needed = cfg.window_n + presample_rows(cfg.prior);
    if (start < needed || start + cfg.horizon_T > data.n()) {
        raise(ErrorCode::InsufficientData,
              "dataset of " + std::to_string(data.n()) + " rows cannot hold " + std::to_string(needed) +
                  " estimation rows followed by " + std::to_string(cfg.horizon_T) + " investment periods");
    }
}

PriorSpec prior_for_period(const ReturnsWindow& data, const BacktestPrior& prior, Index window_first) {
    if (std::holds_alternative<DiffusePrior>(prior)) return DiffusePrior{};
    if (const auto* c = std::get_if<ConjugatePrior>(&prior)) return *c;
    const auto& eb = std::get<EmpiricalBayesPrior>(prior);
    const Index first = window_first - eb.presample_offset - eb.presample_n;
    const double d0 = eb.d0_or_default();
    EmpiricalBayesFit fit = empirical_bayes_hyperparams(data.slice(first, eb.presample_n), d0);
    return ConjugatePrior{std::move(fit.m0), eb.r0_or_default(), d0, std::move(fit.s0)};
}

}  // namespace

BacktestReport run_backtest(const ReturnsWindow& data, const Vector& rf, const BacktestConfig& config) {
    const Index start = config.first_period_row.value_or(data.n() - config.horizon_T);
    validate_config(data, rf, config, start);

    const int T = config.horizon_T;
    std::vector<double> schedule(static_cast<std::size_t>(T));
    for (int i = 0; i < T; ++i) schedule[static_cast<std::size_t>(i)] = rf(start + i);

    BacktestReport report{config, data.assets(), start, {}};
    report.periods.reserve(static_cast<std::size_t>(T));
    double wealth = config.initial_wealth;

    for (int t = 0; t < T; ++t) {
        const Index row = start + t;
        const Index window_first = row - config.window_n;
        PeriodRecord rec;
        rec.t = t;
        rec.date = data.dates()[static_cast<std::size_t>(row)];
        rec.rf = rf(row);
        rec.wealth_before = wealth;
        try {
            const ReturnsWindow window = data.slice(window_first, config.window_n);
            const PosteriorParams post = posterior_params(window, prior_for_period(data, config.prior, window_first));
            const PortfolioContext ctx{config.gamma, wealth, t, T, schedule};
            rec.discount = discount_factor(ctx);
            switch (config.policy) {
                case WeightPolicy::BayesEstimate: rec.weights = bayes_estimate(post, ctx); break;
                case WeightPolicy::PluginSample: rec.weights = plugin_weights(window, ctx); break;
                case WeightPolicy::Zero: rec.weights = Vector::Zero(data.k()); break;
            }
            rec.weight_covariance = weight_covariance(post, ctx).matrix();
            const WealthSampleBatch batch = sample_predictive_wealth(
                post, rec.weights, wealth, rec.rf, config.B, RngStream(config.seed, static_cast<std::uint64_t>(t)),
                t + 1);
            rec.band = credible_band(batch, config.credible_level);
            rec.default_probability = default_probability(batch);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::DegenerateSample) throw;
            raise(ErrorCode::DegenerateSample,
                  std::string(e.what()) + "; backtest period t=" + std::to_string(t) + " (" + rec.date + ")");
        }
        rec.realized_returns = data.row(row);
        wealth = wealth_step(wealth, rec.weights, rec.realized_returns, rec.rf);
        rec.wealth_after = wealth;
        report.periods.push_back(std::move(rec));
    }
    return report;
}

BacktestReport run_backtest(const ReturnsWindow& data, double rf, const BacktestConfig& config) {
    return run_backtest(data, Vector::Constant(data.n(), rf), config);
}

PairedReport compare_priors(const ReturnsWindow& data, const Vector& rf, const BacktestConfig& config) {
    if (std::holds_alternative<DiffusePrior>(config.prior)) {
        raise(ErrorCode::InvalidArgument, "compare_priors needs a conjugate or empirical-Bayes prior");
    }
    BacktestConfig diffuse = config;
    diffuse.prior = DiffusePrior{};
    // Both runs use the same start row so periods line up.
    const Index start = config.first_period_row.value_or(data.n() - config.horizon_T);
    diffuse.first_period_row = start;
    BacktestConfig informative = config;
    informative.first_period_row = start;
    return {run_backtest(data, rf, diffuse), run_backtest(data, rf, informative)};
}

}  // namespace mpp
