#include "mpp_cli/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "mpp/backtest.hpp"
#include "mpp/csv.hpp"
#include "mpp/errors.hpp"
#include "mpp/normality.hpp"
#include "mpp/posterior.hpp"
#include "mpp/predictive.hpp"
#include "mpp/weights.hpp"

namespace mpp::cli {

namespace {

using json = nlohmann::json;

struct Options {
    std::string input;
    std::string kind = "returns";
    std::string prior = "diffuse";
    std::string prior_file;
    Index window = 0;
    Index presample = 0;
    double d0 = 0.0;
    double r0 = 0.0;
    Index presample_offset = 0;
    double gamma = 1.0;
    double wealth = 1.0;
    double rf = 0.0;
    std::string rf_file;
    int t = 0;
    int horizon = 1;
    Index B = 100000;
    std::uint64_t seed = 42;
    double level = 0.95;
    std::string sampler = "fast";
    std::string portfolio = "bayes";
    std::string policy = "bayes";
    std::string output;
    std::string periods_csv;
    std::string config;
    bool compare_priors = false;

    // Which optional settings were supplied by a flag or the config file.
    bool has_window = false;
    bool has_presample = false;
    bool has_d0 = false;
    bool has_r0 = false;
    json inline_prior;
};

class UsageError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- options --

void add_data_options(CLI::App* app, Options& o) {
    app->add_option("--input", o.input, "CSV file: date,<asset>... rows");
    app->add_option("--kind", o.kind, "prices | returns")->check(CLI::IsMember({"prices", "returns"}));
    app->add_option("--window", o.window, "Estimation rows (default: all available)")->check(CLI::PositiveNumber);
    app->add_option("--config", o.config, "JSON file with defaults for any flag");
}

void add_prior_options(CLI::App* app, Options& o) {
    app->add_option("--prior", o.prior, "diffuse | conjugate | empirical-bayes")
        ->check(CLI::IsMember({"diffuse", "conjugate", "empirical-bayes"}));
    app->add_option("--prior-file", o.prior_file, "JSON with m0, r0, d0, S0 for --prior conjugate");
    app->add_option("--presample", o.presample, "Empirical-Bayes presample length")->check(CLI::PositiveNumber);
    app->add_option("--d0", o.d0, "Prior degrees of freedom (empirical Bayes default: presample length)");
    app->add_option("--r0", o.r0, "Prior precision (empirical Bayes default: presample length)");
    app->add_option("--presample-offset", o.presample_offset,
                    "Rows between presample end and estimation window start (may be negative)");
}

void add_portfolio_options(CLI::App* app, Options& o) {
    app->add_option("--gamma", o.gamma, "Absolute risk aversion");
    app->add_option("--wealth", o.wealth, "Current wealth W_t");
    app->add_option("--t", o.t, "Current period, 0 <= t <= T - 1");
    app->add_option("--horizon", o.horizon, "Investment horizon T");
    auto* rf = app->add_option("--rf", o.rf, "Constant risk-free rate per period");
    app->add_option("--rf-file", o.rf_file, "CSV date,rf aligned with the input dates")->excludes(rf);
}

void add_mc_options(CLI::App* app, Options& o) {
    app->add_option("--B", o.B, "Monte Carlo draws")->check(CLI::PositiveNumber);
    app->add_option("--seed", o.seed, "Random seed");
}

// ----------------------------------------------------------------- config --

template <class T>
void merge(const json& cfg, const CLI::App* app, const char* key, T& target, bool* flag = nullptr) {
    const std::string opt = std::string("--") + key;
    const bool from_cli = app->get_option_no_throw(opt) != nullptr && app->count(opt) > 0;
    if (from_cli) {
        if (flag) *flag = true;
        return;
    }
    if (!cfg.contains(key)) return;
    try {
        target = cfg.at(key).get<T>();
    } catch (const json::exception& e) {
        throw UsageError(std::string("config key '") + key + "': " + e.what());
    }
    if (flag) *flag = true;
}

void apply_config(const CLI::App* app, Options& o) {
    json cfg = json::object();
    if (!o.config.empty()) {
        try {
            cfg = json::parse(read_text_file(o.config));
        } catch (const json::exception& e) {
            throw UsageError("config file '" + o.config + "': " + e.what());
        }
        if (!cfg.is_object()) throw UsageError("config file must hold a JSON object");
    }
    if (cfg.contains("prior") && cfg["prior"].is_object()) {
        o.inline_prior = cfg["prior"];
        if (app->count("--prior") == 0) o.prior = o.inline_prior.value("kind", std::string("conjugate"));
        cfg.erase("prior");
    }
    merge(cfg, app, "input", o.input);
    merge(cfg, app, "kind", o.kind);
    merge(cfg, app, "prior", o.prior);
    merge(cfg, app, "prior-file", o.prior_file);
    merge(cfg, app, "window", o.window, &o.has_window);
    merge(cfg, app, "presample", o.presample, &o.has_presample);
    merge(cfg, app, "d0", o.d0, &o.has_d0);
    merge(cfg, app, "r0", o.r0, &o.has_r0);
    merge(cfg, app, "presample-offset", o.presample_offset);
    merge(cfg, app, "gamma", o.gamma);
    merge(cfg, app, "wealth", o.wealth);
    merge(cfg, app, "rf", o.rf);
    merge(cfg, app, "rf-file", o.rf_file);
    merge(cfg, app, "t", o.t);
    merge(cfg, app, "horizon", o.horizon);
    merge(cfg, app, "B", o.B);
    merge(cfg, app, "seed", o.seed);
    merge(cfg, app, "level", o.level);
    merge(cfg, app, "sampler", o.sampler);
    merge(cfg, app, "portfolio", o.portfolio);
    merge(cfg, app, "policy", o.policy);
    merge(cfg, app, "output", o.output);
    merge(cfg, app, "periods-csv", o.periods_csv);
    merge(cfg, app, "compare-priors", o.compare_priors);

    if (o.kind != "prices" && o.kind != "returns") throw UsageError("kind must be 'prices' or 'returns'");
    if (o.prior != "diffuse" && o.prior != "conjugate" && o.prior != "empirical-bayes") {
        throw UsageError("prior must be diffuse, conjugate or empirical-bayes");
    }
    if (o.B < 1) throw UsageError("B must be positive");
    if (o.has_window && o.window < 1) throw UsageError("window must be positive");
}

// ------------------------------------------------------------------- json --

json to_json(const Vector& v) {
    return json(std::vector<double>(v.begin(), v.end()));
}

json to_json(const Matrix& m) {
    json rows = json::array();
    for (Index i = 0; i < m.rows(); ++i) rows.push_back(to_json(Vector(m.row(i).transpose())));
    return rows;
}

Vector vector_from_json(const json& j, const char* what) {
    if (!j.is_array()) throw UsageError(std::string(what) + " must be an array");
    Vector v(static_cast<Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = j[i].get<double>();
    return v;
}

Matrix matrix_from_json(const json& j, const char* what) {
    if (!j.is_array() || j.empty()) throw UsageError(std::string(what) + " must be a non-empty array of rows");
    Matrix m(static_cast<Index>(j.size()), static_cast<Index>(j[0].size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (j[i].size() != j[0].size()) throw UsageError(std::string(what) + " rows differ in length");
        for (std::size_t c = 0; c < j[i].size(); ++c) m(static_cast<Index>(i), static_cast<Index>(c)) = j[i][c].get<double>();
    }
    return m;
}

json posterior_json(const PosteriorParams& p) {
    return {{"kind", to_string(p.kind)}, {"mean", to_json(p.mean)},     {"scale", to_json(p.scale.matrix())},
            {"t_df", p.t_df},            {"chi2_df", p.chi2_df},        {"iw_df", p.iw_df},
            {"precision", p.precision}};
}

json band_json(const CredibleBand& b) {
    return {{"level", b.level}, {"lower", b.lower}, {"upper", b.upper}, {"point", b.point}};
}

void emit(const json& doc, const Options& o, std::ostream& out) {
    if (o.output.empty()) {
        out << doc.dump(2) << '\n';
        return;
    }
    std::ofstream f(o.output);
    if (!f) raise(ErrorCode::IoError, "cannot write '" + o.output + "'");
    f << doc.dump(2) << '\n';
}

// ------------------------------------------------------------------- data --

struct Inputs {
    ReturnsWindow data;
    Vector rf;  // per data row
};

Inputs load(const Options& o) {
    if (o.input.empty()) throw UsageError("--input is required");
    ReturnsWindow data = ingest(o.input, parse_data_kind(o.kind));
    Vector rf = o.rf_file.empty() ? Vector::Constant(data.n(), o.rf) : read_rf_file(o.rf_file, data.dates());
    return {std::move(data), std::move(rf)};
}

Index presample_span(const Options& o) {
    return o.prior == "empirical-bayes" ? std::max<Index>(0, o.presample + o.presample_offset) : 0;
}

ConjugatePrior explicit_conjugate(const Options& o, Index k) {
    json fields = o.inline_prior;
    if (!o.prior_file.empty()) {
        try {
            fields = json::parse(read_text_file(o.prior_file));
        } catch (const json::exception& e) {
            throw UsageError("prior file '" + o.prior_file + "': " + e.what());
        }
        if (fields.contains("prior")) fields = fields["prior"];
    }
    if (!fields.is_object()) throw UsageError("--prior conjugate needs --prior-file or a 'prior' object in --config");
    try {
        Vector m0 = vector_from_json(fields.at("m0"), "m0");
        Matrix s0 = matrix_from_json(fields.at("S0"), "S0");
        if (m0.size() != k || s0.rows() != k || s0.cols() != k) {
            raise(ErrorCode::InvalidArgument, "prior dimension does not match k=" + std::to_string(k));
        }
        return ConjugatePrior{std::move(m0), fields.at("r0").get<double>(), fields.at("d0").get<double>(), SpdMatrix(s0)};
    } catch (const json::exception& e) {
        throw UsageError(std::string("conjugate prior: ") + e.what());
    }
}

EmpiricalBayesPrior eb_prior(const Options& o) {
    if (!o.has_presample) throw UsageError("--prior empirical-bayes needs --presample");
    EmpiricalBayesPrior eb;
    eb.presample_n = o.presample;
    if (o.has_d0) eb.d0 = o.d0;
    if (o.has_r0) eb.r0 = o.r0;
    eb.presample_offset = o.presample_offset;
    return eb;
}

struct Fitted {
    ReturnsWindow window;
    PosteriorParams post;
    PortfolioContext ctx;
    double rf;
};

Fitted fit(const Options& o, const Inputs& in) {
    const Index n = in.data.n();
    const Index span = presample_span(o);
    const Index wlen = o.has_window ? o.window : n - span;
    const Index first = n - wlen;
    if (wlen < 2 || first - span < 0) {
        raise(ErrorCode::InsufficientData, "input has " + std::to_string(n) + " rows; cannot take a " +
                                               std::to_string(wlen) + "-row window after " + std::to_string(span) +
                                               " presample rows");
    }
    ReturnsWindow window = in.data.slice(first, wlen);

    PriorSpec prior = DiffusePrior{};
    if (o.prior == "conjugate") {
        prior = explicit_conjugate(o, in.data.k());
    } else if (o.prior == "empirical-bayes") {
        const EmpiricalBayesPrior eb = eb_prior(o);
        const double d0 = eb.d0_or_default();
        EmpiricalBayesFit f =
            empirical_bayes_hyperparams(in.data.slice(first - eb.presample_offset - eb.presample_n, eb.presample_n), d0);
        prior = ConjugatePrior{std::move(f.m0), eb.r0_or_default(), d0, std::move(f.s0)};
    }
    PosteriorParams post = posterior_params(window, prior);
    // Single-shot commands apply the rate at the last window row over the whole horizon.
    const double rf = in.rf(n - 1);
    PortfolioContext ctx = PortfolioContext::flat(o.gamma, o.wealth, o.t, o.horizon, rf);
    ctx.validate();
    return {std::move(window), std::move(post), std::move(ctx), rf};
}

json run_header(const char* command, const Options& o, const Fitted& f) {
    return {{"command", command},
            {"seed", o.seed},
            {"B", o.B},
            {"prior", o.prior},
            {"n", f.window.n()},
            {"k", f.window.k()},
            {"t", o.t},
            {"T", o.horizon},
            {"gamma", o.gamma},
            {"wealth", o.wealth},
            {"rf", f.rf},
            {"assets", f.window.assets()},
            {"window", {{"first", f.window.dates().front()}, {"last", f.window.dates().back()}}}};
}

// --------------------------------------------------------------- commands --

void cmd_estimate(const Options& o, std::ostream& out) {
    const Fitted f = fit(o, load(o));
    json doc = run_header("estimate", o, f);
    doc["discount"] = discount_factor(f.ctx);
    doc["weights"] = to_json(bayes_estimate(f.post, f.ctx));
    doc["covariance"] = to_json(weight_covariance(f.post, f.ctx).matrix());
    doc["asymptotic_covariance"] = to_json(asymptotic_covariance(f.post, f.ctx).matrix());
    if (f.window.n() > f.window.k()) doc["plugin_weights"] = to_json(plugin_weights(f.window, f.ctx));
    doc["posterior"] = posterior_json(f.post);
    emit(doc, o, out);
}

WeightSampleBatch draw_weights(const Options& o, const Fitted& f) {
    const Matrix l = Matrix::Identity(f.post.k(), f.post.k());
    const RngStream rng(o.seed, 0);
    if (o.sampler == "basic") return sample_weights_basic(f.post, f.ctx, o.B, l, rng);
    if (o.sampler == "fast") return sample_weights_fast(f.post, f.ctx, o.B, l, rng);
    throw UsageError("sampler must be 'fast' or 'basic'");
}

void cmd_sample_weights(const Options& o, std::ostream& out) {
    const Fitted f = fit(o, load(o));
    const WeightSampleBatch batch = draw_weights(o, f);
    std::ofstream file;
    if (!o.output.empty()) {
        file.open(o.output);
        if (!file) raise(ErrorCode::IoError, "cannot write '" + o.output + "'");
    }
    std::ostream& os = o.output.empty() ? out : file;
    for (std::size_t j = 0; j < f.window.assets().size(); ++j) os << (j ? "," : "") << f.window.assets()[j];
    os << '\n';
    for (Index i = 0; i < batch.draws.rows(); ++i) {
        for (Index j = 0; j < batch.draws.cols(); ++j) os << (j ? "," : "") << format_double(batch.draws(i, j));
        os << '\n';
    }
    if (!o.output.empty()) {
        json meta = run_header("sample-weights", o, f);
        meta["sampler"] = o.sampler;
        meta["draws"] = o.output;
        std::ofstream(o.output + ".json") << meta.dump(2) << '\n';
    }
}

Vector portfolio(const Options& o, const Fitted& f) {
    if (o.portfolio == "bayes") return bayes_estimate(f.post, f.ctx);
    if (o.portfolio == "plugin") return plugin_weights(f.window, f.ctx);
    if (o.portfolio == "zero") return Vector::Zero(f.post.k());
    std::vector<double> values;
    std::stringstream ss(o.portfolio);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        double x = 0.0;
        const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), x);
        if (ec != std::errc() || ptr != cell.data() + cell.size()) {
            throw UsageError("--portfolio must be bayes, plugin, zero or a comma-separated weight list");
        }
        values.push_back(x);
    }
    if (static_cast<Index>(values.size()) != f.post.k()) {
        throw UsageError("--portfolio lists " + std::to_string(values.size()) + " weights for k=" +
                         std::to_string(f.post.k()));
    }
    return Eigen::Map<Vector>(values.data(), static_cast<Index>(values.size()));
}

void cmd_predict_wealth(const Options& o, std::ostream& out) {
    const Fitted f = fit(o, load(o));
    const Vector v = portfolio(o, f);
    const WealthSampleBatch batch =
        sample_predictive_wealth(f.post, v, o.wealth, f.rf, o.B, RngStream(o.seed, 0), o.t + 1);
    json doc = run_header("predict-wealth", o, f);
    doc["portfolio"] = to_json(v);
    doc["band"] = band_json(credible_band(batch, o.level));
    doc["default_probability"] = default_probability(batch);
    emit(doc, o, out);
}

void cmd_check_normality(const Options& o, std::ostream& out) {
    const Fitted f = fit(o, load(o));
    const Matrix z = standardize_batch(draw_weights(o, f));
    json coords = json::array();
    for (Index j = 0; j < z.cols(); ++j) {
        const NormalityResult r = normality_check(z.col(j));
        coords.push_back({{"asset", f.window.assets()[static_cast<std::size_t>(j)]},
                          {"statistic", r.statistic},
                          {"p_value", r.p_value},
                          {"skewness", r.skewness},
                          {"kurtosis", r.kurtosis}});
    }
    json doc = run_header("check-normality", o, f);
    doc["test"] = "jarque-bera";
    doc["sampler"] = o.sampler;
    doc["coordinates"] = coords;
    emit(doc, o, out);
}

void cmd_fit_prior(const Options& o, std::ostream& out) {
    const Inputs in = load(o);
    const Index n = o.has_window ? o.window : in.data.n();
    if (n > in.data.n()) raise(ErrorCode::InsufficientData, "window longer than input");
    const ReturnsWindow presample = in.data.slice(in.data.n() - n, n);
    const double d0 = o.has_d0 ? o.d0 : static_cast<double>(n);
    const double r0 = o.has_r0 ? o.r0 : static_cast<double>(n);
    const EmpiricalBayesFit fitted = empirical_bayes_hyperparams(presample, d0);
    json doc = {{"command", "fit-prior"},
                {"seed", o.seed},
                {"B", o.B},
                {"n", n},
                {"k", presample.k()},
                {"t", o.t},
                {"T", o.horizon},
                {"assets", presample.assets()},
                {"window", {{"first", presample.dates().front()}, {"last", presample.dates().back()}}},
                {"prior",
                 {{"kind", "conjugate"}, {"m0", to_json(fitted.m0)}, {"S0", to_json(fitted.s0.matrix())},
                  {"d0", d0}, {"r0", r0}}}};
    emit(doc, o, out);
}

WeightPolicy parse_policy(const std::string& s) {
    if (s == "bayes") return WeightPolicy::BayesEstimate;
    if (s == "plugin") return WeightPolicy::PluginSample;
    if (s == "zero") return WeightPolicy::Zero;
    throw UsageError("policy must be bayes, plugin or zero");
}

json report_json(const BacktestReport& r) {
    json periods = json::array();
    for (const PeriodRecord& p : r.periods) {
        periods.push_back({{"t", p.t},
                           {"date", p.date},
                           {"rf", p.rf},
                           {"discount", p.discount},
                           {"wealth_before", p.wealth_before},
                           {"wealth_after", p.wealth_after},
                           {"weights", to_json(p.weights)},
                           {"weight_covariance", to_json(p.weight_covariance)},
                           {"realized_returns", to_json(p.realized_returns)},
                           {"band", band_json(p.band)},
                           {"default_probability", p.default_probability}});
    }
    return {{"first_period_row", r.first_period_row},
            {"final_wealth", r.final_wealth()},
            {"mean_band_width", r.mean_band_width()},
            {"periods", periods}};
}

void write_periods_csv(const std::string& path, const BacktestReport& r, const std::string& label) {
    std::ofstream f(path);
    if (!f) raise(ErrorCode::IoError, "cannot write '" + path + "'");
    f << "prior,t,date,rf,discount,wealth_before,wealth_after,band_lower,band_upper,band_point,default_probability";
    for (const auto& a : r.assets) f << ",w_" << a;
    f << '\n';
    for (const PeriodRecord& p : r.periods) {
        f << label << ',' << p.t << ',' << p.date << ',' << format_double(p.rf) << ',' << format_double(p.discount)
          << ',' << format_double(p.wealth_before) << ',' << format_double(p.wealth_after) << ','
          << format_double(p.band.lower) << ',' << format_double(p.band.upper) << ',' << format_double(p.band.point)
          << ',' << format_double(p.default_probability);
        for (Index j = 0; j < p.weights.size(); ++j) f << ',' << format_double(p.weights(j));
        f << '\n';
    }
}

void cmd_backtest(const Options& o, std::ostream& out) {
    const Inputs in = load(o);
    BacktestConfig cfg;
    if (o.has_window) cfg.window_n = o.window;
    cfg.horizon_T = o.horizon;
    cfg.gamma = o.gamma;
    cfg.initial_wealth = o.wealth;
    cfg.B = o.B;
    cfg.seed = o.seed;
    cfg.credible_level = o.level;
    cfg.policy = parse_policy(o.policy);
    if (o.prior == "conjugate") cfg.prior = explicit_conjugate(o, in.data.k());
    if (o.prior == "empirical-bayes") cfg.prior = eb_prior(o);

    json doc = {{"command", "backtest"}, {"seed", o.seed},   {"B", o.B},
                {"prior", o.prior},      {"n", cfg.window_n}, {"k", in.data.k()},
                {"t", 0},                {"T", cfg.horizon_T}, {"gamma", o.gamma},
                {"initial_wealth", o.wealth}, {"level", o.level}, {"policy", to_string(cfg.policy)},
                {"assets", in.data.assets()}};

    std::string periods_path = o.periods_csv;
    if (periods_path.empty() && !o.output.empty()) {
        const std::filesystem::path p(o.output);
        periods_path = (p.parent_path() / (p.stem().string() + "_periods.csv")).string();
    }
    if (o.compare_priors) {
        const PairedReport pr = compare_priors(in.data, in.rf, cfg);
        doc["diffuse"] = report_json(pr.diffuse);
        doc["informative"] = report_json(pr.informative);
        if (!periods_path.empty()) {
            write_periods_csv(periods_path, pr.diffuse, "diffuse");
            const std::filesystem::path p(periods_path);
            write_periods_csv((p.parent_path() / (p.stem().string() + "_informative.csv")).string(), pr.informative,
                              o.prior);
        }
    } else {
        const BacktestReport r = run_backtest(in.data, in.rf, cfg);
        doc["report"] = report_json(r);
        if (!periods_path.empty()) write_periods_csv(periods_path, r, o.prior);
    }
    if (!periods_path.empty()) doc["periods_csv"] = periods_path;
    emit(doc, o, out);
}

// ------------------------------------------------------------ diagnostics --

std::string escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += (c == '\n' || c == '\r') ? ' ' : c;
    }
    return out;
}

int fail(std::ostream& err, std::string_view code, std::string_view message, int exit_code) {
    err << "error=" << code << " message=\"" << escape(message) << "\"\n";
    return exit_code;
}

int exit_code_for(ErrorCode code) {
    switch (category(code)) {
        case ErrorCategory::Usage: return kUsage;
        case ErrorCategory::Data: return kData;
        case ErrorCategory::Numerical: return kNumerical;
    }
    return kNumerical;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Bayesian multi-period portfolio estimation, sampling and backtesting", "mpp"};
    app.require_subcommand(1);
    Options o;

    struct Command {
        const char* name;
        const char* help;
        void (*run)(const Options&, std::ostream&);
        bool mc;
    };
    const Command commands[] = {
        {"estimate", "Bayes weights, exact and asymptotic covariance (JSON)", &cmd_estimate, false},
        {"sample-weights", "Posterior weight draws (CSV)", &cmd_sample_weights, true},
        {"predict-wealth", "Predictive wealth band and default probability (JSON)", &cmd_predict_wealth, true},
        {"backtest", "Rolling-window backtest (JSON + per-period CSV)", &cmd_backtest, true},
        {"check-normality", "Jarque-Bera on standardized weight draws (JSON)", &cmd_check_normality, true},
        {"fit-prior", "Empirical-Bayes conjugate hyperparameters (JSON)", &cmd_fit_prior, false},
    };
    std::vector<std::pair<CLI::App*, const Command*>> subs;
    for (const Command& c : commands) {
        CLI::App* sub = app.add_subcommand(c.name, c.help);
        add_data_options(sub, o);
        add_mc_options(sub, o);
        sub->add_option("--output,-o", o.output, "Write the result here instead of stdout");
        const std::string name = c.name;
        if (name != "fit-prior") {
            add_prior_options(sub, o);
            add_portfolio_options(sub, o);
        } else {
            sub->add_option("--d0", o.d0, "Prior degrees of freedom (default: presample length)");
            sub->add_option("--r0", o.r0, "Prior precision (default: presample length)");
            sub->add_option("--horizon", o.horizon, "Horizon T echoed in the output");
            sub->add_option("--t", o.t, "Period t echoed in the output");
        }
        if (name == "sample-weights" || name == "check-normality") {
            sub->add_option("--sampler", o.sampler, "fast | basic")->check(CLI::IsMember({"fast", "basic"}));
        }
        if (name == "predict-wealth" || name == "backtest") {
            sub->add_option("--level", o.level, "Credible level");
        }
        if (name == "predict-wealth") {
            sub->add_option("--portfolio", o.portfolio, "bayes | plugin | zero | w1,w2,...");
        }
        if (name == "backtest") {
            sub->add_option("--policy", o.policy, "bayes | plugin | zero")
                ->check(CLI::IsMember({"bayes", "plugin", "zero"}));
            sub->add_option("--periods-csv", o.periods_csv, "Per-period CSV output path");
            sub->add_flag("--compare-priors", o.compare_priors, "Also run the diffuse prior with the same seed");
        }
        subs.emplace_back(sub, &c);
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        return fail(err, "UsageError", e.what(), kUsage);
    }

    try {
        for (const auto& [sub, cmd] : subs) {
            if (!sub->parsed()) continue;
            apply_config(sub, o);
            cmd->run(o, out);
            return kOk;
        }
        return fail(err, "UsageError", "no subcommand", kUsage);
    } catch (const UsageError& e) {
        return fail(err, "UsageError", e.what(), kUsage);
    } catch (const Error& e) {
        return fail(err, to_string(e.code()), e.what(), exit_code_for(e.code()));
    } catch (const json::exception& e) {
        return fail(err, "UsageError", e.what(), kUsage);
    } catch (const std::exception& e) {
        return fail(err, "InternalError", e.what(), kNumerical);
    }
}

}  // namespace mpp::cli
