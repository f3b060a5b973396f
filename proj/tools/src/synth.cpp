// Writes the bundled synthetic weekly dataset: seeded Gaussian returns for a
// small equity universe plus a slowly drifting risk-free series.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "mpp/csv.hpp"
#include "mpp/random.hpp"
#include "mpp/returns.hpp"

namespace {

struct Universe {
    mpp::Vector mu;
    mpp::Matrix chol;
};

Universe make_universe(mpp::Index k, mpp::RngStream& rng) {
    mpp::Vector mu(k), vol(k);
    for (mpp::Index i = 0; i < k; ++i) {
        mu(i) = 0.0015 + 0.0015 * rng.normal();
        vol(i) = 0.02 + 0.025 * rng.uniform();
    }
    mpp::Matrix corr = mpp::Matrix::Constant(k, k, 0.35);
    corr.diagonal().setOnes();
    const mpp::Matrix sigma = vol.asDiagonal() * corr * vol.asDiagonal();
    return {mu, mpp::SpdMatrix(sigma).cholesky_lower()};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generate the bundled synthetic weekly dataset", "mpp_synth"};
    std::string out_dir = "data";
    std::uint64_t seed = 20240101;
    mpp::Index rows = 300;
    mpp::Index assets = 12;
    std::string start = "2015-01-02";
    app.add_option("--output-dir", out_dir, "Directory for weekly_returns.csv and weekly_rf.csv");
    app.add_option("--seed", seed, "Random seed");
    app.add_option("--rows", rows, "Number of weekly observations")->check(CLI::PositiveNumber);
    app.add_option("--assets", assets, "Number of assets")->check(CLI::PositiveNumber);
    app.add_option("--start", start, "First date (YYYY-MM-DD)");
    CLI11_PARSE(app, argc, argv);

    try {
        mpp::RngStream rng(seed, 0);
        const Universe u = make_universe(assets, rng);
        mpp::Matrix x(rows, assets);
        mpp::Vector z(assets);
        for (mpp::Index t = 0; t < rows; ++t) {
            for (mpp::Index j = 0; j < assets; ++j) z(j) = rng.normal();
            x.row(t) = (u.mu + u.chol * z).transpose();
        }
        std::vector<std::string> labels;
        for (mpp::Index j = 0; j < assets; ++j) {
            char buf[16];
            std::snprintf(buf, sizeof buf, "EQ%02d", static_cast<int>(j + 1));
            labels.emplace_back(buf);
        }
        const std::vector<std::string> dates = mpp::weekly_dates(start, static_cast<std::size_t>(rows));
        const mpp::ReturnsWindow window(labels, dates, x);

        std::filesystem::create_directories(out_dir);
        const std::filesystem::path dir(out_dir);
        mpp::write_returns_csv(dir / "weekly_returns.csv", window);

        // Annual rate wandering between roughly 1% and 3%, quoted per week.
        std::ofstream rf(dir / "weekly_rf.csv");
        rf << "date,rf\n";
        for (mpp::Index t = 0; t < rows; ++t) {
            const double annual = 0.02 + 0.01 * std::sin(2.0 * M_PI * static_cast<double>(t) / 156.0);
            rf << dates[static_cast<std::size_t>(t)] << ',' << mpp::format_double(annual / 52.0) << '\n';
        }
        std::cout << "wrote " << rows << " rows x " << assets << " assets to " << dir.string() << '\n';
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
