#pragma once

#include <string>
#include <utility>
#include <vector>

#include "banditfolio/linalg.hpp"

namespace banditfolio {

/// Strictly positive price grid, assets x (timesteps + 1).
struct PriceSeries {
    std::vector<std::string> asset_ids;
    Matrix prices; // rows = assets, cols = price observations

    int num_assets() const { return prices.rows; }
    int num_timesteps() const { return prices.cols - 1; }
};

/// Log price ratios, assets x trials. The shared currency of every
/// downstream module.
struct ReturnMatrix {
    std::vector<std::string> asset_ids;
    Matrix returns; // rows = assets, cols = trials

    int num_assets() const { return returns.rows; }
    int num_trials() const { return returns.cols; }
};

/// Checks positivity, rectangularity and id uniqueness; throws with the
/// offending location on failure.
void validate_prices(const PriceSeries& p);

/// Loads a CSV price file: one header row of asset ids, then one row of
/// prices per timestep (columns = assets). Errors carry row/column
/// positions (1-based, header = row 1).
PriceSeries load_prices(const std::string& path);

/// Parses CSV price content from a string (same layout as load_prices).
PriceSeries parse_prices_csv(const std::string& content, const std::string& origin);

/// Writes a PriceSeries back to the CSV layout load_prices reads.
void write_prices_csv(const PriceSeries& p, const std::string& path);

/// entry (i,t) = ln(prices[i][t+1] / prices[i][t]). Natural log. Aborts
/// with a located error on any non-finite result.
ReturnMatrix to_log_returns(const PriceSeries& p);

/// Splits the leading `delta` columns (historical window) from the rest
/// (investment window). Throws if delta leaves no investment trials.
std::pair<ReturnMatrix, ReturnMatrix> split_history(const ReturnMatrix& r, int delta);

} // namespace banditfolio
