#include "banditfolio/ingest.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace banditfolio {

namespace {

std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        // Trim surrounding whitespace; the format has no quoting.
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_price_cell(const std::string& cell, const std::string& origin, int row, int col) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(cell, &pos);
    } catch (const std::exception&) {
        pos = std::string::npos;
    }
    if (pos != cell.size() || cell.empty()) {
        throw std::runtime_error(origin + ": non-numeric price '" + cell + "' at row " +
                                 std::to_string(row) + ", column " + std::to_string(col));
    }
    if (!std::isfinite(v) || v <= 0.0) {
        throw std::runtime_error(origin + ": non-positive price " + cell + " at row " +
                                 std::to_string(row) + ", column " + std::to_string(col));
    }
    return v;
}

} // namespace

void validate_prices(const PriceSeries& p) {
    if (p.prices.rows != static_cast<int>(p.asset_ids.size())) {
        throw std::invalid_argument("price series: id count does not match row count");
    }
    if (p.prices.cols < 1) throw std::invalid_argument("price series: no price columns");
    std::set<std::string> seen;
    for (const auto& id : p.asset_ids) {
        if (!seen.insert(id).second) {
            throw std::invalid_argument("price series: duplicate asset id '" + id + "'");
        }
    }
    for (int i = 0; i < p.prices.rows; ++i) {
        for (int t = 0; t < p.prices.cols; ++t) {
            const double v = p.prices(i, t);
            if (!std::isfinite(v) || v <= 0.0) {
                throw std::invalid_argument("price series: non-positive price for asset '" +
                                            p.asset_ids[i] + "' at timestep " + std::to_string(t));
            }
        }
    }
}

PriceSeries parse_prices_csv(const std::string& content, const std::string& origin) {
    std::stringstream ss(content);
    std::string line;
    std::vector<std::vector<double>> rows;
    std::vector<std::string> ids;
    int row_no = 0;
    while (std::getline(ss, line)) {
        ++row_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split_csv_row(line);
        if (row_no == 1) {
            ids = cells;
            continue;
        }
        if (cells.size() != ids.size()) {
            throw std::runtime_error(origin + ": row " + std::to_string(row_no) + " has " +
                                     std::to_string(cells.size()) + " cells, expected " +
                                     std::to_string(ids.size()));
        }
        std::vector<double> vals;
        vals.reserve(cells.size());
        for (std::size_t c = 0; c < cells.size(); ++c) {
            vals.push_back(parse_price_cell(cells[c], origin, row_no, static_cast<int>(c) + 1));
        }
        rows.push_back(std::move(vals));
    }
    if (ids.empty()) throw std::runtime_error(origin + ": missing header row");
    if (rows.size() < 1) throw std::runtime_error(origin + ": no price rows");

    PriceSeries p;
    p.asset_ids = ids;
    // File rows are timesteps; normalize to assets x timesteps.
    p.prices = Matrix(static_cast<int>(ids.size()), static_cast<int>(rows.size()));
    for (int t = 0; t < p.prices.cols; ++t) {
        for (int i = 0; i < p.prices.rows; ++i) p.prices(i, t) = rows[t][i];
    }
    validate_prices(p);
    return p;
}

PriceSeries load_prices(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_prices: cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_prices_csv(buf.str(), path);
}

void write_prices_csv(const PriceSeries& p, const std::string& path) {
    validate_prices(p);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_prices_csv: cannot open '" + path + "'");
    for (std::size_t i = 0; i < p.asset_ids.size(); ++i) {
        out << (i ? "," : "") << p.asset_ids[i];
    }
    out << "\n";
    char buf[32];
    for (int t = 0; t < p.prices.cols; ++t) {
        for (int i = 0; i < p.prices.rows; ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g", p.prices(i, t));
            out << (i ? "," : "") << buf;
        }
        out << "\n";
    }
    if (!out) throw std::runtime_error("write_prices_csv: write failed for '" + path + "'");
}

ReturnMatrix to_log_returns(const PriceSeries& p) {
    validate_prices(p);
    if (p.prices.cols < 2) throw std::invalid_argument("to_log_returns: need at least 2 price columns");
    ReturnMatrix r;
    r.asset_ids = p.asset_ids;
    r.returns = Matrix(p.prices.rows, p.prices.cols - 1);
    for (int i = 0; i < r.returns.rows; ++i) {
        for (int t = 0; t < r.returns.cols; ++t) {
            const double v = std::log(p.prices(i, t + 1) / p.prices(i, t));
            if (!std::isfinite(v)) {
                throw std::runtime_error("to_log_returns: non-finite return for asset '" +
                                         p.asset_ids[i] + "' at trial " + std::to_string(t + 1));
            }
            r.returns(i, t) = v;
        }
    }
    return r;
}

std::pair<ReturnMatrix, ReturnMatrix> split_history(const ReturnMatrix& r, int delta) {
    if (delta < 1) throw std::invalid_argument("split_history: delta must be positive");
    if (delta >= r.returns.cols) {
        throw std::invalid_argument("split_history: delta " + std::to_string(delta) +
                                    " leaves no investment trials (have " +
                                    std::to_string(r.returns.cols) + " columns)");
    }
    ReturnMatrix h, f;
    h.asset_ids = r.asset_ids;
    f.asset_ids = r.asset_ids;
    h.returns = Matrix(r.returns.rows, delta);
    f.returns = Matrix(r.returns.rows, r.returns.cols - delta);
    for (int i = 0; i < r.returns.rows; ++i) {
        for (int t = 0; t < delta; ++t) h.returns(i, t) = r.returns(i, t);
        for (int t = delta; t < r.returns.cols; ++t) f.returns(i, t - delta) = r.returns(i, t);
    }
    return {std::move(h), std::move(f)};
}

} // namespace banditfolio
