#include "onebit/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>
#include <vector>

#include "onebit/error.hpp"

namespace onebit {

namespace {

void put(std::ostream& out, double x) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    (void)ec;
    out.write(buf, end - buf);
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    return s;
}

struct Table {
    std::vector<std::vector<double>> cols;
    std::vector<std::size_t> lines;  // source line of each row
};

Table read_table(std::istream& in, std::string_view header, std::size_t ncols, const std::string& name) {
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw ParseError(name, 1, "empty file");
    ++lineno;
    if (trim(line) != header) {
        throw ParseError(name, lineno, "expected header '" + std::string(header) + "'");
    }
    Table t;
    t.cols.resize(ncols);
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view rest = trim(line);
        if (rest.empty()) continue;
        for (std::size_t c = 0; c < ncols; ++c) {
            const auto comma = rest.find(',');
            if ((comma == std::string_view::npos) != (c + 1 == ncols)) {
                throw ParseError(name, lineno, "expected " + std::to_string(ncols) + " fields");
            }
            std::string_view field = trim(rest.substr(0, comma));
            double x = 0.0;
            auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), x);
            if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(x)) {
                throw ParseError(name, lineno, "invalid number '" + std::string(field) + "'");
            }
            t.cols[c].push_back(x);
            if (comma != std::string_view::npos) rest = rest.substr(comma + 1);
        }
        t.lines.push_back(lineno);
    }
    return t;
}

// Rebuild a uniform symmetric grid from the first column, checking each row.
SourceGrid grid_from_column(const Table& t, double sigma, const std::string& name) {
    const auto& x = t.cols[0];
    const std::size_t n = x.size();
    if (n < 3 || n % 2 == 0) {
        throw ParseError(name, t.lines.empty() ? 1 : t.lines.back(),
                         "row count must be odd and >= 3, got " + std::to_string(n));
    }
    for (std::size_t i = 1; i < n; ++i) {
        if (!(x[i] > x[i - 1])) throw ParseError(name, t.lines[i], "first column is not strictly ascending");
    }
    const double half = x.back();
    const double h = 2.0 * half / static_cast<double>(n - 1);
    const auto mid = static_cast<std::ptrdiff_t>(n / 2);
    SourceGrid g;
    g.sigma = sigma;
    g.halfwidth_sigmas = half / sigma;
    g.nodes.resize(n);
    g.weights.assign(n, h);
    g.weights.front() = g.weights.back() = 0.5 * h;
    for (std::size_t i = 0; i < n; ++i) {
        g.nodes[i] = static_cast<double>(static_cast<std::ptrdiff_t>(i) - mid) * h;
        if (std::abs(x[i] - g.nodes[i]) > 1e-9 * half) {
            throw ParseError(name, t.lines[i], "nodes are not a uniform grid symmetric about 0");
        }
    }
    return g;
}

}  // namespace

void write_mapping(std::ostream& out, const EncoderMapping& f) {
    out << "v,f\n";
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        put(out, f.grid.nodes[i]);
        out << ',';
        put(out, f.values[i]);
        out << '\n';
    }
}

void write_decoder(std::ostream& out, const DecoderTable& g) {
    out << "u,g0,g1\n";
    for (std::size_t j = 0; j < g.g0.size(); ++j) {
        put(out, g.u_grid.nodes[j]);
        out << ',';
        put(out, g.g0[j]);
        out << ',';
        put(out, g.g1[j]);
        out << '\n';
    }
}

void write_mapping_file(const std::string& path, const EncoderMapping& f) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    write_mapping(out, f);
}

void write_decoder_file(const std::string& path, const DecoderTable& g) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    write_decoder(out, g);
}

EncoderMapping read_mapping(std::istream& in, double sigma, const std::string& name) {
    Table t = read_table(in, "v,f", 2, name);
    SourceGrid g = grid_from_column(t, sigma, name);
    return EncoderMapping(std::move(g), std::move(t.cols[1]));
}

DecoderTable read_decoder(std::istream& in, double sigma, const std::string& name) {
    Table t = read_table(in, "u,g0,g1", 3, name);
    SourceGrid g = grid_from_column(t, sigma, name);
    return DecoderTable(std::move(g), std::move(t.cols[1]), std::move(t.cols[2]));
}

EncoderMapping read_mapping_file(const std::string& path, double sigma) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    return read_mapping(in, sigma, path);
}

DecoderTable read_decoder_file(const std::string& path, double sigma) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    return read_decoder(in, sigma, path);
}

}  // namespace onebit
