#include "fif/io.hpp"
#include "fif/errors.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>

namespace fif::io {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool skippable(const std::string& line) {
    const std::string t = trim(line);
    return t.empty() || t[0] == '#';
}

std::vector<std::string> split(const std::string& line, bool commas) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ' ' || ch == '\t' || ch == '\r' || (commas && ch == ',')) {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

double parse_number(const std::string& tok, int line) {
    double v = 0.0;
    const char* begin = tok.data();
    const char* end = begin + tok.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end)
        throw parse_error("malformed number '" + tok + "'", line);
    return v;
}

long parse_integer(const std::string& tok, int line) {
    long v = 0;
    const char* begin = tok.data();
    const char* end = begin + tok.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end)
        throw parse_error("malformed integer '" + tok + "'", line);
    return v;
}

// Line reader keeping a 1-based line counter and skipping comments.
struct LineReader {
    std::istream& in;
    int line = 0;

    bool next(std::string& out) {
        std::string raw;
        while (std::getline(in, raw)) {
            ++line;
            if (!skippable(raw)) {
                out = raw;
                return true;
            }
        }
        return false;
    }
};

} // namespace

std::string format_double(double v) {
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

void atomic_write(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open '" + tmp + "' for writing");
        out << content;
        if (!out.good()) {
            std::remove(tmp.c_str());
            throw std::runtime_error("write to '" + tmp + "' failed");
        }
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw std::runtime_error("cannot move '" + tmp + "' to '" + path + "'");
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw parse_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ParsedCurve parse_curve(std::istream& in) {
    LineReader reader{in};
    std::string line;
    if (!reader.next(line)) throw parse_error("empty curve file");

    std::vector<std::string> header = split(line, true);
    bool with_d;
    if (header.size() == 3 && header[0] == "x" && header[1] == "y" && header[2] == "d")
        with_d = true;
    else if (header.size() == 2 && header[0] == "x" && header[1] == "y")
        with_d = false;
    else
        throw parse_error("curve header must be 'x,y' or 'x,y,d'", reader.line);

    std::vector<double> xs, ys, ds;
    while (reader.next(line)) {
        const std::vector<std::string> tok = split(line, true);
        if (tok.size() != (with_d ? 3u : 2u))
            throw parse_error("expected " + std::to_string(with_d ? 3 : 2) + " columns, got " +
                                  std::to_string(tok.size()),
                              reader.line);
        const double x = parse_number(tok[0], reader.line);
        if (!xs.empty() && !(x > xs.back()))
            throw parse_error(xs.size() && x == xs.back()
                                  ? "duplicate knot " + tok[0]
                                  : "knots must be strictly increasing; got " + tok[0],
                              reader.line);
        xs.push_back(x);
        ys.push_back(parse_number(tok[1], reader.line));
        if (with_d) ds.push_back(parse_number(tok[2], reader.line));
    }
    if (xs.size() < 3) throw parse_error("curve needs at least 3 knots, got " +
                                         std::to_string(xs.size()));

    core::KnotVector knots{xs};
    if (!with_d) ds = rq::estimate_derivatives(knots, ys);
    return {rq::HermiteCurveData(std::move(knots), std::move(ys), std::move(ds)), !with_d};
}

ParsedCurve parse_curve_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open '" + path + "'");
    return parse_curve(in);
}

ParsedSurface parse_surface(std::istream& in) {
    LineReader reader{in};
    std::string line;
    if (!reader.next(line)) throw parse_error("empty surface file");

    const std::vector<std::string> head = split(line, true);
    if (head.size() != 2) throw parse_error("surface header must be 'm n'", reader.line);
    const long m = parse_integer(head[0], reader.line);
    const long n = parse_integer(head[1], reader.line);
    if (m < 3 || n < 3) throw parse_error("surface grid needs m, n >= 3", reader.line);

    auto read_knots = [&](long count, const char* axis) {
        if (!reader.next(line)) throw parse_error(std::string("missing ") + axis + "-knot line");
        const std::vector<std::string> tok = split(line, true);
        if (tok.size() != static_cast<std::size_t>(count))
            throw parse_error(std::string(axis) + "-knot line must hold " +
                                  std::to_string(count) + " values",
                              reader.line);
        std::vector<double> k(tok.size());
        for (std::size_t i = 0; i < tok.size(); ++i) k[i] = parse_number(tok[i], reader.line);
        for (std::size_t i = 0; i + 1 < k.size(); ++i)
            if (!(k[i] < k[i + 1]))
                throw parse_error(std::string(axis) + "-knots must be strictly increasing",
                                  reader.line);
        return k;
    };
    std::vector<double> xk = read_knots(m, "x");
    std::vector<double> yk = read_knots(n, "y");

    surface::Matrix z(m, n), zx(m, n), zy(m, n);
    std::vector<char> seen(static_cast<std::size_t>(m * n), 0);
    int arity = 0;
    std::size_t filled = 0;
    while (reader.next(line)) {
        const std::vector<std::string> tok = split(line, true);
        if (tok.size() != 3 && tok.size() != 5)
            throw parse_error("surface row must be 'i j z' or 'i j z zx zy'", reader.line);
        if (arity == 0)
            arity = static_cast<int>(tok.size());
        else if (arity != static_cast<int>(tok.size()))
            throw parse_error("mixed row arity; partials must be given everywhere or nowhere",
                              reader.line);
        const long i = parse_integer(tok[0], reader.line);
        const long j = parse_integer(tok[1], reader.line);
        if (i < 1 || i > m || j < 1 || j > n)
            throw parse_error("grid index (" + tok[0] + ", " + tok[1] + ") out of range",
                              reader.line);
        char& mark = seen[static_cast<std::size_t>((i - 1) * n + (j - 1))];
        if (mark) throw parse_error("duplicate grid cell (" + tok[0] + ", " + tok[1] + ")",
                                    reader.line);
        mark = 1;
        ++filled;
        z(i - 1, j - 1) = parse_number(tok[2], reader.line);
        if (arity == 5) {
            zx(i - 1, j - 1) = parse_number(tok[3], reader.line);
            zy(i - 1, j - 1) = parse_number(tok[4], reader.line);
        }
    }
    if (filled != static_cast<std::size_t>(m * n))
        throw parse_error("surface file holds " + std::to_string(filled) + " cells, expected " +
                          std::to_string(m * n));

    core::KnotVector xknots{xk}, yknots{yk};
    if (arity == 5)
        return {surface::SurfaceGridData(std::move(xknots), std::move(yknots), std::move(z),
                                         std::move(zx), std::move(zy)),
                false};
    return {surface::SurfaceGridData::with_estimated_partials(std::move(xknots), std::move(yknots),
                                                              std::move(z)),
            true};
}

ParsedSurface parse_surface_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open '" + path + "'");
    return parse_surface(in);
}

std::vector<double> parse_value_list(std::istream& in, std::size_t expected, const char* what) {
    LineReader reader{in};
    std::string line;
    std::vector<double> out;
    while (reader.next(line))
        for (const std::string& tok : split(line, true))
            out.push_back(parse_number(tok, reader.line));
    if (out.size() != expected)
        throw parse_error(std::string(what) + " must hold " + std::to_string(expected) +
                          " values, got " + std::to_string(out.size()));
    return out;
}

std::vector<double> parse_value_list_file(const std::string& path, std::size_t expected,
                                          const char* what) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open '" + path + "'");
    return parse_value_list(in, expected, what);
}

SurfaceParamMatrices parse_surface_params(std::istream& in, std::size_t m, std::size_t n,
                                          const char* what) {
    LineReader reader{in};
    std::string line;
    std::vector<double> xs, ys;
    int section = 0; // 0 none, 1 [x], 2 [y]
    while (reader.next(line)) {
        const std::string t = trim(line);
        if (t == "[x]") {
            section = 1;
            continue;
        }
        if (t == "[y]") {
            section = 2;
            continue;
        }
        if (section == 0)
            throw parse_error(std::string(what) + ": values before an [x] or [y] section",
                              reader.line);
        for (const std::string& tok : split(line, true))
            (section == 1 ? xs : ys).push_back(parse_number(tok, reader.line));
    }
    const std::size_t nx = (m - 1) * n, ny = m * (n - 1);
    if (xs.size() != nx || ys.size() != ny)
        throw parse_error(std::string(what) + ": [x] needs " + std::to_string(nx) +
                          " values and [y] " + std::to_string(ny) + "; got " +
                          std::to_string(xs.size()) + " and " + std::to_string(ys.size()));

    SurfaceParamMatrices out{surface::Matrix(m - 1, n), surface::Matrix(m, n - 1)};
    for (std::size_t i = 0; i + 1 < m; ++i)
        for (std::size_t j = 0; j < n; ++j) out.x(i, j) = xs[i * n + j];
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j + 1 < n; ++j) out.y(i, j) = ys[i * (n - 1) + j];
    return out;
}

SurfaceParamMatrices parse_surface_params_file(const std::string& path, std::size_t m,
                                               std::size_t n, const char* what) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open '" + path + "'");
    return parse_surface_params(in, m, n, what);
}

std::string format_curve_samples(const std::vector<std::pair<double, double>>& samples) {
    std::string out = "x,value\n";
    for (const auto& [x, v] : samples) {
        out += format_double(x);
        out += ',';
        out += format_double(v);
        out += '\n';
    }
    return out;
}

std::string format_surface_samples(const surface::SurfaceSamples& samples) {
    std::string out = "x,y,value\n";
    for (std::size_t i = 0; i < samples.x.size(); ++i)
        for (std::size_t j = 0; j < samples.y.size(); ++j) {
            out += format_double(samples.x[i]);
            out += ',';
            out += format_double(samples.y[j]);
            out += ',';
            out += format_double(samples.values(i, j));
            out += '\n';
        }
    return out;
}

} // namespace fif::io
