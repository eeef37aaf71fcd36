#include "edl/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "edl/error.hpp"

namespace edl {

std::string format_double(double v) {
    if (!std::isfinite(v)) throw config_error("format_double: non-finite value");
    char buf[64];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

namespace {

double parse_f64(const std::string& tok, const char* what) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size() || tok.empty())
        throw config_error(std::string(what) + ": bad number '" + tok + "'");
    if (!std::isfinite(v)) throw config_error(std::string(what) + ": non-finite '" + tok + "'");
    return v;
}

std::uint64_t parse_u64(const std::string& tok, const char* what) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(tok.c_str(), &end, 10);
    if (end != tok.c_str() + tok.size() || tok.empty() || tok[0] == '-')
        throw config_error(std::string(what) + ": bad integer '" + tok + "'");
    return v;
}

std::vector<std::string> tokens_of(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> toks;
    std::string t;
    while (in >> t) toks.push_back(t);
    return toks;
}

// all non-empty, non-comment lines after checking the expected header
std::vector<std::string> body_lines(const std::string& text, const std::string& header_prefix,
                                    std::string* header_out) {
    std::istringstream in(text);
    std::string line;
    bool seen_header = false;
    std::vector<std::string> body;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!seen_header) {
            if (line.compare(0, header_prefix.size(), header_prefix) != 0)
                throw config_error("expected header '" + header_prefix + "', got '" + line + "'");
            if (header_out) *header_out = line;
            seen_header = true;
            continue;
        }
        if (line[0] == '#') continue;
        body.push_back(line);
    }
    if (!seen_header) throw config_error("missing header '" + header_prefix + "'");
    return body;
}

} // namespace

std::string measure_text(const GridMeasure& mu) {
    std::string out = "#gridmeasure v1\n";
    for (const auto& a : mu.atoms()) {
        out += std::to_string(mu.level());
        out += ' ';
        out += std::to_string(mu.dim());
        out += ' ';
        out += std::to_string(a.c[0]);
        if (mu.dim() == 2) {
            out += ' ';
            out += std::to_string(a.c[1]);
        }
        out += ' ';
        out += format_double(a.mass);
        out += '\n';
    }
    return out;
}

GridMeasure parse_measure(const std::string& text) {
    const auto lines = body_lines(text, "#gridmeasure v1", nullptr);
    if (lines.empty()) throw config_error("gridmeasure file has no atoms");
    int level = -1, dim = 0;
    std::vector<Atom> atoms;
    for (const auto& line : lines) {
        const auto toks = tokens_of(line);
        if (toks.size() != 4 && toks.size() != 5)
            throw config_error("gridmeasure record needs 4 or 5 fields: '" + line + "'");
        const int l = static_cast<int>(parse_u64(toks[0], "gridmeasure level"));
        const int d = static_cast<int>(parse_u64(toks[1], "gridmeasure dim"));
        if (toks.size() != (d == 2 ? 5u : 4u))
            throw config_error("gridmeasure record has wrong field count for d=" +
                               std::to_string(d) + ": '" + line + "'");
        if (level < 0) {
            level = l;
            dim = d;
        } else if (l != level || d != dim) {
            throw config_error("gridmeasure records disagree on level or dim");
        }
        Atom a;
        a.c[0] = parse_u64(toks[2], "gridmeasure coord");
        a.c[1] = d == 2 ? parse_u64(toks[3], "gridmeasure coord") : 0;
        a.mass = parse_f64(toks.back(), "gridmeasure mass");
        atoms.push_back(a);
    }
    return GridMeasure::from_atoms(level, dim, std::move(atoms));
}

std::string cloud_text(const std::vector<Vec2>& points, int dim) {
    if (dim != 1 && dim != 2) throw config_error("cloud: dim must be 1 or 2");
    std::string out = "#cloud v1 d=" + std::to_string(dim) + "\n";
    for (const auto& p : points) {
        out += format_double(p[0]);
        if (dim == 2) {
            out += ' ';
            out += format_double(p[1]);
        }
        out += '\n';
    }
    return out;
}

Cloud parse_cloud(const std::string& text) {
    std::string header;
    const auto lines = body_lines(text, "#cloud v1 d=", &header);
    Cloud c;
    const std::string tail = header.substr(std::string("#cloud v1 d=").size());
    if (tail == "1")
        c.dim = 1;
    else if (tail == "2")
        c.dim = 2;
    else
        throw config_error("cloud header dim must be 1 or 2, got '" + tail + "'");
    for (const auto& line : lines) {
        const auto toks = tokens_of(line);
        if (toks.size() != static_cast<std::size_t>(c.dim))
            throw config_error("cloud point needs " + std::to_string(c.dim) + " fields: '" +
                               line + "'");
        Vec2 p{parse_f64(toks[0], "cloud x"), 0.0};
        if (c.dim == 2) p[1] = parse_f64(toks[1], "cloud y");
        c.points.push_back(p);
    }
    return c;
}

std::string bins_csv(const BinCounts& bins) {
    std::string out = "level,bin_index\n";
    for (const auto idx : bins.occupied()) {
        out += std::to_string(bins.level);
        out += ',';
        out += std::to_string(idx);
        out += '\n';
    }
    return out;
}

std::string counts_csv(const std::vector<LevelCount>& counts) {
    std::string out = "n,count,log2count\n";
    for (const auto& lc : counts) {
        out += std::to_string(lc.level);
        out += ',';
        out += std::to_string(lc.count);
        out += ',';
        out += format_double(std::log2(static_cast<double>(lc.count)));
        out += '\n';
    }
    return out;
}

std::string chain_csv(const ChainReport& report) {
    std::string out = "stage,k,level,value,bound,margin\n";
    for (const auto& row : report.rows) {
        out += row.stage;
        out += ',';
        out += std::to_string(row.k);
        out += ',';
        out += std::to_string(row.level);
        out += ',';
        out += format_double(row.value);
        out += ',';
        out += format_double(row.bound);
        out += ',';
        out += format_double(row.margin);
        out += '\n';
    }
    return out;
}

std::string dimension_summary_json(const DimensionEstimate& est) {
    return "{\"residual\":" + format_double(est.residual) +
           ",\"slope\":" + format_double(est.slope) +
           ",\"window\":[" + std::to_string(est.window[0]) + "," +
           std::to_string(est.window[1]) + "]}";
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("cannot open for writing: " + path);
    out << text;
    out.flush();
    if (!out) throw config_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot open: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void save_measure(const std::string& path, const GridMeasure& mu) {
    write_text_file(path, measure_text(mu));
}

GridMeasure load_measure(const std::string& path) {
    return parse_measure(read_text_file(path));
}

void save_cloud(const std::string& path, const std::vector<Vec2>& points, int dim) {
    write_text_file(path, cloud_text(points, dim));
}

Cloud load_cloud(const std::string& path) {
    return parse_cloud(read_text_file(path));
}

} // namespace edl
