#include "igci/io.hpp"

#include "igci/error.hpp"

#include "json.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

namespace igci::io {

namespace {

std::vector<std::string> split_fields(const std::string& line, bool commas_only = false) {
    std::vector<std::string> fields;
    std::string current;
    bool have = false;
    for (char ch : line) {
        const bool sep = ch == ',' || (!commas_only && (ch == ' ' || ch == '\t' || ch == '\r'));
        if (sep) {
            if (have || commas_only) fields.push_back(current);
            current.clear();
            have = false;
        } else {
            current.push_back(ch);
            have = true;
        }
    }
    if (have || (commas_only && !fields.empty())) fields.push_back(current);
    return fields;
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

bool skip_line(const std::string& line) {
    const std::string t = trim(line);
    return t.empty() || t.front() == '#';
}

double parse_number(const std::string& token, std::size_t line_no) {
    const char* begin = token.c_str();
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0') {
        throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": '" + token + "' is not a number");
    }
    return v;
}

std::size_t parse_index(const std::string& token, std::size_t line_no) {
    const std::string t = trim(token);
    if (t.empty() || !std::all_of(t.begin(), t.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": bad column index '" + t + "'");
    }
    return static_cast<std::size_t>(std::stoull(t));
}

/// Rows of the selected columns; rows with a non-finite selected value are dropped.
std::vector<std::vector<double>> read_columns(std::istream& in, std::span<const std::size_t> columns,
                                              std::size_t& dropped) {
    std::vector<std::vector<double>> rows;
    dropped = 0;
    std::string line;
    std::size_t line_no = 0;
    const std::size_t needed = columns.empty() ? 0 : *std::max_element(columns.begin(), columns.end()) + 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (skip_line(line)) continue;
        const auto fields = split_fields(line);
        if (fields.size() < needed) {
            throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected at least " +
                                                   std::to_string(needed) + " columns, found " +
                                                   std::to_string(fields.size()));
        }
        std::vector<double> row;
        row.reserve(columns.size());
        bool finite = true;
        for (std::size_t c : columns) {
            const double v = parse_number(fields[c], line_no);
            finite = finite && std::isfinite(v);
            row.push_back(v);
        }
        if (finite) {
            rows.push_back(std::move(row));
        } else {
            ++dropped;
        }
    }
    return rows;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::ParseError, "cannot open '" + path.string() + "'");
    }
    return in;
}

std::size_t first_row_width(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);
    std::string line;
    while (std::getline(in, line)) {
        if (!skip_line(line)) return split_fields(line).size();
    }
    return 0;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double pearson(std::span<const double> a, std::span<const double> b) {
    const double ma = mean(a), mb = mean(b);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma, db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0.0 || sbb == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

struct Overlap {
    std::size_t a_begin = 0;
    std::size_t b_begin = 0;
    std::size_t length = 0;
};

Overlap overlap_for(std::size_t na, std::size_t nb, long lag) {
    Overlap o;
    const long start = std::max(0L, -lag);
    const long stop = std::min(static_cast<long>(na), static_cast<long>(nb) - lag);
    if (stop <= start) return o;
    o.a_begin = static_cast<std::size_t>(start);
    o.b_begin = static_cast<std::size_t>(start + lag);
    o.length = static_cast<std::size_t>(stop - start);
    return o;
}

}  // namespace

LoadedPair parse_pair(std::istream& in, std::size_t x_col, std::size_t y_col) {
    const std::size_t cols[] = {x_col, y_col};
    std::size_t dropped = 0;
    const auto rows = read_columns(in, cols, dropped);
    if (rows.size() < 3) {
        throw Error(ErrorCode::TooFewRows, "need at least 3 valid rows, found " + std::to_string(rows.size()));
    }
    std::vector<double> x, y;
    x.reserve(rows.size());
    y.reserve(rows.size());
    for (const auto& r : rows) {
        x.push_back(r[0]);
        y.push_back(r[1]);
    }
    return {SamplePair(std::move(x), std::move(y)), dropped};
}

LoadedPair load_pair(const std::filesystem::path& path, std::size_t x_col, std::size_t y_col) {
    std::ifstream in = open_input(path);
    return parse_pair(in, x_col, y_col);
}

Eigen::MatrixXd load_columns(const std::filesystem::path& path, std::span<const std::size_t> columns) {
    std::ifstream in = open_input(path);
    std::size_t dropped = 0;
    const auto rows = read_columns(in, columns, dropped);
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(columns.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < columns.size(); ++j) {
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return out;
}

void write_pair(std::ostream& out, const SamplePair& pair) {
    for (std::size_t i = 0; i < pair.size(); ++i) {
        out << format_double(pair.x()[i]) << ' ' << format_double(pair.y()[i]) << '\n';
    }
}

LagAlignment align_lag(std::span<const double> a, std::span<const double> b, std::size_t max_lag) {
    if (a.size() < max_lag + 3 || b.size() < max_lag + 3) {
        throw Error(ErrorCode::TooFewRows, "series must be at least max_lag + 3 long");
    }
    const long limit = static_cast<long>(max_lag);
    LagAlignment best;
    bool found = false;
    // Visit 0, -1, +1, -2, +2, ... and keep only strict improvements so ties favour small |lag|.
    for (long step = 0; step <= 2 * limit; ++step) {
        const long lag = (step % 2 == 1) ? -(step + 1) / 2 : step / 2;
        const Overlap o = overlap_for(a.size(), b.size(), lag);
        if (o.length < 3) continue;
        const double r = pearson(a.subspan(o.a_begin, o.length), b.subspan(o.b_begin, o.length));
        if (std::isnan(r)) continue;
        if (!found || r > best.correlation) {
            best.lag = lag;
            best.correlation = r;
            best.overlap_length = o.length;
            found = true;
        }
    }
    if (!found) {
        throw Error(ErrorCode::ConstantInput, "a series is constant over every overlap");
    }
    best.low_correlation = best.correlation < kLowCorrelation;
    return best;
}

SamplePair aligned_pair(std::span<const double> a, std::span<const double> b, long lag) {
    const Overlap o = overlap_for(a.size(), b.size(), lag);
    const auto sa = a.subspan(o.a_begin, o.length);
    const auto sb = b.subspan(o.b_begin, o.length);
    return SamplePair(std::vector<double>(sa.begin(), sa.end()), std::vector<double>(sb.begin(), sb.end()));
}

std::optional<Direction> parse_truth(const std::string& text) {
    std::string t = trim(text);
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (t == "x->y" || t == "xy" || t == "x") return Direction::XtoY;
    if (t == "y->x" || t == "yx" || t == "y") return Direction::YtoX;
    if (t.empty() || t == "unknown" || t == "?") return std::nullopt;
    throw Error(ErrorCode::ParseError, "unknown ground truth '" + text + "'");
}

PairsManifest parse_manifest(std::istream& in, const std::filesystem::path& base_dir) {
    PairsManifest manifest;
    std::string line;
    std::size_t line_no = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (skip_line(line)) continue;
        if (first && trim(line).rfind("id,", 0) == 0) {
            first = false;
            continue;
        }
        first = false;
        const auto fields = split_fields(line, true);
        if (fields.size() < 5 || fields.size() > 6) {
            throw Error(ErrorCode::ParseError,
                        "manifest line " + std::to_string(line_no) + ": expected id,path,x_col,y_col,truth[,weight]");
        }
        ManifestEntry e;
        e.id = trim(fields[0]);
        if (e.id.empty()) {
            throw Error(ErrorCode::ParseError, "manifest line " + std::to_string(line_no) + ": empty id");
        }
        const std::filesystem::path p = trim(fields[1]);
        e.data_path = p.is_absolute() ? p : base_dir / p;
        e.x_col = parse_index(fields[2], line_no);
        e.y_col = parse_index(fields[3], line_no);
        e.truth = parse_truth(fields[4]);
        if (fields.size() == 6 && !trim(fields[5]).empty()) {
            e.weight = parse_number(trim(fields[5]), line_no);
            if (!(e.weight >= 0.0) || !std::isfinite(e.weight)) {
                throw Error(ErrorCode::ParseError, "manifest line " + std::to_string(line_no) + ": bad weight");
            }
        }
        manifest.entries.push_back(std::move(e));
    }
    return manifest;
}

PairsManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);
    PairsManifest manifest = parse_manifest(in, path.parent_path());
    std::set<std::string> ids;
    for (const auto& e : manifest.entries) {
        if (!ids.insert(e.id).second) {
            throw Error(ErrorCode::ParseError, "duplicate manifest id '" + e.id + "'");
        }
        if (!std::filesystem::exists(e.data_path)) {
            throw Error(ErrorCode::ParseError, "entry '" + e.id + "': missing file " + e.data_path.string());
        }
        const std::size_t width = first_row_width(e.data_path);
        if (std::max(e.x_col, e.y_col) >= width) {
            throw Error(ErrorCode::ParseError, "entry '" + e.id + "': column index beyond file width");
        }
    }
    return manifest;
}

void write_manifest(std::ostream& out, const PairsManifest& manifest) {
    out << "id,path,x_col,y_col,truth,weight\n";
    for (const auto& e : manifest.entries) {
        out << e.id << ',' << e.data_path.string() << ',' << e.x_col << ',' << e.y_col << ','
            << (e.truth ? to_string(*e.truth) : std::string_view("unknown")) << ',' << format_double(e.weight)
            << '\n';
    }
}

ManifestSummary evaluate_manifest(const PairsManifest& manifest, ReferenceFamily reference,
                                  EstimatorKind estimator) {
    if (manifest.entries.empty()) {
        throw Error(ErrorCode::EmptyManifest, "manifest has no entries");
    }
    ManifestSummary summary;
    double total_weight = 0.0, decided_weight = 0.0, judged_weight = 0.0, correct_weight = 0.0;
    for (const auto& e : manifest.entries) {
        EntryResult r;
        r.id = e.id;
        r.truth = e.truth;
        r.weight = e.weight;
        try {
            r.report = igci_score(load_pair(e.data_path, e.x_col, e.y_col).pair, reference, estimator);
        } catch (const Error& err) {
            r.error = err.what();
        }
        total_weight += e.weight;
        if (r.report && r.report->direction != Direction::Undecided) {
            decided_weight += e.weight;
            if (e.truth) {
                judged_weight += e.weight;
                if (r.report->direction == *e.truth) correct_weight += e.weight;
            }
        }
        summary.entries.push_back(std::move(r));
    }
    summary.decisions_pct = total_weight > 0.0 ? 100.0 * decided_weight / total_weight : 0.0;
    if (judged_weight > 0.0) summary.accuracy_pct = 100.0 * correct_weight / judged_weight;
    return summary;
}

std::string tsv_header() { return "id\tc_xy\tc_yx\tdirection\testimator\treference\tm_used"; }

std::string format_record(const std::string& id, const IgciReport& report, OutputFormat format) {
    if (format == OutputFormat::Tsv) {
        std::ostringstream out;
        out << id << '\t' << format_double(report.c_xy) << '\t' << format_double(report.c_yx) << '\t'
            << to_string(report.direction) << '\t' << to_string(report.estimator) << '\t'
            << to_string(report.reference) << '\t' << report.m_used;
        return out.str();
    }
    nlohmann::ordered_json j;
    j["id"] = id;
    j["c_xy"] = report.c_xy;
    j["c_yx"] = report.c_yx;
    j["direction"] = to_string(report.direction);
    j["estimator"] = to_string(report.estimator);
    j["reference"] = to_string(report.reference);
    j["m_used"] = report.m_used;
    return j.dump();
}

}  // namespace igci::io
