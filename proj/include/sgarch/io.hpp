#pragma once

#include "sgarch/estimate.hpp"
#include "sgarch/model.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace sgarch {

inline constexpr std::string_view kToolName = "sgarch";
inline constexpr std::string_view kToolVersion = "1.0.0";

/// Bad configuration: unknown or incompatible options, invalid values.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Unreadable or malformed input data.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ColumnKind { Price, Return };

[[nodiscard]] inline ColumnKind parse_column_kind(std::string_view s) {
    if (s == "price") {
        return ColumnKind::Price;
    }
    if (s == "return") {
        return ColumnKind::Return;
    }
    throw ConfigError("unknown column kind '" + std::string(s) + "' (expected price or return)");
}

struct ReturnSeries {
    std::vector<double> returns;
    /// ISO-8601 dates aligned with returns; empty when the input had none.
    std::vector<std::string> dates;
};

namespace detail {

inline std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) {
        ++b;
    }
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) {
        --e;
    }
    return std::string(s.substr(b, e - b));
}

inline std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

inline char detect_delimiter(std::string_view header) {
    for (char d : {',', '\t', ';'}) {
        if (header.find(d) != std::string_view::npos) {
            return d;
        }
    }
    return ',';
}

inline std::vector<std::string> split(std::string_view line, char delim) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = line.find(delim, start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) {
            return out;
        }
        start = pos + 1;
    }
}

inline bool is_iso_date(std::string_view s) {
    if (s.size() < 10) {
        return false;
    }
    for (std::size_t i = 0; i < 10; ++i) {
        const bool dash = i == 4 || i == 7;
        if (dash ? s[i] != '-' : !std::isdigit(static_cast<unsigned char>(s[i]))) {
            return false;
        }
    }
    const int month = (s[5] - '0') * 10 + (s[6] - '0');
    const int day = (s[8] - '0') * 10 + (s[9] - '0');
    if (month < 1 || month > 12 || day < 1 || day > 31) {
        return false;
    }
    // Optional time part: 2009-12-31T16:00:00 etc.
    return s.size() == 10 || s[10] == 'T' || s[10] == ' ';
}

inline std::optional<double> parse_double(std::string_view s) {
    if (!s.empty() && s.front() == '+') {
        s.remove_prefix(1);
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        return std::nullopt;
    }
    return v;
}

}  // namespace detail

/// Reads a delimited series with a one-line header. The value column is the
/// one named after the kind ("price" also matches "close"), or the only
/// non-date column. A date column is recognized by the header "date" or by
/// ISO-8601 values. Prices are converted to log-returns.
[[nodiscard]] inline ReturnSeries parse_series(std::istream& in, ColumnKind kind,
                                               const std::string& source = "input") {
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError(source + ": empty file");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    const char delim = detail::detect_delimiter(line);
    const std::vector<std::string> header = detail::split(line, delim);

    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (detail::trim(line).empty()) {
            // A trailing newline at end of file is fine; an interior blank line is not.
            if (in.peek() == std::char_traits<char>::eof()) {
                break;
            }
            throw DataError(source + ": line " + std::to_string(line_no) + ": blank line");
        }
        auto fields = detail::split(line, delim);
        if (fields.size() != header.size()) {
            throw DataError(source + ": line " + std::to_string(line_no) + ": expected " +
                            std::to_string(header.size()) + " fields, found " +
                            std::to_string(fields.size()));
        }
        rows.push_back(std::move(fields));
        line_numbers.push_back(line_no);
    }
    if (rows.empty()) {
        throw DataError(source + ": no data rows");
    }

    std::optional<std::size_t> date_col;
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (detail::lower(header[j]) == "date" || detail::is_iso_date(rows.front()[j])) {
            date_col = j;
            break;
        }
    }
    std::optional<std::size_t> value_col;
    const std::vector<std::string> wanted =
        kind == ColumnKind::Price ? std::vector<std::string>{"price", "close", "adj_close"}
                                  : std::vector<std::string>{"return", "returns", "log_return"};
    for (const auto& w : wanted) {
        for (std::size_t j = 0; j < header.size() && !value_col; ++j) {
            if (detail::lower(header[j]) == w) {
                value_col = j;
            }
        }
    }
    if (!value_col) {
        std::vector<std::size_t> candidates;
        for (std::size_t j = 0; j < header.size(); ++j) {
            if (j != date_col) {
                candidates.push_back(j);
            }
        }
        if (candidates.size() != 1) {
            throw DataError(source + ": cannot tell which column holds the " +
                            (kind == ColumnKind::Price ? std::string("prices")
                                                       : std::string("returns")));
        }
        value_col = candidates.front();
    }

    std::vector<double> values;
    std::vector<std::string> dates;
    values.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const std::string where = source + ": line " + std::to_string(line_numbers[r]) +
                                  ", column " + std::to_string(*value_col + 1);
        const auto v = detail::parse_double(rows[r][*value_col]);
        if (!v) {
            throw DataError(where + ": not a number: '" + rows[r][*value_col] + "'");
        }
        if (!std::isfinite(*v)) {
            throw DataError(where + ": non-finite value");
        }
        if (kind == ColumnKind::Price && !(*v > 0.0)) {
            throw DataError(where + ": price must be positive");
        }
        if (date_col) {
            const std::string& d = rows[r][*date_col];
            if (!detail::is_iso_date(d)) {
                throw DataError(source + ": line " + std::to_string(line_numbers[r]) +
                                ", column " + std::to_string(*date_col + 1) +
                                ": not an ISO-8601 date: '" + d + "'");
            }
            dates.push_back(d);
        }
        values.push_back(*v);
    }

    ReturnSeries out;
    if (kind == ColumnKind::Return) {
        out.returns = std::move(values);
        out.dates = std::move(dates);
    } else {
        if (values.size() < 2) {
            throw DataError(source + ": need at least two prices");
        }
        out.returns.reserve(values.size() - 1);
        for (std::size_t i = 1; i < values.size(); ++i) {
            out.returns.push_back(std::log(values[i] / values[i - 1]));
        }
        if (!dates.empty()) {
            out.dates.assign(dates.begin() + 1, dates.end());
        }
    }
    return out;
}

[[nodiscard]] inline ReturnSeries load_series(const std::filesystem::path& path, ColumnKind kind) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open " + path.string());
    }
    return parse_series(in, kind, path.string());
}

struct SeriesStatistics {
    std::size_t n = 0;
    double mean = 0.0;
    /// Sample standard deviation (n - 1 denominator).
    double std_dev = 0.0;
    double annualized_mean = 0.0;
    double annualized_std = 0.0;
    double skewness = 0.0;
    /// Non-excess kurtosis (3 for a normal law).
    double kurtosis = 0.0;
};

[[nodiscard]] inline SeriesStatistics compute_statistics(std::span<const double> x) {
    if (x.size() < 2) {
        throw DataError("statistics need at least two observations");
    }
    SeriesStatistics s;
    s.n = x.size();
    const double n = static_cast<double>(x.size());
    for (double v : x) {
        s.mean += v;
    }
    s.mean /= n;
    double m2 = 0.0;
    double m3 = 0.0;
    double m4 = 0.0;
    for (double v : x) {
        const double d = v - s.mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    s.std_dev = std::sqrt(m2 / (n - 1.0));
    m2 /= n;
    m3 /= n;
    m4 /= n;
    s.skewness = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
    s.kurtosis = m2 > 0.0 ? m4 / (m2 * m2) : 0.0;
    s.annualized_mean = 252.0 * s.mean;
    s.annualized_std = std::sqrt(252.0) * s.std_dev;
    return s;
}

/// Shortest text that reads back to the same double.
[[nodiscard]] inline std::string format_double(double v) {
    char buf[64];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) {
            break;
        }
    }
    return buf;
}

/// Writes to a temporary sibling and renames it over path.
inline void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot write " + tmp.string());
        }
        out << content;
        out.flush();
        if (!out) {
            throw std::runtime_error("write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw std::runtime_error("cannot rename onto " + path.string() + ": " + ec.message());
    }
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

[[nodiscard]] inline std::string render_csv(const Table& t) {
    std::ostringstream os;
    auto line = [&](const std::vector<std::string>& f) {
        for (std::size_t j = 0; j < f.size(); ++j) {
            os << (j ? "," : "") << f[j];
        }
        os << '\n';
    };
    line(t.header);
    for (const auto& r : t.rows) {
        line(r);
    }
    return os.str();
}

[[nodiscard]] inline Table parse_csv(std::istream& in) {
    Table t;
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError("empty table");
    }
    t.header = detail::split(line, ',');
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        t.rows.push_back(detail::split(line, ','));
    }
    return t;
}

[[nodiscard]] inline Table read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open " + path.string());
    }
    return parse_csv(in);
}

/// Correlogram with header lag,statistic,n,band; undefined correlations are empty.
[[nodiscard]] inline Table correlogram_to_table(const std::vector<CorrelogramRow>& rows) {
    Table t{{"lag", "statistic", "n", "band"}, {}};
    for (const auto& r : rows) {
        t.rows.push_back({std::to_string(r.lag), r.corr ? format_double(*r.corr) : "",
                          std::to_string(r.n), format_double(r.band)});
    }
    return t;
}

// ---- fit reports -----------------------------------------------------------

using Json = nlohmann::json;

[[nodiscard]] inline Json params_to_json(const ParamSet& p) {
    Json j = Json::object();
    const auto a = to_array(p);
    for (std::size_t k = 0; k < a.size(); ++k) {
        j[std::string(kParamNames[k])] = a[k];
    }
    return j;
}

[[nodiscard]] inline ParamSet params_from_json(const Json& j) {
    std::array<double, 8> a{};
    for (std::size_t k = 0; k < a.size(); ++k) {
        a[k] = j.at(std::string(kParamNames[k])).get<double>();
    }
    return from_array(a);
}

[[nodiscard]] inline Json spec_to_json(const ModelSpec& s) {
    return {{"variant", std::string(to_string(s.variant))},
            {"beta_equal", s.beta_equal},
            {"alpha_equal", s.alpha_equal},
            {"gamma_equal", s.gamma_equal},
            {"delta", s.delta},
            {"dt", s.dt}};
}

[[nodiscard]] inline ModelSpec spec_from_json(const Json& j) {
    ModelSpec s;
    s.variant = parse_variant(j.at("variant").get<std::string>());
    s.beta_equal = j.at("beta_equal").get<bool>();
    s.alpha_equal = j.value("alpha_equal", false);
    s.gamma_equal = j.value("gamma_equal", false);
    s.delta = j.at("delta").get<double>();
    s.dt = j.value("dt", 1.0);
    validate(s);
    return s;
}

[[nodiscard]] inline Json fit_to_json(const FitResult& f, std::uint64_t seed) {
    Json j;
    j["tool"] = std::string(kToolName);
    j["version"] = std::string(kToolVersion);
    j["spec"] = spec_to_json(f.spec);
    j["params"] = params_to_json(f.params);
    Json norm = params_to_json(f.normalized.values);
    norm["stationarity_margin"] = f.normalized.stationarity_margin;
    j["normalized"] = norm;
    j["lambda0"] = {{"plus", f.lambda0.plus}, {"minus", f.lambda0.minus}};
    j["loglik"] = f.loglik;
    j["neg_loglik"] = -f.loglik;
    j["converged"] = f.converged;
    j["iterations"] = f.iterations;
    j["evaluations"] = f.evaluations;
    j["start_points_used"] = f.start_points_used;
    j["n_obs"] = f.n_obs;
    j["max_rounding_error"] = f.max_rounding_error;
    j["seed"] = seed;
    Json fixed = Json::object();
    if (f.fixed.beta) {
        fixed["beta"] = *f.fixed.beta;
    }
    if (f.fixed.alpha) {
        fixed["alpha"] = *f.fixed.alpha;
    }
    if (f.fixed.gamma) {
        fixed["gamma"] = *f.fixed.gamma;
    }
    j["fixed"] = fixed;
    j["se"] = f.se ? params_to_json(*f.se) : Json(nullptr);
    return j;
}

[[nodiscard]] inline FitResult fit_from_json(const Json& j) {
    if (j.value("tool", std::string()) != kToolName) {
        throw DataError("not a fit report written by this tool");
    }
    FitResult f;
    f.spec = spec_from_json(j.at("spec"));
    f.params = params_from_json(j.at("params"));
    f.normalized = normalize_params(f.params, f.spec.delta);
    f.lambda0 = {j.at("lambda0").at("plus").get<double>(),
                 j.at("lambda0").at("minus").get<double>()};
    f.loglik = j.at("loglik").get<double>();
    f.converged = j.at("converged").get<bool>();
    f.iterations = j.value("iterations", 0);
    f.evaluations = j.value("evaluations", 0);
    f.start_points_used = j.value("start_points_used", 0);
    f.n_obs = j.value("n_obs", std::size_t{0});
    f.max_rounding_error = j.value("max_rounding_error", 0.0);
    if (j.contains("fixed")) {
        const Json& fx = j.at("fixed");
        if (fx.contains("beta")) {
            f.fixed.beta = fx.at("beta").get<double>();
        }
        if (fx.contains("alpha")) {
            f.fixed.alpha = fx.at("alpha").get<double>();
        }
        if (fx.contains("gamma")) {
            f.fixed.gamma = fx.at("gamma").get<double>();
        }
    }
    if (j.contains("se") && !j.at("se").is_null()) {
        f.se = params_from_json(j.at("se"));
    }
    validate(f.params, f.spec, /*allow_degenerate=*/true);
    return f;
}

[[nodiscard]] inline Json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open " + path.string());
    }
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

}  // namespace sgarch
