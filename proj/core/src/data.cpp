#include "deam/data.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "deam/error.hpp"

namespace deam {

const std::vector<double>& pricing_strikes() {
    static const std::vector<double> k = {0.80, 0.85, 0.90, 0.95, 1.00, 1.05, 1.10, 1.15, 1.20};
    return k;
}

const std::vector<double>& pricing_maturities() {
    static const std::vector<double> t = {1.0 / 12, 2.0 / 12, 3.0 / 12, 4.0 / 12,
                                          6.0 / 12, 9.0 / 12, 1.0,      2.0};
    return t;
}

const std::vector<double>& pricing_rates() {
    static const std::vector<double> r = {0.0, 0.01, 0.02, 0.05, 0.07};
    return r;
}

std::vector<PricingCell> gen_pricing_grid() {
    std::vector<PricingCell> out;
    for (double t : pricing_maturities())
        for (double k : pricing_strikes())
            for (double r : pricing_rates()) out.push_back({OptionSpec(OptionType::put, Exercise::american, k, t), r});
    return out;
}

std::vector<OptionSpec> gen_calibration_grid() {
    const double maturities[] = {2.0 / 12, 6.0 / 12, 9.0 / 12, 1.0, 2.0};
    std::vector<OptionSpec> out;
    for (int i = 0; i < 5; ++i) {
        // 0.05 wider on each side per maturity, in steps of 0.025
        const int half = 2 + 2 * i;
        for (int j = -half; j <= half; ++j) {
            out.emplace_back(OptionType::put, Exercise::american, 1.0 + 0.025 * j, maturities[i]);
        }
    }
    return out;
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

// Non-empty, non-comment lines with their 1-based line numbers.
std::vector<std::pair<std::size_t, std::string_view>> lines_of(std::string_view text) {
    std::vector<std::pair<std::size_t, std::string_view>> out;
    std::size_t number = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        const auto line = trim(text.substr(0, nl));
        ++number;
        if (!line.empty() && line.front() != '#') out.emplace_back(number, line);
        if (nl == std::string_view::npos) break;
        text.remove_prefix(nl + 1);
    }
    return out;
}

double to_double(std::string_view s, std::size_t line, const char* field) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw ParseError("bad " + std::string(field) + " '" + std::string(s) + "'", line);
    }
    return v;
}

void expect_header(const std::vector<std::string_view>& got, std::initializer_list<std::string_view> want,
                   std::size_t line) {
    if (!std::equal(got.begin(), got.end(), want.begin(), want.end())) {
        std::string names;
        for (auto w : want) names += (names.empty() ? "" : ",") + std::string(w);
        throw ParseError("expected header " + names, line);
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

int parse_iso_date(std::string_view text) {
    using namespace std::chrono;
    int y = 0;
    unsigned m = 0, d = 0;
    auto num = [&](std::string_view s, auto& out) {
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        return ec == std::errc() && ptr == s.data() + s.size();
    };
    const bool shaped = text.size() == 10 && text[4] == '-' && text[7] == '-';
    if (!shaped || !num(text.substr(0, 4), y) || !num(text.substr(5, 2), m) || !num(text.substr(8, 2), d)) {
        throw ConfigError("dates must be YYYY-MM-DD, got '" + std::string(text) + "'");
    }
    const year_month_day ymd{year{y}, month{m}, day{d}};
    if (!ymd.ok()) throw ConfigError("invalid date '" + std::string(text) + "'");
    return static_cast<int>(sys_days{ymd}.time_since_epoch().count());
}

std::vector<Quote> parse_option_chain(std::string_view csv, std::string_view valuation_date, double s0) {
    if (!(s0 > 0.0)) throw ConfigError("spot must be positive");
    const int t0 = parse_iso_date(valuation_date);
    const auto lines = lines_of(csv);
    if (lines.empty()) throw ParseError("empty option chain", 1);
    expect_header(split(lines.front().second), {"type", "strike", "expiry", "bid", "ask"}, lines.front().first);

    struct Row {
        OptionType type;
        double strike, bid, ask;
    };
    std::map<int, std::vector<Row>> by_expiry;
    for (std::size_t n = 1; n < lines.size(); ++n) {
        const auto [line, text] = lines[n];
        const auto f = split(text);
        if (f.size() != 5) throw ParseError("expected 5 fields", line);
        Row row{};
        if (f[0] == "call" || f[0] == "C" || f[0] == "c") {
            row.type = OptionType::call;
        } else if (f[0] == "put" || f[0] == "P" || f[0] == "p") {
            row.type = OptionType::put;
        } else {
            throw ParseError("unknown option type '" + std::string(f[0]) + "'", line);
        }
        row.strike = to_double(f[1], line, "strike");
        int expiry = 0;
        try {
            expiry = parse_iso_date(f[2]);
        } catch (const ConfigError& e) {
            throw ParseError(e.what(), line);
        }
        row.bid = to_double(f[3], line, "bid");
        row.ask = to_double(f[4], line, "ask");
        if (!(row.strike > 0.0)) throw ParseError("strike must be positive", line);
        if (row.bid < 0.0 || row.ask < 0.0 || row.bid > row.ask) throw ParseError("need 0 <= bid <= ask", line);
        if (expiry <= t0) throw ParseError("expiry must follow the valuation date", line);
        by_expiry[expiry].push_back(row);
    }

    std::vector<Quote> out;
    for (auto& [expiry, rows] : by_expiry) {
        const double maturity = static_cast<double>(expiry - t0) / 365.0;
        std::vector<Row> puts, calls;
        for (const auto& r : rows) {
            if (r.type == OptionType::put && r.strike < s0) puts.push_back(r);
            if (r.type == OptionType::call && r.strike > s0) calls.push_back(r);
        }
        // walk away from the spot
        std::sort(puts.begin(), puts.end(), [](const Row& a, const Row& b) { return a.strike > b.strike; });
        std::sort(calls.begin(), calls.end(), [](const Row& a, const Row& b) { return a.strike < b.strike; });
        auto take = [&](const std::vector<Row>& ladder, std::vector<Quote>& dst) {
            int zero_run = 0;
            for (const auto& r : ladder) {
                if (r.bid == 0.0) {
                    if (++zero_run == 2) break;
                    continue;
                }
                zero_run = 0;
                dst.push_back(Quote::from_bid_ask(OptionSpec(r.type, Exercise::american, r.strike, maturity), r.bid, r.ask));
            }
        };
        std::vector<Quote> kept;
        take(puts, kept);
        std::reverse(kept.begin(), kept.end());
        take(calls, kept);
        out.insert(out.end(), kept.begin(), kept.end());
    }
    return out;
}

std::vector<Quote> load_option_chain(const std::string& path, std::string_view valuation_date, double s0) {
    return parse_option_chain(read_file(path), valuation_date, s0);
}

YieldCurve parse_yield_curve(std::string_view csv) {
    const auto lines = lines_of(csv);
    if (lines.empty()) throw ValidationError("yield curve file is empty");
    expect_header(split(lines.front().second), {"tenor", "rate"}, lines.front().first);
    std::vector<Pillar> pillars;
    for (std::size_t n = 1; n < lines.size(); ++n) {
        const auto [line, text] = lines[n];
        const auto f = split(text);
        if (f.size() != 2) throw ParseError("expected 2 fields", line);
        pillars.push_back({to_double(f[0], line, "tenor"), to_double(f[1], line, "rate")});
    }
    if (pillars.empty()) throw ValidationError("yield curve has no pillars");
    try {
        return YieldCurve(std::move(pillars));
    } catch (const ConfigError& e) {
        throw ValidationError(e.what());
    }
}

YieldCurve load_yield_curve(const std::string& path) { return parse_yield_curve(read_file(path)); }

}  // namespace deam
