#include "hoc/ingest.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <random>
#include <string_view>

#include "hoc/errors.hpp"

namespace hoc {

namespace {

double parse_field_double(std::string_view field, const std::string& file,
                          std::size_t line, const char* what) {
    double v{};
    const char* end = field.data() + field.size();
    const auto [p, ec] = std::from_chars(field.data(), end, v);
    if (ec != std::errc{} || p != end || !std::isfinite(v))
        throw parse_error(file, line,
                          std::string("invalid ") + what + " '" + std::string(field) + "'");
    return v;
}

std::string_view format_double(double v, std::array<char, 40>& buf) {
    const auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return {buf.data(), static_cast<std::size_t>(p - buf.data())};
}

} // namespace

std::vector<RawRecord> load_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw io_error("cannot open " + path.string());

    const std::string name = path.string();
    std::vector<RawRecord> out;
    std::string line;
    std::size_t lineno = 0;
    bool saw_header = false;

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (!saw_header) {
            saw_header = true;
            continue;
        }
        if (line.empty())
            continue;

        std::array<std::string_view, 4> fields;
        std::size_t nfields = 0;
        std::string_view rest = line;
        while (true) {
            const auto pos = rest.find(',');
            const std::string_view f =
                pos == std::string_view::npos ? rest : rest.substr(0, pos);
            if (nfields < fields.size())
                fields[nfields] = f;
            ++nfields;
            if (pos == std::string_view::npos)
                break;
            rest.remove_prefix(pos + 1);
        }
        if (nfields != 4)
            throw parse_error(name, lineno,
                              "expected 4 fields, got " + std::to_string(nfields));
        if (fields[0].empty())
            throw parse_error(name, lineno, "empty id field");

        out.push_back({std::string(fields[0]),
                       parse_field_double(fields[1], name, lineno, "lon"),
                       parse_field_double(fields[2], name, lineno, "lat"),
                       parse_field_double(fields[3], name, lineno, "timestamp")});
    }
    if (!saw_header)
        throw parse_error(name, 1, "missing header row");
    return out;
}

void write_csv(const std::filesystem::path& path, std::span<const STObject> objects) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw io_error("cannot write " + path.string());

    out << "id,lon,lat,timestamp\n";
    std::array<char, 40> buf;
    for (const auto& o : objects) {
        out << o.id << ',' << format_double(o.x, buf) << ',' << format_double(o.y, buf)
            << ',' << format_double(o.t, buf) << '\n';
    }
    if (!out)
        throw io_error("write failed for " + path.string());
}

namespace {

struct AxisMap {
    double in_lo = 0, out_lo = 0, out_hi = 0, ratio = 0;
    double in_hi = 0;
    bool degenerate = false;

    double apply(double v) const {
        if (degenerate)
            return std::midpoint(out_lo, out_hi);
        if (v == in_lo)
            return out_lo;
        if (v == in_hi)
            return out_hi;
        return std::clamp(out_lo + (v - in_lo) * ratio, out_lo, out_hi);
    }
};

AxisMap make_axis(double in_lo, double in_hi, double out_lo, double out_hi,
                  const char* name, std::vector<std::string>* warnings) {
    AxisMap m{in_lo, out_lo, out_hi, 0.0, in_hi, in_lo == in_hi};
    if (m.degenerate) {
        if (warnings)
            warnings->push_back(std::string(name) +
                                " axis has zero extent; mapping all values to the "
                                "domain midpoint");
    } else {
        m.ratio = (out_hi - out_lo) / (in_hi - in_lo);
    }
    return m;
}

} // namespace

std::vector<STObject> scale_to_domain(std::span<const RawRecord> records,
                                      const IndexConfig& cfg,
                                      std::vector<std::string>* warnings) {
    cfg.validate();
    if (records.empty())
        throw domain_error("scale_to_domain requires at least one record");

    double lon_lo = records[0].lon, lon_hi = records[0].lon;
    double lat_lo = records[0].lat, lat_hi = records[0].lat;
    double ts_lo = records[0].timestamp, ts_hi = records[0].timestamp;
    for (const auto& r : records) {
        lon_lo = std::min(lon_lo, r.lon);
        lon_hi = std::max(lon_hi, r.lon);
        lat_lo = std::min(lat_lo, r.lat);
        lat_hi = std::max(lat_hi, r.lat);
        ts_lo = std::min(ts_lo, r.timestamp);
        ts_hi = std::max(ts_hi, r.timestamp);
    }

    const AxisMap mx = make_axis(lon_lo, lon_hi, cfg.x_lo, cfg.x_hi, "lon", warnings);
    const AxisMap my = make_axis(lat_lo, lat_hi, cfg.y_lo, cfg.y_hi, "lat", warnings);
    const AxisMap mt =
        make_axis(ts_lo, ts_hi, cfg.t_lo, cfg.t_hi, "timestamp", warnings);

    std::vector<STObject> out;
    out.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        std::uint64_t id{};
        const char* end = r.id.data() + r.id.size();
        const auto [p, ec] = std::from_chars(r.id.data(), end, id);
        if (ec != std::errc{} || p != end)
            throw domain_error("record " + std::to_string(i + 1) + ": id '" + r.id +
                               "' is not an unsigned integer");
        out.push_back({id, mx.apply(r.lon), my.apply(r.lat), mt.apply(r.timestamp)});
    }
    return out;
}

namespace {

// 53-bit uniform in [0, 1) from raw mt19937_64 output; avoids the
// implementation-defined std::uniform_real_distribution so streams are
// reproducible everywhere.
inline double u01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace

std::vector<STObject> gen_uniform(std::size_t n, std::uint64_t seed,
                                  const IndexConfig& cfg) {
    cfg.validate();
    std::mt19937_64 rng(seed);
    std::vector<STObject> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x =
            std::clamp(cfg.x_lo + u01(rng) * (cfg.x_hi - cfg.x_lo), cfg.x_lo, cfg.x_hi);
        const double y =
            std::clamp(cfg.y_lo + u01(rng) * (cfg.y_hi - cfg.y_lo), cfg.y_lo, cfg.y_hi);
        const double t =
            std::clamp(cfg.t_lo + u01(rng) * (cfg.t_hi - cfg.t_lo), cfg.t_lo, cfg.t_hi);
        out.push_back({i, x, y, t});
    }
    return out;
}

std::vector<STObject> gen_clustered(std::size_t n, std::size_t clusters, double sigma,
                                    std::uint64_t seed, const IndexConfig& cfg) {
    cfg.validate();
    if (clusters < 1)
        throw domain_error("clusters must be >= 1");
    if (!(sigma > 0) || !std::isfinite(sigma))
        throw domain_error("sigma must be positive and finite");

    std::mt19937_64 rng(seed);
    struct Center {
        double x, y, t;
    };
    std::vector<Center> centers;
    centers.reserve(clusters);
    for (std::size_t c = 0; c < clusters; ++c) {
        centers.push_back({cfg.x_lo + u01(rng) * (cfg.x_hi - cfg.x_lo),
                           cfg.y_lo + u01(rng) * (cfg.y_hi - cfg.y_lo),
                           cfg.t_lo + u01(rng) * (cfg.t_hi - cfg.t_lo)});
    }

    // Box-Muller over the same uniform stream; the second deviate of each
    // pair is consumed before a new pair is drawn.
    double spare = 0;
    bool has_spare = false;
    auto gauss = [&] {
        if (has_spare) {
            has_spare = false;
            return spare;
        }
        const double u1 = 1.0 - u01(rng); // (0, 1], keeps log() finite
        const double u2 = u01(rng);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare = r * std::sin(a);
        has_spare = true;
        return r * std::cos(a);
    };

    std::vector<STObject> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Center& c = centers[rng() % clusters];
        out.push_back({i, std::clamp(c.x + sigma * gauss(), cfg.x_lo, cfg.x_hi),
                       std::clamp(c.y + sigma * gauss(), cfg.y_lo, cfg.y_hi),
                       std::clamp(c.t + sigma * gauss(), cfg.t_lo, cfg.t_hi)});
    }
    return out;
}

} // namespace hoc
