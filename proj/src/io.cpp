#include "posemark/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string_view>
#include <tuple>

#include "posemark/errors.hpp"

namespace posemark::io {

namespace {

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

double parse_real(const std::string& tok, std::size_t line, const char* what) {
    double v = 0.0;
    const char* end = tok.data() + tok.size();
    const auto [ptr, ec] = std::from_chars(tok.data(), end, v);
    if (ec != std::errc() || ptr != end) {
        throw ParseError(line, std::string("bad ") + what + " '" + tok + "'");
    }
    if (!std::isfinite(v)) throw ParseError(line, std::string(what) + " is not finite");
    return v;
}

long long parse_integer(const std::string& tok, std::size_t line, const char* what) {
    long long v = 0;
    const char* end = tok.data() + tok.size();
    const auto [ptr, ec] = std::from_chars(tok.data(), end, v);
    if (ec != std::errc() || ptr != end) {
        throw ParseError(line, std::string("bad ") + what + " '" + tok + "'");
    }
    return v;
}

struct Record {
    std::size_t line;
    std::vector<std::string> fields;
};

enum class HeaderPolicy { Required, Optional };

// Walks a file: magic line, optional directives, column line, records.
class RecordReader {
public:
    RecordReader(std::istream& in, const char* magic, HeaderPolicy policy)
        : in_(in), magic_(magic), policy_(policy) {}

    void read_magic() {
        std::string raw;
        std::size_t n = 0;
        while (take(raw, n)) {
            const std::string t = trim(raw);
            if (t.empty()) continue;
            if (t == magic_) {
                has_magic_ = true;
                return;
            }
            if (t.rfind("# posemark", 0) == 0) {
                throw ParseError(n, "unsupported file header '" + t + "', expected '" + magic_ + "'");
            }
            if (policy_ == HeaderPolicy::Required) throw ParseError(n, std::string("missing '") + magic_ + "' line");
            put_back(raw, n);
            return;
        }
        if (policy_ == HeaderPolicy::Required) throw ParseError(1, std::string("missing '") + magic_ + "' line");
    }

    /// With `expected` empty, returns whatever names the column line holds.
    /// Returns nothing for a headerless optional file.
    std::vector<std::string> read_columns(const std::vector<std::string>& expected) {
        std::string raw;
        std::size_t n = 0;
        while (take(raw, n)) {
            const std::string t = trim(raw);
            if (t.empty() || t[0] == '#') continue;
            columns_line_ = n;
            auto names = split_ws(t);
            if (expected.empty() || names == expected) return names;
            if (!has_magic_) {
                put_back(raw, n);
                return {};
            }
            throw ParseError(n, "unexpected column header '" + t + "'");
        }
        if (has_magic_) throw ParseError(line_ + 1, "missing column header");
        return {};
    }

    /// Consumes a "key value" line if the next line starts with `key`.
    bool directive(const std::string& key, std::string& value) {
        std::string raw;
        std::size_t n = 0;
        while (take(raw, n)) {
            const std::string t = trim(raw);
            if (t.empty() || t[0] == '#') continue;
            if (t.rfind(key + " ", 0) == 0) {
                value = trim(t.substr(key.size()));
                directive_line_ = n;
                return true;
            }
            put_back(raw, n);
            return false;
        }
        return false;
    }

    bool next(Record& rec) {
        std::string raw;
        std::size_t n = 0;
        while (take(raw, n)) {
            const std::string t = trim(raw);
            if (t.empty() || t[0] == '#') continue;
            rec.line = n;
            rec.fields = split_ws(t);
            return true;
        }
        return false;
    }

    std::size_t columns_line() const { return columns_line_; }
    std::size_t directive_line() const { return directive_line_; }

private:
    bool take(std::string& out, std::size_t& n) {
        if (pending_) {
            out = std::move(*pending_);
            n = pending_line_;
            pending_.reset();
            return true;
        }
        if (!std::getline(in_, out)) return false;
        n = ++line_;
        return true;
    }

    void put_back(std::string raw, std::size_t n) {
        pending_ = std::move(raw);
        pending_line_ = n;
    }

    std::istream& in_;
    const char* magic_;
    HeaderPolicy policy_;
    bool has_magic_ = false;
    std::size_t line_ = 0;
    std::size_t columns_line_ = 0;
    std::size_t directive_line_ = 0;
    std::optional<std::string> pending_;
    std::size_t pending_line_ = 0;
};

void expect_fields(const Record& rec, std::size_t n) {
    if (rec.fields.size() != n) {
        throw ParseError(rec.line, "expected " + std::to_string(n) + " fields, found " + std::to_string(rec.fields.size()));
    }
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string() + " for reading");
    return in;
}

// Runs a stream reader on a file and names the file in any record error.
template <class Read>
auto from_file(const std::filesystem::path& path, Read&& read) {
    auto in = open_in(path);
    try {
        return read(in);
    } catch (const RangeError& e) {
        throw RangeError(path.string(), e.line(), e.detail());
    } catch (const ParseError& e) {
        throw ParseError(path.string(), e.line(), e.detail());
    } catch (const OrderingError& e) {
        throw OrderingError(path.string() + ": " + e.what());
    }
}

template <class Fn>
void write_file(const std::filesystem::path& path, Fn&& fn) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    fn(out);
    out.flush();
    if (!out) throw IoError("failed writing " + path.string());
}

const std::vector<std::string> kDetectionColumns = {"timestamp", "camera_id", "marker_id", "tx", "ty", "tz",
                                                    "rx",        "ry",        "rz"};
const std::vector<std::string> kRssiColumns = {"timestamp", "transmitter", "sensor", "rssi"};
const std::vector<std::string> kMarkerColumns = {"id", "x", "y", "z", "rx", "ry", "rz", "edge"};
const std::vector<std::string> kTrajectoryColumns = {"timestamp", "x", "y", "z", "rx", "ry", "rz"};
const std::vector<std::string> kPathColumns = {"x0", "y0", "z0", "x1", "y1", "z1", "t0", "t1"};

void write_row(std::ostream& out, std::initializer_list<std::string> fields) {
    bool first = true;
    for (const auto& f : fields) {
        if (!first) out << ' ';
        out << f;
        first = false;
    }
    out << '\n';
}

void write_header(std::ostream& out, const char* magic, const std::vector<std::string>& columns) {
    out << magic << '\n';
    for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? " " : "") << columns[i];
    out << '\n';
}

std::string fr(double v) { return format_real(v); }

Vec3 read_vec(const Record& rec, std::size_t at, const char* what) {
    return {parse_real(rec.fields[at], rec.line, what), parse_real(rec.fields[at + 1], rec.line, what),
            parse_real(rec.fields[at + 2], rec.line, what)};
}

void check_rssi_fields(const std::string& tx, const std::string& sensor, double rssi, std::size_t line) {
    if (!is_mac_address(tx)) throw ParseError(line, "transmitter '" + tx + "' is not a MAC address");
    if (!is_mac_address(sensor)) throw ParseError(line, "sensor '" + sensor + "' is not a MAC address");
    if (rssi < -120.0 || rssi > 0.0) throw RangeError(line, "RSSI " + format_real(rssi) + " dBm outside [-120, 0]");
}

}  // namespace

std::string format_real(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

// ---------------------------------------------------------------- detections

std::vector<MarkerObservation> read_detections(std::istream& in) {
    RecordReader reader(in, kDetectionsMagic, HeaderPolicy::Optional);
    reader.read_magic();
    reader.read_columns(kDetectionColumns);
    std::vector<MarkerObservation> out;
    std::map<int, double> last_time;
    Record rec;
    while (reader.next(rec)) {
        expect_fields(rec, kDetectionColumns.size());
        MarkerObservation obs;
        obs.timestamp = parse_real(rec.fields[0], rec.line, "timestamp");
        const long long cam = parse_integer(rec.fields[1], rec.line, "camera id");
        if (cam < 0 || cam > 255) throw RangeError(rec.line, "camera id out of range");
        obs.camera_id = static_cast<int>(cam);
        const long long marker = parse_integer(rec.fields[2], rec.line, "marker id");
        if (marker < 0 || marker > 1'000'000) throw RangeError(rec.line, "marker id out of range");
        obs.marker_id = static_cast<int>(marker);
        obs.position = read_vec(rec, 3, "translation");
        obs.rotation = read_vec(rec, 6, "rotation");

        const auto [it, inserted] = last_time.try_emplace(obs.camera_id, obs.timestamp);
        if (!inserted) {
            if (obs.timestamp < it->second) {
                throw OrderingError("line " + std::to_string(rec.line) + ": timestamp goes backwards for camera " +
                                    std::to_string(obs.camera_id));
            }
            it->second = obs.timestamp;
        }
        out.push_back(obs);
    }
    return out;
}

std::vector<MarkerObservation> read_detections(const std::filesystem::path& path) {
    return from_file(path, [](std::istream& in) { return read_detections(in); });
}

void write_detections(std::ostream& out, const std::vector<MarkerObservation>& obs) {
    write_header(out, kDetectionsMagic, kDetectionColumns);
    for (const auto& o : obs) {
        write_row(out, {fr(o.timestamp), std::to_string(o.camera_id), std::to_string(o.marker_id), fr(o.position.x()),
                        fr(o.position.y()), fr(o.position.z()), fr(o.rotation.x()), fr(o.rotation.y()),
                        fr(o.rotation.z())});
    }
}

void write_detections(const std::filesystem::path& path, const std::vector<MarkerObservation>& obs) {
    write_file(path, [&](std::ostream& out) { write_detections(out, obs); });
}

// ---------------------------------------------------------------------- rssi

bool is_mac_address(const std::string& s) {
    if (s.size() != 17) return false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i % 3 == 2) {
            if (s[i] != ':') return false;
        } else if (!std::isxdigit(static_cast<unsigned char>(s[i]))) {
            return false;
        }
    }
    return true;
}

std::vector<RssiSample> read_rssi_log(std::istream& in) {
    RecordReader reader(in, kRssiMagic, HeaderPolicy::Optional);
    reader.read_magic();
    reader.read_columns(kRssiColumns);
    std::vector<RssiSample> out;
    std::map<std::pair<std::string, std::string>, double> last_time;
    Record rec;
    while (reader.next(rec)) {
        expect_fields(rec, kRssiColumns.size());
        RssiSample s;
        s.timestamp = parse_real(rec.fields[0], rec.line, "timestamp");
        s.transmitter = rec.fields[1];
        s.sensor = rec.fields[2];
        s.rssi = parse_real(rec.fields[3], rec.line, "RSSI");
        check_rssi_fields(s.transmitter, s.sensor, s.rssi, rec.line);

        const auto [it, inserted] = last_time.try_emplace({s.transmitter, s.sensor}, s.timestamp);
        if (!inserted) {
            if (s.timestamp < it->second) {
                throw OrderingError("line " + std::to_string(rec.line) + ": timestamp goes backwards for stream " +
                                    s.transmitter + " -> " + s.sensor);
            }
            it->second = s.timestamp;
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<RssiSample> read_rssi_log(const std::filesystem::path& path) {
    return from_file(path, [](std::istream& in) { return read_rssi_log(in); });
}

void write_rssi_log(std::ostream& out, const std::vector<RssiSample>& samples) {
    write_header(out, kRssiMagic, kRssiColumns);
    for (const auto& s : samples) write_row(out, {fr(s.timestamp), s.transmitter, s.sensor, fr(s.rssi)});
}

void write_rssi_log(const std::filesystem::path& path, const std::vector<RssiSample>& samples) {
    write_file(path, [&](std::ostream& out) { write_rssi_log(out, samples); });
}

// ----------------------------------------------------------------- annotated

const std::vector<std::string>& annotated_columns() {
    static const std::vector<std::string> cols = {"timestamp_s", "transmitter", "sensor", "rssi_dbm", "x_m", "y_m",
                                                  "z_m",         "r11",         "r12",    "r13",      "r21", "r22",
                                                  "r23",         "r31",         "r32",    "r33"};
    return cols;
}

std::vector<AnnotatedSample> read_annotated(std::istream& in) {
    RecordReader reader(in, kAnnotatedMagic, HeaderPolicy::Required);
    reader.read_magic();
    const auto header = reader.read_columns({});
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (!index.emplace(header[i], i).second) throw ParseError(reader.columns_line(), "duplicate column '" + header[i] + "'");
    }
    std::vector<std::size_t> at;
    for (const auto& name : annotated_columns()) {
        const auto it = index.find(name);
        if (it == index.end()) throw ParseError(reader.columns_line(), "missing column '" + name + "'");
        at.push_back(it->second);
    }

    std::vector<AnnotatedSample> out;
    Record rec;
    while (reader.next(rec)) {
        expect_fields(rec, header.size());
        auto field = [&](std::size_t col) -> const std::string& { return rec.fields[at[col]]; };
        AnnotatedSample a;
        a.sample.timestamp = parse_real(field(0), rec.line, "timestamp");
        a.sample.transmitter = field(1);
        a.sample.sensor = field(2);
        a.sample.rssi = parse_real(field(3), rec.line, "RSSI");
        check_rssi_fields(a.sample.transmitter, a.sample.sensor, a.sample.rssi, rec.line);
        for (int i = 0; i < 3; ++i) a.position[i] = parse_real(field(4 + i), rec.line, "position");
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) a.rotation(r, c) = parse_real(field(7 + 3 * r + c), rec.line, "rotation entry");
        }
        if (!is_rotation(a.rotation, 1e-6)) throw ParseError(rec.line, "rotation matrix is not orthonormal");
        out.push_back(std::move(a));
    }
    return out;
}

std::vector<AnnotatedSample> read_annotated(const std::filesystem::path& path) {
    return from_file(path, [](std::istream& in) { return read_annotated(in); });
}

void write_annotated(std::ostream& out, const std::vector<AnnotatedSample>& samples) {
    out << kAnnotatedMagic << '\n';
    out << "# units: timestamp s, rssi dBm, position m in the world frame, r* row-major world-from-bundle rotation\n";
    const auto& cols = annotated_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? " " : "") << cols[i];
    out << '\n';
    for (const auto& a : samples) {
        const auto& R = a.rotation;
        write_row(out, {fr(a.sample.timestamp), a.sample.transmitter, a.sample.sensor, fr(a.sample.rssi),
                        fr(a.position.x()), fr(a.position.y()), fr(a.position.z()), fr(R(0, 0)), fr(R(0, 1)),
                        fr(R(0, 2)), fr(R(1, 0)), fr(R(1, 1)), fr(R(1, 2)), fr(R(2, 0)), fr(R(2, 1)), fr(R(2, 2))});
    }
}

void write_annotated(const std::filesystem::path& path, const std::vector<AnnotatedSample>& samples) {
    write_file(path, [&](std::ostream& out) { write_annotated(out, samples); });
}

// --------------------------------------------------------------- marker map

MarkerMapFile read_marker_map(std::istream& in) {
    RecordReader reader(in, kMarkersMagic, HeaderPolicy::Required);
    reader.read_magic();
    MarkerMapFile map;
    std::string value;
    for (;;) {
        if (reader.directive("frame", value)) {
            map.frame = value;
        } else if (reader.directive("units", value)) {
            if (value != "meters radians") {
                throw ParseError(reader.directive_line(), "unsupported units '" + value + "'");
            }
            map.units = value;
        } else {
            break;
        }
    }
    reader.read_columns(kMarkerColumns);
    Record rec;
    std::set<int> seen;
    while (reader.next(rec)) {
        expect_fields(rec, kMarkerColumns.size());
        MarkerSpec m;
        m.id = static_cast<int>(parse_integer(rec.fields[0], rec.line, "marker id"));
        m.position = read_vec(rec, 1, "position");
        m.rotation = read_vec(rec, 4, "rotation");
        m.edge_length = parse_real(rec.fields[7], rec.line, "edge length");
        if (!(m.edge_length > 0.0)) throw RangeError(rec.line, "edge length must be positive");
        if (!seen.insert(m.id).second) throw ParseError(rec.line, "duplicate marker id " + std::to_string(m.id));

        const RotationMatrix R = rodrigues(m.rotation);
        bool axis_aligned = true;
        for (int i = 0; i < 9; ++i) {
            const double v = R.data()[i];
            axis_aligned = axis_aligned && std::abs(v - std::round(v)) < 1e-6;
        }
        if (!axis_aligned) {
            map.notes.push_back("marker " + std::to_string(m.id) + " (line " + std::to_string(rec.line) +
                                "): orientation is not a multiple of pi/2");
        }
        map.markers.push_back(m);
    }
    return map;
}

MarkerMapFile read_marker_map(const std::filesystem::path& path) {
    return from_file(path, [](std::istream& in) { return read_marker_map(in); });
}

void write_marker_map(std::ostream& out, const MarkerMapFile& map) {
    out << kMarkersMagic << '\n';
    out << "frame " << map.frame << '\n';
    out << "units " << map.units << '\n';
    for (std::size_t i = 0; i < kMarkerColumns.size(); ++i) out << (i ? " " : "") << kMarkerColumns[i];
    out << '\n';
    for (const auto& m : map.markers) {
        write_row(out, {std::to_string(m.id), fr(m.position.x()), fr(m.position.y()), fr(m.position.z()),
                        fr(m.rotation.x()), fr(m.rotation.y()), fr(m.rotation.z()), fr(m.edge_length)});
    }
}

void write_marker_map(const std::filesystem::path& path, const MarkerMapFile& map) {
    write_file(path, [&](std::ostream& out) { write_marker_map(out, map); });
}

// ---------------------------------------------------------------- trajectory

std::vector<FinalPose> read_trajectory(std::istream& in) {
    RecordReader reader(in, kTrajectoryMagic, HeaderPolicy::Required);
    reader.read_magic();
    reader.read_columns(kTrajectoryColumns);
    std::vector<FinalPose> out;
    Record rec;
    while (reader.next(rec)) {
        expect_fields(rec, kTrajectoryColumns.size());
        FinalPose p;
        p.timestamp = parse_real(rec.fields[0], rec.line, "timestamp");
        p.position = read_vec(rec, 1, "position");
        p.rotation = read_vec(rec, 4, "rotation");
        if (!out.empty() && !(p.timestamp > out.back().timestamp)) {
            throw OrderingError("line " + std::to_string(rec.line) + ": trajectory timestamps must strictly increase");
        }
        out.push_back(p);
    }
    return out;
}

std::vector<FinalPose> read_trajectory(const std::filesystem::path& path) {
    return from_file(path, [](std::istream& in) { return read_trajectory(in); });
}

void write_trajectory(std::ostream& out, const std::vector<FinalPose>& poses) {
    write_header(out, kTrajectoryMagic, kTrajectoryColumns);
    for (const auto& p : poses) {
        write_row(out, {fr(p.timestamp), fr(p.position.x()), fr(p.position.y()), fr(p.position.z()),
                        fr(p.rotation.x()), fr(p.rotation.y()), fr(p.rotation.z())});
    }
}

void write_trajectory(const std::filesystem::path& path, const std::vector<FinalPose>& poses) {
    write_file(path, [&](std::ostream& out) { write_trajectory(out, poses); });
}

// ---------------------------------------------------------------------- path

std::vector<PathSegment> read_path(std::istream& in) {
    RecordReader reader(in, kPathMagic, HeaderPolicy::Required);
    reader.read_magic();
    reader.read_columns(kPathColumns);
    std::vector<PathSegment> out;
    Record rec;
    while (reader.next(rec)) {
        expect_fields(rec, kPathColumns.size());
        PathSegment seg;
        seg.start = read_vec(rec, 0, "start");
        seg.end = read_vec(rec, 3, "end");
        if (rec.fields[6] != "-") seg.start_time = parse_real(rec.fields[6], rec.line, "start time");
        if (rec.fields[7] != "-") seg.end_time = parse_real(rec.fields[7], rec.line, "end time");
        try {
            seg.validate();
        } catch (const InvalidParameter& e) {
            throw ParseError(rec.line, e.what());
        }
        out.push_back(seg);
    }
    return out;
}

std::vector<PathSegment> read_path(const std::filesystem::path& path) {
    return from_file(path, [](std::istream& in) { return read_path(in); });
}

void write_path(std::ostream& out, const std::vector<PathSegment>& segments) {
    write_header(out, kPathMagic, kPathColumns);
    for (const auto& s : segments) {
        write_row(out, {fr(s.start.x()), fr(s.start.y()), fr(s.start.z()), fr(s.end.x()), fr(s.end.y()),
                        fr(s.end.z()), s.start_time ? fr(*s.start_time) : "-", s.end_time ? fr(*s.end_time) : "-"});
    }
}

void write_path(const std::filesystem::path& path, const std::vector<PathSegment>& segments) {
    write_file(path, [&](std::ostream& out) { write_path(out, segments); });
}

// --------------------------------------------------------------- run config

PipelineParams RunConfig::pipeline() const {
    PipelineParams p;
    p.frame_window = frame_window;
    p.pruning = pruning;
    p.filter = filter;
    return p;
}

void RunConfig::check_inputs() const {
    for (const auto& f : {detections, rssi, markers}) {
        if (f.empty()) throw InvalidParameter("missing input file setting");
        if (!std::filesystem::exists(f)) throw InvalidParameter("input file " + f.string() + " does not exist");
    }
}

void apply_config_value(RunConfig& c, const std::string& key, const std::string& value, std::size_t line) {
    auto real = [&] { return parse_real(value, line, key.c_str()); };
    auto count = [&](int min) {
        const long long v = parse_integer(value, line, key.c_str());
        if (v < min || v > 1'000'000) throw RangeError(line, key + " out of range");
        return static_cast<int>(v);
    };
    auto filter = [&]() -> FilterParams& {
        if (!c.filter) c.filter = FilterParams{};
        return *c.filter;
    };

    if (key == "frame_window") {
        c.frame_window = count(1);
    } else if (key == "closest") {
        c.pruning.closest_count = count(0);
    } else if (key == "survivors") {
        c.pruning.survivors = count(0);
    } else if (key == "filter") {
        if (value == "on") {
            filter();
        } else if (value == "off") {
            c.filter.reset();
        } else {
            throw ParseError(line, "filter must be 'on' or 'off'");
        }
    } else if (key == "q") {
        filter().measurement_noise = real();
    } else if (key == "r") {
        filter().process_noise = real();
    } else if (key == "initial_covariance") {
        filter().initial_covariance = real();
    } else if (key == "sync") {
        if (value == "auto") {
            c.sync = SyncMode::Auto;
        } else if (value == "manual") {
            c.sync = SyncMode::Manual;
        } else {
            throw ParseError(line, "sync must be 'auto' or 'manual'");
        }
    } else if (key == "sync_at") {
        c.sync_at = real();
        c.sync = SyncMode::Manual;
    } else if (key == "video_release") {
        c.video_release = real();
    } else if (key == "band_low") {
        c.cover.band_low = real();
    } else if (key == "band_high") {
        c.cover.band_high = real();
    } else if (key == "window") {
        c.cover.window = real();
    } else if (key == "threshold") {
        c.cover.threshold = real();
    } else if (key == "detections") {
        c.detections = value;
    } else if (key == "rssi") {
        c.rssi = value;
    } else if (key == "markers") {
        c.markers = value;
    } else if (key == "output") {
        c.output = value;
    } else if (key == "trajectory_output") {
        c.trajectory_output = value;
    } else if (key == "seed") {
        c.seed = static_cast<std::uint64_t>(count(0));
    } else if (key.rfind("camera.", 0) == 0 && key.size() > 13 && key.substr(key.size() - 6) == ".mount") {
        const std::string id = key.substr(7, key.size() - 13);
        const auto fields = split_ws(value);
        if (fields.size() != 3) throw ParseError(line, key + " needs three rotation-vector components");
        Record rec{line, fields};
        c.rig.mounts[static_cast<int>(parse_integer(id, line, "camera id"))] = read_vec(rec, 0, "mount");
    } else {
        throw ParseError(line, "unknown configuration key '" + key + "'");
    }
}

RunConfig read_run_config(std::istream& in, RunConfig base) {
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::string t = trim(raw);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ParseError(line, "expected 'key = value'");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty() || value.empty()) throw ParseError(line, "expected 'key = value'");
        apply_config_value(base, key, value, line);
    }
    if (base.filter) base.filter->validate();
    return base;
}

RunConfig read_run_config(const std::filesystem::path& path, RunConfig base) {
    const RunConfig before = base;
    RunConfig c = from_file(path, [&](std::istream& in) { return read_run_config(in, std::move(base)); });
    // file paths named in the config are relative to the config itself
    const auto dir = path.parent_path();
    auto rebase = [&](std::filesystem::path& p, const std::filesystem::path& old) {
        if (p != old && p.is_relative()) p = dir / p;
    };
    rebase(c.detections, before.detections);
    rebase(c.rssi, before.rssi);
    rebase(c.markers, before.markers);
    rebase(c.output, before.output);
    rebase(c.trajectory_output, before.trajectory_output);
    return c;
}

PlotConfig read_plot_config(std::istream& in) {
    PlotConfig pc;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::string t = trim(raw);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ParseError(line, "expected 'key = value'");
        const std::string key = trim(t.substr(0, eq));
        const double v = parse_real(trim(t.substr(eq + 1)), line, key.c_str());
        if (key == "pixels_per_meter") {
            if (!(v > 0.0)) throw RangeError(line, "pixels_per_meter must be positive");
            pc.pixels_per_meter = v;
        } else if (key == "margin") {
            pc.margin = v;
        } else if (key == "origin_x") {
            pc.origin_x = v;
        } else if (key == "origin_y") {
            pc.origin_y = v;
        } else if (key == "width_m") {
            pc.width_m = v;
        } else if (key == "depth_m") {
            pc.depth_m = v;
        } else {
            throw ParseError(line, "unknown plot key '" + key + "'");
        }
    }
    return pc;
}

PlotConfig read_plot_config(const std::filesystem::path& path) {
    return from_file(path, [](std::istream& in) { return read_plot_config(in); });
}

}  // namespace posemark::io
