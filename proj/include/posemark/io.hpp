#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "posemark/evaluation.hpp"
#include "posemark/geometry.hpp"
#include "posemark/pipeline.hpp"
#include "posemark/smoothing.hpp"
#include "posemark/sync.hpp"

namespace posemark::io {

// Every file starts with a magic line naming its kind and version, then a
// column header, then whitespace-delimited records. Lines starting with '#'
// after the magic line are comments. Detections and RSSI logs may omit the
// magic and header lines since external recorders produce them.
inline constexpr const char* kDetectionsMagic = "# posemark detections v1";
inline constexpr const char* kRssiMagic = "# posemark rssi v1";
inline constexpr const char* kAnnotatedMagic = "# posemark annotated v1";
inline constexpr const char* kMarkersMagic = "# posemark markers v1";
inline constexpr const char* kTrajectoryMagic = "# posemark trajectory v1";
inline constexpr const char* kPathMagic = "# posemark path v1";

/// Shortest decimal text that parses back to the same double.
std::string format_real(double v);

/// Throws ParseError for a malformed or invalid record, OrderingError for
/// per-camera timestamps that go backwards; both name the line.
std::vector<MarkerObservation> read_detections(std::istream& in);
std::vector<MarkerObservation> read_detections(const std::filesystem::path& path);
void write_detections(std::ostream& out, const std::vector<MarkerObservation>& obs);
void write_detections(const std::filesystem::path& path, const std::vector<MarkerObservation>& obs);

bool is_mac_address(const std::string& s);

/// RSSI outside [-120, 0] raises RangeError. Timestamps must not decrease
/// within a (transmitter, sensor) stream.
std::vector<RssiSample> read_rssi_log(std::istream& in);
std::vector<RssiSample> read_rssi_log(const std::filesystem::path& path);
void write_rssi_log(std::ostream& out, const std::vector<RssiSample>& samples);
void write_rssi_log(const std::filesystem::path& path, const std::vector<RssiSample>& samples);

/// Column names of the annotated format, in written order.
const std::vector<std::string>& annotated_columns();

/// Columns are located by name, so reordered or extended files are accepted.
std::vector<AnnotatedSample> read_annotated(std::istream& in);
std::vector<AnnotatedSample> read_annotated(const std::filesystem::path& path);
void write_annotated(std::ostream& out, const std::vector<AnnotatedSample>& samples);
void write_annotated(const std::filesystem::path& path, const std::vector<AnnotatedSample>& samples);

struct MarkerMapFile {
    std::string frame = "world";
    std::string units = "meters radians";
    std::vector<MarkerSpec> markers;
    /// Markers whose orientation is not a multiple of pi/2 about the axes.
    std::vector<std::string> notes;
};

MarkerMapFile read_marker_map(std::istream& in);
MarkerMapFile read_marker_map(const std::filesystem::path& path);
void write_marker_map(std::ostream& out, const MarkerMapFile& map);
void write_marker_map(const std::filesystem::path& path, const MarkerMapFile& map);

/// Final poses; timestamps must strictly increase.
std::vector<FinalPose> read_trajectory(std::istream& in);
std::vector<FinalPose> read_trajectory(const std::filesystem::path& path);
void write_trajectory(std::ostream& out, const std::vector<FinalPose>& poses);
void write_trajectory(const std::filesystem::path& path, const std::vector<FinalPose>& poses);

/// One segment per line: x0 y0 z0 x1 y1 z1 t0 t1, with '-' for absent times.
std::vector<PathSegment> read_path(std::istream& in);
std::vector<PathSegment> read_path(const std::filesystem::path& path);
void write_path(std::ostream& out, const std::vector<PathSegment>& segments);
void write_path(const std::filesystem::path& path, const std::vector<PathSegment>& segments);

enum class SyncMode { Auto, Manual };

/// Settings of an annotation run, read from `key = value` text.
struct RunConfig {
    int frame_window = 15;
    PruningParams pruning;
    std::optional<FilterParams> filter = FilterParams{};
    SyncMode sync = SyncMode::Auto;
    std::optional<double> sync_at;  ///< RSSI-clock release for manual sync
    double video_release = 0.0;     ///< video-clock release
    CoverDetectParams cover;
    CameraRig rig = CameraRig::back_to_back();
    std::filesystem::path detections;
    std::filesystem::path rssi;
    std::filesystem::path markers;
    std::filesystem::path output;
    std::filesystem::path trajectory_output;
    std::uint64_t seed = 1;

    PipelineParams pipeline() const;
    /// Throws InvalidParameter if a referenced input file is missing.
    void check_inputs() const;
};

/// Applies `key = value` lines on top of `base`. Unknown keys and bad values
/// raise ParseError.
RunConfig read_run_config(std::istream& in, RunConfig base = {});
/// Relative file paths set by the file are taken relative to its directory.
RunConfig read_run_config(const std::filesystem::path& path, RunConfig base = {});

/// Sets one configuration key; `line` is used in diagnostics.
void apply_config_value(RunConfig& config, const std::string& key, const std::string& value, std::size_t line = 0);

/// Map drawing settings: meters to pixels.
struct PlotConfig {
    double pixels_per_meter = 40.0;
    double margin = 20.0;
    double origin_x = 0.0;  ///< world meters at the left edge
    double origin_y = 0.0;  ///< world meters at the bottom edge
    double width_m = 20.66;
    double depth_m = 17.64;
};

PlotConfig read_plot_config(std::istream& in);
PlotConfig read_plot_config(const std::filesystem::path& path);

}  // namespace posemark::io
