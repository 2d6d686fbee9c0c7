#include "corpus.hpp"

#include <sstream>

#include "posemark/errors.hpp"
#include "posemark/io.hpp"

namespace corpus {

namespace {

const std::string kDet = std::string(posemark::io::kDetectionsMagic) +
                         "\ntimestamp camera_id marker_id tx ty tz rx ry rz\n";
const std::string kRssi = std::string(posemark::io::kRssiMagic) + "\ntimestamp transmitter sensor rssi\n";
const std::string kAnnHead = std::string(posemark::io::kAnnotatedMagic) +
                             "\ntimestamp_s transmitter sensor rssi_dbm x_m y_m z_m r11 r12 r13 r21 r22 r23 r31 r32 r33\n";
const std::string kGoodDet = "0.5 0 3 1 2 3 0.1 0.2 0.3\n";
const std::string kGoodRssi = "1618243.5 AA:BB:CC:DD:EE:FF 11:22:33:44:55:66 -71\n";
const std::string kGoodAnn = "1.5 AA:BB:CC:DD:EE:FF 11:22:33:44:55:66 -71 1 2 3 1 0 0 0 1 0 0 0 1\n";

std::vector<BadInput> build() {
    using F = Format;
    return {
        {F::Detections, "eight fields", "0.0 0 1 1 2 3 0.1 0.2\n", 1},
        {F::Detections, "ten fields", kDet + kGoodDet + "0.6 0 3 1 2 3 0.1 0.2 0.3 9\n", 4},
        {F::Detections, "text timestamp", kDet + "abc 0 3 1 2 3 0.1 0.2 0.3\n", 3},
        {F::Detections, "nan translation", kDet + "0.5 0 3 nan 2 3 0.1 0.2 0.3\n", 3},
        {F::Detections, "fractional camera id", kDet + "0.5 1.5 3 1 2 3 0.1 0.2 0.3\n", 3},
        {F::Detections, "negative marker id", kDet + "0.5 0 -3 1 2 3 0.1 0.2 0.3\n", 3},
        {F::Detections, "time goes backwards", kDet + kGoodDet + "# comment\n0.4 0 3 1 2 3 0.1 0.2 0.3\n", 5},
        {F::Detections, "foreign magic", std::string(posemark::io::kRssiMagic) + "\n" + kGoodDet, 1},
        {F::Detections, "wrong column header", std::string(posemark::io::kDetectionsMagic) + "\nt cam id x y z a b c\n", 2},
        {F::Detections, "trailing garbage", kDet + "0.5 0 3 1 2 3 0.1 0.2 0.3x\n", 3},

        {F::Rssi, "three fields", "1.0 AA:BB:CC:DD:EE:FF -71\n", 1},
        {F::Rssi, "positive rssi", kRssi + "1.0 AA:BB:CC:DD:EE:FF 11:22:33:44:55:66 10\n", 3},
        {F::Rssi, "too weak", kRssi + kGoodRssi + "1618244 AA:BB:CC:DD:EE:FF 11:22:33:44:55:66 -121\n", 4},
        {F::Rssi, "short transmitter", kRssi + "1.0 AA:BB:CC:DD:EE 11:22:33:44:55:66 -71\n", 3},
        {F::Rssi, "dashes in sensor", kRssi + "1.0 AA:BB:CC:DD:EE:FF 11-22-33-44-55-66 -71\n", 3},
        {F::Rssi, "non-hex digit", kRssi + "1.0 AA:BB:CC:DD:EE:GG 11:22:33:44:55:66 -71\n", 3},
        {F::Rssi, "text rssi", kRssi + "1.0 AA:BB:CC:DD:EE:FF 11:22:33:44:55:66 strong\n", 3},
        {F::Rssi, "stream goes backwards", kRssi + kGoodRssi + "\n1618243.4 AA:BB:CC:DD:EE:FF 11:22:33:44:55:66 -70\n", 5},
        {F::Rssi, "infinite timestamp", kRssi + "inf AA:BB:CC:DD:EE:FF 11:22:33:44:55:66 -71\n", 3},
        {F::Rssi, "wrong column header", std::string(posemark::io::kRssiMagic) + "\ntime tx rx dbm\n" + kGoodRssi, 2},

        {F::Annotated, "missing magic", kAnnHead.substr(kAnnHead.find('\n') + 1) + kGoodAnn, 1},
        {F::Annotated, "no column header", std::string(posemark::io::kAnnotatedMagic) + "\n", 2},
        {F::Annotated, "missing r33 column",
         std::string(posemark::io::kAnnotatedMagic) +
             "\ntimestamp_s transmitter sensor rssi_dbm x_m y_m z_m r11 r12 r13 r21 r22 r23 r31 r32\n",
         2},
        {F::Annotated, "duplicate column",
         std::string(posemark::io::kAnnotatedMagic) +
             "\ntimestamp_s transmitter sensor rssi_dbm x_m y_m z_m r11 r12 r13 r21 r22 r23 r31 r32 r33 x_m\n",
         2},
        {F::Annotated, "fifteen fields", kAnnHead + kGoodAnn + "1.5 AA:BB:CC:DD:EE:FF 11:22:33:44:55:66 -71 1 2 3 1 0 0 0 1 0 0 0\n", 4},
        {F::Annotated, "scaled rotation", kAnnHead + "1.5 AA:BB:CC:DD:EE:FF 11:22:33:44:55:66 -71 1 2 3 2 0 0 0 2 0 0 0 2\n", 3},
        {F::Annotated, "reflection", kAnnHead + "1.5 AA:BB:CC:DD:EE:FF 11:22:33:44:55:66 -71 1 2 3 1 0 0 0 1 0 0 0 -1\n", 3},
        {F::Annotated, "bad sensor address", kAnnHead + "1.5 AA:BB:CC:DD:EE:FF sensor-7 -71 1 2 3 1 0 0 0 1 0 0 0 1\n", 3},
        {F::Annotated, "rssi out of range", kAnnHead + "\n\n1.5 AA:BB:CC:DD:EE:FF 11:22:33:44:55:66 5 1 2 3 1 0 0 0 1 0 0 0 1\n", 5},
        {F::Annotated, "text position", kAnnHead + "1.5 AA:BB:CC:DD:EE:FF 11:22:33:44:55:66 -71 1 two 3 1 0 0 0 1 0 0 0 1\n", 3},
    };
}

}  // namespace

const std::vector<BadInput>& malformed() {
    static const std::vector<BadInput> cases = build();
    return cases;
}

const char* name(Format f) {
    switch (f) {
        case Format::Detections: return "detections";
        case Format::Rssi: return "rssi";
        case Format::Annotated: return "annotated";
    }
    return "?";
}

Outcome run(const BadInput& c) {
    std::istringstream in(c.text);
    try {
        switch (c.format) {
            case Format::Detections: posemark::io::read_detections(in); break;
            case Format::Rssi: posemark::io::read_rssi_log(in); break;
            case Format::Annotated: posemark::io::read_annotated(in); break;
        }
    } catch (const posemark::Error& e) {
        return {true, e.what()};
    }
    return {};
}

bool blames_line(const BadInput& c, const Outcome& o) {
    return o.rejected && o.message.rfind("line " + std::to_string(c.line) + ":", 0) == 0;
}

}  // namespace corpus
