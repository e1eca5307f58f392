#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "photonliq/correlation_curve.hpp"
#include "photonliq/stream.hpp"

namespace photonliq {

using ordered_json = nlohmann::ordered_json;

// Timestamp files: ".txt" holds one decimal timestamp per line, ".f64" holds
// little-endian IEEE doubles.  Metadata lives next to the data in
// "<path>.json".
enum class StreamFormat { text, binary };

// Throws IoError for any other extension.
StreamFormat stream_format_for(const std::filesystem::path& path);

std::filesystem::path sidecar_path(const std::filesystem::path& data_path);

// Writes data and sidecar.  Throws IoError when either cannot be written.
void write_stream(const PhotonStream& stream, const std::filesystem::path& path);

// Reads data and (if present) the sidecar.  Without a sidecar the window is
// `duration` when given, else the last timestamp.  Unsorted or malformed
// input raises ValidationError naming the first offending index or line.
PhotonStream read_stream(const std::filesystem::path& path, std::optional<double> duration = std::nullopt);

ordered_json stream_metadata_json(const PhotonStream& stream);

// Shortest form is not used: every value carries 17 significant digits so
// files are reproducible byte for byte.
std::string format_double(double value);

// CSV with header "tau,g2,stderr" ("tau,g2" when the curve has no errors),
// LF line endings.
std::string curve_to_csv(const CorrelationCurve& curve);

// {"tau": [...], "g2": [...], "stderr": [...]} with the same values.
ordered_json curve_to_json(const CorrelationCurve& curve);

// Normalization block: bin width plus, for histogram estimates, the rate,
// event count, window and segment count.
ordered_json curve_metadata_json(const CorrelationCurve& curve);

// Throws IoError on failure.
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace photonliq
