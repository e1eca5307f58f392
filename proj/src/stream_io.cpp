#include "photonliq/stream_io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "photonliq/errors.hpp"
#include "photonliq/version.hpp"

namespace photonliq {
namespace fs = std::filesystem;

namespace {

std::uint64_t to_little_endian(std::uint64_t v) {
    if constexpr (std::endian::native == std::endian::big) {
        std::uint64_t r = 0;
        for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xffu) << (8 * (7 - i));
        return r;
    }
    return v;
}

std::string read_file(const fs::path& path, std::ios::openmode mode = std::ios::in) {
    std::ifstream in(path, mode);
    if (!in) throw IoError(fmt::format("cannot open '{}' for reading", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<double> parse_text_timestamps(const std::string& text, const fs::path& path) {
    std::vector<double> out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string::npos) end = text.size();
        ++line_no;
        std::string_view line(text.data() + pos, end - pos);
        pos = end + 1;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.remove_suffix(1);
        while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
        if (line.empty() || line.front() == '#') continue;
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
        if (ec != std::errc() || ptr != line.data() + line.size())
            throw ValidationError(fmt::format("{}:{}: not a timestamp: '{}'", path.string(), line_no, line));
        out.push_back(v);
    }
    return out;
}

}  // namespace

StreamFormat stream_format_for(const fs::path& path) {
    const auto ext = path.extension().string();
    if (ext == ".txt") return StreamFormat::text;
    if (ext == ".f64") return StreamFormat::binary;
    throw IoError(fmt::format("'{}': unknown timestamp format (use .txt or .f64)", path.string()));
}

fs::path sidecar_path(const fs::path& data_path) { return fs::path(data_path.string() + ".json"); }

std::string format_double(double value) { return fmt::format("{:.17g}", value); }

void write_text_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::out | std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
    out << content;
    if (!out) throw IoError(fmt::format("write to '{}' failed", path.string()));
}

ordered_json stream_metadata_json(const PhotonStream& stream) {
    const auto& m = stream.metadata();
    ordered_json j;
    j["version"] = kVersion;
    j["kind"] = "photon_stream";
    j["duration"] = stream.duration();
    j["count"] = stream.size();
    j["rates"] = m.rates;
    j["seed"] = m.seed;
    j["stream_id"] = m.stream_id;
    j["generator"] = m.generator;
    j["jitter"] = m.jitter;
    j["jitter_seed"] = m.jitter_seed;
    return j;
}

void write_stream(const PhotonStream& stream, const fs::path& path) {
    const auto format = stream_format_for(path);
    const auto t = stream.timestamps();
    if (format == StreamFormat::text) {
        std::string body;
        body.reserve(t.size() * 24);
        for (double x : t) {
            body += format_double(x);
            body += '\n';
        }
        write_text_file(path, body);
    } else {
        std::string body(t.size() * sizeof(double), '\0');
        for (std::size_t i = 0; i < t.size(); ++i) {
            const auto bits = to_little_endian(std::bit_cast<std::uint64_t>(t[i]));
            std::memcpy(body.data() + i * sizeof(double), &bits, sizeof bits);
        }
        write_text_file(path, body);
    }
    write_text_file(sidecar_path(path), stream_metadata_json(stream).dump(2) + "\n");
}

PhotonStream read_stream(const fs::path& path, std::optional<double> duration) {
    const auto format = stream_format_for(path);
    std::vector<double> t;
    if (format == StreamFormat::text) {
        t = parse_text_timestamps(read_file(path), path);
    } else {
        const std::string raw = read_file(path, std::ios::in | std::ios::binary);
        if (raw.size() % sizeof(double) != 0)
            throw ValidationError(fmt::format("'{}': size {} is not a multiple of 8 bytes", path.string(), raw.size()));
        t.resize(raw.size() / sizeof(double));
        for (std::size_t i = 0; i < t.size(); ++i) {
            std::uint64_t bits = 0;
            std::memcpy(&bits, raw.data() + i * sizeof(double), sizeof bits);
            t[i] = std::bit_cast<double>(to_little_endian(bits));
        }
    }

    StreamMetadata meta;
    meta.generator.clear();
    std::optional<double> window = duration;
    const auto side = sidecar_path(path);
    if (fs::exists(side)) {
        ordered_json j;
        try {
            j = ordered_json::parse(read_file(side));
            if (!window) window = j.at("duration").get<double>();
            meta.rates = j.value("rates", std::vector<double>{});
            meta.seed = j.value("seed", std::uint64_t{0});
            meta.stream_id = j.value("stream_id", std::uint64_t{0});
            meta.generator = j.value("generator", std::string{});
            meta.jitter = j.value("jitter", 0.0);
            meta.jitter_seed = j.value("jitter_seed", std::uint64_t{0});
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(fmt::format("'{}': bad metadata: {}", side.string(), e.what()));
        }
    }
    if (!window) window = t.empty() ? 0.0 : t.back();
    return PhotonStream(std::move(t), *window, std::move(meta));
}

std::string curve_to_csv(const CorrelationCurve& curve) {
    std::string out = curve.has_errors() ? "tau,g2,stderr\n" : "tau,g2\n";
    for (std::size_t i = 0; i < curve.size(); ++i) {
        out += format_double(curve.tau[i]);
        out += ',';
        out += format_double(curve.g2[i]);
        if (curve.has_errors()) {
            out += ',';
            out += format_double(curve.errors[i]);
        }
        out += '\n';
    }
    return out;
}

ordered_json curve_to_json(const CorrelationCurve& curve) {
    ordered_json j;
    j["tau"] = curve.tau;
    j["g2"] = curve.g2;
    if (curve.has_errors()) j["stderr"] = curve.errors;
    return j;
}

ordered_json curve_metadata_json(const CorrelationCurve& curve) {
    ordered_json j;
    j["bin_width"] = curve.bin_width;
    j["points"] = curve.size();
    if (curve.histogram) {
        const auto& h = *curve.histogram;
        j["rate_estimate"] = h.window > 0.0 ? static_cast<double>(h.events) / h.window : 0.0;
        j["events"] = h.events;
        j["window"] = h.window;
        j["segments"] = h.segments;
    }
    return j;
}

}  // namespace photonliq
