#include "shadowacc/tiles/footprint.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <thread>

#include <httplib.h>

#include "shadowacc/error.hpp"
#include "shadowacc/io_util.hpp"

namespace shadowacc::tiles {
namespace {

using nlohmann::json;

std::optional<double> parse_number_prefix(std::string_view s, std::string_view allowed_suffixes) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr == s.data()) return std::nullopt;
    std::string_view rest(ptr, s.data() + s.size() - ptr);
    while (!rest.empty() && std::isspace(static_cast<unsigned char>(rest.front()))) rest.remove_prefix(1);
    if (!rest.empty() && rest != allowed_suffixes && rest != "meters" && rest != "metres") return std::nullopt;
    if (!std::isfinite(v)) return std::nullopt;
    return v;
}

std::optional<double> parse_numeric(const json& value, std::string_view suffix) {
    if (value.is_number()) {
        double v = value.get<double>();
        return std::isfinite(v) ? std::optional(v) : std::nullopt;
    }
    if (value.is_string()) return parse_number_prefix(value.get_ref<const std::string&>(), suffix);
    return std::nullopt;
}

double cross(LonLat o, LonLat a, LonLat b) {
    return (a.lon - o.lon) * (b.lat - o.lat) - (a.lat - o.lat) * (b.lon - o.lon);
}

bool segments_cross(LonLat a, LonLat b, LonLat c, LonLat d) {
    const double d1 = cross(c, d, a), d2 = cross(c, d, b);
    const double d3 = cross(a, b, c), d4 = cross(a, b, d);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) return true;
    auto on_segment = [](LonLat p, LonLat q, LonLat r) {
        return std::min(p.lon, q.lon) <= r.lon && r.lon <= std::max(p.lon, q.lon) && std::min(p.lat, q.lat) <= r.lat &&
               r.lat <= std::max(p.lat, q.lat);
    };
    if (d1 == 0 && on_segment(c, d, a)) return true;
    if (d2 == 0 && on_segment(c, d, b)) return true;
    if (d3 == 0 && on_segment(a, b, c)) return true;
    if (d4 == 0 && on_segment(a, b, d)) return true;
    return false;
}

Ring clip_ring(const Ring& ring, const GeoBox& box) {
    // Open polygon (drop closing vertex), clip against each box edge in turn.
    std::vector<LonLat> poly(ring.begin(), ring.end() - 1);
    auto clip_edge = [&](auto inside, auto intersect) {
        std::vector<LonLat> out;
        if (poly.empty()) return;
        LonLat prev = poly.back();
        bool prev_in = inside(prev);
        for (const LonLat& cur : poly) {
            bool cur_in = inside(cur);
            if (cur_in) {
                if (!prev_in) out.push_back(intersect(prev, cur));
                out.push_back(cur);
            } else if (prev_in) {
                out.push_back(intersect(prev, cur));
            }
            prev = cur;
            prev_in = cur_in;
        }
        poly = std::move(out);
    };
    auto at_lon = [](double lon) {
        return [lon](LonLat a, LonLat b) { return LonLat{lon, a.lat + (b.lat - a.lat) * (lon - a.lon) / (b.lon - a.lon)}; };
    };
    auto at_lat = [](double lat) {
        return [lat](LonLat a, LonLat b) { return LonLat{a.lon + (b.lon - a.lon) * (lat - a.lat) / (b.lat - a.lat), lat}; };
    };
    clip_edge([&](LonLat p) { return p.lon >= box.west; }, at_lon(box.west));
    clip_edge([&](LonLat p) { return p.lon <= box.east; }, at_lon(box.east));
    clip_edge([&](LonLat p) { return p.lat >= box.south; }, at_lat(box.south));
    clip_edge([&](LonLat p) { return p.lat <= box.north; }, at_lat(box.north));

    poly.erase(std::unique(poly.begin(), poly.end()), poly.end());
    while (poly.size() > 1 && poly.front() == poly.back()) poly.pop_back();
    if (poly.size() < 3) return {};
    poly.push_back(poly.front());
    return poly;
}

bool boxes_intersect(const GeoBox& a, const GeoBox& b) {
    return a.west <= b.east && b.west <= a.east && a.south <= b.north && b.south <= a.north;
}

Ring parse_ring(const json& coords, const std::string& id) {
    if (!coords.is_array()) throw ParseError("record " + id + ": ring is not an array");
    Ring ring;
    ring.reserve(coords.size());
    for (const auto& pt : coords) {
        if (!pt.is_array() || pt.size() < 2 || !pt[0].is_number() || !pt[1].is_number()) {
            throw ParseError("record " + id + ": malformed coordinate");
        }
        ring.push_back({pt[0].get<double>(), pt[1].get<double>()});
    }
    if (ring.size() < 4 || ring.front() != ring.back()) {
        throw ParseError("record " + id + ": ring is not closed or has fewer than 4 positions");
    }
    return ring;
}

std::string id_string(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number()) return v.dump();
    return {};
}

class RateLimiter {
public:
    explicit RateLimiter(double per_second)
        : interval_(per_second > 0 ? std::chrono::duration<double>(1.0 / per_second) : std::chrono::duration<double>(0)) {}

    void acquire() {
        std::unique_lock lock(mutex_);
        const auto now = std::chrono::steady_clock::now();
        auto slot = std::max(now, next_);
        next_ = slot + std::chrono::duration_cast<std::chrono::steady_clock::duration>(interval_);
        lock.unlock();
        std::this_thread::sleep_until(slot);
    }

private:
    std::chrono::duration<double> interval_;
    std::chrono::steady_clock::time_point next_{};
    std::mutex mutex_;
};

RateLimiter& limiter_for(const std::string& endpoint, double per_second) {
    static std::mutex registry_mutex;
    static std::map<std::string, std::unique_ptr<RateLimiter>> registry;
    std::lock_guard lock(registry_mutex);
    auto& slot = registry[endpoint];
    if (!slot) slot = std::make_unique<RateLimiter>(per_second);
    return *slot;
}

// Applies height resolution, clamping, validation and clipping to a parsed
// record and appends it to `result`.
void admit(BuildingFootprint f, const GeoBox& bbox, FetchResult& result) {
    if (!(f.height_m > 0.0)) {
        ++result.dropped_without_height;
        return;
    }
    if (auto defect = geometry_defect(f.rings)) {
        ++result.dropped_invalid;
        result.warnings.push_back("footprint " + f.source_id + " dropped: " + *defect);
        return;
    }
    if (!boxes_intersect(footprint_bounds(f), bbox)) return;
    if (f.height_m > kMaxBuildingHeight) {
        result.warnings.push_back("footprint " + f.source_id + ": height " + std::to_string(f.height_m) +
                                  " m clamped to 500 m");
        f.height_m = kMaxBuildingHeight;
        ++result.clamped;
    }
    if (auto clipped = clip_to_box(f, bbox)) result.footprints.push_back(std::move(*clipped));
}

double resolve_height(const json& props) {
    if (!props.is_object()) return 0.0;
    for (const char* key : {"height", "height_m"}) {
        if (auto it = props.find(key); it != props.end()) {
            if (auto h = parse_height_tag(*it)) return *h;
        }
    }
    for (const char* key : {"levels", "building:levels"}) {
        if (auto it = props.find(key); it != props.end()) {
            if (auto lv = parse_levels_tag(*it)) return *lv * kMetersPerLevel;
        }
    }
    return 0.0;
}

}  // namespace

GeoBox footprint_bounds(const BuildingFootprint& f) {
    GeoBox b{180.0, 90.0, -180.0, -90.0};
    for (const auto& ring : f.rings) {
        for (const auto& p : ring) {
            b.west = std::min(b.west, p.lon);
            b.east = std::max(b.east, p.lon);
            b.south = std::min(b.south, p.lat);
            b.north = std::max(b.north, p.lat);
        }
    }
    return b;
}

std::optional<std::string> geometry_defect(const std::vector<Ring>& rings) {
    if (rings.empty()) return "no rings";
    for (std::size_t r = 0; r < rings.size(); ++r) {
        const Ring& ring = rings[r];
        const std::string tag = "ring " + std::to_string(r);
        if (ring.size() < 4) return tag + " has fewer than 4 positions";
        if (ring.front() != ring.back()) return tag + " is not closed";
        for (const auto& p : ring) {
            if (!std::isfinite(p.lon) || !std::isfinite(p.lat) || std::abs(p.lon) > 180.0 || std::abs(p.lat) > 90.0) {
                return tag + " has an invalid coordinate";
            }
        }
        const std::size_t n = ring.size() - 1;
        std::vector<LonLat> distinct(ring.begin(), ring.end() - 1);
        std::sort(distinct.begin(), distinct.end(), [](LonLat a, LonLat b) {
            return a.lon < b.lon || (a.lon == b.lon && a.lat < b.lat);
        });
        if (std::unique(distinct.begin(), distinct.end()) - distinct.begin() < 3) {
            return tag + " has fewer than 3 distinct vertices";
        }
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if (adjacent) continue;
                if (segments_cross(ring[i], ring[i + 1], ring[j], ring[j + 1])) {
                    return tag + " is self-intersecting (edges " + std::to_string(i) + " and " + std::to_string(j) + ")";
                }
            }
        }
    }
    return std::nullopt;
}

std::optional<double> parse_height_tag(const json& value) {
    auto v = parse_numeric(value, "m");
    if (v && *v > 0.0) return v;
    return std::nullopt;
}

std::optional<double> parse_levels_tag(const json& value) {
    auto v = parse_numeric(value, "");
    if (v && *v > 0.0) return v;
    return std::nullopt;
}

std::optional<BuildingFootprint> clip_to_box(const BuildingFootprint& f, const GeoBox& box) {
    BuildingFootprint out;
    out.height_m = f.height_m;
    out.source_id = f.source_id;
    for (std::size_t r = 0; r < f.rings.size(); ++r) {
        Ring clipped = clip_ring(f.rings[r], box);
        if (clipped.empty()) {
            if (r == 0) return std::nullopt;
            continue;
        }
        out.rings.push_back(std::move(clipped));
    }
    return out;
}

FootprintSource FootprintSource::parse(std::string_view descriptor) {
    FootprintSource s;
    s.location = std::string(descriptor);
    if (descriptor.starts_with("http://") || descriptor.starts_with("https://")) s.kind = Kind::Http;
    return s;
}

BuildingFootprint footprint_from_feature(const json& feature, const std::string& fallback_id) {
    if (!feature.is_object()) throw ParseError("record " + fallback_id + ": not a JSON object");
    std::string id;
    if (auto it = feature.find("id"); it != feature.end()) id = id_string(*it);
    const json* props = nullptr;
    if (auto it = feature.find("properties"); it != feature.end() && it->is_object()) {
        props = &*it;
        if (id.empty()) {
            if (auto pid = it->find("id"); pid != it->end()) id = id_string(*pid);
        }
    }
    if (id.empty()) id = fallback_id;

    auto geom = feature.find("geometry");
    if (geom == feature.end() || !geom->is_object()) throw ParseError("record " + id + ": missing geometry");
    if (geom->value("type", "") != "Polygon") throw ParseError("record " + id + ": geometry is not a Polygon");
    auto coords = geom->find("coordinates");
    if (coords == geom->end() || !coords->is_array() || coords->empty()) {
        throw ParseError("record " + id + ": missing coordinates");
    }
    BuildingFootprint f;
    f.source_id = id;
    for (const auto& ring : *coords) f.rings.push_back(parse_ring(ring, id));
    f.height_m = props ? resolve_height(*props) : 0.0;
    return f;
}

FetchResult parse_overpass_response(std::string_view body, const GeoBox& bbox) {
    json doc = json::parse(body, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw ParseError("overpass response is not valid JSON");
    auto elements = doc.find("elements");
    if (elements == doc.end() || !elements->is_array()) throw ParseError("overpass response has no elements array");
    FetchResult result;
    for (const auto& el : *elements) {
        if (el.value("type", "") != "way") continue;
        const std::string id = "way/" + id_string(el.value("id", json()));
        auto geometry = el.find("geometry");
        if (geometry == el.end() || !geometry->is_array()) throw ParseError("record " + id + ": missing geometry");
        Ring ring;
        for (const auto& node : *geometry) {
            if (!node.is_object() || !node.contains("lat") || !node.contains("lon") || !node["lat"].is_number() ||
                !node["lon"].is_number()) {
                throw ParseError("record " + id + ": malformed node");
            }
            ring.push_back({node["lon"].get<double>(), node["lat"].get<double>()});
        }
        if (ring.size() < 4 || ring.front() != ring.back()) continue;  // unclosed ways are not buildings
        BuildingFootprint f;
        f.source_id = id;
        f.rings.push_back(std::move(ring));
        f.height_m = resolve_height(el.value("tags", json::object()));
        admit(std::move(f), bbox, result);
    }
    return result;
}

FetchResult fetch_footprints(const GeoBox& bbox, const FootprintSource& source) {
    if (bbox.degenerate()) throw InvalidArgument("fetch_footprints: degenerate bounding box");

    if (source.kind == FootprintSource::Kind::LocalFile) {
        std::ifstream in(source.location);
        if (!in) throw SourceUnavailable("cannot open footprint file " + source.location);
        FetchResult result;
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            const std::string fallback = "line-" + std::to_string(line_no);
            json feature = json::parse(line, nullptr, false);
            if (feature.is_discarded()) throw ParseError("record " + fallback + ": invalid JSON");
            admit(footprint_from_feature(feature, fallback), bbox, result);
        }
        return result;
    }

    // Overpass-style endpoint: scheme://host[:port]/path
    const std::string& url = source.location;
    const auto scheme_end = url.find("://");
    const auto path_start = url.find('/', scheme_end + 3);
    const std::string origin = url.substr(0, path_start);
    const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

    char query[512];
    std::snprintf(query, sizeof query, "[out:json][timeout:%lld];way[\"building\"](%.8f,%.8f,%.8f,%.8f);out geom;",
                  static_cast<long long>(source.timeout.count()), bbox.south, bbox.west, bbox.north, bbox.east);

    limiter_for(origin, source.max_requests_per_second).acquire();
    httplib::Client client(origin);
    client.set_connection_timeout(source.timeout);
    client.set_read_timeout(source.timeout);
    auto res = client.Post(path, httplib::Params{{"data", query}});
    if (!res) throw SourceUnavailable("footprint endpoint " + url + " unreachable: " + httplib::to_string(res.error()));
    if (res->status != 200) {
        throw SourceUnavailable("footprint endpoint " + url + " returned HTTP " + std::to_string(res->status));
    }
    return parse_overpass_response(res->body, bbox);
}

json footprint_to_feature(const BuildingFootprint& f) {
    json rings = json::array();
    for (const auto& ring : f.rings) {
        json r = json::array();
        for (const auto& p : ring) r.push_back({p.lon, p.lat});
        rings.push_back(std::move(r));
    }
    return {{"type", "Feature"},
            {"id", f.source_id},
            {"properties", {{"height", f.height_m}}},
            {"geometry", {{"type", "Polygon"}, {"coordinates", std::move(rings)}}}};
}

void write_footprints_ndjson(const std::filesystem::path& path, const std::vector<BuildingFootprint>& footprints) {
    std::string text;
    for (const auto& f : footprints) {
        text += footprint_to_feature(f).dump();
        text += '\n';
    }
    write_file_atomic(path, text);
}

std::vector<BuildingFootprint> read_footprints_ndjson(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw SourceUnavailable("cannot open footprint file " + path.string());
    std::vector<BuildingFootprint> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json feature = json::parse(line, nullptr, false);
        if (feature.is_discarded()) throw ParseError("record line-" + std::to_string(line_no) + ": invalid JSON");
        out.push_back(footprint_from_feature(feature, "line-" + std::to_string(line_no)));
    }
    return out;
}

}  // namespace shadowacc::tiles
