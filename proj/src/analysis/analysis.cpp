#include "shadowacc/analysis/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <unordered_map>

#include "shadowacc/error.hpp"

namespace shadowacc::analysis {
using nlohmann::json;
using tiles::LonLat;
using tiles::PixelPoint;

namespace {

std::vector<LonLat> parse_positions(const json& coords, const std::string& id) {
    if (!coords.is_array()) throw ParseError("geometry " + id + ": coordinates must be an array");
    std::vector<LonLat> out;
    out.reserve(coords.size());
    for (const auto& p : coords) {
        if (!p.is_array() || p.size() < 2 || !p[0].is_number() || !p[1].is_number()) {
            throw ParseError("geometry " + id + ": bad position");
        }
        out.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    return out;
}

std::vector<tiles::Ring> parse_polygon(const json& coords, const std::string& id) {
    if (!coords.is_array() || coords.empty()) throw ParseError("geometry " + id + ": empty polygon");
    std::vector<tiles::Ring> rings;
    for (const auto& r : coords) {
        auto ring = parse_positions(r, id);
        if (ring.size() < 4 || !(ring.front() == ring.back())) {
            throw ParseError("geometry " + id + ": polygon ring is not closed");
        }
        rings.push_back(std::move(ring));
    }
    return rings;
}

struct Segment {
    double x0, y0, x1, y1;
};

double dist2_to_segment(double px, double py, const Segment& s) {
    const double dx = s.x1 - s.x0, dy = s.y1 - s.y0;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0 ? ((px - s.x0) * dx + (py - s.y0) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double ex = s.x0 + t * dx - px, ey = s.y0 + t * dy - py;
    return ex * ex + ey * ey;
}

}  // namespace

std::string_view category_name(SunlightCategory c) {
    switch (c) {
        case SunlightCategory::HighAccess: return "high";
        case SunlightCategory::ModerateAccess: return "moderate";
        case SunlightCategory::PartiallyShadowed: return "partially";
        case SunlightCategory::Overshadowed: return "overshadowed";
    }
    return "?";
}

SunlightCategory classify(double v) {
    if (!(v >= 0.0 && v <= 1.0)) throw OutOfRange("mean fraction " + std::to_string(v) + " outside [0, 1]");
    if (v < 0.25) return SunlightCategory::HighAccess;
    if (v <= 0.50) return SunlightCategory::ModerateAccess;
    if (v <= 0.75) return SunlightCategory::PartiallyShadowed;
    return SunlightCategory::Overshadowed;
}

Geometry geometry_from_feature(const json& feature, const std::string& fallback_id) {
    Geometry g;
    g.id = fallback_id;
    const json* props = feature.contains("properties") && feature["properties"].is_object() ? &feature["properties"]
                                                                                              : nullptr;
    if (feature.contains("id") && !feature["id"].is_null()) {
        g.id = feature["id"].is_string() ? feature["id"].get<std::string>() : feature["id"].dump();
    } else if (props && props->contains("id") && !(*props)["id"].is_null()) {
        const auto& v = (*props)["id"];
        g.id = v.is_string() ? v.get<std::string>() : v.dump();
    }
    if (props && props->contains("landuse") && (*props)["landuse"].is_string()) {
        g.group = (*props)["landuse"].get<std::string>();
    }
    if (!feature.contains("geometry") || !feature["geometry"].is_object()) {
        throw ParseError("feature " + g.id + ": missing geometry");
    }
    const json& geom = feature["geometry"];
    const std::string type = geom.value("type", "");
    const json& coords = geom.contains("coordinates") ? geom["coordinates"] : json();
    if (type == "Polygon") {
        g.kind = Geometry::Kind::Polygon;
        g.polygons.push_back(parse_polygon(coords, g.id));
    } else if (type == "MultiPolygon") {
        g.kind = Geometry::Kind::Polygon;
        if (!coords.is_array()) throw ParseError("feature " + g.id + ": bad MultiPolygon");
        for (const auto& p : coords) g.polygons.push_back(parse_polygon(p, g.id));
    } else if (type == "LineString") {
        g.kind = Geometry::Kind::Line;
        g.lines.push_back(parse_positions(coords, g.id));
    } else if (type == "MultiLineString") {
        g.kind = Geometry::Kind::Line;
        if (!coords.is_array()) throw ParseError("feature " + g.id + ": bad MultiLineString");
        for (const auto& l : coords) g.lines.push_back(parse_positions(l, g.id));
    } else {
        throw ParseError("feature " + g.id + ": unsupported geometry type '" + type + "'");
    }
    if (g.kind == Geometry::Kind::Line) {
        for (const auto& l : g.lines) {
            if (l.empty()) throw ParseError("feature " + g.id + ": empty line");
        }
    }
    return g;
}

std::vector<Geometry> geometries_from_collection(const json& collection) {
    std::vector<Geometry> out;
    if (!collection.is_object()) throw ParseError("expected a GeoJSON object");
    if (collection.value("type", "") == "Feature") {
        out.push_back(geometry_from_feature(collection, "0"));
        return out;
    }
    if (!collection.contains("features") || !collection["features"].is_array()) {
        throw ParseError("expected a GeoJSON FeatureCollection");
    }
    int i = 0;
    for (const auto& f : collection["features"]) out.push_back(geometry_from_feature(f, std::to_string(i++)));
    return out;
}

GeometryAggregate aggregate_over_geometry(const ShadowLookup& lookup, const Geometry& geometry,
                                          solar::SeasonKind season, double buffer_m, int zoom) {
    if (!(buffer_m >= 0.0)) throw InvalidArgument("buffer must be >= 0");
    const bool is_line = geometry.kind == Geometry::Kind::Line;

    // Vertices in global pixel coordinates.
    std::vector<std::vector<std::vector<PixelPoint>>> polys;
    std::vector<Segment> segments;
    double min_x = INFINITY, min_y = INFINITY, max_x = -INFINITY, max_y = -INFINITY;
    double sum_lat = 0.0;
    std::size_t n_vertices = 0;
    auto note = [&](LonLat ll) {
        const PixelPoint p = tiles::lonlat_to_pixel(ll, zoom);
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
        sum_lat += ll.lat;
        ++n_vertices;
        return p;
    };
    if (is_line) {
        for (const auto& line : geometry.lines) {
            std::vector<PixelPoint> pts;
            for (const auto& ll : line) pts.push_back(note(ll));
            if (pts.size() == 1) segments.push_back({pts[0].x, pts[0].y, pts[0].x, pts[0].y});
            for (std::size_t i = 1; i < pts.size(); ++i) {
                segments.push_back({pts[i - 1].x, pts[i - 1].y, pts[i].x, pts[i].y});
            }
        }
    } else {
        for (const auto& poly : geometry.polygons) {
            auto& rings = polys.emplace_back();
            for (const auto& ring : poly) {
                auto& pr = rings.emplace_back();
                for (const auto& ll : ring) pr.push_back(note(ll));
            }
        }
    }
    if (n_vertices == 0) throw EmptyIntersection("geometry " + geometry.id + " has no vertices");

    double buffer_px = 0.0;
    if (is_line) {
        const double centroid_lat = sum_lat / static_cast<double>(n_vertices);
        buffer_px = buffer_m / tiles::meters_per_pixel(centroid_lat, zoom);
    }
    const double world = static_cast<double>(tiles::kTileSize) * std::ldexp(1.0, zoom);
    const auto x0 = static_cast<std::int64_t>(std::max(0.0, std::floor(min_x - buffer_px - 0.5)));
    const auto x1 = static_cast<std::int64_t>(std::min(world - 1, std::ceil(max_x + buffer_px + 0.5)));
    const auto y0 = static_cast<std::int64_t>(std::max(0.0, std::floor(min_y - buffer_px - 0.5)));
    const auto y1 = static_cast<std::int64_t>(std::min(world - 1, std::ceil(max_y + buffer_px + 0.5)));

    auto inside = [&](double px, double py) {
        if (is_line) {
            const double b2 = buffer_px * buffer_px;
            for (const auto& s : segments) {
                if (dist2_to_segment(px, py, s) <= b2) return true;
            }
            return false;
        }
        bool in = false;
        for (const auto& rings : polys) {
            bool in_poly = false;
            for (const auto& ring : rings) {
                for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
                    const PixelPoint& a = ring[i];
                    const PixelPoint& b = ring[j];
                    if ((a.y > py) != (b.y > py) && px < (b.x - a.x) * (py - a.y) / (b.y - a.y) + a.x) {
                        in_poly = !in_poly;
                    }
                }
            }
            in = in || in_poly;
        }
        return in;
    };

    std::unordered_map<tiles::TileCoord, std::optional<Raster<std::uint8_t>>> cache;
    std::vector<tiles::TileCoord> missing;
    double sum = 0.0;
    std::size_t count = 0;
    for (std::int64_t gy = y0; gy <= y1; ++gy) {
        for (std::int64_t gx = x0; gx <= x1; ++gx) {
            if (!inside(static_cast<double>(gx) + 0.5, static_cast<double>(gy) + 0.5)) continue;
            const tiles::TileCoord tc{zoom, static_cast<int>(gx / tiles::kTileSize),
                                      static_cast<int>(gy / tiles::kTileSize)};
            auto it = cache.find(tc);
            if (it == cache.end()) {
                it = cache.emplace(tc, lookup(tc)).first;
                if (!it->second) missing.push_back(tc);
            }
            ++count;
            if (!it->second) continue;
            sum += (*it->second)(static_cast<int>(gy % tiles::kTileSize), static_cast<int>(gx % tiles::kTileSize)) /
                   255.0;
        }
    }
    if (count == 0) throw EmptyIntersection("no pixel centre falls inside geometry " + geometry.id);
    if (!missing.empty()) {
        throw NoCoverage("geometry " + geometry.id + " needs " + std::to_string(missing.size()) +
                         " uncomputed tile(s), first " + missing.front().to_string());
    }

    GeometryAggregate agg;
    agg.geometry_id = geometry.id;
    agg.season = season;
    agg.mean_fraction = sum / static_cast<double>(count);
    agg.pixel_count = count;
    agg.category = classify(agg.mean_fraction);
    agg.group = geometry.group;
    return agg;
}

std::vector<CategoryShare> summarize(const std::vector<GeometryAggregate>& aggregates) {
    std::map<std::string, CategoryShare> groups;
    for (const auto& a : aggregates) {
        auto& g = groups[a.group.value_or("")];
        g.group = a.group.value_or("");
        ++g.total;
        ++g.counts[static_cast<int>(a.category)];
    }
    std::vector<CategoryShare> out;
    for (auto& [name, g] : groups) {
        for (int c = 0; c < kCategoryCount; ++c) g.percent[c] = 100.0 * g.counts[c] / static_cast<double>(g.total);
        out.push_back(g);
    }
    return out;
}

double whatif_delta(const GeometryAggregate& before, const GeometryAggregate& after) {
    if (before.geometry_id != after.geometry_id || before.season != after.season ||
        before.pixel_count != after.pixel_count) {
        throw MismatchedGeometry("cannot compare '" + before.geometry_id + "' with '" + after.geometry_id + "'");
    }
    return after.mean_fraction - before.mean_fraction;
}

namespace {
std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + '"';
}
}  // namespace

void write_aggregates_csv(std::ostream& out, const std::vector<GeometryAggregate>& rows) {
    out << "geometry_id,season,mean,category,group\n";
    char buf[64];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.10g", r.mean_fraction);
        out << csv_field(r.geometry_id) << ',' << solar::season_slug(r.season) << ',' << buf << ','
            << category_name(r.category) << ',' << csv_field(r.group.value_or("")) << '\n';
    }
}

void write_summary_csv(std::ostream& out, const std::vector<CategoryShare>& rows) {
    out << "group,total,high,moderate,partially,overshadowed\n";
    char buf[128];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%zu,%.4f,%.4f,%.4f,%.4f", r.total, r.percent[0], r.percent[1], r.percent[2],
                      r.percent[3]);
        out << csv_field(r.group) << ',' << buf << '\n';
    }
}

}  // namespace shadowacc::analysis
