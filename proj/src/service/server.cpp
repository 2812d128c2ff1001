#include "shadowacc/service/server.hpp"

#include <map>
#include <mutex>
#include <regex>
#include <shared_mutex>

#include <httplib.h>
#include <json.hpp>

#include "shadowacc/error.hpp"
#include "shadowacc/io_util.hpp"
#include "shadowacc/tiles/png_io.hpp"

namespace shadowacc::service {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kImmutable = "public, max-age=31536000, immutable";

void send_error(httplib::Response& res, int status, const std::string& kind, const std::string& message) {
    res.status = status;
    res.set_content(json{{"error", kind}, {"message", message}}.dump(), "application/json");
}

int status_for(const Error& e) {
    const std::string& k = e.kind();
    if (k == "ScenarioTooLarge") return 413;
    if (k == "InvalidFootprint" || k == "InvalidArgument" || k == "ParseError" || k == "OutOfRange") return 400;
    if (k == "NoCoverage" || k == "EmptyIntersection" || k == "MismatchedGeometry") return 422;
    if (k == "MissingCenterTile") return 404;
    return 500;
}

bool valid_city(const std::string& city) {
    static const std::regex re("[A-Za-z0-9_-]+");
    return std::regex_match(city, re);
}

std::optional<tiles::TileCoord> parse_coord(const std::string& z, const std::string& x, const std::string& y) {
    try {
        if (z.size() > 2 || x.size() > 10 || y.size() > 10) return std::nullopt;
        tiles::TileCoord c{std::stoi(z), std::stoi(x), std::stoi(y)};
        if (!c.valid()) return std::nullopt;
        return c;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

void send_file(httplib::Response& res, const fs::path& path) {
    std::error_code ec;
    if (!fs::is_regular_file(path, ec)) {
        send_error(res, 404, "NotFound", "tile not computed");
        return;
    }
    res.set_content(read_file(path), "image/png");
    res.set_header("Cache-Control", kImmutable);
}

}  // namespace

struct Server::Impl {
    ServerConfig config;
    httplib::Server http;
    int bound_port = -1;
    std::mutex cities_mutex;
    std::map<std::string, std::shared_ptr<const CityModel>> cities;

    fs::path city_root(const std::string& city) const { return config.data_root / city; }

    std::shared_ptr<const CityModel> model(const std::string& city) {
        std::lock_guard lock(cities_mutex);
        auto it = cities.find(city);
        if (it != cities.end()) return it->second;
        auto m = std::make_shared<const CityModel>(tiles::TileStore(city_root(city)));
        cities.emplace(city, m);
        return m;
    }

    void routes() {
        http.Get(R"(/tiles/([^/]+)/([^/]+)/(\d+)/(\d+)/(\d+)\.png)", [this](const httplib::Request& req,
                                                                           httplib::Response& res) {
            const std::string city = req.matches[1];
            const std::string season_text = req.matches[2];
            if (!valid_city(city)) return send_error(res, 400, "InvalidArgument", "bad city name");
            const auto season = solar::parse_season(season_text);
            if (!season) return send_error(res, 400, "InvalidArgument", "unknown season '" + season_text + "'");
            const auto coord = parse_coord(req.matches[3], req.matches[4], req.matches[5]);
            if (!coord) return send_error(res, 400, "InvalidArgument", "tile coordinates out of range");
            const std::string source = req.get_param_value("source");
            fs::path dir = city_root(city);
            if (source.empty() || source == "oracle") {
                dir /= "shadows";
            } else if (source == "ge") {
                dir /= "shadows-ge";
            } else {
                return send_error(res, 400, "InvalidArgument", "unknown source '" + source + "'");
            }
            send_file(res, dir / std::string(solar::season_slug(*season)) / tiles::TileStore::tile_relpath(*coord));
        });

        http.Get(R"(/heights/([^/]+)/(\d+)/(\d+)/(\d+)\.png)", [this](const httplib::Request& req,
                                                                     httplib::Response& res) {
            const std::string city = req.matches[1];
            if (!valid_city(city)) return send_error(res, 400, "InvalidArgument", "bad city name");
            const auto coord = parse_coord(req.matches[2], req.matches[3], req.matches[4]);
            if (!coord) return send_error(res, 400, "InvalidArgument", "tile coordinates out of range");
            send_file(res, tiles::TileStore(city_root(city)).height_path(*coord));
        });

        http.Get(R"(/meta/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
            const std::string city = req.matches[1];
            if (!valid_city(city)) return send_error(res, 400, "InvalidArgument", "bad city name");
            std::error_code ec;
            if (!fs::is_directory(city_root(city), ec)) return send_error(res, 404, "NotFound", "unknown city");
            const tiles::TileStore store(city_root(city));
            const auto coords = store.list_height_tiles();
            json seasons = json::array();
            for (auto s : store.available_seasons()) seasons.push_back(solar::season_slug(s));
            json body = {{"city", city}, {"zoom", tiles::kDefaultZoom}, {"seasons", seasons},
                         {"tile_count", coords.size()}};
            if (!coords.empty()) {
                int x0 = coords.front().x, x1 = x0, y0 = coords.front().y, y1 = y0;
                for (const auto& c : coords) {
                    x0 = std::min(x0, c.x);
                    x1 = std::max(x1, c.x);
                    y0 = std::min(y0, c.y);
                    y1 = std::max(y1, c.y);
                }
                const auto nw = tiles::tile_bounds({tiles::kDefaultZoom, x0, y0});
                const auto se = tiles::tile_bounds({tiles::kDefaultZoom, x1, y1});
                body["extent"] = {{"min_x", x0}, {"max_x", x1}, {"min_y", y0}, {"max_y", y1}};
                body["bbox"] = {{"west", nw.west}, {"south", se.south}, {"east", se.east}, {"north", nw.north}};
            } else {
                body["extent"] = nullptr;
                body["bbox"] = nullptr;
            }
            res.set_content(body.dump(), "application/json");
        });

        http.Post("/whatif", [this](const httplib::Request& req, httplib::Response& res) {
            const json body = json::parse(req.body, nullptr, false);
            if (body.is_discarded() || !body.is_object()) {
                return send_error(res, 400, "ParseError", "request body is not a JSON object");
            }
            try {
                const std::string city = body.value("city", "");
                if (!valid_city(city)) return send_error(res, 400, "InvalidArgument", "bad city name");
                std::error_code ec;
                if (!fs::is_directory(city_root(city), ec)) return send_error(res, 404, "NotFound", "unknown city");
                const auto season = solar::parse_season(body.value("season", ""));
                if (!season) return send_error(res, 400, "InvalidArgument", "unknown or missing season");

                const Scenario scenario = scenario_from_json(body);
                WhatIfOptions opts;
                opts.scenario_cap = config.scenario_cap;
                opts.threads = config.threads;
                if (body.contains("geometries") && !body["geometries"].is_null()) {
                    opts.geometries = analysis::geometries_from_collection(body["geometries"]);
                }
                if (body.contains("buffer_m")) opts.line_buffer_m = body["buffer_m"].get<double>();

                const auto result = model(city)->run(scenario, *season, opts);
                json tiles_json = json::array();
                for (const auto& t : result.tiles) {
                    const std::string png = tiles::encode_png(oracle::quantize(t));
                    tiles_json.push_back({{"z", t.coord.zoom},
                                          {"x", t.coord.x},
                                          {"y", t.coord.y},
                                          {"image_base64", httplib::detail::base64_encode(png)}});
                }
                json dirty = json::array();
                for (const auto& c : result.dirty) dirty.push_back({{"z", c.zoom}, {"x", c.x}, {"y", c.y}});
                json out = {{"scenario_id", scenario.id},
                            {"season", solar::season_slug(*season)},
                            {"dirty", dirty},
                            {"tiles", tiles_json}};
                if (!opts.geometries.empty()) {
                    json deltas = json::array();
                    for (const auto& d : result.deltas) {
                        deltas.push_back({{"geometry_id", d.geometry_id}, {"before", d.before}, {"after", d.after}});
                    }
                    out["deltas"] = deltas;
                }
                res.set_content(out.dump(), "application/json");
            } catch (const Error& e) {
                send_error(res, status_for(e), e.kind(), e.what());
            } catch (const json::exception& e) {
                send_error(res, 400, "ParseError", e.what());
            }
        });

        http.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
            try {
                std::rethrow_exception(ep);
            } catch (const Error& e) {
                send_error(res, status_for(e), e.kind(), e.what());
            } catch (const std::exception& e) {
                send_error(res, 500, "InternalError", e.what());
            } catch (...) {
                send_error(res, 500, "InternalError", "unknown failure");
            }
        });
    }
};

Server::Server(ServerConfig config) : impl_(std::make_unique<Impl>()) {
    impl_->config = std::move(config);
    impl_->routes();
}

Server::~Server() { stop(); }

int Server::bind() {
    if (impl_->config.port == 0) {
        impl_->bound_port = impl_->http.bind_to_any_port(impl_->config.host);
    } else {
        impl_->bound_port =
            impl_->http.bind_to_port(impl_->config.host, impl_->config.port) ? impl_->config.port : -1;
    }
    if (impl_->bound_port < 0) {
        throw IoError("cannot bind " + impl_->config.host + ":" + std::to_string(impl_->config.port));
    }
    return impl_->bound_port;
}

void Server::listen() { impl_->http.listen_after_bind(); }

void Server::stop() {
    if (impl_ && impl_->http.is_running()) impl_->http.stop();
}

void Server::wait_until_ready() const { impl_->http.wait_until_ready(); }

const ServerConfig& Server::config() const noexcept { return impl_->config; }

}  // namespace shadowacc::service
