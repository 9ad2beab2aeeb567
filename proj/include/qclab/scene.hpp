#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qclab/denjoy.hpp"
#include "qclab/extension.hpp"
#include "qclab/schottky.hpp"

namespace qclab {

using Json = nlohmann::json;  // object keys are kept sorted by the underlying std::map

// ---- scene description -------------------------------------------------------

// A scene bundles everything a command needs: the removed balls, an optional
// boundary correspondence, optional circle/torus construction data and the
// sampling parameters.  Loading normalizes defaults, so the canonical
// serialization (and thus the scene hash) only depends on the effective
// configuration.
struct Scene {
    struct MapSpec {
        enum class Kind { Identity, Moebius, AngleTable, SphereTable };
        Kind kind = Kind::Identity;
        std::vector<Sphere> mirrors;         // Moebius
        std::vector<double> samples;         // AngleTable
        std::vector<VecX> inputs, outputs;   // SphereTable
    };
    struct CorrSpec {
        bool present = false;
        std::vector<int> pairing;
        std::vector<Ball> target_balls;
        std::vector<MapSpec> maps;
    };
    struct DenjoySpec {
        bool present = false;
        double alpha = 0.0;
        int count = 0;
        WeightRule rule = WeightRule::Dyadic;
        double amplitude = 0.0;
    };
    struct TorusSpec {
        bool present = false;
        VecX rho, base;
        int count = 0;
        RadiusRule rule = RadiusRule::Harmonic;
        double amplitude = 0.0;
    };
    struct Params {
        int depth = 8;
        int grid = 32;
        std::vector<double> radii = {1e-1, 1e-2, 1e-3};
        int directions = 64;
        std::uint64_t seed = 1;
    };

    int version = 1;
    int dimension = 2;
    std::string label;
    std::vector<Ball> balls;
    CorrSpec correspondence;
    DenjoySpec denjoy;
    TorusSpec torus;
    Params params;
};

// ---- strict parsing helpers ---------------------------------------------------

namespace detail {

inline void require_keys(const Json& j, const std::set<std::string>& allowed, const std::string& path) {
    if (!j.is_object()) throw ConfigError("scene: expected an object at " + path);
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!allowed.count(it.key()))
            throw ConfigError("scene: unknown field \"" + it.key() + "\" at " + path);
    }
}

inline double get_number(const Json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError("scene: expected a number at " + path);
    return j.get<double>();
}

inline std::int64_t get_integer(const Json& j, const std::string& path) {
    if (!j.is_number_integer()) throw ConfigError("scene: expected an integer at " + path);
    return j.get<std::int64_t>();
}

inline std::string get_string(const Json& j, const std::string& path) {
    if (!j.is_string()) throw ConfigError("scene: expected a string at " + path);
    return j.get<std::string>();
}

inline VecX get_vector(const Json& j, int dim, const std::string& path) {
    if (!j.is_array()) throw ConfigError("scene: expected an array at " + path);
    if (dim >= 0 && static_cast<int>(j.size()) != dim)
        throw ConfigError("scene: expected " + std::to_string(dim) + " entries at " + path);
    VecX v(static_cast<int>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i)
        v[static_cast<int>(i)] = get_number(j[i], path + "[" + std::to_string(i) + "]");
    return v;
}

inline Ball parse_ball(const Json& j, int dim, const std::string& path) {
    require_keys(j, {"center", "radius"}, path);
    if (!j.contains("center") || !j.contains("radius"))
        throw ConfigError("scene: ball at " + path + " needs center and radius");
    const VecX c = get_vector(j["center"], dim, path + ".center");
    const double r = get_number(j["radius"], path + ".radius");
    if (!(r > 0.0)) throw ConfigError("scene: ball at " + path + " needs a positive radius");
    return Ball::round(c, r);
}

inline Sphere parse_mirror(const Json& j, int dim, const std::string& path) {
    if (!j.is_object()) throw ConfigError("scene: expected an object at " + path);
    if (j.contains("normal")) {
        require_keys(j, {"normal", "offset"}, path);
        if (!j.contains("offset")) throw ConfigError("scene: mirror at " + path + " needs an offset");
        return Sphere::hyperplane(get_vector(j["normal"], dim, path + ".normal"),
                                  get_number(j["offset"], path + ".offset"));
    }
    require_keys(j, {"center", "radius"}, path);
    if (!j.contains("center") || !j.contains("radius"))
        throw ConfigError("scene: mirror at " + path + " needs center+radius or normal+offset");
    const double r = get_number(j["radius"], path + ".radius");
    if (!(r > 0.0)) throw ConfigError("scene: mirror at " + path + " needs a positive radius");
    return Sphere::round(get_vector(j["center"], dim, path + ".center"), r);
}

inline WeightRule parse_weight_rule(const Json& j, const std::string& path) {
    const std::string s = get_string(j, path);
    if (s == "dyadic") return WeightRule::Dyadic;
    if (s == "inverse_square") return WeightRule::InverseSquare;
    throw ConfigError("scene: unknown weight rule \"" + s + "\" at " + path);
}

inline RadiusRule parse_radius_rule(const Json& j, const std::string& path) {
    const std::string s = get_string(j, path);
    if (s == "harmonic") return RadiusRule::Harmonic;
    if (s == "constant") return RadiusRule::Constant;
    throw ConfigError("scene: unknown radius rule \"" + s + "\" at " + path);
}

}  // namespace detail

// ---- load / parse --------------------------------------------------------------

inline Scene parse_scene(const Json& root) {
    using namespace detail;
    require_keys(root, {"version", "dimension", "label", "balls", "correspondence", "denjoy", "torus", "params"},
                 "$");
    Scene sc;
    if (!root.contains("version")) throw ConfigError("scene: missing \"version\"");
    if (get_integer(root["version"], "$.version") != 1)
        throw ConfigError("scene: unsupported version (expected 1)");
    if (!root.contains("dimension")) throw ConfigError("scene: missing \"dimension\"");
    const std::int64_t dim = get_integer(root["dimension"], "$.dimension");
    if (dim < 1 || dim > 16) throw ConfigError("scene: dimension must lie in [1, 16]");
    sc.dimension = static_cast<int>(dim);
    if (root.contains("label")) sc.label = get_string(root["label"], "$.label");

    if (root.contains("balls")) {
        const Json& jb = root["balls"];
        if (!jb.is_array()) throw ConfigError("scene: expected an array at $.balls");
        for (std::size_t i = 0; i < jb.size(); ++i)
            sc.balls.push_back(parse_ball(jb[i], sc.dimension, "$.balls[" + std::to_string(i) + "]"));
    }

    if (root.contains("correspondence")) {
        const Json& jc = root["correspondence"];
        require_keys(jc, {"pairing", "balls", "maps"}, "$.correspondence");
        sc.correspondence.present = true;
        const std::size_t m = sc.balls.size();
        if (m == 0) throw ConfigError("scene: correspondence requires a non-empty \"balls\" list");
        if (jc.contains("pairing")) {
            const Json& jp = jc["pairing"];
            if (!jp.is_array() || jp.size() != m)
                throw ConfigError("scene: $.correspondence.pairing must list one index per ball");
            std::vector<bool> seen(m, false);
            for (std::size_t i = 0; i < m; ++i) {
                const std::int64_t v = get_integer(jp[i], "$.correspondence.pairing[" + std::to_string(i) + "]");
                if (v < 0 || v >= static_cast<std::int64_t>(m) || seen[static_cast<std::size_t>(v)])
                    throw ConfigError("scene: $.correspondence.pairing must be a permutation of 0.." +
                                      std::to_string(m - 1));
                seen[static_cast<std::size_t>(v)] = true;
                sc.correspondence.pairing.push_back(static_cast<int>(v));
            }
        } else {
            for (std::size_t i = 0; i < m; ++i) sc.correspondence.pairing.push_back(static_cast<int>(i));
        }
        if (jc.contains("balls")) {
            const Json& jb = jc["balls"];
            if (!jb.is_array() || jb.size() != m)
                throw ConfigError("scene: $.correspondence.balls must list one target ball per source ball");
            for (std::size_t i = 0; i < m; ++i)
                sc.correspondence.target_balls.push_back(
                    parse_ball(jb[i], sc.dimension, "$.correspondence.balls[" + std::to_string(i) + "]"));
        } else {
            sc.correspondence.target_balls = sc.balls;
        }
        if (jc.contains("maps")) {
            const Json& jm = jc["maps"];
            if (!jm.is_array() || jm.size() != m)
                throw ConfigError("scene: $.correspondence.maps must list one map per ball");
            for (std::size_t i = 0; i < m; ++i) {
                const std::string path = "$.correspondence.maps[" + std::to_string(i) + "]";
                const Json& je = jm[i];
                require_keys(je, {"type", "mirrors", "samples", "inputs", "outputs"}, path);
                if (!je.contains("type")) throw ConfigError("scene: map at " + path + " needs a type");
                const std::string t = get_string(je["type"], path + ".type");
                Scene::MapSpec spec;
                if (t == "identity") {
                    spec.kind = Scene::MapSpec::Kind::Identity;
                } else if (t == "moebius") {
                    spec.kind = Scene::MapSpec::Kind::Moebius;
                    if (!je.contains("mirrors") || !je["mirrors"].is_array())
                        throw ConfigError("scene: map at " + path + " needs a mirrors array");
                    for (std::size_t k = 0; k < je["mirrors"].size(); ++k)
                        spec.mirrors.push_back(parse_mirror(je["mirrors"][k], sc.dimension,
                                                            path + ".mirrors[" + std::to_string(k) + "]"));
                } else if (t == "angle_table") {
                    spec.kind = Scene::MapSpec::Kind::AngleTable;
                    if (!je.contains("samples") || !je["samples"].is_array())
                        throw ConfigError("scene: map at " + path + " needs a samples array");
                    for (std::size_t k = 0; k < je["samples"].size(); ++k)
                        spec.samples.push_back(
                            get_number(je["samples"][k], path + ".samples[" + std::to_string(k) + "]"));
                } else if (t == "sphere_table") {
                    spec.kind = Scene::MapSpec::Kind::SphereTable;
                    if (!je.contains("inputs") || !je.contains("outputs"))
                        throw ConfigError("scene: map at " + path + " needs inputs and outputs arrays");
                    const Json &ji = je["inputs"], &jo = je["outputs"];
                    if (!ji.is_array() || !jo.is_array() || ji.size() != jo.size())
                        throw ConfigError("scene: map at " + path + " needs matching inputs/outputs");
                    for (std::size_t k = 0; k < ji.size(); ++k) {
                        spec.inputs.push_back(
                            get_vector(ji[k], sc.dimension, path + ".inputs[" + std::to_string(k) + "]"));
                        spec.outputs.push_back(
                            get_vector(jo[k], sc.dimension, path + ".outputs[" + std::to_string(k) + "]"));
                    }
                } else {
                    throw ConfigError("scene: unknown map type \"" + t + "\" at " + path);
                }
                sc.correspondence.maps.push_back(std::move(spec));
            }
        } else {
            sc.correspondence.maps.resize(m);
        }
    }

    if (root.contains("denjoy")) {
        const Json& jd = root["denjoy"];
        require_keys(jd, {"alpha", "count", "rule", "amplitude"}, "$.denjoy");
        sc.denjoy.present = true;
        if (!jd.contains("alpha") || !jd.contains("count"))
            throw ConfigError("scene: $.denjoy needs alpha and count");
        sc.denjoy.alpha = detail::get_number(jd["alpha"], "$.denjoy.alpha");
        const std::int64_t cnt = detail::get_integer(jd["count"], "$.denjoy.count");
        if (cnt < 0 || cnt > 100000) throw ConfigError("scene: $.denjoy.count out of range");
        sc.denjoy.count = static_cast<int>(cnt);
        if (jd.contains("rule")) sc.denjoy.rule = detail::parse_weight_rule(jd["rule"], "$.denjoy.rule");
        if (jd.contains("amplitude"))
            sc.denjoy.amplitude = detail::get_number(jd["amplitude"], "$.denjoy.amplitude");
    }

    if (root.contains("torus")) {
        const Json& jt = root["torus"];
        require_keys(jt, {"rho", "base", "count", "rule", "amplitude"}, "$.torus");
        sc.torus.present = true;
        if (!jt.contains("rho") || !jt.contains("count"))
            throw ConfigError("scene: $.torus needs rho and count");
        sc.torus.rho = detail::get_vector(jt["rho"], -1, "$.torus.rho");
        if (jt.contains("base"))
            sc.torus.base = detail::get_vector(jt["base"], static_cast<int>(sc.torus.rho.size()), "$.torus.base");
        else
            sc.torus.base = VecX::Zero(sc.torus.rho.size());
        const std::int64_t cnt = detail::get_integer(jt["count"], "$.torus.count");
        if (cnt < 1 || cnt > 100000) throw ConfigError("scene: $.torus.count out of range");
        sc.torus.count = static_cast<int>(cnt);
        if (jt.contains("rule")) sc.torus.rule = detail::parse_radius_rule(jt["rule"], "$.torus.rule");
        if (jt.contains("amplitude"))
            sc.torus.amplitude = detail::get_number(jt["amplitude"], "$.torus.amplitude");
    }

    if (root.contains("params")) {
        const Json& jp = root["params"];
        require_keys(jp, {"depth", "grid", "radii", "directions", "seed"}, "$.params");
        if (jp.contains("depth")) {
            const std::int64_t d = detail::get_integer(jp["depth"], "$.params.depth");
            if (d < 0 || d > 24) throw ConfigError("scene: $.params.depth must lie in [0, 24]");
            sc.params.depth = static_cast<int>(d);
        }
        if (jp.contains("grid")) {
            const std::int64_t g = detail::get_integer(jp["grid"], "$.params.grid");
            if (g < 1 || g > 4096) throw ConfigError("scene: $.params.grid must lie in [1, 4096]");
            sc.params.grid = static_cast<int>(g);
        }
        if (jp.contains("radii")) {
            const Json& jr = jp["radii"];
            if (!jr.is_array() || jr.empty()) throw ConfigError("scene: $.params.radii must be a non-empty array");
            sc.params.radii.clear();
            for (std::size_t i = 0; i < jr.size(); ++i) {
                const double r = detail::get_number(jr[i], "$.params.radii[" + std::to_string(i) + "]");
                if (!(r > 0.0)) throw ConfigError("scene: $.params.radii entries must be positive");
                sc.params.radii.push_back(r);
            }
        }
        if (jp.contains("directions")) {
            const std::int64_t m = detail::get_integer(jp["directions"], "$.params.directions");
            if (m < 2 || m > 100000) throw ConfigError("scene: $.params.directions must lie in [2, 100000]");
            sc.params.directions = static_cast<int>(m);
        }
        if (jp.contains("seed"))
            sc.params.seed = static_cast<std::uint64_t>(detail::get_integer(jp["seed"], "$.params.seed"));
    }
    return sc;
}

inline Scene load_scene(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("scene: cannot open \"" + path + "\"");
    Json root;
    try {
        in >> root;
    } catch (const Json::parse_error& e) {
        throw ConfigError("scene: \"" + path + "\" is not valid JSON: " + e.what());
    }
    return parse_scene(root);
}

// ---- canonical serialization and hashing ---------------------------------------

inline Json scene_to_json(const Scene& sc) {
    Json root;
    root["version"] = sc.version;
    root["dimension"] = sc.dimension;
    root["label"] = sc.label;
    auto ball_json = [](const Ball& b) {
        Json j;
        j["center"] = std::vector<double>(b.sphere.center.data(), b.sphere.center.data() + b.sphere.center.size());
        j["radius"] = b.sphere.radius;
        return j;
    };
    if (!sc.balls.empty()) {
        Json arr = Json::array();
        for (const Ball& b : sc.balls) arr.push_back(ball_json(b));
        root["balls"] = arr;
    }
    if (sc.correspondence.present) {
        Json jc;
        jc["pairing"] = sc.correspondence.pairing;
        Json tb = Json::array();
        for (const Ball& b : sc.correspondence.target_balls) tb.push_back(ball_json(b));
        jc["balls"] = tb;
        Json jm = Json::array();
        for (const auto& spec : sc.correspondence.maps) {
            Json je;
            switch (spec.kind) {
                case Scene::MapSpec::Kind::Identity: je["type"] = "identity"; break;
                case Scene::MapSpec::Kind::Moebius: {
                    je["type"] = "moebius";
                    Json mir = Json::array();
                    for (const Sphere& s : spec.mirrors) {
                        Json js;
                        if (s.plane) {
                            js["normal"] = std::vector<double>(s.center.data(), s.center.data() + s.center.size());
                            js["offset"] = s.radius;
                        } else {
                            js["center"] = std::vector<double>(s.center.data(), s.center.data() + s.center.size());
                            js["radius"] = s.radius;
                        }
                        mir.push_back(js);
                    }
                    je["mirrors"] = mir;
                    break;
                }
                case Scene::MapSpec::Kind::AngleTable:
                    je["type"] = "angle_table";
                    je["samples"] = spec.samples;
                    break;
                case Scene::MapSpec::Kind::SphereTable: {
                    je["type"] = "sphere_table";
                    Json ji = Json::array(), jo = Json::array();
                    for (const VecX& v : spec.inputs)
                        ji.push_back(std::vector<double>(v.data(), v.data() + v.size()));
                    for (const VecX& v : spec.outputs)
                        jo.push_back(std::vector<double>(v.data(), v.data() + v.size()));
                    je["inputs"] = ji;
                    je["outputs"] = jo;
                    break;
                }
            }
            jm.push_back(je);
        }
        jc["maps"] = jm;
        root["correspondence"] = jc;
    }
    if (sc.denjoy.present) {
        Json jd;
        jd["alpha"] = sc.denjoy.alpha;
        jd["count"] = sc.denjoy.count;
        jd["rule"] = to_string(sc.denjoy.rule);
        jd["amplitude"] = sc.denjoy.amplitude;
        root["denjoy"] = jd;
    }
    if (sc.torus.present) {
        Json jt;
        jt["rho"] = std::vector<double>(sc.torus.rho.data(), sc.torus.rho.data() + sc.torus.rho.size());
        jt["base"] = std::vector<double>(sc.torus.base.data(), sc.torus.base.data() + sc.torus.base.size());
        jt["count"] = sc.torus.count;
        jt["rule"] = to_string(sc.torus.rule);
        jt["amplitude"] = sc.torus.amplitude;
        root["torus"] = jt;
    }
    Json jp;
    jp["depth"] = sc.params.depth;
    jp["grid"] = sc.params.grid;
    jp["radii"] = sc.params.radii;
    jp["directions"] = sc.params.directions;
    jp["seed"] = sc.params.seed;
    root["params"] = jp;
    return root;
}

// Deterministic text form: sorted keys (nlohmann's default object is ordered),
// floats printed with %.17g so every bit of the double survives.
inline void canonical_write(const Json& j, std::string& out) {
    switch (j.type()) {
        case Json::value_t::object: {
            out += '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ',';
                first = false;
                out += Json(it.key()).dump();
                out += ':';
                canonical_write(it.value(), out);
            }
            out += '}';
            break;
        }
        case Json::value_t::array: {
            out += '[';
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += ',';
                canonical_write(j[i], out);
            }
            out += ']';
            break;
        }
        case Json::value_t::number_float: {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.17g", j.get<double>());
            out += buf;
            break;
        }
        default: out += j.dump(); break;
    }
}

inline std::string canonical_serialization(const Scene& sc) {
    std::string out;
    canonical_write(scene_to_json(sc), out);
    return out;
}

inline std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : data) {
        h ^= static_cast<std::uint64_t>(c);
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string scene_hash(const Scene& sc) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(canonical_serialization(sc))));
    return buf;
}

inline void save_scene(const Scene& sc, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("scene: cannot write \"" + path + "\"");
    out << scene_to_json(sc).dump(2) << '\n';
}

// ---- builders -------------------------------------------------------------------

inline SchottkySet scene_schottky(const Scene& sc) {
    if (sc.balls.empty()) throw ConfigError("scene: no balls defined");
    SchottkySet set;
    set.n = sc.dimension;
    set.removed = sc.balls;
    set.label = sc.label;
    return set;
}

inline BoundaryMap scene_boundary_map(const Scene::MapSpec& spec, int dimension) {
    switch (spec.kind) {
        case Scene::MapSpec::Kind::Identity: return BoundaryMap::identity();
        case Scene::MapSpec::Kind::Moebius: return BoundaryMap::from_moebius(MoebiusMap{spec.mirrors});
        case Scene::MapSpec::Kind::AngleTable:
            if (dimension != 2) throw ConfigError("scene: angle_table maps need dimension 2");
            return BoundaryMap::from_angle_table(spec.samples);
        case Scene::MapSpec::Kind::SphereTable: return BoundaryMap::from_sphere_table(spec.inputs, spec.outputs);
    }
    throw InternalError("scene: unreachable map kind");
}

inline BoundaryCorrespondence scene_correspondence(const Scene& sc) {
    if (!sc.correspondence.present) throw ConfigError("scene: no correspondence defined");
    BoundaryCorrespondence corr;
    corr.source = scene_schottky(sc);
    corr.target.n = sc.dimension;
    corr.target.removed = sc.correspondence.target_balls;
    corr.target.label = sc.label.empty() ? std::string() : sc.label + " (target)";
    corr.pairing = sc.correspondence.pairing;
    for (const auto& spec : sc.correspondence.maps)
        corr.maps.push_back(scene_boundary_map(spec, sc.dimension));
    return corr;
}

inline DenjoyCircle scene_denjoy(const Scene& sc) {
    if (!sc.denjoy.present) throw ConfigError("scene: no circle construction defined");
    return build_denjoy_circle(sc.denjoy.alpha, sc.denjoy.rule, sc.denjoy.amplitude, sc.denjoy.count);
}

inline RoundDomainScene scene_torus(const Scene& sc) {
    if (!sc.torus.present) throw ConfigError("scene: no torus construction defined");
    return build_round_scene(sc.torus.rho, sc.torus.base, sc.torus.count, sc.torus.rule, sc.torus.amplitude);
}

}
