#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "hvmforge/dist.hpp"
#include "hvmforge/errors.hpp"
#include "hvmforge/hvm.hpp"
#include "hvmforge/point.hpp"
#include "hvmforge/rational.hpp"
#include "hvmforge/system.hpp"

namespace hvmforge {

// Insertion-ordered JSON keeps serialized output deterministic and in
// schema order.
using Json = nlohmann::ordered_json;

namespace io_detail {

inline const Json& expect(const Json& j, const char* type_name, bool ok,
                          const std::string& path) {
    if (!ok) throw SchemaError(path + ": expected " + type_name);
    return j;
}

inline const Json& expect_object(const Json& j, const std::string& path) {
    return expect(j, "an object", j.is_object(), path);
}
inline const Json& expect_array(const Json& j, const std::string& path) {
    return expect(j, "an array", j.is_array(), path);
}
inline std::string expect_string(const Json& j, const std::string& path) {
    expect(j, "a string", j.is_string(), path);
    return j.get<std::string>();
}
inline const Json& field(const Json& j, const char* name, const std::string& path) {
    expect_object(j, path);
    auto it = j.find(name);
    if (it == j.end()) throw SchemaError(path + ": missing field '" + name + "'");
    return *it;
}

inline Rational rational_field(const Json& j, const char* name, const std::string& path) {
    const std::string text = expect_string(field(j, name, path), path + "." + name);
    try {
        return parse_rational(text);
    } catch (const SchemaError& e) {
        throw SchemaError(path + "." + name + ": " + e.what());
    }
}

}  // namespace io_detail

// Points serialize as bare strings (atoms) or objects keyed by component
// name (records), nesting as needed.
inline Json point_to_json(const Point& p) {
    if (p.is_atom()) return Json(p.label());
    Json obj = Json::object();
    for (const auto& [k, v] : p.fields()) obj[k] = point_to_json(v);
    return obj;
}

inline Point point_from_json(const Json& j, const std::string& path) {
    if (j.is_string()) return Point::atom(j.get<std::string>());
    if (j.is_object()) {
        std::vector<Point::Field> fields;
        for (const auto& [k, v] : j.items()) {
            fields.emplace_back(k, point_from_json(v, path + "." + k));
        }
        return Point::record(std::move(fields));
    }
    throw SchemaError(path + ": expected a string or an object point");
}

// ---------------------------------------------------------------------
// System files.
//
// {
//   "properties": [{"id": "q1", "alphabet": ["+1", "-1"]}, ...],
//   "contexts":   [{"id": "c1", "properties": ["q1", "q2"],
//                   "distribution": [{"outcomes": ["+1", "+1"], "p": "1/2"}, ...]}, ...]
// }
//
// Probabilities are rational strings ("1/2", "3"); omitted cells carry
// zero mass; each context's masses must sum to exactly 1.

namespace io_detail {

inline Json properties_to_json(const Structure& st) {
    Json arr = Json::array();
    for (const Property& p : st.properties()) {
        Json node = Json::object();
        node["id"] = p.id;
        node["alphabet"] = p.alphabet;
        arr.push_back(std::move(node));
    }
    return arr;
}

inline std::vector<Property> properties_from_json(const Json& j) {
    expect_array(j, "properties");
    std::vector<Property> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string path = "properties[" + std::to_string(i) + "]";
        const Json& node = j[i];
        Property p;
        p.id = expect_string(field(node, "id", path), path + ".id");
        const Json& alphabet = expect_array(field(node, "alphabet", path), path + ".alphabet");
        for (std::size_t k = 0; k < alphabet.size(); ++k) {
            p.alphabet.push_back(
                expect_string(alphabet[k], path + ".alphabet[" + std::to_string(k) + "]"));
        }
        out.push_back(std::move(p));
    }
    return out;
}

inline std::vector<std::string> string_array(const Json& j, const std::string& path) {
    expect_array(j, path);
    std::vector<std::string> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        out.push_back(expect_string(j[i], path + "[" + std::to_string(i) + "]"));
    }
    return out;
}

}  // namespace io_detail

inline std::string serialize_system(const System& s) {
    const Structure& st = s.structure();
    Json root = Json::object();
    root["properties"] = io_detail::properties_to_json(st);
    Json contexts = Json::array();
    for (const Context& c : st.contexts()) {
        Json node = Json::object();
        node["id"] = c.id;
        node["properties"] = c.properties;
        Json cells = Json::array();
        const JointDist& joint = s.context_dist(c.id);
        for (const Point& tuple : joint.dist().alphabet()) {
            const Rational& mass = joint.mass(tuple);
            if (mass == 0) continue;
            Json cell = Json::object();
            Json outcomes = Json::array();
            for (const std::string& q : c.properties) outcomes.push_back(tuple.at(q).label());
            cell["outcomes"] = std::move(outcomes);
            cell["p"] = format_rational(mass);
            cells.push_back(std::move(cell));
        }
        node["distribution"] = std::move(cells);
        contexts.push_back(std::move(node));
    }
    root["contexts"] = std::move(contexts);
    return root.dump(2) + "\n";
}

inline System parse_system(const std::string& text) {
    Json root;
    try {
        root = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError(std::string("invalid JSON: ") + e.what());
    }
    io_detail::expect_object(root, "$");

    std::vector<Property> properties =
        io_detail::properties_from_json(io_detail::field(root, "properties", "$"));

    const Json& contexts_json = io_detail::expect_array(
        io_detail::field(root, "contexts", "$"), "contexts");
    std::vector<Context> contexts;
    std::vector<Json> distributions;
    for (std::size_t i = 0; i < contexts_json.size(); ++i) {
        const std::string path = "contexts[" + std::to_string(i) + "]";
        const Json& node = contexts_json[i];
        Context c;
        c.id = io_detail::expect_string(io_detail::field(node, "id", path), path + ".id");
        c.properties = io_detail::string_array(io_detail::field(node, "properties", path),
                                               path + ".properties");
        distributions.push_back(io_detail::field(node, "distribution", path));
        contexts.push_back(std::move(c));
    }

    Structure structure = [&] {
        try {
            return Structure(std::move(properties), std::move(contexts));
        } catch (const ValidationError& e) {
            throw ValidationError(std::string("$: ") + e.what());
        }
    }();

    std::map<std::string, JointDist> jointly;
    for (std::size_t i = 0; i < structure.contexts().size(); ++i) {
        const Context& c = structure.contexts()[i];
        const std::string path = "contexts[" + std::to_string(i) + "] ('" + c.id + "')";
        const Json& cells = io_detail::expect_array(distributions[i], path + ".distribution");
        std::map<Point, Rational> mass;
        for (std::size_t k = 0; k < cells.size(); ++k) {
            const std::string cell_path = path + ".distribution[" + std::to_string(k) + "]";
            const Json& cell = cells[k];
            const std::vector<std::string> outcomes = io_detail::string_array(
                io_detail::field(cell, "outcomes", cell_path), cell_path + ".outcomes");
            if (outcomes.size() != c.properties.size()) {
                throw ValidationError(cell_path + ": expected " +
                                      std::to_string(c.properties.size()) + " outcomes");
            }
            std::vector<Point::Field> fields;
            for (std::size_t t = 0; t < outcomes.size(); ++t) {
                fields.emplace_back(c.properties[t], Point::atom(outcomes[t]));
            }
            Point tuple = Point::record(std::move(fields));
            if (mass.contains(tuple)) {
                throw ValidationError(cell_path + ": duplicate cell");
            }
            mass.emplace(std::move(tuple), io_detail::rational_field(cell, "p", cell_path));
        }
        std::map<std::string, std::vector<Point>> comps;
        for (const std::string& q : c.properties) {
            comps.emplace(q, structure.outcome_points(q));
        }
        try {
            jointly.emplace(c.id, JointDist::dense(c.properties, std::move(comps), mass));
        } catch (const ValidationError& e) {
            throw ValidationError(path + ": " + e.what());
        }
    }
    return System(std::move(structure), std::move(jointly));
}

// ---------------------------------------------------------------------
// HVM files.
//
// {
//   "form": "general" | "ci" | "fc" | "nc" | "xi" | "rho",
//   "properties": as in the system format,
//   "contexts":   [{"id": "c1", "properties": [...]}, ...],
//   "hidden":     per form (alphabets and distributions),
//   "response":   [{"q": ..., "c": ..., "lambda": ..., "outcome": ...}, ...]
// }
//
// The "c" field is absent for the context-blind forms (ci, nc, rho).
// Hidden points use the point encoding above, so the composite hidden
// alphabets produced by the transformations serialize losslessly.

namespace io_detail {

inline Json dist_to_json(const Dist& d) {
    Json node = Json::object();
    Json alphabet = Json::array();
    for (const Point& p : d.alphabet()) alphabet.push_back(point_to_json(p));
    node["alphabet"] = std::move(alphabet);
    Json mass = Json::array();
    for (const auto& [p, m] : d.masses()) {
        Json cell = Json::object();
        cell["point"] = point_to_json(p);
        cell["p"] = format_rational(m);
        mass.push_back(std::move(cell));
    }
    node["mass"] = std::move(mass);
    return node;
}

inline Dist dist_from_json(const Json& j, const std::string& path) {
    const Json& alphabet_json = expect_array(field(j, "alphabet", path), path + ".alphabet");
    std::vector<Point> alphabet;
    for (std::size_t i = 0; i < alphabet_json.size(); ++i) {
        alphabet.push_back(point_from_json(alphabet_json[i],
                                           path + ".alphabet[" + std::to_string(i) + "]"));
    }
    const Json& mass_json = expect_array(field(j, "mass", path), path + ".mass");
    std::map<Point, Rational> mass;
    for (std::size_t i = 0; i < mass_json.size(); ++i) {
        const std::string cell_path = path + ".mass[" + std::to_string(i) + "]";
        Point p = point_from_json(field(mass_json[i], "point", cell_path),
                                  cell_path + ".point");
        if (mass.contains(p)) throw ValidationError(cell_path + ": duplicate point");
        mass.emplace(std::move(p), rational_field(mass_json[i], "p", cell_path));
    }
    try {
        return Dist(std::move(alphabet), std::move(mass));
    } catch (const ValidationError& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

// Joint hidden distributions (xi per context, rho overall) carry their
// component alphabets and their own point list.
inline Json joint_to_json(const JointDist& j) {
    Json node = Json::object();
    Json comps = Json::array();
    for (const std::string& k : j.keys()) {
        Json comp = Json::object();
        comp["key"] = k;
        Json alphabet = Json::array();
        for (const Point& p : j.component_alphabet(k)) alphabet.push_back(point_to_json(p));
        comp["alphabet"] = std::move(alphabet);
        comps.push_back(std::move(comp));
    }
    node["components"] = std::move(comps);
    Json points = Json::array();
    for (const Point& p : j.dist().alphabet()) points.push_back(point_to_json(p));
    node["points"] = std::move(points);
    Json mass = Json::array();
    for (const auto& [p, m] : j.dist().masses()) {
        Json cell = Json::object();
        cell["point"] = point_to_json(p);
        cell["p"] = format_rational(m);
        mass.push_back(std::move(cell));
    }
    node["mass"] = std::move(mass);
    return node;
}

inline JointDist joint_from_json(const Json& j, std::vector<std::string> expected_keys,
                                 const std::string& path) {
    const Json& comps_json = expect_array(field(j, "components", path), path + ".components");
    std::map<std::string, std::vector<Point>> comps;
    for (std::size_t i = 0; i < comps_json.size(); ++i) {
        const std::string comp_path = path + ".components[" + std::to_string(i) + "]";
        const std::string key =
            expect_string(field(comps_json[i], "key", comp_path), comp_path + ".key");
        const Json& alphabet_json = expect_array(field(comps_json[i], "alphabet", comp_path),
                                                 comp_path + ".alphabet");
        std::vector<Point> alphabet;
        for (std::size_t t = 0; t < alphabet_json.size(); ++t) {
            alphabet.push_back(point_from_json(
                alphabet_json[t], comp_path + ".alphabet[" + std::to_string(t) + "]"));
        }
        if (!comps.emplace(key, std::move(alphabet)).second) {
            throw ValidationError(comp_path + ": duplicate key '" + key + "'");
        }
    }
    const Json& points_json = expect_array(field(j, "points", path), path + ".points");
    std::vector<Point> points;
    for (std::size_t i = 0; i < points_json.size(); ++i) {
        points.push_back(
            point_from_json(points_json[i], path + ".points[" + std::to_string(i) + "]"));
    }
    const Json& mass_json = expect_array(field(j, "mass", path), path + ".mass");
    std::map<Point, Rational> mass;
    for (std::size_t i = 0; i < mass_json.size(); ++i) {
        const std::string cell_path = path + ".mass[" + std::to_string(i) + "]";
        Point p = point_from_json(field(mass_json[i], "point", cell_path),
                                  cell_path + ".point");
        if (mass.contains(p)) throw ValidationError(cell_path + ": duplicate point");
        mass.emplace(std::move(p), rational_field(mass_json[i], "p", cell_path));
    }
    try {
        return JointDist(std::move(expected_keys), std::move(comps),
                         Dist(std::move(points), std::move(mass)));
    } catch (const ValidationError& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

inline Json response_qc_to_json(const ResponseQC& table) {
    Json arr = Json::array();
    for (const auto& [key, outcome] : table) {
        const auto& [q, c, lambda] = key;
        Json node = Json::object();
        node["q"] = q;
        node["c"] = c;
        node["lambda"] = point_to_json(lambda);
        node["outcome"] = outcome;
        arr.push_back(std::move(node));
    }
    return arr;
}

inline Json response_q_to_json(const ResponseQ& table) {
    Json arr = Json::array();
    for (const auto& [key, outcome] : table) {
        Json node = Json::object();
        node["q"] = key.first;
        node["lambda"] = point_to_json(key.second);
        node["outcome"] = outcome;
        arr.push_back(std::move(node));
    }
    return arr;
}

inline ResponseQC response_qc_from_json(const Json& j) {
    expect_array(j, "response");
    ResponseQC table;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string path = "response[" + std::to_string(i) + "]";
        const Json& node = j[i];
        std::string q = expect_string(field(node, "q", path), path + ".q");
        std::string c = expect_string(field(node, "c", path), path + ".c");
        Point lambda = point_from_json(field(node, "lambda", path), path + ".lambda");
        std::string outcome = expect_string(field(node, "outcome", path), path + ".outcome");
        auto key = std::tuple(std::move(q), std::move(c), std::move(lambda));
        if (table.contains(key)) throw ValidationError(path + ": duplicate response entry");
        table.emplace(std::move(key), std::move(outcome));
    }
    return table;
}

inline ResponseQ response_q_from_json(const Json& j) {
    expect_array(j, "response");
    ResponseQ table;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string path = "response[" + std::to_string(i) + "]";
        const Json& node = j[i];
        if (node.is_object() && node.contains("c")) {
            throw SchemaError(path + ": context-blind form must not carry a 'c' field");
        }
        std::string q = expect_string(field(node, "q", path), path + ".q");
        Point lambda = point_from_json(field(node, "lambda", path), path + ".lambda");
        std::string outcome = expect_string(field(node, "outcome", path), path + ".outcome");
        auto key = std::pair(std::move(q), std::move(lambda));
        if (table.contains(key)) throw ValidationError(path + ": duplicate response entry");
        table.emplace(std::move(key), std::move(outcome));
    }
    return table;
}

inline Json structure_contexts_to_json(const Structure& st) {
    Json arr = Json::array();
    for (const Context& c : st.contexts()) {
        Json node = Json::object();
        node["id"] = c.id;
        node["properties"] = c.properties;
        arr.push_back(std::move(node));
    }
    return arr;
}

inline Structure structure_from_json(const Json& root) {
    std::vector<Property> properties =
        properties_from_json(field(root, "properties", "$"));
    const Json& contexts_json = expect_array(field(root, "contexts", "$"), "contexts");
    std::vector<Context> contexts;
    for (std::size_t i = 0; i < contexts_json.size(); ++i) {
        const std::string path = "contexts[" + std::to_string(i) + "]";
        Context c;
        c.id = expect_string(field(contexts_json[i], "id", path), path + ".id");
        c.properties =
            string_array(field(contexts_json[i], "properties", path), path + ".properties");
        contexts.push_back(std::move(c));
    }
    try {
        return Structure(std::move(properties), std::move(contexts));
    } catch (const ValidationError& e) {
        throw ValidationError(std::string("$: ") + e.what());
    }
}

}  // namespace io_detail

inline std::string serialize_hvm(const Hvm& m) {
    const Structure& st = structure_of(m);
    Json root = Json::object();
    root["form"] = form_name(form_of(m));
    root["properties"] = io_detail::properties_to_json(st);
    root["contexts"] = io_detail::structure_contexts_to_json(st);

    Json hidden;
    Json response;
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, GeneralHvm>) {
                hidden = Json::array();
                for (const Context& c : st.contexts()) {
                    Json node = io_detail::dist_to_json(v.hidden(c.id));
                    node["context"] = c.id;
                    hidden.push_back(std::move(node));
                }
                response = io_detail::response_qc_to_json(v.response());
            } else if constexpr (std::is_same_v<T, CiHvm>) {
                hidden = Json::object();
                Json alphabet = Json::array();
                for (const Point& p : v.hidden_alphabet()) {
                    alphabet.push_back(point_to_json(p));
                }
                hidden["alphabet"] = std::move(alphabet);
                Json per_context = Json::array();
                for (const Context& c : st.contexts()) {
                    Json node = Json::object();
                    node["context"] = c.id;
                    Json mass = Json::array();
                    for (const auto& [p, w] : v.hidden(c.id).masses()) {
                        Json cell = Json::object();
                        cell["point"] = point_to_json(p);
                        cell["p"] = format_rational(w);
                        mass.push_back(std::move(cell));
                    }
                    node["mass"] = std::move(mass);
                    per_context.push_back(std::move(node));
                }
                hidden["contexts"] = std::move(per_context);
                response = io_detail::response_q_to_json(v.response());
            } else if constexpr (std::is_same_v<T, FcHvm>) {
                hidden = io_detail::dist_to_json(v.hidden());
                response = io_detail::response_qc_to_json(v.response());
            } else if constexpr (std::is_same_v<T, NcHvm>) {
                hidden = io_detail::dist_to_json(v.hidden());
                response = io_detail::response_q_to_json(v.response());
            } else if constexpr (std::is_same_v<T, XiHvm>) {
                hidden = Json::array();
                for (const Context& c : st.contexts()) {
                    Json node = io_detail::joint_to_json(v.hidden(c.id));
                    node["context"] = c.id;
                    hidden.push_back(std::move(node));
                }
                response = io_detail::response_qc_to_json(v.response());
            } else {
                hidden = io_detail::joint_to_json(v.hidden());
                response = io_detail::response_q_to_json(v.response());
            }
        },
        m);
    root["hidden"] = std::move(hidden);
    root["response"] = std::move(response);
    return root.dump(2) + "\n";
}

inline Hvm parse_hvm(const std::string& text) {
    Json root;
    try {
        root = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError(std::string("invalid JSON: ") + e.what());
    }
    io_detail::expect_object(root, "$");
    const std::string form =
        io_detail::expect_string(io_detail::field(root, "form", "$"), "form");
    Structure st = io_detail::structure_from_json(root);
    const Json& hidden = io_detail::field(root, "hidden", "$");
    const Json& response = io_detail::field(root, "response", "$");

    // Per-context hidden entries arrive as an array tagged by context id.
    auto context_entries = [&](const Json& arr) {
        io_detail::expect_array(arr, "hidden");
        std::map<std::string, Json> out;
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string path = "hidden[" + std::to_string(i) + "]";
            const std::string cid =
                io_detail::expect_string(io_detail::field(arr[i], "context", path),
                                         path + ".context");
            if (!out.emplace(cid, arr[i]).second) {
                throw ValidationError(path + ": duplicate context '" + cid + "'");
            }
        }
        return out;
    };

    try {
        if (form == "general") {
            std::map<std::string, Dist> per_context;
            for (const auto& [cid, node] : context_entries(hidden)) {
                per_context.emplace(cid,
                                    io_detail::dist_from_json(node, "hidden('" + cid + "')"));
            }
            return GeneralHvm(std::move(st), std::move(per_context),
                              io_detail::response_qc_from_json(response));
        }
        if (form == "ci") {
            const Json& alphabet_json = io_detail::expect_array(
                io_detail::field(hidden, "alphabet", "hidden"), "hidden.alphabet");
            std::vector<Point> alphabet;
            for (std::size_t i = 0; i < alphabet_json.size(); ++i) {
                alphabet.push_back(point_from_json(
                    alphabet_json[i], "hidden.alphabet[" + std::to_string(i) + "]"));
            }
            std::map<std::string, Dist> per_context;
            for (const auto& [cid, node] :
                 context_entries(io_detail::field(hidden, "contexts", "hidden"))) {
                const std::string path = "hidden('" + cid + "')";
                const Json& mass_json =
                    io_detail::expect_array(io_detail::field(node, "mass", path),
                                            path + ".mass");
                std::map<Point, Rational> mass;
                for (std::size_t i = 0; i < mass_json.size(); ++i) {
                    const std::string cell_path = path + ".mass[" + std::to_string(i) + "]";
                    Point p = point_from_json(
                        io_detail::field(mass_json[i], "point", cell_path),
                        cell_path + ".point");
                    if (mass.contains(p)) {
                        throw ValidationError(cell_path + ": duplicate point");
                    }
                    mass.emplace(std::move(p),
                                 io_detail::rational_field(mass_json[i], "p", cell_path));
                }
                per_context.emplace(cid, Dist(alphabet, std::move(mass)));
            }
            return CiHvm(std::move(st), std::move(alphabet), std::move(per_context),
                         io_detail::response_q_from_json(response));
        }
        if (form == "fc") {
            return FcHvm(std::move(st), io_detail::dist_from_json(hidden, "hidden"),
                         io_detail::response_qc_from_json(response));
        }
        if (form == "nc") {
            return NcHvm(std::move(st), io_detail::dist_from_json(hidden, "hidden"),
                         io_detail::response_q_from_json(response));
        }
        if (form == "xi") {
            std::map<std::string, JointDist> per_context;
            for (const auto& [cid, node] : context_entries(hidden)) {
                if (!st.has_context(cid)) {
                    throw ValidationError("hidden('" + cid + "'): unknown context");
                }
                per_context.emplace(
                    cid, io_detail::joint_from_json(node, st.context(cid).properties,
                                                    "hidden('" + cid + "')"));
            }
            return XiHvm(std::move(st), std::move(per_context),
                         io_detail::response_qc_from_json(response));
        }
        if (form == "rho") {
            std::vector<std::string> property_ids;
            for (const Property& p : st.properties()) property_ids.push_back(p.id);
            JointDist joint =
                io_detail::joint_from_json(hidden, std::move(property_ids), "hidden");
            return RhoHvm(std::move(st), std::move(joint),
                          io_detail::response_q_from_json(response));
        }
    } catch (const ValidationError&) {
        throw;
    } catch (const SchemaError&) {
        throw;
    } catch (const ResponseUndefined&) {
        throw;
    } catch (const Error& e) {
        throw ValidationError(std::string("hvm: ") + e.what());
    }
    throw SchemaError("form: unknown form '" + form + "'");
}

}  // namespace hvmforge
