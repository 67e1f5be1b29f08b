#pragma once

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "potential.hpp"
#include "transfer.hpp"

namespace scatter1d::io {

using json = nlohmann::ordered_json;

inline constexpr const char* schema_version = "v1";

struct parse_error : invalid_input {
    using invalid_input::invalid_input;
};

// ---- number formatting: 17 significant digits everywhere ----

inline std::string fmt(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (x == 0.0) x = 0.0;  // no "-0"
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// Serializer with fixed %.17g doubles; key order is insertion order.
inline void dump_to(std::string& out, const json& j, int indent, int depth) {
    const std::string pad = indent > 0 ? std::string(std::size_t(indent) * (depth + 1), ' ') : "";
    const std::string pad_close = indent > 0 ? std::string(std::size_t(indent) * depth, ' ') : "";
    const char* nl = indent > 0 ? "\n" : "";
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) { out += "{}"; return; }
            out += "{";
            out += nl;
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) { out += ","; out += nl; }
                first = false;
                out += pad + json(it.key()).dump() + (indent > 0 ? ": " : ":");
                dump_to(out, it.value(), indent, depth + 1);
            }
            out += nl + pad_close + "}";
            return;
        }
        case json::value_t::array: {
            if (j.empty()) { out += "[]"; return; }
            // numeric pairs stay on one line
            const bool flat = indent == 0 || (j.size() <= 2 && std::all_of(j.begin(), j.end(),
                                                                        [](const json& e) { return e.is_number(); }));
            out += "[";
            bool first = true;
            for (const auto& e : j) {
                if (!first) out += flat && indent > 0 ? ", " : ",";
                if (!flat) out += nl + pad;
                first = false;
                dump_to(out, e, indent, depth + 1);
            }
            if (!flat) out += nl + pad_close;
            out += "]";
            return;
        }
        case json::value_t::number_float: {
            const double x = j.get<double>();
            out += std::isfinite(x) ? fmt(x) : "null";
            return;
        }
        default:
            out += j.dump();
    }
}

inline std::string dump(const json& j, int indent = 2) {
    std::string out;
    dump_to(out, j, indent, 0);
    return out;
}

// ---- complex values ----

inline json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline cplx complex_from(const json& j, const std::string& what) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    throw parse_error(what + ": expected a number or [re, im]");
}

// "re,im", "re" or "mag@deg" (phase in degrees). Anything else is rejected.
inline cplx parse_complex(const std::string& text) {
    auto number = [&](const std::string& s) {
        std::size_t used = 0;
        double v;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            throw parse_error("malformed complex number '" + text + "'");
        }
        if (used != s.size() || !std::isfinite(v)) throw parse_error("malformed complex number '" + text + "'");
        return v;
    };
    if (text.empty()) throw parse_error("empty complex number");
    if (std::any_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); }))
        throw parse_error("malformed complex number '" + text + "'");
    if (auto at = text.find('@'); at != std::string::npos) {
        const double mag = number(text.substr(0, at));
        const double deg = number(text.substr(at + 1));
        if (mag < 0.0) throw parse_error("negative magnitude in '" + text + "'");
        return std::polar(mag, deg * pi / 180.0);
    }
    if (auto comma = text.find(','); comma != std::string::npos)
        return {number(text.substr(0, comma)), number(text.substr(comma + 1))};
    return {number(text), 0.0};
}

// ---- potentials ----

namespace detail {

inline const json& field(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw parse_error(where + ": missing field '" + key + "'");
    return j.at(key);
}

inline double number_field(const json& j, const char* key, const std::string& where) {
    const auto& v = field(j, key, where);
    if (!v.is_number()) throw parse_error(where + ": field '" + key + "' must be a number");
    return v.get<double>();
}

inline int integer_field(const json& j, const char* key, const std::string& where) {
    const auto& v = field(j, key, where);
    if (!v.is_number_integer()) throw parse_error(where + ": field '" + key + "' must be an integer");
    return v.get<int>();
}

inline double optional_number(const json& j, const char* key, double fallback, const std::string& where) {
    return j.contains(key) ? number_field(j, key, where) : fallback;
}

}  // namespace detail

inline Potential potential_from_json(const json& j) {
    using namespace detail;
    if (!j.is_object()) throw parse_error("potential must be a JSON object");
    if (j.contains("version")) {
        if (j.at("version") != schema_version) throw parse_error("unsupported schema version");
        return potential_from_json(field(j, "potential", "document"));
    }
    const auto& type_j = field(j, "type", "potential");
    if (!type_j.is_string()) throw parse_error("potential: 'type' must be a string");
    const std::string type = type_j.get<std::string>();
    const std::string w = type;
    auto list = [&](const char* key) -> const json& {
        const auto& v = field(j, key, w);
        if (!v.is_array()) throw parse_error(w + ": field '" + key + "' must be an array");
        return v;
    };

    if (type == "delta_comb") {
        DeltaComb c;
        for (const auto& t : list("terms"))
            c.terms.push_back({complex_from(field(t, "strength", w), w), number_field(t, "location", w)});
        return c;
    }
    if (type == "piecewise") {
        PiecewiseConstant p;
        for (const auto& b : list("breakpoints")) {
            if (!b.is_number()) throw parse_error(w + ": breakpoints must be numbers");
            p.breakpoints.push_back(b.get<double>());
        }
        for (const auto& v : list("values")) p.values.push_back(complex_from(v, w));
        return p;
    }
    if (type == "exp_grating") {
        return ExpGrating{complex_from(field(j, "strength", w), w), integer_field(j, "harmonic", w),
                          number_field(j, "length", w), optional_number(j, "offset", 0.0, w)};
    }
    if (type == "fourier_cell") {
        FourierCell f;
        f.length = number_field(j, "length", w);
        for (const auto& c : list("coefficients"))
            f.coefficients.emplace_back(integer_field(c, "harmonic", w), complex_from(field(c, "value", w), w));
        return f;
    }
    if (type == "smis") {
        SmisProfile s;
        s.design_k = number_field(j, "k0", w);
        s.shape = number_field(j, "alpha", w);
        s.winding = integer_field(j, "winding", w);
        s.shift = optional_number(j, "shift", 0.0, w);
        if (j.contains("conjugated")) {
            if (!j.at("conjugated").is_boolean()) throw parse_error(w + ": 'conjugated' must be a boolean");
            s.conjugated = j.at("conjugated").get<bool>();
        }
        return s;
    }
    if (type == "sampled") {
        Sampled s;
        s.x0 = number_field(j, "x0", w);
        s.dx = number_field(j, "dx", w);
        for (const auto& v : list("values")) s.values.push_back(complex_from(v, w));
        return s;
    }
    if (type == "sum") {
        Sum s;
        for (const auto& t : list("terms")) s.terms.push_back(potential_from_json(t));
        return s;
    }
    if (type == "translated")
        return Translated{potential_from_json(field(j, "inner", w)), number_field(j, "shift", w)};
    if (type == "time_reversed") return TimeReversed{potential_from_json(field(j, "inner", w))};
    if (type == "locally_periodic")
        return LocallyPeriodic{potential_from_json(field(j, "cell", w)), integer_field(j, "copies", w),
                               number_field(j, "period", w)};
    throw parse_error("unknown potential type '" + type + "'");
}

inline json potential_to_json(const Potential& p) {
    using scatter1d::detail::overloaded;
    return visit(p, overloaded{
        [](const DeltaComb& v) {
            json terms = json::array();
            for (auto& t : v.terms) terms.push_back({{"strength", complex_json(t.strength)}, {"location", t.location}});
            return json{{"type", "delta_comb"}, {"terms", terms}};
        },
        [](const PiecewiseConstant& v) {
            json vals = json::array();
            for (auto z : v.values) vals.push_back(complex_json(z));
            return json{{"type", "piecewise"}, {"breakpoints", v.breakpoints}, {"values", vals}};
        },
        [](const ExpGrating& v) {
            return json{{"type", "exp_grating"}, {"strength", complex_json(v.strength)},
                        {"harmonic", v.harmonic}, {"length", v.length}, {"offset", v.offset}};
        },
        [](const FourierCell& v) {
            json cs = json::array();
            for (auto& [n, c] : v.coefficients) cs.push_back({{"harmonic", n}, {"value", complex_json(c)}});
            return json{{"type", "fourier_cell"}, {"length", v.length}, {"coefficients", cs}};
        },
        [](const SmisProfile& v) {
            return json{{"type", "smis"},     {"k0", v.design_k}, {"alpha", v.shape},
                        {"winding", v.winding}, {"shift", v.shift}, {"conjugated", v.conjugated}};
        },
        [](const Sampled& v) {
            json vals = json::array();
            for (auto z : v.values) vals.push_back(complex_json(z));
            return json{{"type", "sampled"}, {"x0", v.x0}, {"dx", v.dx}, {"values", vals}};
        },
        [](const Sum& v) {
            json terms = json::array();
            for (const auto& t : v.terms) terms.push_back(potential_to_json(t));
            return json{{"type", "sum"}, {"terms", terms}};
        },
        [](const Translated& v) {
            return json{{"type", "translated"}, {"shift", v.shift}, {"inner", potential_to_json(v.inner)}};
        },
        [](const TimeReversed& v) {
            return json{{"type", "time_reversed"}, {"inner", potential_to_json(v.inner)}};
        },
        [](const LocallyPeriodic& v) {
            return json{{"type", "locally_periodic"}, {"cell", potential_to_json(v.cell)}, {"copies", v.copies},
                        {"period", v.period}};
        },
    });
}

inline json document(const Potential& p) {
    return json{{"version", schema_version}, {"potential", potential_to_json(p)}};
}

inline Potential parse_potential(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw parse_error(std::string("invalid JSON: ") + e.what());
    }
    try {
        return potential_from_json(j);
    } catch (const json::exception& e) {
        throw parse_error(std::string("malformed potential: ") + e.what());
    }
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw parse_error("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline Potential load_potential(const std::string& path) { return parse_potential(read_file(path)); }

// ---- matrices and amplitudes ----

inline json matrix_json(const TransferMatrix& M) {
    return json{{"k", M.k},
                {"M11", complex_json(M.m11())},
                {"M12", complex_json(M.m12())},
                {"M21", complex_json(M.m21())},
                {"M22", complex_json(M.m22())}};
}

inline json amplitudes_json(const ScatteringData& d) {
    return json{{"k", d.k},
                {"R_l", complex_json(d.reflection_left)},
                {"R_r", complex_json(d.reflection_right)},
                {"T", complex_json(d.transmission)}};
}

inline json classification_json(const Classification& c) {
    json names = json::array();
    for (const auto& n : c.names()) names.push_back(n);
    if (names.empty()) names.push_back("regular");
    return names;
}

inline std::string join(const std::vector<std::string>& parts, char sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

inline std::string csv_complex(cplx z) { return fmt(z.real()) + "," + fmt(z.imag()); }

// Profile export: x, Re v, Im v on a uniform grid over the support (deltas are not sampled).
inline std::string profile_csv(const Potential& p, int points = 2049) {
    std::string out = "x,re_v,im_v\n";
    const auto s = support(p);
    if (!s || points < 2) return out;
    for (int i = 0; i < points; ++i) {
        const double x = s->lo + s->length() * double(i) / (points - 1);
        const cplx v = evaluate(p, x);
        out += fmt(x) + "," + fmt(v.real()) + "," + fmt(v.imag()) + "\n";
    }
    return out;
}

}  // namespace scatter1d::io
