#pragma once

// Problem-file parsing and report serialization.  Exact fractions travel as
// [num, den] pairs; floating-point values are emitted with a fixed 12
// significant digit format so identical inputs produce byte-identical
// reports.

#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "tilereg/maskdesign.hpp"
#include "tilereg/subdivision.hpp"

namespace tilereg {

using json = nlohmann::json;

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// parsing

inline Rational parse_fraction(const json& j) {
    if (j.is_number_integer()) return Rational(j.get<long long>());
    if (j.is_array() && j.size() == 2 && j[0].is_number_integer() && j[1].is_number_integer())
        return Rational(j[0].get<long long>(), j[1].get<long long>());
    if (j.is_number_float()) {
        // Exact dyadic value of the double.
        double v = j.get<double>();
        long long den = 1;
        while (v != std::floor(v) && den < (1LL << 60)) {
            v *= 2;
            den *= 2;
        }
        if (v != std::floor(v)) throw ValidationError("cannot represent float exactly");
        return Rational((long long)v, den);
    }
    throw ValidationError("expected integer, float, or [num, den] fraction");
}

inline IMat parse_matrix(const json& j) {
    if (!j.is_array() || j.empty()) throw ValidationError("matrix must be a nonempty array");
    IMat M;
    for (const auto& row : j) {
        IVec r;
        for (const auto& v : row) {
            if (!v.is_number_integer()) throw ValidationError("matrix entries must be integers");
            r.push_back(v.get<long long>());
        }
        M.push_back(std::move(r));
    }
    return M;
}

inline std::vector<IVec> parse_int_vectors(const json& j) {
    std::vector<IVec> out;
    for (const auto& row : j) {
        IVec r;
        for (const auto& v : row) r.push_back(v.get<long long>());
        out.push_back(std::move(r));
    }
    return out;
}

inline RVec parse_fraction_vector(const json& j) {
    RVec out;
    for (const auto& v : j) out.push_back(parse_fraction(v));
    return out;
}

inline Mask parse_mask(const json& j, int n) {
    Mask m;
    m.n = n;
    for (const auto& entry : j) {
        if (!entry.contains("index") || !entry.contains("value"))
            throw ValidationError("mask entries need index and value");
        IVec k;
        for (const auto& v : entry["index"]) k.push_back(v.get<long long>());
        if (int(k.size()) != n) throw ValidationError("mask index has wrong dimension");
        m.coeffs[k] += parse_fraction(entry["value"]);
    }
    return m;
}

inline ZeroConstraint parse_constraint(const json& j, int n, int default_order) {
    int order = j.contains("order") ? j["order"].get<int>() : default_order;
    if (j.contains("point")) {
        RVec z = parse_fraction_vector(j["point"]);
        if (int(z.size()) != n) throw ValidationError("constraint point has wrong dimension");
        return ZeroConstraint::point(std::move(z), order);
    }
    if (j.contains("subspace")) {
        const json& s = j["subspace"];
        RVec base = s.contains("base") ? parse_fraction_vector(s["base"])
                                       : RVec(n, Rational(0));
        RMat dirs;
        for (const auto& d : s["directions"]) dirs.push_back(parse_fraction_vector(d));
        return ZeroConstraint::subspace(std::move(base), std::move(dirs), order);
    }
    throw ValidationError("constraint must contain 'point' or 'subspace'");
}

struct ProblemFile {
    IMat matrix;
    std::optional<std::vector<IVec>> digits;
    std::optional<json> mask_json;
    std::optional<int> order;
    std::optional<int> max_order;
    std::optional<int> max_k;
    std::optional<int> per_subspace_k;
    json faces_json;       // raw; constraint orders depend on the analysis order
    bool auto_faces = false;
    double nullspace_tol = 1e-10;
    int depth = 6;
    std::uint64_t seed = 0x5eed;
    std::optional<std::vector<long long>> nodes;
};

inline ProblemFile parse_problem(const json& j) {
    ProblemFile p;
    if (!j.contains("matrix")) throw ValidationError("problem file needs 'matrix'");
    p.matrix = parse_matrix(j["matrix"]);
    if (j.contains("digits")) p.digits = parse_int_vectors(j["digits"]);
    if (j.contains("mask")) p.mask_json = j["mask"];
    if (j.contains("order")) p.order = j["order"].get<int>();
    if (j.contains("max_order")) p.max_order = j["max_order"].get<int>();
    if (j.contains("max_k")) p.max_k = j["max_k"].get<int>();
    if (j.contains("per_subspace_k")) p.per_subspace_k = j["per_subspace_k"].get<int>();
    if (j.contains("faces")) p.faces_json = j["faces"];
    if (j.contains("auto_faces")) p.auto_faces = j["auto_faces"].get<bool>();
    if (j.contains("tolerances") && j["tolerances"].contains("nullspace"))
        p.nullspace_tol = j["tolerances"]["nullspace"].get<double>();
    if (j.contains("depth")) p.depth = j["depth"].get<int>();
    if (j.contains("seed")) p.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("nodes")) {
        std::vector<long long> nodes;
        for (const auto& v : j["nodes"]) nodes.push_back(v.get<long long>());
        p.nodes = nodes;
    }
    return p;
}

inline std::vector<FaceSpec> parse_faces(const json& faces_json, const DilationMatrix& M,
                                         int k) {
    std::vector<FaceSpec> out;
    SpectralStructure ss = spectral_moduli(M);
    for (const auto& f : faces_json) {
        FaceSpec fs;
        fs.label = f.contains("label") ? f["label"].get<std::string>() : "face";
        if (f.contains("r")) fs.r = f["r"].get<double>();
        else if (f.contains("modulus_index")) {
            int idx = f["modulus_index"].get<int>();
            if (idx < 1 || idx > int(ss.moduli.size()))
                throw ValidationError("modulus_index out of range");
            fs.r = ss.moduli[idx - 1];
        } else {
            throw ValidationError("face needs 'r' or 'modulus_index'");
        }
        if (f.contains("constraints"))
            for (const auto& c : f["constraints"])
                fs.constraints.push_back(parse_constraint(c, M.n, 2 * (k + 1)));
        out.push_back(std::move(fs));
    }
    return out;
}

// ---------------------------------------------------------------------------
// serialization

// JSON text with deterministic float formatting; nlohmann stores the values,
// emission uses the raw strings below.
class JsonWriter {
  public:
    explicit JsonWriter(std::ostream& os) : os_(os) {}

    void write(const json& j, int indent = 0) {
        switch (j.type()) {
            case json::value_t::object: {
                if (j.empty()) { os_ << "{}"; return; }
                os_ << "{\n";
                bool first = true;
                for (auto it = j.begin(); it != j.end(); ++it) {
                    if (!first) os_ << ",\n";
                    first = false;
                    pad(indent + 2);
                    os_ << '"' << it.key() << "\": ";
                    write(it.value(), indent + 2);
                }
                os_ << "\n";
                pad(indent);
                os_ << "}";
                break;
            }
            case json::value_t::array: {
                if (j.empty()) { os_ << "[]"; return; }
                os_ << "[";
                bool first = true;
                for (const auto& v : j) {
                    if (!first) os_ << ", ";
                    first = false;
                    write(v, indent);
                }
                os_ << "]";
                break;
            }
            case json::value_t::number_float:
                os_ << fmt_double(j.get<double>());
                break;
            default:
                os_ << j.dump();
        }
    }

  private:
    void pad(int n) { for (int i = 0; i < n; ++i) os_ << ' '; }
    std::ostream& os_;
};

inline std::string to_text(const json& j) {
    std::ostringstream os;
    JsonWriter w(os);
    w.write(j);
    os << "\n";
    return os.str();
}

inline json report_to_json(const RegularityReport& rep) {
    json j;
    j["sum_rules_order"] = rep.sum_rules_order;
    json table = json::array();
    for (const auto& row : rep.table) {
        json r;
        r["k"] = row.k;
        r["dim"] = row.dim;
        r["rho"] = row.rho;
        r["alpha_candidate"] = row.alpha_candidate;
        table.push_back(r);
    }
    j["table"] = table;
    j["k_max"] = rep.k_max;
    if (rep.alpha) j["alpha"] = *rep.alpha;
    else j["alpha"] = nullptr;
    j["flags"] = json::array({rep.certification});
    j["notes"] = rep.notes;
    if (rep.per_subspace) {
        json ps;
        ps["k"] = rep.per_subspace->k;
        json rows = json::array();
        for (const auto& row : rep.per_subspace->rows) {
            json r;
            r["label"] = row.label;
            r["r"] = row.r;
            r["dim"] = row.dim;
            r["rho"] = row.rho;
            r["alpha"] = row.alpha;
            r["in_space"] = row.in_space;
            rows.push_back(r);
        }
        ps["faces"] = rows;
        if (rep.per_subspace->alpha) ps["alpha"] = *rep.per_subspace->alpha;
        else ps["alpha"] = nullptr;
        j["per_subspace"] = ps;
    } else {
        j["per_subspace"] = nullptr;
    }
    return j;
}

inline json mask_to_json(const Mask& m) {
    json arr = json::array();
    for (const auto& [k, v] : m.coeffs) {
        if (v.is_zero()) continue;
        json e;
        e["index"] = k;
        if (v.is_integer()) e["value"] = v.num();
        else e["value"] = json::array({v.num(), v.den()});
        arr.push_back(e);
    }
    return arr;
}

inline json omega_to_json(const SupportSet& S) {
    json arr = json::array();
    for (const auto& k : S.points) arr.push_back(k);
    return arr;
}

inline json spectra_to_json(const SpectralStructure& ss) {
    json j;
    j["moduli"] = json::array();
    for (double r : ss.moduli) j["moduli"].push_back(r);
    j["multiplicities"] = ss.multiplicities;
    j["clustering_tolerance"] = ss.clustering_tolerance;
    return j;
}

inline std::string tile_cloud_csv(const TileCloud& cloud, int n) {
    std::ostringstream os;
    for (int d = 0; d < n; ++d) os << (d ? "," : "") << "x" << (d + 1);
    os << "\n";
    for (const auto& p : cloud.points) {
        for (int d = 0; d < n; ++d) os << (d ? "," : "") << fmt_double(p[d]);
        os << "\n";
    }
    return os.str();
}

inline std::string grid_data_csv(const GridData& g, const DilationMatrix& M) {
    std::vector<IVec> keys;
    keys.reserve(g.values.size());
    for (const auto& [k, v] : g.values) keys.push_back(k);
    std::sort(keys.begin(), keys.end());
    std::ostringstream os;
    for (int d = 0; d < M.n; ++d) os << "x" << (d + 1) << ",";
    os << "value\n";
    for (const auto& k : keys) {
        auto x = grid_coordinates(M, g.level, k);
        for (int d = 0; d < M.n; ++d) os << fmt_double(x[d]) << ",";
        os << fmt_double(g.values.at(k)) << "\n";
    }
    return os.str();
}

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ValidationError("JSON parse error in " + path + ": " + e.what());
    }
    return j;
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path);
    out << text;
}

}  // namespace tilereg
