#pragma once

#include <json.hpp>

#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "weakmeas/meter.hpp"
#include "weakmeas/scenario.hpp"

namespace weakmeas {

using Json = nlohmann::json;

// Basis kets are addressed either by a single letter (A..Z -> 0..25) or by a
// decimal index.
inline Eigen::Index parse_ket_label(const std::string& label, Eigen::Index dim) {
    Eigen::Index k = -1;
    if (label.size() == 1 && std::isalpha(static_cast<unsigned char>(label[0]))) {
        k = std::toupper(static_cast<unsigned char>(label[0])) - 'A';
    } else if (!label.empty() &&
               label.find_first_not_of("0123456789") == std::string::npos) {
        k = static_cast<Eigen::Index>(std::stoll(label));
    } else {
        throw DocumentError("ket label '" + label + "' is neither a letter nor an index");
    }
    if (k < 0 || k >= dim)
        throw DocumentError("ket label '" + label + "' is outside dimension " +
                            std::to_string(dim));
    return k;
}

inline std::string ket_name(Eigen::Index k) {
    if (k < 26) return std::string(1, static_cast<char>('A' + k));
    return "k" + std::to_string(k);
}

// Projector onto the span of the named computational basis kets.
inline Mat basis_projector(Eigen::Index dim, const std::vector<Eigen::Index>& kets) {
    Mat p = Mat::Zero(dim, dim);
    for (Eigen::Index k : kets) {
        if (k < 0 || k >= dim) throw IndexError("basis_projector: ket index out of range");
        p(k, k) = 1.0;
    }
    return p;
}

inline GaussianMeter projector_meter(const Mat& p, double g, double sigma, std::string label) {
    return GaussianMeter(projector_decomposition(p), g, sigma, std::move(label));
}

// The triple of meters used for the contradiction protocol on kets k1, k2:
// one device per projector, including their sum, all coupled in the same
// window.
inline QuiescentWindow pair_window(Eigen::Index dim, Eigen::Index k1, Eigen::Index k2, double g,
                                   double sigma) {
    QuiescentWindow w;
    w.meters.push_back(projector_meter(basis_projector(dim, {k1}), g, sigma, ket_name(k1)));
    w.meters.push_back(projector_meter(basis_projector(dim, {k2}), g, sigma, ket_name(k2)));
    w.meters.push_back(projector_meter(basis_projector(dim, {k1, k2}), g, sigma,
                                       ket_name(k1) + "+" + ket_name(k2)));
    return w;
}

// Three boxes, one particle: |in> = (|A>+|B>+|C>)/sqrt(3) and
// |f> = (|A>+|B>-|C>)/sqrt(3) with no evolution on either segment. Weak
// values of the box projectors come out 1, 1 and -1.
inline Scenario three_box(QuiescentWindow window = {}) {
    const double a = 1.0 / std::sqrt(3.0);
    Vec in(3), f(3);
    in << a, a, a;
    f << a, a, -a;
    return Scenario(StateVector(in), identity(3), identity(3), StateVector(f),
                    std::move(window));
}

namespace detail {

inline Complex parse_complex(const Json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw DocumentError("\"" + where + "\" entries must be [re, im] pairs");
    return {j[0].get<double>(), j[1].get<double>()};
}

inline Vec parse_vector(const Json& j, Eigen::Index dim, const std::string& field) {
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != dim)
        throw DocumentError("\"" + field + "\" must be a list of dim [re, im] pairs");
    Vec v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v[i] = parse_complex(j[i], field);
    return v;
}

inline Mat parse_matrix(const Json& j, Eigen::Index dim, const std::string& field) {
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != dim)
        throw DocumentError("\"" + field + "\" must be a dim x dim row-major matrix");
    Mat m(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
        const Json& row = j[r];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != dim)
            throw DocumentError("\"" + field + "\" must be a dim x dim row-major matrix");
        for (Eigen::Index c = 0; c < dim; ++c) m(r, c) = parse_complex(row[c], field);
    }
    return m;
}

inline std::vector<Eigen::Index> parse_ket_list(const Json& j, Eigen::Index dim,
                                                const std::string& field) {
    if (!j.is_array() || j.empty())
        throw DocumentError("\"" + field + "\" must be a nonempty list of kets");
    std::vector<Eigen::Index> kets;
    std::set<Eigen::Index> seen;
    for (const Json& e : j) {
        Eigen::Index k = 0;
        if (e.is_number_integer()) {
            k = e.get<Eigen::Index>();
            if (k < 0 || k >= dim)
                throw DocumentError("\"" + field + "\" ket index outside dimension");
        } else if (e.is_string()) {
            k = parse_ket_label(e.get<std::string>(), dim);
        } else {
            throw DocumentError("\"" + field + "\" kets must be labels or indices");
        }
        if (!seen.insert(k).second) throw DocumentError("\"" + field + "\" repeats a ket");
        kets.push_back(k);
    }
    return kets;
}

inline GaussianMeter parse_meter(const Json& j, Eigen::Index dim, std::size_t index) {
    const std::string where = "meters[" + std::to_string(index) + "]";
    if (!j.is_object()) throw DocumentError("\"" + where + "\" must be an object");
    if (!j.contains("observable"))
        throw DocumentError("\"" + where + ".observable\" is required");
    if (!j.contains("g") || !j["g"].is_number())
        throw DocumentError("\"" + where + ".g\" must be a number");

    const double g = j["g"].get<double>();
    const double sigma = j.contains("sigma") ? j["sigma"].get<double>() : 1.0;
    if (!(g >= 0.0)) throw DocumentError("\"" + where + ".g\" must be nonnegative");
    if (!(sigma > 0.0)) throw DocumentError("\"" + where + ".sigma\" must be positive");
    std::string label =
        j.contains("label") ? j["label"].get<std::string>() : "m" + std::to_string(index);

    const Json& obs = j["observable"];
    SpectralDecomposition spec;
    if (obs.is_object() && obs.contains("projector_kets")) {
        spec = projector_decomposition(
            basis_projector(dim, parse_ket_list(obs["projector_kets"], dim,
                                                where + ".observable.projector_kets")));
    } else if (obs.is_array() && !obs.empty() && obs[0].is_array() && !obs[0].empty() &&
               obs[0][0].is_array()) {
        const Mat m = parse_matrix(obs, dim, where + ".observable");
        if (!validate(m, OperatorRole::Hermitian))
            throw DocumentError("\"" + where + ".observable\" matrix is not Hermitian");
        spec = validate(m, OperatorRole::Projector) ? projector_decomposition(m)
                                                    : spectral_decompose(m);
    } else if (obs.is_array()) {
        spec = projector_decomposition(
            basis_projector(dim, parse_ket_list(obs, dim, where + ".observable")));
    } else {
        throw DocumentError("\"" + where +
                            ".observable\" must be a matrix or a list of projector kets");
    }
    return GaussianMeter(std::move(spec), g, sigma, std::move(label));
}

}  // namespace detail

// Build a Scenario from a parsed document tree. Validation failures carry the
// offending field name; physical validation (unitarity, normalization,
// vanishing amplitude) is re-reported as a DocumentError naming the field.
inline Scenario scenario_from_json(const Json& doc) {
    if (!doc.is_object()) throw DocumentError("scenario document must be an object");
    if (!doc.contains("dim") || !doc["dim"].is_number_integer() || doc["dim"].get<int>() < 1)
        throw DocumentError("\"dim\" must be a positive integer");
    const auto dim = doc["dim"].get<Eigen::Index>();
    if (dim > 64) throw DocumentError("\"dim\" exceeds the supported maximum of 64");
    if (!doc.contains("in")) throw DocumentError("\"in\" is required");
    if (!doc.contains("f")) throw DocumentError("\"f\" is required");

    const Vec in = detail::parse_vector(doc["in"], dim, "in");
    const Vec f = detail::parse_vector(doc["f"], dim, "f");
    const Mat u_pre =
        doc.contains("u_pre") ? detail::parse_matrix(doc["u_pre"], dim, "u_pre") : identity(dim);
    const Mat u_post = doc.contains("u_post") ? detail::parse_matrix(doc["u_post"], dim, "u_post")
                                              : identity(dim);

    QuiescentWindow window;
    if (doc.contains("meters")) {
        if (!doc["meters"].is_array()) throw DocumentError("\"meters\" must be a list");
        std::set<std::string> labels;
        for (std::size_t i = 0; i < doc["meters"].size(); ++i) {
            GaussianMeter m = detail::parse_meter(doc["meters"][i], dim, i);
            if (!labels.insert(m.label).second)
                throw DocumentError("\"meters[" + std::to_string(i) +
                                    "].label\" duplicates an earlier label");
            window.meters.push_back(std::move(m));
        }
    }

    if (std::abs(in.squaredNorm() - 1.0) > kNormTol)
        throw DocumentError("\"in\" is not normalized");
    if (std::abs(f.squaredNorm() - 1.0) > kNormTol)
        throw DocumentError("\"f\" is not normalized");
    if (!validate(u_pre, OperatorRole::Unitary)) throw DocumentError("u_pre fails unitarity");
    if (!validate(u_post, OperatorRole::Unitary)) throw DocumentError("u_post fails unitarity");
    try {
        return Scenario(StateVector(in), u_pre, u_post, StateVector(f), std::move(window));
    } catch (const VanishingAmplitudeError&) {
        throw DocumentError(
            "transition amplitude <f|U|in> vanishes; \"f\" is unreachable from \"in\"");
    }
}

inline Scenario load_scenario_file(const std::string& path) {
    std::ifstream stream(path);
    if (!stream) throw DocumentError("cannot open scenario document '" + path + "'");
    Json doc;
    try {
        doc = Json::parse(stream);
    } catch (const Json::parse_error& e) {
        throw DocumentError("scenario document is not valid JSON: " + std::string(e.what()));
    }
    return scenario_from_json(doc);
}

}  // namespace weakmeas
