#pragma once

#include <fstream>
#include <json.hpp>
#include <stdexcept>
#include <string>

#include "gafz/series.hpp"
#include "gafz/zeros.hpp"

namespace gafz {

using Json = nlohmann::json;

inline std::string to_string(DomainKind kind) {
    switch (kind) {
        case DomainKind::unit_disk: return "unit_disk";
        case DomainKind::plane: return "plane";
        case DomainKind::conformal_image: return "conformal_image";
    }
    throw std::logic_error("unknown domain kind");
}

inline DomainKind domain_kind_from_string(const std::string& s) {
    if (s == "unit_disk") return DomainKind::unit_disk;
    if (s == "plane") return DomainKind::plane;
    if (s == "conformal_image") return DomainKind::conformal_image;
    throw std::invalid_argument("unknown domain kind: " + s);
}

inline Json to_json(const SeriesSpec& spec) {
    Json j{{"domain_kind", to_string(spec.domain_kind)},
           {"rho", spec.rho},
           {"truncation_degree", spec.truncation_degree},
           {"conditioning",
            spec.conditioning == Conditioning::zero_at_origin ? "zero_at_origin" : "none"}};
    if (!spec.conformal_map_label.empty()) j["conformal_map_label"] = spec.conformal_map_label;
    return j;
}

inline SeriesSpec series_spec_from_json(const Json& j) {
    SeriesSpec spec;
    spec.domain_kind = domain_kind_from_string(j.at("domain_kind").get<std::string>());
    spec.rho = j.at("rho").get<double>();
    spec.truncation_degree = j.at("truncation_degree").get<int>();
    const std::string cond = j.at("conditioning").get<std::string>();
    if (cond == "zero_at_origin")
        spec.conditioning = Conditioning::zero_at_origin;
    else if (cond == "none")
        spec.conditioning = Conditioning::none;
    else
        throw std::invalid_argument("unknown conditioning: " + cond);
    if (j.contains("conformal_map_label"))
        spec.conformal_map_label = j.at("conformal_map_label").get<std::string>();
    spec.validate();
    return spec;
}

inline Json to_json(const CoefficientVector& cv) {
    Json coeffs = Json::array();
    for (const Complex& c : cv.coeffs) coeffs.push_back({c.real(), c.imag()});
    return Json{{"schema_version", 1}, {"spec", to_json(cv.spec)}, {"coeffs", coeffs}};
}

inline CoefficientVector coefficient_vector_from_json(const Json& j) {
    if (j.at("schema_version").get<int>() != 1)
        throw std::invalid_argument("unsupported schema_version");
    CoefficientVector cv;
    cv.spec = series_spec_from_json(j.at("spec"));
    for (const auto& pair : j.at("coeffs"))
        cv.coeffs.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
    if (cv.coeffs.size() != static_cast<std::size_t>(cv.spec.truncation_degree) + 1)
        throw std::invalid_argument("coefficient count does not match truncation degree");
    return cv;
}

inline Json to_json(const ZeroSet& zs) {
    Json points = Json::array();
    for (const Complex& z : zs.points) points.push_back({z.real(), z.imag()});
    return Json{{"schema_version", 1},
                {"spec", to_json(zs.source_spec)},
                {"reliable_radius", zs.reliable_radius},
                {"polish_tolerance", zs.polish_tolerance},
                {"points", points},
                {"residuals", zs.residuals}};
}

/// CSV with the columns re, im, modulus, residual.
inline void write_zero_set_csv(const ZeroSet& zs, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "re,im,modulus,residual\n";
    out.precision(17);
    for (std::size_t i = 0; i < zs.points.size(); ++i)
        out << zs.points[i].real() << ',' << zs.points[i].imag() << ',' << std::abs(zs.points[i])
            << ',' << zs.residuals[i] << '\n';
}

inline void write_json_file(const Json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << j.dump(2) << '\n';
}

inline Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    Json j;
    in >> j;
    return j;
}

}  // namespace gafz
