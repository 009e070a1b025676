#pragma once
// JSON forms for spectra, families, and complex matrices.
//
// Family schema: { "d": int, "lambdas": [real...], "unitaries": [m][r][c] }
// where every entry is a two-element [re, im] array and matrices are row-major.
// Lambdas in a family file are stored sorted descending; a file that violates
// that is rejected rather than silently permuted, because row and column
// indices of the member matrices are tied to the level ordering.

#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ddc/coding.hpp"
#include "ddc/errors.hpp"
#include "ddc/linalg.hpp"

namespace ddc {

inline nlohmann::json matrix_to_json(const ComplexMatrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t c = 0; c < m.cols(); ++c)
            row.push_back({m(r, c).real(), m(r, c).imag()});
        rows.push_back(std::move(row));
    }
    return rows;
}

inline ComplexMatrix matrix_from_json(const nlohmann::json& j, const std::string& field) {
    if (!j.is_array() || j.empty())
        throw InvalidArgument(field + ": expected a non-empty array of rows");
    const std::size_t rows = j.size();
    if (!j[0].is_array() || j[0].empty())
        throw InvalidArgument(field + ": rows must be non-empty arrays");
    const std::size_t cols = j[0].size();
    ComplexMatrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        if (!j[r].is_array() || j[r].size() != cols)
            throw InvalidArgument(field + ": ragged row " + std::to_string(r));
        for (std::size_t c = 0; c < cols; ++c) {
            const nlohmann::json& e = j[r][c];
            if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
                throw InvalidArgument(field + ": entry (" + std::to_string(r) + "," +
                                      std::to_string(c) + ") must be [re, im]");
            m(r, c) = cx{e[0].get<double>(), e[1].get<double>()};
        }
    }
    return m;
}

inline nlohmann::json family_to_json(const EncodingFamily& f) {
    nlohmann::json members = nlohmann::json::array();
    for (const UnitaryMatrix& u : f.unitaries()) members.push_back(matrix_to_json(u.mat()));
    return nlohmann::json{
        {"d", f.d()}, {"lambdas", f.spectrum().lambdas()}, {"unitaries", std::move(members)}};
}

inline EncodingFamily family_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw InvalidArgument("family: expected a JSON object");
    if (!j.contains("d") || !j["d"].is_number_unsigned())
        throw InvalidArgument("d: missing or not a non-negative integer");
    const auto d = j["d"].get<std::size_t>();
    if (!j.contains("lambdas") || !j["lambdas"].is_array())
        throw InvalidArgument("lambdas: missing or not an array");
    std::vector<double> lambdas;
    for (const nlohmann::json& l : j["lambdas"]) {
        if (!l.is_number()) throw InvalidArgument("lambdas: entries must be numbers");
        lambdas.push_back(l.get<double>());
    }
    if (lambdas.size() != d)
        throw InvalidArgument("lambdas: length " + std::to_string(lambdas.size()) +
                              " does not match d = " + std::to_string(d));
    for (std::size_t i = 1; i < lambdas.size(); ++i)
        if (lambdas[i - 1] < lambdas[i])
            throw InvalidArgument("lambdas: must be sorted descending in a family file");
    SchmidtSpectrum spectrum(lambdas);

    if (!j.contains("unitaries") || !j["unitaries"].is_array() || j["unitaries"].empty())
        throw InvalidArgument("unitaries: missing or empty");
    std::vector<UnitaryMatrix> members;
    std::size_t idx = 0;
    for (const nlohmann::json& jm : j["unitaries"]) {
        const std::string field = "unitaries[" + std::to_string(idx++) + "]";
        ComplexMatrix m = matrix_from_json(jm, field);
        if (m.rows() != d || m.cols() != d)
            throw InvalidArgument(field + ": expected " + std::to_string(d) + "x" +
                                  std::to_string(d));
        members.emplace_back(std::move(m), 1e-8);
    }
    return EncodingFamily(std::move(spectrum), std::move(members));
}

inline void save_family(const std::string& path, const EncodingFamily& f) {
    std::ofstream out(path);
    if (!out) throw InvalidArgument("cannot open for writing: " + path);
    out << family_to_json(f).dump(2) << '\n';
}

inline nlohmann::json parse_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open: " + path);
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw InvalidArgument("malformed JSON in " + path);
    return j;
}

inline EncodingFamily load_family(const std::string& path) {
    return family_from_json(parse_json_file(path));
}

} // namespace ddc
