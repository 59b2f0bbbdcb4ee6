#include "varlex/io.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <stdexcept>

namespace varlex {

using nlohmann::json;

json field_to_json(const GridField& f) {
    return json{{"n", f.grid.dim},
                {"L", f.grid.half_width},
                {"N", f.grid.cells_per_axis},
                {"values", f.values}};
}

GridField field_from_json(const json& j) {
    DomainGrid grid = build_domain(j.at("n").get<int>(), j.at("L").get<double>(),
                                   j.at("N").get<long>());
    return GridField(grid, j.at("values").get<std::vector<double>>());
}

json exponent_to_json(const ExponentField& p) {
    json j = field_to_json(p.field());
    j["class"] = to_string(p.cls());
    return j;
}

ExponentField exponent_from_json(const json& j) {
    ExponentClass cls = ExponentClass::P;
    if (j.contains("class")) cls = exponent_class_from_string(j.at("class").get<std::string>());
    return ExponentField::create(field_from_json(j), cls);
}

json matrix_field_to_json(const MatrixWeightField& w) {
    return json{{"n", w.grid().dim},
                {"L", w.grid().half_width},
                {"N", w.grid().cells_per_axis},
                {"d", w.d()},
                {"values", w.raw()}};
}

MatrixWeightField matrix_field_from_json(const json& j) {
    DomainGrid grid = build_domain(j.at("n").get<int>(), j.at("L").get<double>(),
                                   j.at("N").get<long>());
    return MatrixWeightField(grid, j.at("d").get<int>(),
                             j.at("values").get<std::vector<double>>());
}

json vector_field_to_json(const VectorField& f) {
    return json{{"n", f.grid.dim},
                {"L", f.grid.half_width},
                {"N", f.grid.cells_per_axis},
                {"d", f.d},
                {"values", f.data}};
}

VectorField vector_field_from_json(const json& j) {
    DomainGrid grid = build_domain(j.at("n").get<int>(), j.at("L").get<double>(),
                                   j.at("N").get<long>());
    VectorField f(grid, j.at("d").get<int>());
    auto values = j.at("values").get<std::vector<double>>();
    if (values.size() != f.data.size())
        throw std::invalid_argument("vector field: value count does not match grid and d");
    f.data = std::move(values);
    return f;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& err) {
        throw std::runtime_error(path + ": " + err.what());
    }
    return j;
}

void save_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << '\n';
}

void save_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

} // namespace varlex
