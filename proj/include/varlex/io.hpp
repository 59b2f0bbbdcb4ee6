#pragma once

#include "varlex/exponent.hpp"
#include "varlex/grid.hpp"
#include "varlex/matrix_weight.hpp"

#include <nlohmann/json_fwd.hpp>

#include <string>

namespace varlex {

/// GridField JSON schema: {"n", "L", "N", "values": flat row-major array}.
nlohmann::json field_to_json(const GridField& f);
GridField field_from_json(const nlohmann::json& j);

/// ExponentField adds {"class": "P" | "P1" | "P0"} to the field schema.
nlohmann::json exponent_to_json(const ExponentField& p);
ExponentField exponent_from_json(const nlohmann::json& j);

/// MatrixWeightField: {"n", "L", "N", "d", "values": flat row-major d x d blocks}.
nlohmann::json matrix_field_to_json(const MatrixWeightField& w);
MatrixWeightField matrix_field_from_json(const nlohmann::json& j);

/// Vector field: {"n", "L", "N", "d", "values": flat cell-major components}.
nlohmann::json vector_field_to_json(const VectorField& f);
VectorField vector_field_from_json(const nlohmann::json& j);

nlohmann::json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const nlohmann::json& j);
void save_text_file(const std::string& path, const std::string& text);

} // namespace varlex
