#include "plmcl/model_io.hpp"

#include "plmcl/error.hpp"
#include "plmcl/io.hpp"

#include <json.hpp>

namespace plmcl {
namespace {

using json = nlohmann::ordered_json;

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Matrix matrix_from_json(const json& rows, Index expected_cols, const std::string& field) {
  if (!rows.is_array()) throw DataError("model json: `" + field + "` must be an array");
  const Index r = static_cast<Index>(rows.size());
  Index c = expected_cols;
  if (r > 0) {
    if (!rows[0].is_array()) {
      throw DataError("model json: `" + field + "` rows must be arrays");
    }
    c = static_cast<Index>(rows[0].size());
  }
  Matrix m(r, c);
  for (Index i = 0; i < r; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (static_cast<Index>(row.size()) != c) {
      throw DataError("model json: ragged rows in `" + field + "`");
    }
    for (Index j = 0; j < c; ++j) m(i, j) = row[static_cast<std::size_t>(j)].get<Real>();
  }
  return m;
}

Vector vector_from_json(const json& values, const std::string& field) {
  if (!values.is_array()) throw DataError("model json: `" + field + "` must be an array");
  Vector v(static_cast<Index>(values.size()));
  for (Index i = 0; i < v.size(); ++i) v(i) = values[static_cast<std::size_t>(i)].get<Real>();
  return v;
}

}  // namespace

void save_mlp_json(const MlpParams& params, const std::string& path) {
  json doc;
  doc["hidden_width"] = params.hidden();
  doc["inputs"] = params.inputs();
  doc["outputs"] = params.outputs();
  doc["w1"] = matrix_to_json(params.w1);
  doc["b1"] = vector_to_json(params.b1);
  doc["w2"] = matrix_to_json(params.w2);
  doc["b2"] = vector_to_json(params.b2);
  write_text_file(path, doc.dump(2) + "\n");
}

MlpParams load_mlp_json(const std::string& path) {
  json doc;
  try {
    doc = json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(path + ": " + e.what());
  }
  for (const char* field : {"hidden_width", "inputs", "w1", "b1", "w2", "b2"}) {
    if (!doc.contains(field)) {
      throw DataError(path + ": missing model field `" + field + "`");
    }
  }
  const Index inputs = doc["inputs"].get<Index>();
  MlpParams params;
  params.w1 = matrix_from_json(doc["w1"], inputs, "w1");
  params.b1 = vector_from_json(doc["b1"], "b1");
  params.w2 = matrix_from_json(doc["w2"], inputs, "w2");
  params.b2 = vector_from_json(doc["b2"], "b2");
  if (params.w1.rows() == 0 && params.w1.cols() != inputs) {
    params.w1.resize(0, inputs);
  }
  if (!all_finite(params)) throw DataError(path + ": non-finite model weights");
  if (params.w2.rows() != params.b2.size() ||
      (params.hidden() > 0 && params.w2.cols() != params.hidden())) {
    throw DataError(path + ": inconsistent model shapes");
  }
  return params;
}

}  // namespace plmcl
