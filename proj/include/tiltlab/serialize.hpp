/**
 * @file serialize.hpp
 * @brief Canonical JSON for scalars, modules, morphisms and tilting complexes, and
 *        SHA-256 content addressing.
 */
#pragma once

#include <openssl/evp.h>

#include <iomanip>
#include <sstream>
#include <string>

#include "json.hpp"
#include "tiltlab/complexes.hpp"

namespace tiltlab {

using json = nlohmann::json;

inline json to_json(const Cyclo& x) {
  json a = json::array();
  for (const auto& q : x.coeffs()) a.push_back(q.get_str());
  return a;
}

inline Cyclo cyclo_from_json(const json& j, const CyclotomicField* f) {
  std::vector<mpq_class> c;
  for (const auto& s : j) {
    mpq_class q(s.get<std::string>());
    q.canonicalize();
    c.push_back(q);
  }
  return Cyclo(f, std::move(c));
}

/// Dense matrix, row-major, each entry a rational coefficient vector.
inline json to_json(const ExactMatrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (int j = 0; j < m.cols(); ++j) r.push_back(to_json(m(i, j)));
    rows.push_back(r);
  }
  return rows;
}

inline ExactMatrix matrix_from_json(const json& j, const CyclotomicField* f, int rows, int cols) {
  if (static_cast<int>(j.size()) != rows) throw std::invalid_argument("matrix JSON: row count mismatch");
  ExactMatrix m(f, rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (static_cast<int>(j[i].size()) != cols) throw std::invalid_argument("matrix JSON: column count mismatch");
    for (int c = 0; c < cols; ++c) m(i, c) = cyclo_from_json(j[i][c], f);
  }
  return m;
}

/// Canonical form: l, dim, basis weights, and the five generator matrices in the global basis.
inline json to_json(const UModule& M) {
  json j;
  j["ell"] = M.ell();
  j["dim"] = M.dim();
  j["weights"] = M.basis_weights();
  j["K"] = to_json(M.dense_K());
  j["E"] = to_json(M.dense(Gen::E));
  j["F"] = to_json(M.dense(Gen::F));
  j["E_div_ell"] = to_json(M.dense(Gen::Ediv));
  j["F_div_ell"] = to_json(M.dense(Gen::Fdiv));
  return j;
}

/// Rebuilds a graded module from its canonical JSON; K must be diagonal with entries zeta^weight
/// and every generator must shift weights as prescribed.
inline ModulePtr module_from_json(const json& j) {
  const int ell = j.at("ell").get<int>();
  const int dim = j.at("dim").get<int>();
  const auto* f = CyclotomicField::get(ell);
  std::vector<int> w = j.at("weights").get<std::vector<int>>();
  if (static_cast<int>(w.size()) != dim) throw std::invalid_argument("module JSON: weight list length mismatch");
  for (std::size_t i = 1; i < w.size(); ++i)
    if (w[i] > w[i - 1]) throw std::invalid_argument("module JSON: weights must be non-increasing");
  ExactMatrix K = matrix_from_json(j.at("K"), f, dim, dim);
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b) {
      Cyclo expect = a == b ? Cyclo::zeta_pow(f, ((w[a] % ell) + ell) % ell) : Cyclo(f);
      if (K(a, b) != expect) throw std::invalid_argument("module JSON: K is not diagonal with eigenvalues zeta^weight");
    }
  std::map<int, int> dims;
  std::map<int, int> offset;
  for (int a = 0; a < dim; ++a) {
    if (!dims.count(w[a])) offset[w[a]] = a;
    dims[w[a]] += 1;
  }
  std::array<UModule::Blocks, 4> acts;
  const char* names[4] = {"E", "F", "E_div_ell", "F_div_ell"};
  for (Gen g : kGenerators) {
    ExactMatrix D = matrix_from_json(j.at(names[static_cast<int>(g)]), f, dim, dim);
    int s = gen_shift(g, ell);
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b)
        if (!D(a, b).is_zero() && w[a] != w[b] + s)
          throw std::invalid_argument(std::string("module JSON: ") + names[static_cast<int>(g)] + " does not shift weights correctly");
    for (const auto& [m, d] : dims) {
      if (!dims.count(m + s)) continue;
      acts[static_cast<int>(g)][m] = D.block(offset[m + s], offset[m], dims[m + s], d);
    }
  }
  return make_module(f, std::move(dims), std::move(acts));
}

/// Graded morphism: weight -> block.
inline json to_json(const UMorphism& phi) {
  json j = json::object();
  for (const auto& [m, b] : phi.blocks()) j[std::to_string(m)] = to_json(b);
  return j;
}

inline UMorphism morphism_from_json(const json& j, const ModulePtr& src, const ModulePtr& tgt) {
  GradedMatrix blocks;
  for (const auto& [key, val] : j.items()) {
    int m = std::stoi(key);
    blocks[m] = matrix_from_json(val, src->field(), tgt->dim_at(m), src->dim_at(m));
  }
  return UMorphism(src, tgt, std::move(blocks));
}

/// Degree range, per-degree labels and block differentials.
inline json to_json(const TiltingComplex& X) {
  json j;
  j["ell"] = X.ell;
  json degs = json::object();
  for (const auto& [i, l] : X.labels)
    if (!l.empty()) degs[std::to_string(i)] = l;
  j["degrees"] = degs;
  json ds = json::object();
  for (const auto& [i, d] : X.d) {
    json rows = json::array();
    for (const auto& row : d.e) {
      json r = json::array();
      for (const auto& x : row) r.push_back(to_json(x));
      rows.push_back(r);
    }
    ds[std::to_string(i)] = rows;
  }
  j["differentials"] = ds;
  return j;
}

inline TiltingComplex tilting_complex_from_json(const json& j) {
  TiltingComplex X;
  X.ell = j.at("ell").get<int>();
  for (const auto& [key, val] : j.at("degrees").items()) X.labels[std::stoi(key)] = val.get<std::vector<int>>();
  for (const auto& [key, val] : j.at("differentials").items()) {
    int i = std::stoi(key);
    BlockMatrix b = BlockMatrix::zero(X.ell, X.labels_at(i), X.labels_at(i + 1));
    if (val.size() != b.tgt.size()) throw std::invalid_argument("complex JSON: block row count mismatch");
    for (std::size_t r = 0; r < b.tgt.size(); ++r) {
      if (val[r].size() != b.src.size()) throw std::invalid_argument("complex JSON: block column count mismatch");
      for (std::size_t c = 0; c < b.src.size(); ++c)
        b.e[r][c] = morphism_from_json(val[r][c], tilting_module(X.ell, b.src[c]), tilting_module(X.ell, b.tgt[r]));
    }
    X.d[i] = b;
  }
  return X;
}

/// Per-degree label multisets as {"deg": [sorted labels]}.
inline json labels_json(const TiltingComplex& X) {
  json j = json::object();
  for (const auto& [i, l] : X.sorted_labels()) j[std::to_string(i)] = l;
  return j;
}

inline std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx) throw std::runtime_error("EVP_MD_CTX_new failed");
  if (EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 || EVP_DigestUpdate(ctx, data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx, digest, &len) != 1) {
    EVP_MD_CTX_free(ctx);
    throw std::runtime_error("SHA-256 computation failed");
  }
  EVP_MD_CTX_free(ctx);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return os.str();
}

/// Content address of a module: SHA-256 of its canonical JSON.
inline std::string fingerprint(const UModule& M) { return sha256_hex(to_json(M).dump()); }

}  // namespace tiltlab
