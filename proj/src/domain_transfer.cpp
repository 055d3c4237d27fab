#include "regraph/domain_transfer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace regraph {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, ',')) out.push_back(cur);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

std::size_t find_category(const std::vector<std::string>& names, const std::string& name,
                          const std::string& what) {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) {
    throw ValidationError(what + ": unknown category '" + name + "'");
  }
  return static_cast<std::size_t>(it - names.begin());
}

double kl_term(double p, double m) {
  if (p == 0.0) return 0.0;
  return p * std::log(p / m);
}

std::vector<double> normalized_row(const Tensor2& counts, std::size_t row,
                                   const std::string& category) {
  std::vector<double> p(counts.cols);
  double total = 0.0;
  for (std::size_t j = 0; j < counts.cols; ++j) {
    p[j] = counts.at(row, j);
    total += p[j];
  }
  if (total <= 0.0) {
    throw ValidationError("attribute table: category '" + category + "' has zero total count");
  }
  for (double& v : p) v /= total;
  return p;
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace

std::string scheme_name(TransferScheme s) {
  switch (s) {
    case TransferScheme::attribute: return "attribute";
    case TransferScheme::relationship: return "relationship";
    case TransferScheme::embedding: return "embedding";
    case TransferScheme::learned: return "learned";
  }
  return "unknown";
}

TransferScheme parse_scheme(const std::string& name) {
  if (name == "attribute") return TransferScheme::attribute;
  if (name == "relationship") return TransferScheme::relationship;
  if (name == "embedding") return TransferScheme::embedding;
  if (name == "learned") return TransferScheme::learned;
  throw ValidationError("unknown transfer scheme '" + name + "'");
}

double js_divergence(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) {
    throw DimensionError("js_divergence: distributions of size " + std::to_string(p.size()) +
                         " vs " + std::to_string(q.size()));
  }
  double js = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double m = 0.5 * (p[i] + q[i]);
    js += 0.5 * kl_term(p[i], m) + 0.5 * kl_term(q[i], m);
  }
  return js;
}

TransferGraph build_attribute_graph(const AttributeTable& table,
                                    const std::vector<std::string>& src_names,
                                    const std::vector<std::string>& tgt_names,
                                    bool raw_js) {
  TransferGraph g;
  g.scheme = TransferScheme::attribute;
  g.weights = Tensor2(src_names.size(), tgt_names.size());
  const double ln2 = std::log(2.0);
  for (std::size_t i = 0; i < src_names.size(); ++i) {
    const std::size_t ri = find_category(table.categories, src_names[i], "attribute table");
    const auto pi = normalized_row(table.counts, ri, src_names[i]);
    for (std::size_t j = 0; j < tgt_names.size(); ++j) {
      const std::size_t rj = find_category(table.categories, tgt_names[j], "attribute table");
      const auto pj = normalized_row(table.counts, rj, tgt_names[j]);
      const double js = js_divergence(pi, pj);
      g.weights.at(i, j) = raw_js ? js : 1.0 - js / ln2;
    }
  }
  return g;
}

TransferGraph build_relationship_graph(const CooccurrenceTable& table) {
  const Tensor2& f = table.counts;
  std::vector<double> row_deg(f.rows, 0.0), col_deg(f.cols, 0.0);
  for (std::size_t i = 0; i < f.rows; ++i) {
    for (std::size_t j = 0; j < f.cols; ++j) {
      if (f.at(i, j) < 0.0) {
        throw ValidationError("co-occurrence table: negative count at (" + std::to_string(i) +
                              "," + std::to_string(j) + ")");
      }
      row_deg[i] += f.at(i, j);
      col_deg[j] += f.at(i, j);
    }
  }
  for (std::size_t i = 0; i < f.rows; ++i) {
    if (row_deg[i] <= 0.0) {
      throw ValidationError("co-occurrence table: zero row degree at source index " +
                            std::to_string(i));
    }
  }
  for (std::size_t j = 0; j < f.cols; ++j) {
    if (col_deg[j] <= 0.0) {
      throw ValidationError("co-occurrence table: zero column degree at target index " +
                            std::to_string(j));
    }
  }
  TransferGraph g;
  g.scheme = TransferScheme::relationship;
  g.weights = Tensor2(f.rows, f.cols);
  for (std::size_t i = 0; i < f.rows; ++i) {
    for (std::size_t j = 0; j < f.cols; ++j) {
      g.weights.at(i, j) = f.at(i, j) / std::sqrt(row_deg[i] * col_deg[j]);
    }
  }
  return g;
}

TransferGraph build_embedding_graph(const std::vector<std::string>& src_names,
                                    const std::vector<std::string>& tgt_names,
                                    const EmbeddingTable& table) {
  auto vec_of = [&](const std::string& name) -> const std::vector<double>& {
    auto it = table.vectors.find(name);
    if (it == table.vectors.end()) {
      throw ValidationError("embedding table: missing category '" + name + "'");
    }
    return it->second;
  };
  Tensor2 sims(src_names.size(), tgt_names.size());
  for (std::size_t i = 0; i < src_names.size(); ++i) {
    for (std::size_t j = 0; j < tgt_names.size(); ++j) {
      sims.at(i, j) = cosine(vec_of(src_names[i]), vec_of(tgt_names[j]));
    }
  }
  TransferGraph g;
  g.scheme = TransferScheme::embedding;
  g.weights = row_softmax(sims);
  return g;
}

SparseGraph learned_transfer_edges(const Tensor2& z_src, const Tensor2& z_tgt, std::size_t t) {
  if (z_src.cols != z_tgt.cols || z_src.rows != z_tgt.rows) {
    throw DimensionError("learned_transfer_edges: " + shape_str(z_src) + " vs " +
                         shape_str(z_tgt));
  }
  return sparsify_topt(matmul_nt(z_src, z_tgt), t);
}

Tensor2 compose_region_edges_dense(const SoftMapping& m_src, const TransferGraph& g,
                                   const SoftMapping& m_tgt) {
  if (m_src.weights.cols != g.weights.rows || m_tgt.weights.cols != g.weights.cols) {
    throw DimensionError("compose_region_edges: M_S " + shape_str(m_src.weights) + ", G " +
                         shape_str(g.weights) + ", M_T " + shape_str(m_tgt.weights));
  }
  return matmul_nt(matmul(m_src.weights, g.weights), m_tgt.weights);
}

SparseGraph compose_region_edges(const SoftMapping& m_src, const TransferGraph& g,
                                 const SoftMapping& m_tgt, std::size_t t) {
  return sparsify_topt(compose_region_edges_dense(m_src, g, m_tgt), t);
}

AttributeTable read_attribute_table(std::istream& is) {
  AttributeTable t;
  std::string line;
  if (!std::getline(is, line)) throw ValidationError("attribute table: empty file");
  auto header = split_csv_line(line);
  if (header.size() < 2 || header[0] != "category") {
    throw ValidationError("attribute table: bad header at line 1");
  }
  t.attributes.assign(header.begin() + 1, header.end());
  std::vector<double> values;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw ValidationError("attribute table: wrong cell count at line " +
                            std::to_string(lineno));
    }
    t.categories.push_back(cells[0]);
    for (std::size_t j = 1; j < cells.size(); ++j) {
      try {
        values.push_back(std::stod(cells[j]));
      } catch (const std::exception&) {
        throw ValidationError("attribute table: bad number at line " + std::to_string(lineno));
      }
    }
  }
  t.counts = Tensor2(t.categories.size(), t.attributes.size(), std::move(values));
  return t;
}

CooccurrenceTable read_cooccurrence_table(std::istream& is) {
  CooccurrenceTable t;
  std::string line;
  if (!std::getline(is, line)) throw ValidationError("co-occurrence table: empty file");
  auto header = split_csv_line(line);
  if (header.size() < 2) throw ValidationError("co-occurrence table: bad header at line 1");
  t.target_names.assign(header.begin() + 1, header.end());
  std::vector<double> values;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw ValidationError("co-occurrence table: wrong cell count at line " +
                            std::to_string(lineno));
    }
    t.source_names.push_back(cells[0]);
    for (std::size_t j = 1; j < cells.size(); ++j) {
      try {
        values.push_back(std::stod(cells[j]));
      } catch (const std::exception&) {
        throw ValidationError("co-occurrence table: bad number at line " +
                              std::to_string(lineno));
      }
    }
  }
  t.counts = Tensor2(t.source_names.size(), t.target_names.size(), std::move(values));
  return t;
}

EmbeddingTable read_embedding_table(std::istream& is) {
  EmbeddingTable t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string name;
    ss >> name;
    std::vector<double> v;
    double x;
    while (ss >> x) v.push_back(x);
    if (v.empty()) {
      throw ValidationError("embedding table: no values at line " + std::to_string(lineno));
    }
    if (t.dim == 0) t.dim = v.size();
    if (v.size() != t.dim) {
      throw ValidationError("embedding table: dimension mismatch at line " +
                            std::to_string(lineno));
    }
    double ss2 = 0.0;
    for (double vi : v) ss2 += vi * vi;
    if (ss2 == 0.0) {
      throw ValidationError("embedding table: zero vector at line " + std::to_string(lineno));
    }
    t.vectors[name] = std::move(v);
  }
  return t;
}

void write_transfer_graph(std::ostream& os, const TransferGraph& g) {
  os << g.source_domain << " " << g.target_domain << " " << g.weights.rows << " "
     << g.weights.cols << " " << scheme_name(g.scheme) << "\n";
  char buf[32];
  for (std::size_t i = 0; i < g.weights.rows; ++i) {
    for (std::size_t j = 0; j < g.weights.cols; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", g.weights.at(i, j));
      os << (j ? " " : "") << buf;
    }
    os << "\n";
  }
}

TransferGraph read_transfer_graph(std::istream& is) {
  TransferGraph g;
  std::size_t cs = 0, ct = 0;
  std::string scheme;
  if (!(is >> g.source_domain >> g.target_domain >> cs >> ct >> scheme)) {
    throw ValidationError("transfer graph: bad header");
  }
  g.scheme = parse_scheme(scheme);
  g.weights = Tensor2(cs, ct);
  for (std::size_t i = 0; i < cs; ++i) {
    for (std::size_t j = 0; j < ct; ++j) {
      if (!(is >> g.weights.at(i, j))) {
        throw ValidationError("transfer graph: truncated at row " + std::to_string(i));
      }
    }
  }
  return g;
}

}  // namespace regraph
