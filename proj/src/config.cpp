#include "regraph/config.hpp"

#include <fstream>
#include <sstream>

namespace regraph {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::uint64_t to_u64(const std::string& v, std::size_t lineno) {
  try {
    return std::stoull(v);
  } catch (const std::exception&) {
    throw ConfigError("line " + std::to_string(lineno) + ": expected integer, got '" + v + "'");
  }
}

double to_real(const std::string& v, std::size_t lineno) {
  try {
    return std::stod(v);
  } catch (const std::exception&) {
    throw ConfigError("line " + std::to_string(lineno) + ": expected number, got '" + v + "'");
  }
}

}  // namespace

RunConfig parse_config(std::istream& is) {
  RunConfig cfg;
  std::string section;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section != "train" && section != "model" && section != "data" &&
          section != "files") {
        throw ConfigError("line " + std::to_string(lineno) + ": unknown section [" + section +
                          "]");
      }
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) {
      throw ConfigError("line " + std::to_string(lineno) + ": key '" + key +
                        "' outside any section");
    }
    TrainConfig& t = cfg.train;
    bool known = true;
    if (section == "train") {
      if (key == "seed") t.seed = to_u64(value, lineno);
      else if (key == "epochs") t.epochs = to_u64(value, lineno);
      else if (key == "batch_size") t.batch_size = to_u64(value, lineno);
      else if (key == "lr") t.lr = to_real(value, lineno);
      else if (key == "momentum") t.momentum = to_real(value, lineno);
      else if (key == "weight_decay") t.weight_decay = to_real(value, lineno);
      else if (key == "variant") t.model.variant = parse_variant(value);
      else known = false;
    } else if (section == "model") {
      if (key == "l") t.model.latent_dim = to_u64(value, lineno);
      else if (key == "t") t.model.top_t = to_u64(value, lineno);
      else if (key == "k") t.model.heads = to_u64(value, lineno);
      else if (key == "gcn_dim1") t.model.gcn_dim1 = to_u64(value, lineno);
      else if (key == "gcn_dim2") t.model.gcn_dim2 = to_u64(value, lineno);
      else if (key == "mlp_hidden") t.model.mlp_hidden = to_u64(value, lineno);
      else if (key == "scheme") t.model.scheme = parse_scheme(value);
      else known = false;
    } else if (section == "data") {
      if (key == "scenes") t.data.scenes = to_u64(value, lineno);
      else if (key == "n_r") t.data.proposals = to_u64(value, lineno);
      else if (key == "d") {
        t.data.feature_dim = to_u64(value, lineno);
        t.model.feature_dim = t.data.feature_dim;
      } else if (key == "c_s") {
        t.data.fine_classes = to_u64(value, lineno);
        t.model.fine_classes = t.data.fine_classes;
      } else if (key == "c_t") {
        t.data.coarse_classes = to_u64(value, lineno);
        t.model.coarse_classes = t.data.coarse_classes;
      } else if (key == "context_alpha") t.data.context_alpha = to_real(value, lineno);
      else if (key == "noise_sigma") t.data.noise_sigma = to_real(value, lineno);
      else known = false;
    } else if (section == "files") {
      if (key == "attribute_table") cfg.attribute_table_path = value;
      else if (key == "cooccurrence_table") cfg.cooccurrence_table_path = value;
      else if (key == "embedding_table") cfg.embedding_table_path = value;
      else if (key == "src_names") cfg.src_names_path = value;
      else if (key == "tgt_names") cfg.tgt_names_path = value;
      else known = false;
    }
    if (!known) {
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key +
                        "' in section [" + section + "]");
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return parse_config(f);
  } catch (const ValidationError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void write_config(std::ostream& os, const RunConfig& cfg) {
  const TrainConfig& t = cfg.train;
  os << "[train]\n"
     << "seed = " << t.seed << "\n"
     << "epochs = " << t.epochs << "\n"
     << "batch_size = " << t.batch_size << "\n"
     << "lr = " << t.lr << "\n"
     << "momentum = " << t.momentum << "\n"
     << "weight_decay = " << t.weight_decay << "\n"
     << "variant = " << variant_name(t.model.variant) << "\n"
     << "\n[model]\n"
     << "l = " << t.model.latent_dim << "\n"
     << "t = " << t.model.top_t << "\n"
     << "k = " << t.model.heads << "\n"
     << "gcn_dim1 = " << t.model.gcn_dim1 << "\n"
     << "gcn_dim2 = " << t.model.gcn_dim2 << "\n"
     << "mlp_hidden = " << t.model.mlp_hidden << "\n"
     << "scheme = " << scheme_name(t.model.scheme) << "\n"
     << "\n[data]\n"
     << "scenes = " << t.data.scenes << "\n"
     << "n_r = " << t.data.proposals << "\n"
     << "d = " << t.data.feature_dim << "\n"
     << "c_s = " << t.data.fine_classes << "\n"
     << "c_t = " << t.data.coarse_classes << "\n"
     << "context_alpha = " << t.data.context_alpha << "\n"
     << "noise_sigma = " << t.data.noise_sigma << "\n";
  if (!cfg.attribute_table_path.empty() || !cfg.cooccurrence_table_path.empty() ||
      !cfg.embedding_table_path.empty() || !cfg.src_names_path.empty() ||
      !cfg.tgt_names_path.empty()) {
    os << "\n[files]\n";
    if (!cfg.attribute_table_path.empty())
      os << "attribute_table = " << cfg.attribute_table_path << "\n";
    if (!cfg.cooccurrence_table_path.empty())
      os << "cooccurrence_table = " << cfg.cooccurrence_table_path << "\n";
    if (!cfg.embedding_table_path.empty())
      os << "embedding_table = " << cfg.embedding_table_path << "\n";
    if (!cfg.src_names_path.empty()) os << "src_names = " << cfg.src_names_path << "\n";
    if (!cfg.tgt_names_path.empty()) os << "tgt_names = " << cfg.tgt_names_path << "\n";
  }
}

}  // namespace regraph
