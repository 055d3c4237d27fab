#include "regraph/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace regraph {

namespace {

constexpr double kInGroupProb = 0.6;

void print_real(std::ostream& os, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  os << buf;
}

}  // namespace

Hierarchy Hierarchy::contiguous(std::size_t fine, std::size_t coarse) {
  Hierarchy h;
  h.fine_count = fine;
  h.coarse_count = coarse;
  h.parent.resize(fine);
  for (std::size_t c = 0; c < fine; ++c) h.parent[c] = c * coarse / fine;
  h.validate();
  return h;
}

void Hierarchy::validate() const {
  if (coarse_count < 2 || fine_count < coarse_count) {
    throw ValidationError("hierarchy: need C_S >= C_T >= 2, got C_S=" +
                          std::to_string(fine_count) + " C_T=" + std::to_string(coarse_count));
  }
  if (parent.size() != fine_count) {
    throw ValidationError("hierarchy: parent list length mismatch");
  }
  std::vector<bool> covered(coarse_count, false);
  for (std::size_t c = 0; c < fine_count; ++c) {
    if (parent[c] >= coarse_count) {
      throw ValidationError("hierarchy: fine class " + std::to_string(c) +
                            " has invalid parent");
    }
    covered[parent[c]] = true;
  }
  for (std::size_t g = 0; g < coarse_count; ++g) {
    if (!covered[g]) {
      throw ValidationError("hierarchy: coarse class " + std::to_string(g) +
                            " has no fine classes");
    }
  }
}

SyntheticDataset generate_dataset(const DatasetConfig& config) {
  SyntheticDataset ds;
  ds.hierarchy = Hierarchy::contiguous(config.fine_classes, config.coarse_classes);

  Rng rng(sub_seed(config.seed, "dataset"));

  // drawn once per seed
  Tensor2 prototypes(config.fine_classes, config.feature_dim);
  for (double& v : prototypes.data) v = rng.normal();
  Tensor2 contexts(config.coarse_classes, config.feature_dim);
  for (double& v : contexts.data) v = rng.normal();

  // fine classes per coarse group, for in-group sampling
  std::vector<std::vector<std::size_t>> groups(config.coarse_classes);
  for (std::size_t c = 0; c < config.fine_classes; ++c) {
    groups[ds.hierarchy.parent[c]].push_back(c);
  }

  std::vector<SyntheticScene> all;
  all.reserve(config.scenes);
  for (std::size_t s = 0; s < config.scenes; ++s) {
    SyntheticScene scene;
    scene.id = s;
    scene.scene_type = rng.uniform_index(config.coarse_classes);
    scene.features = Tensor2(config.proposals, config.feature_dim);
    scene.box_targets = Tensor2(config.proposals, 4);
    for (std::size_t p = 0; p < config.proposals; ++p) {
      std::size_t fine;
      if (rng.uniform() < kInGroupProb) {
        const auto& g = groups[scene.scene_type];
        fine = g[rng.uniform_index(g.size())];
      } else {
        fine = rng.uniform_index(config.fine_classes);
      }
      scene.fine_labels.push_back(static_cast<int>(fine));
      scene.coarse_labels.push_back(static_cast<int>(ds.hierarchy.parent[fine]));

      for (std::size_t j = 0; j < config.feature_dim; ++j) {
        scene.features.at(p, j) = prototypes.at(fine, j) +
                                  config.context_alpha * contexts.at(scene.scene_type, j) +
                                  config.noise_sigma * rng.normal();
      }

      const double cx = rng.uniform(0.15, 0.85);
      const double cy = rng.uniform(0.15, 0.85);
      const double w = rng.uniform(0.05, 0.25);
      const double h = rng.uniform(0.05, 0.25);
      Box truth{cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2};
      Box prop = truth;
      prop.x1 += 0.02 * rng.normal();
      prop.y1 += 0.02 * rng.normal();
      prop.x2 += 0.02 * rng.normal();
      prop.y2 += 0.02 * rng.normal();
      if (prop.x2 - prop.x1 < 0.01) prop.x2 = prop.x1 + 0.01;
      if (prop.y2 - prop.y1 < 0.01) prop.y2 = prop.y1 + 0.01;
      scene.boxes.push_back(prop);
      scene.box_targets.at(p, 0) = truth.x1 - prop.x1;
      scene.box_targets.at(p, 1) = truth.y1 - prop.y1;
      scene.box_targets.at(p, 2) = truth.x2 - prop.x2;
      scene.box_targets.at(p, 3) = truth.y2 - prop.y2;
    }
    all.push_back(std::move(scene));
  }

  // 80/20 split, disjoint scenes
  const std::size_t train_count = (config.scenes * 4) / 5;
  ds.train.assign(all.begin(), all.begin() + train_count);
  ds.test.assign(all.begin() + train_count, all.end());
  return ds;
}

void write_scenes(std::ostream& os, const std::vector<SyntheticScene>& scenes) {
  for (const SyntheticScene& s : scenes) {
    os << "scene " << s.id << " " << s.scene_type << " " << s.boxes.size() << " "
       << s.features.cols << "\n";
    for (std::size_t p = 0; p < s.boxes.size(); ++p) {
      os << "proposal";
      const Box& b = s.boxes[p];
      for (double v : {b.x1, b.y1, b.x2, b.y2}) {
        os << " ";
        print_real(os, v);
      }
      for (std::size_t j = 0; j < 4; ++j) {
        os << " ";
        print_real(os, s.box_targets.at(p, j));
      }
      os << " " << s.fine_labels[p] << " " << s.coarse_labels[p];
      for (std::size_t j = 0; j < s.features.cols; ++j) {
        os << " ";
        print_real(os, s.features.at(p, j));
      }
      os << "\n";
    }
  }
}

std::vector<SyntheticScene> read_scenes(std::istream& is) {
  std::vector<SyntheticScene> scenes;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag != "scene") throw ValidationError("read_scenes: expected scene header");
    SyntheticScene s;
    std::size_t n = 0, d = 0;
    if (!(ss >> s.id >> s.scene_type >> n >> d)) {
      throw ValidationError("read_scenes: bad scene header");
    }
    s.features = Tensor2(n, d);
    s.box_targets = Tensor2(n, 4);
    for (std::size_t p = 0; p < n; ++p) {
      if (!std::getline(is, line)) throw ValidationError("read_scenes: truncated scene");
      std::istringstream ps(line);
      ps >> tag;
      if (tag != "proposal") throw ValidationError("read_scenes: expected proposal record");
      Box b{};
      int fine = 0, coarse = 0;
      ps >> b.x1 >> b.y1 >> b.x2 >> b.y2;
      for (std::size_t j = 0; j < 4; ++j) ps >> s.box_targets.at(p, j);
      ps >> fine >> coarse;
      for (std::size_t j = 0; j < d; ++j) ps >> s.features.at(p, j);
      if (!ps) throw ValidationError("read_scenes: bad proposal record");
      s.boxes.push_back(b);
      s.fine_labels.push_back(fine);
      s.coarse_labels.push_back(coarse);
    }
    scenes.push_back(std::move(s));
  }
  return scenes;
}

}  // namespace regraph
