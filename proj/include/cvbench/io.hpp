/*
 * Copyright (c) 2026, the cvbench authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef CVBENCH_IO_HPP
#define CVBENCH_IO_HPP

#include "cvbench/core.hpp"
#include "cvbench/evaluation.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

/**
 * @file io.hpp
 * @brief File artifacts: dataset CSV plus metadata JSON, partition JSON,
 * key-value config text and the tabular CSV outputs.
 */

namespace cvbench::io {

namespace fs = std::filesystem;
using nlohmann::json;

/// Shortest text that reads back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

/// Fixed six-decimal text, empty for a missing value.
inline std::string format_optional(const std::optional<double>& v) {
  if (!v) return {};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", *v);
  return buf;
}

inline std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

inline std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

// ---------------------------------------------------------------------------
// Datasets

/// CSV with columns x0..x{D-1} then `label`; NOISE is written as -1.
inline std::string dataset_csv(const Dataset& ds) {
  std::ostringstream os;
  for (int d = 0; d < ds.dimensions(); ++d) os << 'x' << d << ',';
  os << "label\n";
  for (Eigen::Index i = 0; i < ds.points.rows(); ++i) {
    for (Eigen::Index d = 0; d < ds.points.cols(); ++d) os << format_double(ds.points(i, d)) << ',';
    os << ds.truth.labels[static_cast<std::size_t>(i)] << '\n';
  }
  return os.str();
}

inline json tags_json(const PropertyTags& t) {
  return json{{"k_star", t.k_star},
              {"dimensions", t.dimensions},
              {"overlap", t.overlap},
              {"imbalance", t.imbalance},
              {"has_noise", t.has_noise},
              {"compactness", to_string(t.compactness)},
              {"distribution", to_string(t.distribution)}};
}

inline PropertyTags tags_from_json(const json& j) {
  PropertyTags t;
  t.k_star = j.at("k_star").get<int>();
  t.dimensions = j.at("dimensions").get<int>();
  t.overlap = j.at("overlap").get<double>();
  t.imbalance = j.at("imbalance").get<double>();
  t.has_noise = j.at("has_noise").get<bool>();
  t.compactness = parse_compactness(j.at("compactness").get<std::string>());
  t.distribution = parse_distribution(j.at("distribution").get<std::string>());
  return t;
}

/// Parses dataset CSV text; the last column is the label.
inline Dataset parse_dataset_csv(const std::string& text, const std::string& id) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw Error("dataset '" + id + "': empty file");
  const auto header = split(line, ',');
  if (header.size() < 2 || header.back() != "label") throw Error("dataset '" + id + "': last column must be 'label'");
  const auto dims = header.size() - 1;
  std::vector<double> values;
  Labels labels;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != header.size()) {
      throw Error("dataset '" + id + "': row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                  " fields, expected " + std::to_string(header.size()));
    }
    for (std::size_t d = 0; d < dims; ++d) {
      char* end = nullptr;
      const double v = std::strtod(cells[d].c_str(), &end);
      if (end == cells[d].c_str()) throw Error("dataset '" + id + "': bad number in row " + std::to_string(row));
      values.push_back(v);
    }
    labels.push_back(std::stoi(cells.back()));
  }
  Dataset ds;
  ds.id = id;
  ds.points = Eigen::Map<const Matrix>(values.data(), static_cast<Eigen::Index>(labels.size()),
                                       static_cast<Eigen::Index>(dims));
  ds.truth = GroundTruth::from_labels(std::move(labels));
  ds.meta.k_star = ds.truth.k_star;
  ds.meta.dimensions = static_cast<int>(dims);
  ds.meta.has_noise = ds.truth.noise_fraction > 0;
  validate(ds);
  return ds;
}

/// Writes `<dir>/<id>.csv` and the `<dir>/<id>.json` metadata sidecar.
inline void write_dataset(const fs::path& dir, const Dataset& ds) {
  write_text(dir / (ds.id + ".csv"), dataset_csv(ds));
  write_text(dir / (ds.id + ".json"), json{{"id", ds.id}, {"tags", tags_json(ds.meta)}}.dump(2) + "\n");
}

/// Reads a dataset CSV; tags come from the sidecar when present.
inline Dataset read_dataset(const fs::path& csv_path) {
  const auto id = csv_path.stem().string();
  auto ds = parse_dataset_csv(read_text(csv_path), id);
  auto sidecar = csv_path;
  sidecar.replace_extension(".json");
  if (fs::exists(sidecar)) ds.meta = tags_from_json(json::parse(read_text(sidecar)).at("tags"));
  return ds;
}

/// All `*.csv` datasets of a directory, sorted by id.
inline std::vector<Dataset> read_dataset_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error("dataset directory '" + dir.string() + "' does not exist");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() == ".csv") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw Error("no datasets in '" + dir.string() + "'");
  std::vector<Dataset> out;
  for (const auto& f : files) out.push_back(read_dataset(f));
  return out;
}

// ---------------------------------------------------------------------------
// Partitions

/// One partition record as stored on disk.
struct PartitionRecord {
  Partition partition;
  std::string collection;
  std::optional<double> reference_rank;
};

inline json partitions_json(const std::vector<PartitionRecord>& records) {
  json arr = json::array();
  for (const auto& r : records) {
    json j{{"source", r.partition.source}, {"k", r.partition.k}, {"labels", r.partition.labels}};
    if (!r.collection.empty()) j["collection"] = r.collection;
    if (r.reference_rank) j["reference_rank"] = *r.reference_rank;
    arr.push_back(std::move(j));
  }
  return arr;
}

inline std::vector<PartitionRecord> partitions_from_json(const json& arr, std::size_t expected_size = 0) {
  if (!arr.is_array()) throw Error("partition file must hold a JSON array");
  std::vector<PartitionRecord> out;
  for (const auto& j : arr) {
    PartitionRecord r;
    r.partition = Partition::from_labels(j.at("labels").get<Labels>(), j.value("source", std::string{}));
    if (expected_size != 0 && r.partition.size() != expected_size) {
      throw Error("partition '" + r.partition.source + "' has " + std::to_string(r.partition.size()) +
                  " labels, dataset has " + std::to_string(expected_size));
    }
    r.collection = j.value("collection", std::string{});
    if (j.contains("reference_rank")) r.reference_rank = j.at("reference_rank").get<double>();
    out.push_back(std::move(r));
  }
  return out;
}

inline void write_partitions(const fs::path& path, const std::vector<PartitionRecord>& records) {
  write_text(path, partitions_json(records).dump() + "\n");
}

inline std::vector<PartitionRecord> read_partitions(const fs::path& path, std::size_t expected_size = 0) {
  if (!fs::exists(path)) throw Error("missing partition file '" + path.string() + "'");
  return partitions_from_json(json::parse(read_text(path)), expected_size);
}

/// Flattens named collections into records (collection name on every entry).
inline std::vector<PartitionRecord> to_records(const std::vector<NamedCollection>& collections) {
  std::vector<PartitionRecord> out;
  for (const auto& c : collections) {
    for (std::size_t i = 0; i < c.partitions.size(); ++i) {
      PartitionRecord r{c.partitions[i], c.group, std::nullopt};
      if (!c.reference_ranks.empty()) r.reference_rank = c.reference_ranks[i];
      out.push_back(std::move(r));
    }
  }
  return out;
}

/// Groups records back into collections, keeping first-appearance order.
inline std::vector<NamedCollection> to_collections(const std::vector<PartitionRecord>& records) {
  std::vector<NamedCollection> out;
  for (const auto& r : records) {
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& c) { return c.group == r.collection; });
    if (it == out.end()) {
      out.push_back({r.collection, {}, {}, {}});
      it = std::prev(out.end());
    }
    it->partitions.push_back(r.partition);
    if (r.reference_rank) it->reference_ranks.push_back(*r.reference_rank);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Config

/// `key = value` lines; `#` starts a comment; later keys override earlier ones.
inline std::map<std::string, std::string> parse_key_value(const std::string& text) {
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
  };
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error("config line " + std::to_string(lineno) + ": expected key = value");
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw Error("config line " + std::to_string(lineno) + ": empty key");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Tables

inline std::string records_csv(const std::vector<EvaluationRecord>& records) {
  std::ostringstream os;
  os << "scenario,dataset,group,source,index,kind,partitions,k_o,top_pick_hit,rho_all,rho_under,rho_over,range,"
        "k_star,dimensions,overlap,imbalance,has_noise,compactness,distribution\n";
  for (const auto& r : records) {
    os << r.scenario << ',' << r.dataset_id << ',' << r.group << ',' << r.source << ',' << r.index << ','
       << (r.external ? "external" : "internal") << ',' << r.partitions << ',' << r.k_o << ',' << (r.top_pick_hit ? 1 : 0)
       << ',' << format_optional(r.rho_all) << ',' << format_optional(r.rho_under) << ','
       << format_optional(r.rho_over) << ',' << format_optional(r.range) << ',' << r.tags.k_star << ','
       << r.tags.dimensions << ',' << format_optional(r.tags.overlap) << ',' << format_optional(r.tags.imbalance) << ','
       << (r.tags.has_noise ? 1 : 0) << ',' << to_string(r.tags.compactness) << ',' << to_string(r.tags.distribution)
       << '\n';
  }
  return os.str();
}

inline std::optional<double> parse_optional(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return std::stod(s);
}

inline std::vector<EvaluationRecord> parse_records_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("scenario,", 0) != 0) throw Error("records file lacks the expected header");
  std::vector<EvaluationRecord> out;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto c = split(line, ',');
    if (c.size() != 20) throw Error("records row " + std::to_string(row) + ": expected 20 fields");
    EvaluationRecord r;
    r.scenario = std::stoi(c[0]);
    r.dataset_id = c[1];
    r.group = c[2];
    r.source = c[3];
    r.index = c[4];
    r.external = c[5] == "external";
    r.partitions = static_cast<std::size_t>(std::stoul(c[6]));
    r.k_o = std::stoi(c[7]);
    r.top_pick_hit = c[8] == "1";
    r.rho_all = parse_optional(c[9]);
    r.rho_under = parse_optional(c[10]);
    r.rho_over = parse_optional(c[11]);
    r.range = parse_optional(c[12]);
    r.tags.k_star = std::stoi(c[13]);
    r.tags.dimensions = std::stoi(c[14]);
    r.tags.overlap = std::stod(c[15]);
    r.tags.imbalance = std::stod(c[16]);
    r.tags.has_noise = c[17] == "1";
    r.tags.compactness = parse_compactness(c[18]);
    r.tags.distribution = parse_distribution(c[19]);
    out.push_back(std::move(r));
  }
  return out;
}

inline std::string rejects_csv(const std::vector<RejectRecord>& rejects) {
  std::ostringstream os;
  os << "scenario,dataset,group,reason,max_ari\n";
  for (const auto& r : rejects) {
    os << r.scenario << ',' << r.dataset_id << ',' << r.group << ',' << r.reason << ',' << format_optional(r.max_ari)
       << '\n';
  }
  return os.str();
}

/// "0.69 (1)" style cell: value with its rank in parentheses.
inline std::string ranked_cell(const std::optional<double>& v, double rank) {
  if (!v) return "NA";
  char buf[48];
  if (rank == std::floor(rank)) {
    std::snprintf(buf, sizeof buf, "%.2f (%d)", *v, static_cast<int>(rank));
  } else {
    std::snprintf(buf, sizeof buf, "%.2f (%.1f)", *v, rank);
  }
  return buf;
}

inline std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::ostringstream os;
  os << "scenario,category,index,kind,records,top_pick,mean_rho_all,median_rho_all,mean_rho_under,mean_rho_over,"
        "mean_range\n";
  for (const auto& r : rows) {
    os << r.scenario << ',' << r.category << ',' << r.index << ',' << (r.external ? "external" : "internal") << ','
       << r.records << ",\"" << ranked_cell(100.0 * r.top_pick_rate, r.rank_top_pick) << "\",\""
       << ranked_cell(r.mean_rho_all, r.rank_rho_all) << "\"," << format_optional(r.median_rho_all) << ','
       << format_optional(r.mean_rho_under) << ',' << format_optional(r.mean_rho_over) << ','
       << format_optional(r.mean_range) << '\n';
  }
  return os.str();
}

inline std::string pairwise_csv(const PairwiseComparison& cmp) {
  std::ostringstream os;
  os << "scenario,index_a,index_b,n,statistic,p_value,adjusted_p,significant,method\n";
  for (std::size_t i = 0; i < cmp.indexes.size(); ++i) {
    for (std::size_t j = i + 1; j < cmp.indexes.size(); ++j) {
      const auto& t = cmp.tests[i][j];
      os << cmp.scenario << ',' << cmp.indexes[i] << ',' << cmp.indexes[j] << ',' << t.n << ','
         << format_optional(t.statistic) << ',' << format_double(t.p_value) << ',' << format_double(t.adjusted_p) << ','
         << (t.significant() ? 1 : 0) << ',' << t.method << '\n';
    }
  }
  return os.str();
}

inline std::string association_csv(const std::vector<AssociationResult>& results) {
  std::ostringstream os;
  os << "scenario,index,property,method,n,statistic,p_value,significant\n";
  for (const auto& r : results) {
    os << r.scenario << ',' << r.index << ',' << to_string(r.property) << ',';
    if (r.test) {
      os << r.test->method << ',' << r.test->n << ',' << format_optional(r.test->statistic) << ','
         << format_double(r.test->p_value) << ',' << (r.test->significant() ? 1 : 0) << '\n';
    } else {
      os << "missing,0,,,0\n";
    }
  }
  return os.str();
}

}  // namespace cvbench::io

#endif
