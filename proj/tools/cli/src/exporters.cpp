/*
 * Copyright 2026 The DGCDR Toolkit Authors.
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

#include "dgcdr_cli/exporters.hpp"

#include <openssl/evp.h>

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "dgcdr/errors.hpp"

namespace dgcdr::cli {
namespace {

std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path, bool binary = false) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

void write_history_csv(const std::filesystem::path& path, const std::vector<EpochRecord>& history) {
  auto out = open_out(path);
  out << "epoch,rec,en,de,item,reg,total,valid_metric\n";
  for (const auto& r : history) {
    out << r.epoch << ',' << g17(r.loss.rec) << ',' << g17(r.loss.en) << ',' << g17(r.loss.de)
        << ',' << g17(r.loss.item) << ',' << g17(r.loss.reg) << ',' << g17(r.loss.total) << ','
        << g17(r.valid_metric) << '\n';
  }
}

void write_metrics_csv(const std::filesystem::path& path,
                       const std::map<Domain, MetricsReport>& reports) {
  auto out = open_out(path);
  out << "domain,metric,k,seed,value\n";
  for (const auto& [d, report] : reports) {
    for (std::size_t s = 0; s < report.seeds.size(); ++s) {
      for (const auto& [key, value] : report.per_seed[s]) {
        out << domain_letter(d) << ',' << metric_name(key.first) << ',' << key.second << ','
            << report.seeds[s] << ',' << g17(value) << '\n';
      }
    }
  }
  out << "# aggregate\n";
  out << "domain,metric,k,mean,std\n";
  for (const auto& [d, report] : reports) {
    for (const auto& [key, mean] : report.mean) {
      out << domain_letter(d) << ',' << metric_name(key.first) << ',' << key.second << ','
          << g17(mean) << ',' << g17(report.stddev.at(key)) << '\n';
    }
  }
}

AttentionShare attention_distribution(const DgcdrModel& model, const DomainGraphs& graphs,
                                      Domain d) {
  const auto f = model.user_features(graphs, d);
  if (f.weights.size() == 0) throw ConfigError("attention weights are not defined under gcn_only");
  const double shared = f.weights.col(0).mean();
  const double specific = f.weights.col(1).mean();
  const double total = shared + specific;
  return {100.0 * shared / total, 100.0 * specific / total};
}

void write_attention_csv(
    const std::filesystem::path& path,
    const std::vector<std::pair<std::uint64_t, std::array<AttentionShare, 2>>>& rows) {
  auto out = open_out(path);
  out << "seed,domain,shared_pct,specific_pct\n";
  for (const auto& [seed, shares] : rows) {
    for (Domain d : kDomains) {
      const auto& a = shares[index(d)];
      out << seed << ',' << domain_letter(d) << ',' << g17(a.shared_pct) << ','
          << g17(a.specific_pct) << '\n';
    }
  }
}

void write_matrix_f32(const std::filesystem::path& path, const diff::Matrix& m) {
  auto out = open_out(path, true);
  out << m.rows() << ' ' << m.cols() << '\n';
  std::vector<char> bytes;
  bytes.reserve(static_cast<std::size_t>(m.size()) * 4);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(m(r, c)));
      for (int b = 0; b < 4; ++b) bytes.push_back(static_cast<char>((bits >> (8 * b)) & 0xFFU));
    }
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

diff::Matrix read_matrix_f32(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  Eigen::Index rows = 0, cols = 0;
  in >> rows >> cols;
  if (!in || in.get() != '\n' || rows < 0 || cols < 0) {
    throw DataError("bad matrix header in " + path.string());
  }
  diff::Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      unsigned char b[4];
      if (!in.read(reinterpret_cast<char*>(b), 4)) throw DataError("truncated " + path.string());
      const std::uint32_t bits = b[0] | (b[1] << 8) | (b[2] << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
      m(r, c) = std::bit_cast<float>(bits);
    }
  }
  return m;
}

std::vector<std::filesystem::path> export_embeddings(const DgcdrModel& model,
                                                     const DomainGraphs& graphs,
                                                     const ProcessedDataset& ds,
                                                     const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (Domain d : kDomains) {
    const auto f = model.user_features(graphs, d);
    const std::string tag(1, domain_letter(d));
    const std::pair<const char*, const diff::Matrix*> kinds[] = {
        {"g", &f.gnn}, {"c", &f.shared}, {"s", &f.specific}, {"fused", &f.fused}};
    for (const auto& [name, mat] : kinds) {
      if (mat->size() == 0) continue;
      const auto path = dir / (std::string(name) + "_" + tag + ".f32");
      write_matrix_f32(path, *mat);
      files.push_back(path);
    }
  }
  auto ids = open_out(dir / "users.tsv");
  ids << "row\tuser_key\n";
  for (int u = 0; u < ds.n_users(); ++u) ids << u << '\t' << ds.user_keys[u] << '\n';
  return files;
}

std::string git_blob_sha1(const std::string& content) {
  const std::string header = "blob " + std::to_string(content.size()) + '\0';
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr);
  EVP_DigestUpdate(ctx, header.data(), header.size());
  EVP_DigestUpdate(ctx, content.data(), content.size());
  EVP_DigestFinal_ex(ctx, digest, &length);
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int k = 0; k < length; ++k) {
    const unsigned char b = digest[k];
    out += hex[b >> 4];
    out += hex[b & 0xF];
  }
  return out;
}

std::string git_blob_sha1_file(const std::filesystem::path& path) {
  return git_blob_sha1(read_file(path));
}

void write_manifest(const std::filesystem::path& path, const std::string& command,
                    const ExperimentConfig& cfg, const std::vector<std::filesystem::path>& inputs) {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["config"] = cfg.serialize();
  j["seeds"] = cfg.seeds;
  j["ablation"] = cfg.train.ablation.to_string();
  auto& files = j["inputs"] = nlohmann::ordered_json::array();
  for (const auto& p : inputs) {
    files.push_back({{"path", p.generic_string()}, {"git_blob_sha1", git_blob_sha1_file(p)}});
  }
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

}  // namespace dgcdr::cli
