// Copyright 2026 The lgcert Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lgcert/arrays.hpp"
#include "lgcert/dual_witness.hpp"
#include "lgcert/errors.hpp"
#include "lgcert/hash.hpp"
#include "lgcert/lgsolver.hpp"
#include "lgcert/structures.hpp"

namespace lgcert {

using json = nlohmann::ordered_json;

// {kind, params, n, certificates: [{minimal_sets: [[int]]}]}
inline json structure_to_json(const CertificateStructure& cert) {
  json certs = json::array();
  for (const auto& c : cert.certificates()) {
    json sets = json::array();
    for (Subset a : c.minimal_sets()) sets.push_back(a.members());
    certs.push_back({{"minimal_sets", sets}});
  }
  return {{"kind", std::string(to_string(cert.kind()))},
          {"params", cert.params()},
          {"n", cert.n()},
          {"certificates", certs}};
}

inline CertificateStructure structure_from_json(const json& j) {
  try {
    std::vector<Certificate> certs;
    for (const auto& c : j.at("certificates")) {
      std::vector<Subset> sets;
      for (const auto& s : c.at("minimal_sets")) sets.push_back(Subset::of(s.get<std::vector<int>>()));
      certs.emplace_back(std::move(sets));
    }
    StructureKind kind = j.contains("kind") ? parse_structure_kind(j["kind"].get<std::string>())
                                            : StructureKind::custom;
    std::vector<int> params = j.contains("params") ? j["params"].get<std::vector<int>>() : std::vector<int>{};
    return CertificateStructure(j.at("n").get<int>(), std::move(certs), kind, std::move(params));
  } catch (const json::exception& e) {
    throw ParameterError(std::string("structure JSON: ") + e.what());
  }
}

// {n, certificates, entries: [{subset_mask, cert_index, alpha}]}; zero
// entries are omitted.
inline json witness_to_json(const DualWitness& w) {
  json entries = json::array();
  for (std::size_t s = 0; s < w.subset_count(); ++s) {
    Subset S = Subset::from_mask(static_cast<std::uint32_t>(s));
    for (int m = 0; m < w.cert_count(); ++m) {
      double v = w(S, m);
      if (v != 0.0) entries.push_back({{"subset_mask", s}, {"cert_index", m}, {"alpha", v}});
    }
  }
  return {{"n", w.n()}, {"certificates", w.cert_count()}, {"entries", entries}};
}

inline DualWitness witness_from_json(const json& j) {
  try {
    DualWitness w(j.at("n").get<int>(), j.at("certificates").get<int>());
    for (const auto& e : j.at("entries")) {
      auto mask = e.at("subset_mask").get<std::uint64_t>();
      int m = e.at("cert_index").get<int>();
      if (mask >= w.subset_count() || m < 0 || m >= w.cert_count()) {
        throw ParameterError("witness JSON: entry outside the lattice");
      }
      w(Subset::from_mask(static_cast<std::uint32_t>(mask)), m) = e.at("alpha").get<double>();
    }
    return w;
  } catch (const json::exception& e) {
    throw ParameterError(std::string("witness JSON: ") + e.what());
  }
}

inline std::uint64_t witness_hash(const DualWitness& w) {
  Fnv1a h;
  h.add(static_cast<std::uint64_t>(w.n())).add(static_cast<std::uint64_t>(w.cert_count()));
  h.bytes(w.values().data(), w.values().size() * sizeof(double));
  return h.value();
}

inline json array_to_json(const OrthogonalArray& t, std::size_t elide_above = 4096) {
  json j = {{"q", t.q()}, {"k", t.k()}, {"size", t.size()}};
  if (t.size() <= elide_above) {
    j["rows"] = t.rows();
  } else {
    j["rows"] = nullptr;
    j["elided"] = true;
  }
  return j;
}

inline OrthogonalArray array_from_json(const json& j) {
  try {
    return OrthogonalArray(j.at("q").get<int>(), j.at("k").get<int>(),
                           j.at("rows").get<std::vector<std::vector<int>>>());
  } catch (const json::exception& e) {
    throw ParameterError(std::string("array JSON: ") + e.what());
  }
}

// {q, n, cert, x_sizes, y_size, hash, arrays}
inline json instance_summary(const HardInstance& inst) {
  json xs = json::array();
  for (int m = 0; m < inst.cert().size(); ++m) xs.push_back(inst.positives(m).size());
  json arrays = json::array();
  for (const auto& per : inst.arrays()) {
    json a = json::array();
    for (const auto& t : per) a.push_back(array_to_json(t));
    arrays.push_back(a);
  }
  return {{"q", inst.q()},
          {"n", inst.n()},
          {"hash", hex_digest(inst.hash())},
          {"cert", structure_to_json(inst.cert())},
          {"x_sizes", xs},
          {"y_size", inst.negatives().size()},
          {"arrays", arrays}};
}

// Shortest round-trip decimal form, so CSV bodies are reproducible.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// Writes via a sibling temporary and a rename.
inline void write_atomic(const std::filesystem::path& path, const std::string& body) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out << body;
    if (!out) throw Error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParameterError(path.string() + ": " + e.what());
  }
}

}  // namespace lgcert
