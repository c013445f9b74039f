/*
 * Copyright 2026 The pcomp Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "pcomp/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pcomp/error.hpp"
#include "pcomp/labels.hpp"
#include "util.hpp"

namespace pcomp {

using nlohmann::json;

std::string_view dataset_tag_name(DatasetTag tag) {
  return tag == DatasetTag::kT1 ? "T1" : "T2";
}

const VideoRecord* Manifest::find(std::string_view video_id) const {
  for (const auto& v : videos) {
    if (v.video_id == video_id) return &v;
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// Manifest

namespace {

std::string location_of(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) {
    throw InputError(where + ": missing required field '" + key + "'");
  }
  return *it;
}

std::string require_string(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_string()) throw InputError(where + "." + key + ": expected a string");
  return v.get<std::string>();
}

double require_number(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_number()) throw InputError(where + "." + key + ": expected a number");
  return v.get<double>();
}

}  // namespace

Manifest load_manifest(const std::filesystem::path& path) {
  const std::string text = util::read_text_file(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(path.string() + ": parse error at " + location_of(text, e.byte) + ": " +
                     e.what());
  }
  const std::string where = path.string();
  if (!doc.is_object()) throw InputError(where + ": top level must be an object");

  Manifest m;
  m.source = path;
  const auto base = path.parent_path();
  const auto resolve = [&](const std::string& p) {
    std::filesystem::path fp(p);
    return fp.is_absolute() ? fp : (base / fp).lexically_normal();
  };

  const std::string tag = require_string(doc, "dataset_tag", where);
  if (tag == "T1") {
    m.dataset_tag = DatasetTag::kT1;
  } else if (tag == "T2") {
    m.dataset_tag = DatasetTag::kT2;
  } else {
    throw InputError(where + ".dataset_tag: expected T1 or T2, got '" + tag + "'");
  }
  if (auto it = doc.find("ratings"); it != doc.end() && it->is_string()) {
    m.ratings_path = resolve(it->get<std::string>());
  }

  const json& videos = require(doc, "videos", where);
  if (!videos.is_array()) throw InputError(where + ".videos: expected a list");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < videos.size(); ++i) {
    const std::string vw = where + ": videos[" + std::to_string(i) + "]";
    const json& v = videos[i];
    if (!v.is_object()) throw InputError(vw + ": expected an object");
    VideoRecord r;
    r.video_id = require_string(v, "video_id", vw);
    r.person_id = require_string(v, "person_id", vw);
    if (r.video_id.empty()) throw InputError(vw + ".video_id: must not be empty");
    if (r.person_id.empty()) throw InputError(vw + ".person_id: must not be empty");
    r.duration_s = require_number(v, "duration_s", vw);
    if (!(r.duration_s > 0.0)) throw InputError(vw + ".duration_s: must be > 0");
    for (Modality mod : kAllModalities) {
      const std::string key(modality_name(mod));
      auto it = v.find(key);
      if (it == v.end() || it->is_null()) continue;
      if (!it->is_string()) throw InputError(vw + "." + key + ": expected a path string");
      r.modality_paths[mod] = resolve(it->get<std::string>());
    }
    if (r.modality_paths.empty()) {
      throw InputError(vw + ": at least one of speech/face/pose is required");
    }
    if (auto it = v.find("fps"); it != v.end() && !it->is_null()) {
      if (!it->is_number()) throw InputError(vw + ".fps: expected a number");
      r.fps = it->get<double>();
    }
    if ((r.has(Modality::kFace) || r.has(Modality::kPose)) && !(r.fps > 0.0)) {
      throw InputError(vw + ".fps: required (> 0) for frame-indexed modalities");
    }
    if (!seen.insert(r.video_id).second) {
      throw InputError(vw + ": duplicate video_id '" + r.video_id + "'");
    }
    m.videos.push_back(std::move(r));
  }
  return m;
}

void write_manifest(const Manifest& manifest, const std::filesystem::path& path) {
  const auto base = path.parent_path();
  const auto rel = [&](const std::filesystem::path& p) {
    return p.lexically_relative(base).generic_string();
  };
  json doc = json::object();
  doc["dataset_tag"] = std::string(dataset_tag_name(manifest.dataset_tag));
  if (manifest.ratings_path) doc["ratings"] = rel(*manifest.ratings_path);
  json videos = json::array();
  for (const auto& v : manifest.videos) {
    json jv = json::object();
    jv["video_id"] = v.video_id;
    jv["person_id"] = v.person_id;
    jv["duration_s"] = v.duration_s;
    jv["fps"] = v.fps;
    for (const auto& [mod, p] : v.modality_paths) jv[std::string(modality_name(mod))] = rel(p);
    videos.push_back(std::move(jv));
  }
  doc["videos"] = std::move(videos);
  util::write_text_file(path, doc.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Feature tables

FeatureTable load_feature_table(const std::filesystem::path& path, Modality modality,
                                const TableLoadOptions& options) {
  util::CsvFile csv;
  util::read_csv(path, csv);
  const std::string where = path.string();
  const auto& schema_cols = schema::columns(modality);

  int t_col = -1;
  int conf_col = -1;
  std::vector<int> target(csv.header.size(), -1);
  std::vector<bool> found(schema_cols.size(), false);
  std::vector<std::string> unknown;
  for (std::size_t i = 0; i < csv.header.size(); ++i) {
    const std::string& h = csv.header[i];
    if (h == "t") {
      t_col = static_cast<int>(i);
    } else if (h == "confidence") {
      conf_col = static_cast<int>(i);
    } else {
      const int idx = schema::column_index(modality, h);
      if (idx < 0) {
        unknown.push_back(h);
      } else if (found[static_cast<std::size_t>(idx)]) {
        throw InputError(where + ": duplicate column '" + h + "'");
      } else {
        found[static_cast<std::size_t>(idx)] = true;
        target[i] = idx;
      }
    }
  }
  if (t_col != 0) throw InputError(where + ": first column must be 't' (seconds)");
  std::vector<std::string> missing;
  for (std::size_t i = 0; i < schema_cols.size(); ++i) {
    if (!found[i]) missing.push_back(schema_cols[i]);
  }
  if (!missing.empty() || !unknown.empty()) {
    std::ostringstream msg;
    msg << where << ": schema mismatch for " << modality_name(modality) << " (expected "
        << schema_cols.size() << " feature columns, found "
        << (csv.header.size() - 1 - (conf_col >= 0 ? 1 : 0)) << ")";
    if (!missing.empty()) {
      msg << "; missing:";
      for (const auto& c : missing) msg << ' ' << c;
    }
    if (!unknown.empty()) {
      msg << "; unknown:";
      for (const auto& c : unknown) msg << ' ' << c;
    }
    throw InputError(msg.str());
  }

  FeatureTable t;
  t.modality = modality;
  t.columns = schema_cols;
  t.rows_total = csv.rows.size();
  const std::size_t ncols = schema_cols.size();
  t.timestamps.reserve(csv.rows.size());
  t.values.reserve(csv.rows.size() * ncols);
  double prev_t = -std::numeric_limits<double>::infinity();
  std::vector<double> row(ncols);
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const auto& fields = csv.rows[r];
    const std::string ctx = where + ":" + std::to_string(csv.line_numbers[r]);
    const double ts = util::parse_double(fields[0], ctx);
    if (!std::isfinite(ts)) throw InputError(ctx + ": non-finite timestamp");
    if (!(ts > prev_t)) {
      throw InputError(ctx + ": timestamps must be strictly increasing (" +
                       util::format_double(ts) + " after " + util::format_double(prev_t) +
                       ")");
    }
    prev_t = ts;
    double conf = 1.0;
    if (conf_col >= 0) {
      conf = util::parse_double(fields[static_cast<std::size_t>(conf_col)], ctx);
      if (!(conf >= 0.0 && conf <= 1.0)) throw InputError(ctx + ": confidence outside [0,1]");
    }
    bool finite = true;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (target[i] < 0) continue;
      const double v = util::parse_double(fields[i], ctx);
      finite = finite && std::isfinite(v);
      row[static_cast<std::size_t>(target[i])] = v;
    }
    // Non-finite rows are treated like detector failures.
    if ((conf_col >= 0 && conf < options.confidence_threshold) || !finite) {
      ++t.rows_dropped;
      continue;
    }
    t.timestamps.push_back(ts);
    t.values.insert(t.values.end(), row.begin(), row.end());
    if (conf_col >= 0) t.confidence.push_back(conf);
  }
  if (t.rows() == 0) {
    throw InputError(where + ": no rows left after confidence filtering (" +
                     std::to_string(t.rows_dropped) + " of " + std::to_string(t.rows_total) +
                     " dropped)");
  }
  return t;
}

void write_feature_table(const FeatureTable& table, const std::filesystem::path& path) {
  std::string out = "t";
  const bool has_conf = !table.confidence.empty();
  if (has_conf) out += ",confidence";
  for (const auto& c : table.columns) out += "," + c;
  out += '\n';
  for (std::size_t r = 0; r < table.rows(); ++r) {
    out += util::format_double(table.timestamps[r]);
    if (has_conf) out += "," + util::format_double(table.confidence[r]);
    for (double v : table.row(r)) {
      out += ',';
      out += util::format_double(v);
    }
    out += '\n';
  }
  util::write_text_file(path, out);
}

// ---------------------------------------------------------------------------
// Ratings

RatingTable::RatingTable(std::vector<RatingEntry> entries) : entries_(std::move(entries)) {
  for (const auto& e : entries_) {
    if (e.rating < 1 || e.rating > 4) {
      throw InputError("rating " + std::to_string(e.rating) + " for video " + e.video_id +
                       " item " + std::to_string(e.item) + " outside the 4-point scale");
    }
    if (e.item < 1 || e.item > kItemCount) {
      throw InputError("unknown item index " + std::to_string(e.item) + " for video " +
                       e.video_id + " (items are 1.." + std::to_string(kItemCount) + ")");
    }
    auto& slot = index_[e.video_id][e.item];
    if (!slot.emplace(e.rater_id, e.rating).second) {
      throw InputError("duplicate rating by " + e.rater_id + " for video " + e.video_id +
                       " item " + std::to_string(e.item));
    }
  }
}

const std::map<std::string, int>* RatingTable::by_rater(std::string_view video_id,
                                                        int item) const {
  auto v = index_.find(video_id);
  if (v == index_.end()) return nullptr;
  auto i = v->second.find(item);
  return i == v->second.end() ? nullptr : &i->second;
}

std::vector<int> RatingTable::ratings(std::string_view video_id, int item) const {
  std::vector<int> out;
  if (const auto* m = by_rater(video_id, item)) {
    for (const auto& [rater, r] : *m) out.push_back(r);
  }
  return out;
}

std::vector<int> RatingTable::rated_items(std::string_view video_id) const {
  std::vector<int> out;
  auto v = index_.find(video_id);
  if (v == index_.end()) return out;
  for (const auto& [item, m] : v->second) {
    if (!m.empty()) out.push_back(item);
  }
  return out;
}

std::vector<std::string> RatingTable::video_ids() const {
  std::vector<std::string> out;
  for (const auto& [id, items] : index_) out.push_back(id);
  return out;
}

std::vector<std::string> RatingTable::rater_ids() const {
  std::set<std::string> ids;
  for (const auto& e : entries_) ids.insert(e.rater_id);
  return {ids.begin(), ids.end()};
}

RatingTable load_ratings(const std::filesystem::path& path) {
  util::CsvFile csv;
  util::read_csv(path, csv);
  const std::string where = path.string();
  const auto col = [&](const char* name) {
    auto it = std::find(csv.header.begin(), csv.header.end(), name);
    if (it == csv.header.end()) {
      throw InputError(where + ": missing column '" + name + "'");
    }
    return static_cast<std::size_t>(it - csv.header.begin());
  };
  const std::size_t c_video = col("video_id");
  const std::size_t c_rater = col("rater_id");
  const std::size_t c_item = col("item");
  const std::size_t c_rating = col("rating");
  std::vector<RatingEntry> entries;
  entries.reserve(csv.rows.size());
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const auto& f = csv.rows[r];
    const std::string ctx = where + ":" + std::to_string(csv.line_numbers[r]);
    RatingEntry e;
    e.video_id = std::string(f[c_video]);
    e.rater_id = std::string(f[c_rater]);
    e.item = static_cast<int>(util::parse_long(f[c_item], ctx + " item"));
    e.rating = static_cast<int>(util::parse_long(f[c_rating], ctx + " rating"));
    if (e.video_id.empty() || e.rater_id.empty()) {
      throw InputError(ctx + ": empty video_id or rater_id");
    }
    if (e.rating < 1 || e.rating > 4) {
      throw InputError(ctx + ": rating " + std::to_string(e.rating) +
                       " outside the 4-point scale {1,2,3,4}");
    }
    if (e.item < 1 || e.item > kItemCount) {
      throw InputError(ctx + ": unknown item index " + std::to_string(e.item) +
                       " (items are 1.." + std::to_string(kItemCount) + ")");
    }
    entries.push_back(std::move(e));
  }
  return RatingTable(std::move(entries));
}

void write_ratings(const RatingTable& ratings, const std::filesystem::path& path) {
  std::string out = "video_id,rater_id,item,rating\n";
  for (const auto& e : ratings.entries()) {
    out += e.video_id + "," + e.rater_id + "," + std::to_string(e.item) + "," +
           std::to_string(e.rating) + "\n";
  }
  util::write_text_file(path, out);
}

// ---------------------------------------------------------------------------
// Validation

std::string ValidationReport::to_json() const {
  json doc = json::object();
  doc["pass"] = pass;
  doc["issues"] = issues;
  doc["unreadable_files"] = unreadable_files;
  json vids = json::array();
  for (const auto& v : videos) {
    json jv = json::object();
    jv["video_id"] = v.video_id;
    json present = json::object();
    for (const auto& [m, p] : v.present) present[std::string(modality_name(m))] = p;
    jv["present"] = std::move(present);
    json cov = json::object();
    for (const auto& [m, c] : v.coverage) cov[std::string(modality_name(m))] = c;
    jv["coverage"] = std::move(cov);
    jv["missing_items"] = v.missing_items;
    vids.push_back(std::move(jv));
  }
  doc["videos"] = std::move(vids);
  return doc.dump(2);
}

ValidationReport validate_dataset(const Manifest& manifest, const RatingTable& ratings,
                                  const ValidationOptions& options) {
  ValidationReport report;
  const auto issue = [&](std::string s) {
    report.pass = false;
    report.issues.push_back(std::move(s));
  };
  if (manifest.videos.empty()) issue("manifest lists no videos");

  std::set<std::string> persons;
  for (const auto& video : manifest.videos) {
    VideoValidation vv;
    vv.video_id = video.video_id;
    persons.insert(video.person_id);
    for (Modality m : options.required_modalities) {
      const std::string name(modality_name(m));
      auto it = video.modality_paths.find(m);
      const bool listed = it != video.modality_paths.end();
      const bool exists = listed && std::filesystem::is_regular_file(it->second);
      vv.present[m] = exists;
      if (!listed) {
        issue(name + " table missing for " + video.video_id);
        continue;
      }
      if (!exists) {
        issue(name + " table missing for " + video.video_id + ": " + it->second.string());
        continue;
      }
      try {
        const FeatureTable t =
            load_feature_table(it->second, m, TableLoadOptions{options.confidence_threshold});
        vv.coverage[m] = t.coverage_ratio();
        if (m != Modality::kSpeech && video.fps > 0.0) {
          const double covered = static_cast<double>(t.rows_total) / video.fps;
          if (std::abs(covered - video.duration_s) > options.duration_tolerance_s) {
            issue(name + " table of " + video.video_id + " covers " +
                  util::format_double(covered) + " s but duration_s is " +
                  util::format_double(video.duration_s));
          }
        }
        if (t.timestamps.back() > video.duration_s + options.duration_tolerance_s) {
          issue(name + " table of " + video.video_id + " has timestamps beyond duration_s");
        }
      } catch (const Error& e) {
        ++report.unreadable_files;
        issue(name + " table invalid for " + video.video_id + ": " + e.what());
      }
    }

    std::vector<int> missing;
    for (int item = kFirstCompetenceItem; item <= kLastCompetenceItem; ++item) {
      if (ratings.ratings(video.video_id, item).empty()) missing.push_back(item);
    }
    if (!missing.empty()) {
      std::string s = "ratings incomplete for " + video.video_id + ": missing items";
      for (int i : missing) s += " " + std::to_string(i);
      issue(s);
    }
    vv.missing_items = std::move(missing);
    report.videos.push_back(std::move(vv));
  }
  return report;
}

}  // namespace pcomp
