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

#include "pcomp/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <set>

#include <nlohmann/json.hpp>

#include "pcomp/error.hpp"
#include "pcomp/labels.hpp"
#include "util.hpp"

namespace pcomp::synth {

using nlohmann::json;

namespace {

constexpr double kLatentSd = 0.8660254037844386;  // sd of U[1, 4]
constexpr double kSpeechStep = 4.0;                // seconds per speech row

// Keeps six significant digits so tables stay compact.
double q6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return std::strtod(buf, nullptr);
}

json shifts_to_json(const std::map<Modality, Shift>& shifts) {
  json j = json::object();
  for (const auto& [m, s] : shifts) {
    j[std::string(modality_name(m))] = {{"offset", s.offset}, {"scale", s.scale}};
  }
  return j;
}

std::map<Modality, Shift> shifts_from_json(const json& j) {
  if (!j.is_object()) throw InputError("synth spec: 'shift' must be an object");
  std::map<Modality, Shift> out;
  for (const auto& [name, v] : j.items()) {
    Shift s;
    if (!v.is_object()) throw InputError("synth spec: shift for " + name + " must be an object");
    for (const auto& [k, x] : v.items()) {
      if (k == "offset") s.offset = x.get<double>();
      else if (k == "scale") s.scale = x.get<double>();
      else throw InputError("synth spec: unknown shift field '" + k + "'");
    }
    out[parse_modality(name)] = s;
  }
  return out;
}

void validate_spec(const SynthSpec& s) {
  if (s.n_videos < 1) throw InputError("synth spec: n_videos must be >= 1");
  if (s.person_pool.empty() && (s.n_persons < 1 || s.n_persons > s.n_videos)) {
    throw InputError("synth spec: n_persons must lie in [1, n_videos]");
  }
  if (!(s.duration_min_s > 0.0) || s.duration_max_s < s.duration_min_s) {
    throw InputError("synth spec: need 0 < duration_min_s <= duration_max_s");
  }
  if (!(s.fps > 0.0)) throw InputError("synth spec: fps must be > 0");
  for (const auto& [m, v] : s.signal_strength) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw InputError("synth spec: signal strength for " + std::string(modality_name(m)) +
                       " must lie in [0, 1]");
    }
  }
  if (!(s.rater_noise_sd >= 0.0)) throw InputError("synth spec: rater_noise_sd must be >= 0");
  if (s.n_raters < 1) throw InputError("synth spec: n_raters must be >= 1");
  if (!(s.low_confidence_fraction >= 0.0 && s.low_confidence_fraction < 1.0)) {
    throw InputError("synth spec: low_confidence_fraction must lie in [0, 1)");
  }
  for (const auto& [m, sh] : s.shift) {
    if (!(sh.scale > 0.0)) throw InputError("synth spec: shift scale must be > 0");
  }
}

std::string numbered(const std::string& prefix, int n) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%03d", n);
  return prefix + buf;
}

double strength(const SynthSpec& s, Modality m) {
  auto it = s.signal_strength.find(m);
  return it == s.signal_strength.end() ? 0.0 : it->second;
}

// Behavioral cue of one modality: correlated with the standardized latent at
// the configured strength, then shifted.
double cue(const SynthSpec& s, Modality m, double z, std::mt19937_64& rng) {
  const double r = strength(s, m);
  double c = r * z + std::sqrt(1.0 - r * r) * util::normal(rng);
  auto it = s.shift.find(m);
  if (it != s.shift.end()) c = c * it->second.scale + it->second.offset;
  return c;
}

double frame_confidence(const SynthSpec& s, std::mt19937_64& rng) {
  return util::uniform01(rng) < s.low_confidence_fraction ? 0.3 : q6(0.9 + 0.1 * util::uniform01(rng));
}

FeatureTable speech_table(double c, double duration, std::mt19937_64& rng) {
  FeatureTable t;
  t.modality = Modality::kSpeech;
  t.columns = schema::columns(Modality::kSpeech);
  const std::size_t d = t.columns.size();
  // Dimensions whose level follows the cue.
  std::set<std::size_t> signal;
  for (const char* name :
       {"F0semitoneFrom27.5Hz_sma3nz_amean", "F0semitoneFrom27.5Hz_sma3nz_stddevNorm",
        "loudness_sma3_amean", "loudness_sma3_percentile80.0", "loudnessPeaksPerSec",
        "VoicedSegmentsPerSec", "equivalentSoundLevel_dBp", "HNRdBACF_sma3nz_amean"}) {
    signal.insert(static_cast<std::size_t>(schema::column_index(Modality::kSpeech, name)));
  }
  std::vector<double> baseline(d);
  for (std::size_t j = 0; j < d; ++j) baseline[j] = 0.3 * util::normal(rng);
  for (double start = 0.0; start < duration; start += kSpeechStep) {
    t.timestamps.push_back(start);
    for (std::size_t j = 0; j < d; ++j) {
      const double level = 1.0 + 0.05 * static_cast<double>(j % 17);
      const double scale = 0.2 + 0.01 * static_cast<double>(j % 11);
      double z = baseline[j] + 0.5 * util::normal(rng);
      if (signal.count(j)) z += c;
      t.values.push_back(q6(level + scale * z));
    }
  }
  t.rows_total = t.rows();
  return t;
}

FeatureTable face_table(const SynthSpec& spec, double c, std::size_t frames,
                        std::mt19937_64& rng) {
  FeatureTable t;
  t.modality = Modality::kFace;
  t.columns = schema::columns(Modality::kFace);
  const std::size_t n_au = schema::kActionUnits.size();
  std::vector<double> au_base(n_au);
  for (std::size_t k = 0; k < n_au; ++k) {
    const int au = schema::kActionUnits[k];
    au_base[k] = (au == 12 || au == 6) ? std::clamp(1.5 + 0.5 * c, 0.0, 4.0)
                                       : 0.2 + util::uniform01(rng);
  }
  const double tx = 30.0 * util::normal(rng), ty = 30.0 * util::normal(rng);
  const double tz = 500.0 + 50.0 * util::normal(rng);
  const double yaw_sd = 0.12 * std::exp(0.35 * c);
  const double gaze_sd = 0.08 * std::exp(0.3 * c);
  for (std::size_t f = 0; f < frames; ++f) {
    t.timestamps.push_back(static_cast<double>(f) / spec.fps);
    t.confidence.push_back(frame_confidence(spec, rng));
    t.values.push_back(q6(tx + 3.0 * util::normal(rng)));
    t.values.push_back(q6(ty + 3.0 * util::normal(rng)));
    t.values.push_back(q6(tz + 5.0 * util::normal(rng)));
    t.values.push_back(q6(0.05 + 0.05 * util::normal(rng)));
    t.values.push_back(q6(yaw_sd * util::normal(rng)));
    t.values.push_back(q6(0.05 * util::normal(rng)));
    const double gx = std::clamp(gaze_sd * util::normal(rng), -0.7, 0.7);
    const double gy = std::clamp(0.1 + 0.05 * util::normal(rng), -0.7, 0.7);
    t.values.push_back(q6(gx));
    t.values.push_back(q6(gy));
    t.values.push_back(q6(-std::sqrt(1.0 - gx * gx - gy * gy)));
    std::vector<double> r(n_au);
    for (std::size_t k = 0; k < n_au; ++k) r[k] = q6(std::clamp(au_base[k] + 0.3 * util::normal(rng), 0.0, 5.0));
    for (std::size_t k = 0; k < n_au; ++k) t.values.push_back(r[k] >= 1.0 ? 1.0 : 0.0);
    for (std::size_t k = 0; k < n_au; ++k) t.values.push_back(r[k]);
  }
  t.rows_total = frames;
  return t;
}

// Skeleton in shoulder-width units with the neck at the origin, y pointing down.
constexpr std::array<std::array<double, 2>, schema::kPoseJoints> kTemplate = {{
    {0.0, -0.6}, {0.0, 0.0},   {-0.5, 0.0},  {-0.6, 0.8}, {-0.55, 1.5},
    {0.5, 0.0},  {0.6, 0.8},   {0.55, 1.5},  {0.0, 1.9},  {-0.3, 1.9},
    {-0.3, 2.9}, {-0.3, 3.9},  {0.3, 1.9},   {0.3, 2.9},  {0.3, 3.9}}};

FeatureTable pose_table(const SynthSpec& spec, double c, std::size_t frames,
                        std::mt19937_64& rng) {
  FeatureTable t;
  t.modality = Modality::kPose;
  t.columns = schema::columns(Modality::kPose);
  const double scale = 80.0 + 60.0 * util::uniform01(rng);
  const double cx = 400.0 + 480.0 * util::uniform01(rng);
  const double cy = 250.0 + 100.0 * util::uniform01(rng);
  const double amp = 0.25 * std::exp(0.4 * c);
  const double jitter = 0.03 * std::exp(-0.4 * c);
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  const double f1 = 0.2 + 0.4 * util::uniform01(rng), f2 = 0.2 + 0.4 * util::uniform01(rng);
  const double p1 = kTwoPi * util::uniform01(rng), p2 = kTwoPi * util::uniform01(rng);
  for (std::size_t f = 0; f < frames; ++f) {
    const double time = static_cast<double>(f) / spec.fps;
    t.timestamps.push_back(time);
    t.confidence.push_back(frame_confidence(spec, rng));
    const double gx = amp * std::sin(kTwoPi * f1 * time + p1);
    const double gy = 0.6 * amp * std::sin(kTwoPi * f2 * time + p2);
    for (std::size_t j = 0; j < schema::kPoseJoints; ++j) {
      double x = kTemplate[j][0], y = kTemplate[j][1];
      if (j == 4 || j == 7) {  // wrists
        x += (j == 4 ? -gx : gx);
        y += gy;
      } else if (j == 3 || j == 6) {  // elbows
        x += 0.5 * (j == 3 ? -gx : gx);
        y += 0.5 * gy;
      }
      x += jitter * util::normal(rng);
      y += jitter * util::normal(rng);
      t.values.push_back(q6(cx + scale * x));
      t.values.push_back(q6(cy + scale * y));
    }
  }
  t.rows_total = frames;
  return t;
}

// Item severities spread over one rating step so that the per-video item mean
// tracks the latent smoothly even without rater noise.
double item_offset(int item) {
  return (static_cast<double>((item - 1) % 6) - 2.5) / 6.0;
}

std::string person_of(const SynthSpec& s, int index) {
  if (!s.person_pool.empty()) {
    return s.person_pool[static_cast<std::size_t>(index) % s.person_pool.size()];
  }
  return numbered("p", index % s.n_persons);
}

}  // namespace

json spec_to_json(const SynthSpec& s) {
  json strength = json::object();
  for (const auto& [m, v] : s.signal_strength) strength[std::string(modality_name(m))] = v;
  return {{"dataset_tag", std::string(dataset_tag_name(s.dataset_tag))},
          {"n_videos", s.n_videos},
          {"n_persons", s.n_persons},
          {"duration_min_s", s.duration_min_s},
          {"duration_max_s", s.duration_max_s},
          {"fps", s.fps},
          {"signal_strength", strength},
          {"rater_noise_sd", s.rater_noise_sd},
          {"n_raters", s.n_raters},
          {"shift", shifts_to_json(s.shift)},
          {"low_confidence_fraction", s.low_confidence_fraction},
          {"seed", s.seed},
          {"person_pool", s.person_pool},
          {"video_prefix", s.video_prefix}};
}

SynthSpec spec_from_json(const json& j) {
  if (!j.is_object()) throw InputError("synth spec must be a JSON object");
  SynthSpec s;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "dataset_tag") {
        const auto tag = v.get<std::string>();
        if (tag == "T1") s.dataset_tag = DatasetTag::kT1;
        else if (tag == "T2") s.dataset_tag = DatasetTag::kT2;
        else throw InputError("synth spec: dataset_tag must be T1 or T2");
      } else if (key == "n_videos") {
        s.n_videos = v.get<int>();
      } else if (key == "n_persons") {
        s.n_persons = v.get<int>();
      } else if (key == "duration_min_s") {
        s.duration_min_s = v.get<double>();
      } else if (key == "duration_max_s") {
        s.duration_max_s = v.get<double>();
      } else if (key == "fps") {
        s.fps = v.get<double>();
      } else if (key == "signal_strength") {
        if (v.is_number()) {
          for (Modality m : kAllModalities) s.signal_strength[m] = v.get<double>();
        } else {
          for (const auto& [name, x] : v.items()) s.signal_strength[parse_modality(name)] = x.get<double>();
        }
      } else if (key == "rater_noise_sd") {
        s.rater_noise_sd = v.get<double>();
      } else if (key == "n_raters") {
        s.n_raters = v.get<int>();
      } else if (key == "shift") {
        s.shift = shifts_from_json(v);
      } else if (key == "low_confidence_fraction") {
        s.low_confidence_fraction = v.get<double>();
      } else if (key == "seed") {
        s.seed = v.get<std::uint64_t>();
      } else if (key == "person_pool") {
        s.person_pool = v.get<std::vector<std::string>>();
      } else if (key == "video_prefix") {
        s.video_prefix = v.get<std::string>();
      } else {
        throw InputError("synth spec: unknown field '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("synth spec: wrong field type: ") + e.what());
  }
  validate_spec(s);
  return s;
}

SynthSpec load_spec(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(util::read_text_file(path));
  } catch (const json::parse_error& e) {
    throw InputError("synth spec " + path.string() + " is not valid JSON: " + e.what());
  }
  return spec_from_json(j);
}

json pair_to_json(const PairSpec& p) {
  return {{"n_persons", p.n_persons}, {"shift", shifts_to_json(p.shift)}, {"seed", p.seed}};
}

PairSpec pair_from_json(const json& j) {
  if (!j.is_object()) throw InputError("pair spec must be a JSON object");
  PairSpec p;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "n_persons") p.n_persons = v.get<int>();
      else if (key == "shift") p.shift = shifts_from_json(v);
      else if (key == "seed") p.seed = v.get<std::uint64_t>();
      else throw InputError("pair spec: unknown field '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("pair spec: wrong field type: ") + e.what());
  }
  if (p.n_persons < 1) throw InputError("pair spec: n_persons must be >= 1");
  return p;
}

SimulatedVideo simulate_video(const SynthSpec& spec, int index) {
  std::mt19937_64 rng(util::mix_seed(spec.seed, static_cast<std::uint64_t>(index)));
  SimulatedVideo v;
  v.video_id = numbered(spec.video_prefix, index + 1);
  v.person_id = person_of(spec, index);
  const double span = spec.duration_max_s - spec.duration_min_s;
  const double raw_duration = spec.duration_min_s + span * util::uniform01(rng);
  const auto frames = static_cast<std::size_t>(std::max(1.0, std::round(raw_duration * spec.fps)));
  v.duration_s = static_cast<double>(frames) / spec.fps;
  v.latent = 1.0 + 3.0 * util::uniform01(rng);
  const double z = (v.latent - 2.5) / kLatentSd;

  const double c_speech = cue(spec, Modality::kSpeech, z, rng);
  const double c_face = cue(spec, Modality::kFace, z, rng);
  const double c_pose = cue(spec, Modality::kPose, z, rng);
  v.tables[Modality::kSpeech] = speech_table(c_speech, v.duration_s, rng);
  v.tables[Modality::kFace] = face_table(spec, c_face, frames, rng);
  v.tables[Modality::kPose] = pose_table(spec, c_pose, frames, rng);

  for (int r = 0; r < spec.n_raters; ++r) {
    const std::string rater = "r" + std::to_string(r + 1);
    for (int item = 1; item <= kItemCount; ++item) {
      const double x = v.latent + item_offset(item) + spec.rater_noise_sd * util::normal(rng);
      const int rating = static_cast<int>(std::clamp(std::round(x), 1.0, 4.0));
      v.ratings.push_back({v.video_id, rater, item, rating});
    }
  }
  return v;
}

GeneratedDataset generate(const SynthSpec& spec, const std::filesystem::path& out_dir) {
  validate_spec(spec);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw InputError("cannot create " + out_dir.string() + ": " + ec.message());

  GeneratedDataset out;
  Manifest manifest;
  manifest.dataset_tag = spec.dataset_tag;
  std::vector<RatingEntry> entries;
  std::vector<double> latents;
  std::set<std::string> persons;
  for (int i = 0; i < spec.n_videos; ++i) {
    SimulatedVideo v = simulate_video(spec, i);
    VideoRecord rec;
    rec.video_id = v.video_id;
    rec.person_id = v.person_id;
    rec.duration_s = v.duration_s;
    rec.fps = spec.fps;
    for (const auto& [m, table] : v.tables) {
      const auto path = out_dir / std::string(modality_name(m)) / (v.video_id + ".csv");
      write_feature_table(table, path);
      rec.modality_paths[m] = path;
    }
    manifest.videos.push_back(std::move(rec));
    entries.insert(entries.end(), v.ratings.begin(), v.ratings.end());
    latents.push_back(v.latent);
    persons.insert(v.person_id);
  }
  out.ratings_path = out_dir / "ratings.csv";
  out.manifest_path = out_dir / "manifest.json";
  manifest.ratings_path = out.ratings_path;
  const RatingTable ratings(std::move(entries));
  write_ratings(ratings, out.ratings_path);
  write_manifest(manifest, out.manifest_path);
  out.person_ids.assign(persons.begin(), persons.end());

  if (spec.n_videos >= 2) {
    std::vector<double> scores;
    for (const auto& rec : manifest.videos) scores.push_back(competence_score(ratings, rec.video_id));
    double ms = 0, ml = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      ms += scores[i];
      ml += latents[i];
    }
    ms /= static_cast<double>(scores.size());
    ml /= static_cast<double>(scores.size());
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      sxy += (scores[i] - ms) * (latents[i] - ml);
      sxx += (scores[i] - ms) * (scores[i] - ms);
      syy += (latents[i] - ml) * (latents[i] - ml);
    }
    out.rating_latent_r = sxx > 0 && syy > 0 ? sxy / std::sqrt(sxx * syy) : 0.0;
    if (spec.rater_noise_sd <= 0.3 && spec.n_videos >= 10 && out.rating_latent_r < 0.9) {
      throw DomainError("synthetic ratings correlate with the latent at r = " +
                        util::format_double(out.rating_latent_r) + " (< 0.9)");
    }
  }
  return out;
}

GeneratedPair generate_pair(const SynthSpec& spec_t1, const PairSpec& pair,
                            const std::filesystem::path& out_dir) {
  GeneratedPair out;
  out.first = generate(spec_t1, out_dir / "T1");
  if (pair.n_persons > static_cast<int>(out.first.person_ids.size())) {
    throw InputError("pair spec asks for " + std::to_string(pair.n_persons) +
                     " persons but the first round has " +
                     std::to_string(out.first.person_ids.size()));
  }
  std::vector<std::string> pool = out.first.person_ids;
  std::mt19937_64 rng(util::mix_seed(pair.seed, 0x7032ull));
  for (std::size_t i = pool.size(); i > 1; --i) std::swap(pool[i - 1], pool[util::uniform_index(rng, i)]);
  pool.resize(static_cast<std::size_t>(pair.n_persons));
  std::sort(pool.begin(), pool.end());

  SynthSpec t2 = spec_t1;
  t2.dataset_tag = DatasetTag::kT2;
  t2.n_videos = pair.n_persons;
  t2.n_persons = pair.n_persons;
  t2.person_pool = pool;
  t2.shift = pair.shift;
  t2.seed = pair.seed;
  t2.video_prefix = spec_t1.video_prefix + "t2_";
  out.second = generate(t2, out_dir / "T2");
  return out;
}

}  // namespace pcomp::synth
