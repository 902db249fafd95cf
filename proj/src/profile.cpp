#include "intfsim/profile.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "intfsim/csv.hpp"

namespace intfsim {

namespace {

void check_fraction(double v, const char* field, const std::string& where) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw Error(where + ": " + field + " = " + csv::fmt(v) + " outside [0, 1]");
  }
}

void check_entry(const ModelProfile& p, int max_bs, const std::string& where) {
  if (p.model_id.empty()) throw Error(where + ": empty model_id");
  if (p.batch_size < 1 || p.batch_size > max_bs) {
    throw Error(where + ": batch_size " + std::to_string(p.batch_size) + " outside 1.." +
                std::to_string(max_bs));
  }
  if (!(p.solo_duration_ms > 0.0) || !std::isfinite(p.solo_duration_ms)) {
    throw Error(where + ": solo_duration_ms must be positive");
  }
  check_fraction(p.throughput.l2, "l2_throughput", where);
  check_fraction(p.throughput.dram, "dram_throughput", where);
  check_fraction(p.throughput.sm, "sm_throughput", where);
}

}  // namespace

ProfileTable::ProfileTable(int max_batch_size) : max_batch_size_(max_batch_size) {
  if (max_batch_size < 1) throw Error("max_batch_size must be positive");
}

void ProfileTable::add(ModelProfile p) {
  check_entry(p, max_batch_size_, "profile " + p.model_id);
  auto key = std::make_pair(p.model_id, p.batch_size);
  if (entries_.count(key)) {
    throw Error("duplicate profile entry (" + p.model_id + ", " + std::to_string(p.batch_size) +
                ")");
  }
  entries_.emplace(std::move(key), std::move(p));
}

void ProfileTable::validate() const {
  for (const auto& model : models()) {
    double prev = 0.0;
    for (int bs = 1; bs <= max_batch_size_; ++bs) {
      auto it = entries_.find({model, bs});
      if (it == entries_.end()) {
        throw Error("model " + model + " is missing batch size " + std::to_string(bs));
      }
      if (it->second.solo_duration_ms < prev) {
        throw Error("model " + model + ": solo_duration_ms decreases at batch size " +
                    std::to_string(bs));
      }
      prev = it->second.solo_duration_ms;
    }
  }
}

const ModelProfile& ProfileTable::at(const std::string& model_id, int batch_size) const {
  auto it = entries_.find({model_id, batch_size});
  if (it == entries_.end()) {
    throw Error("no profile for (" + model_id + ", " + std::to_string(batch_size) + ")");
  }
  return it->second;
}

bool ProfileTable::has_model(const std::string& model_id) const {
  auto it = entries_.lower_bound({model_id, 0});
  return it != entries_.end() && it->first.first == model_id;
}

std::vector<std::string> ProfileTable::models() const {
  std::vector<std::string> out;
  for (const auto& [key, _] : entries_) {
    if (out.empty() || out.back() != key.first) out.push_back(key.first);
  }
  return out;
}

std::vector<ModelProfile> ProfileTable::entries() const {
  std::vector<ModelProfile> out;
  out.reserve(entries_.size());
  for (const auto& [_, p] : entries_) out.push_back(p);
  return out;
}

void ProfileTable::add_alias(const std::string& alias, const std::string& source) {
  if (!has_model(source)) throw Error("unknown model: " + source);
  for (int bs = 1; bs <= max_batch_size_; ++bs) {
    auto it = entries_.find({source, bs});
    if (it == entries_.end()) continue;
    ModelProfile copy = it->second;
    copy.model_id = alias;
    add(std::move(copy));
  }
}

ProfileTable parse_profiles(std::istream& in, int max_batch_size) {
  auto lines = csv::read_lines(in);
  if (lines.empty() || lines.front() != kProfileCsvHeader) {
    throw Error(std::string("profile csv: header must be exactly '") + kProfileCsvHeader + "'");
  }
  ProfileTable table(max_batch_size);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t row = i + 1;  // 1-based line number in the file
    auto f = csv::split_row(lines[i]);
    if (f.size() != 6) {
      throw Error("row " + std::to_string(row) + ": expected 6 fields, got " +
                  std::to_string(f.size()));
    }
    ModelProfile p;
    p.model_id = f[0];
    p.batch_size = static_cast<int>(csv::parse_int(f[1], "batch_size", row));
    p.solo_duration_ms = csv::parse_double(f[2], "solo_duration_ms", row);
    p.throughput.l2 = csv::parse_double(f[3], "l2_throughput", row);
    p.throughput.dram = csv::parse_double(f[4], "dram_throughput", row);
    p.throughput.sm = csv::parse_double(f[5], "sm_throughput", row);
    const std::string where = "row " + std::to_string(row);
    check_entry(p, max_batch_size, where);
    try {
      table.add(std::move(p));
    } catch (const Error& e) {
      throw Error(where + ": " + e.what());
    }
  }
  table.validate();
  return table;
}

ProfileTable load_profiles(const std::filesystem::path& path, int max_batch_size) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open profile file: " + path.string());
  try {
    return parse_profiles(in, max_batch_size);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

void write_profiles(const ProfileTable& table, std::ostream& out) {
  out << kProfileCsvHeader << '\n';
  for (const auto& p : table.entries()) {
    out << p.model_id << ',' << p.batch_size << ',' << csv::fmt(p.solo_duration_ms) << ','
        << csv::fmt(p.throughput.l2) << ',' << csv::fmt(p.throughput.dram) << ','
        << csv::fmt(p.throughput.sm) << '\n';
  }
}

void save_profiles(const ProfileTable& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write profile file: " + path.string());
  write_profiles(table, out);
}

SynthesisSpec default_synthesis_spec() {
  SynthesisSpec spec;
  // The heavy efficiency gives solo(8) = 6.3242 * solo(1), i.e. a 26.5%
  // throughput gain over the batch range; the light ones exceed 200%.
  spec.archetypes = {
      {"resnet50", 1.6, 0.85, {0.55, 0.60, 0.35}},
      {"yolov8n", 1.2, 0.90, {0.30, 0.28, 0.80}},
      {"roberta_b", 5.0, 0.2394, {0.56, 0.56, 0.45}},
      {"vit_b16", 4.5, 0.35, {0.42, 0.38, 0.92}},
      {"vgg19", 3.0, 0.30, {0.58, 0.60, 0.40}},
      {"convnext_b", 5.0, 0.45, {0.48, 0.45, 0.86}},
  };
  return spec;
}

ProfileTable gen_synthetic_profiles(const SynthesisSpec& spec, std::uint64_t seed) {
  ProfileTable table(spec.max_batch_size);
  const int max_bs = spec.max_batch_size;
  for (const auto& a : spec.archetypes) {
    if (!(a.batching_efficiency >= 0.0 && a.batching_efficiency <= 1.0)) {
      throw Error("archetype " + a.model_id + ": batching_efficiency outside [0, 1]");
    }
    if (!(a.base_duration_ms > 0.0)) {
      throw Error("archetype " + a.model_id + ": base_duration_ms must be positive");
    }
    const double slope = 1.0 - a.batching_efficiency;
    auto solo = [&](int bs) { return a.base_duration_ms * (1.0 + slope * (bs - 1)); };
    const double max_rate = max_bs / solo(max_bs);

    std::mt19937_64 rng(derive_seed(seed, fnv1a(a.model_id)));
    std::uniform_real_distribution<double> jit(1.0 - spec.jitter, 1.0 + spec.jitter);
    auto frac = [&](double peak, double level) {
      double v = peak * (0.3 + 0.7 * level) * jit(rng);
      // Six decimals keep the emitted CSV readable.
      return std::clamp(std::round(v * 1e6) / 1e6, 0.0, 1.0);
    };

    for (int bs = 1; bs <= max_bs; ++bs) {
      const double level = (bs / solo(bs)) / max_rate;
      ModelProfile p;
      p.model_id = a.model_id;
      p.batch_size = bs;
      p.solo_duration_ms = solo(bs);
      p.throughput.l2 = frac(a.peak.l2, level);
      p.throughput.dram = frac(a.peak.dram, level);
      p.throughput.sm = frac(a.peak.sm, level);
      table.add(std::move(p));
    }
  }
  table.validate();
  return table;
}

std::vector<std::pair<int, double>> throughput_curve(const ProfileTable& table,
                                                     const std::string& model_id) {
  if (!table.has_model(model_id)) throw Error("unknown model: " + model_id);
  std::vector<std::pair<int, double>> out;
  for (const auto& p : table.entries()) {
    if (p.model_id != model_id) continue;
    out.emplace_back(p.batch_size, p.batch_size / (p.solo_duration_ms / 1000.0));
  }
  return out;
}

}  // namespace intfsim
