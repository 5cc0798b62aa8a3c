#include "multimax/ingest.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include <fmt/format.h>

#include "multimax/csv.hpp"
#include "multimax/errors.hpp"

namespace multimax::ingest {

namespace fs = std::filesystem;

BinaryClass ClassCoding::encode(const std::string& raw, const std::string& where) const {
  if (raw == favourable) return kFavourable;
  if (raw == unfavourable) return kUnfavourable;
  throw ValidationError(fmt::format("{}: value '{}' is outside the label set {{'{}', '{}'}}", where,
                                    raw, favourable, unfavourable));
}

namespace {

std::string trimmed(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

LoadedLabels load_labels(const fs::path& path, const std::string& favourable,
                         const std::optional<std::string>& unfavourable, std::string index_name) {
  const auto table = csv::read(path);
  const auto id_col = table.column("instance_id");
  const auto label_col = table.column("label");
  if (table.rows.empty()) throw ValidationError(fmt::format("{}: no labels", table.source));

  std::vector<std::string> distinct;
  for (const auto& row : table.rows) {
    const auto value = trimmed(row.fields[label_col]);
    if (std::find(distinct.begin(), distinct.end(), value) == distinct.end()) {
      distinct.push_back(value);
      if (distinct.size() > 2) {
        throw ValidationError(fmt::format("{}: more than two distinct labels ('{}', '{}', '{}')",
                                          table.where(row), distinct[0], distinct[1], distinct[2]));
      }
    }
  }
  if (std::find(distinct.begin(), distinct.end(), favourable) == distinct.end()) {
    throw ValidationError(
        fmt::format("{}: favourable label '{}' does not occur", table.source, favourable));
  }

  ClassCoding coding;
  coding.favourable = favourable;
  if (unfavourable) {
    if (*unfavourable == favourable) {
      throw ValidationError("favourable and unfavourable labels must differ");
    }
    coding.unfavourable = *unfavourable;
  } else if (distinct.size() == 2) {
    coding.unfavourable = distinct[0] == favourable ? distinct[1] : distinct[0];
  } else if (favourable == "1") {
    coding.unfavourable = "0";
  } else if (favourable == "0") {
    coding.unfavourable = "1";
  } else {
    throw ValidationError(fmt::format(
        "{}: only one label value occurs; set unfavourable_label explicitly", table.source));
  }

  std::vector<std::string> ids;
  std::vector<BinaryClass> values;
  std::set<std::string, std::less<>> seen;
  ids.reserve(table.rows.size());
  values.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    auto id = trimmed(row.fields[id_col]);
    if (id.empty()) throw ValidationError(fmt::format("{}: empty instance_id", table.where(row)));
    if (!seen.insert(id).second) {
      throw ValidationError(fmt::format("{}: duplicate instance '{}'", table.where(row), id));
    }
    values.push_back(coding.encode(trimmed(row.fields[label_col]), table.where(row)));
    ids.push_back(std::move(id));
  }
  auto index = make_index(std::move(index_name), std::move(ids));
  return {LabelVector(std::move(index), std::move(values)), coding};
}

LabelVector load_labels_on(const fs::path& path, const ClassCoding& coding, const IndexRef& index) {
  const auto table = csv::read(path);
  const auto id_col = table.column("instance_id");
  const auto label_col = table.column("label");
  std::vector<BinaryClass> values(index->size());
  std::vector<bool> filled(index->size(), false);
  for (const auto& row : table.rows) {
    const auto id = trimmed(row.fields[id_col]);
    const auto pos = index->position(id);
    if (!pos) {
      throw ValidationError(fmt::format("{}: unknown instance '{}' for index '{}'",
                                        table.where(row), id, index->name()));
    }
    if (filled[*pos]) {
      throw ValidationError(fmt::format("{}: duplicate instance '{}'", table.where(row), id));
    }
    filled[*pos] = true;
    values[*pos] = coding.encode(trimmed(row.fields[label_col]), table.where(row));
  }
  for (std::size_t i = 0; i < filled.size(); ++i) {
    if (!filled[i]) {
      throw ValidationError(fmt::format("{}: no label for instance '{}'", table.source, index->id(i)));
    }
  }
  return LabelVector(index, std::move(values));
}

namespace {

struct RawRun {
  std::string family;
  std::vector<BinaryClass> values;
  std::vector<bool> filled;
};

/// Parses one long-format file. When `index` is null the index is built from
/// first appearance, so cells are collected before it is known.
struct ParsedMatrix {
  IndexRef index;
  std::vector<std::string> run_order;
  std::unordered_map<std::string, RawRun> runs;
};

ParsedMatrix parse_matrix(const fs::path& path, IndexRef index, const ClassCoding& coding,
                          const std::string& index_name) {
  const auto table = csv::read(path);
  const auto run_col = table.column("run_id");
  const auto id_col = table.column("instance_id");
  const auto pred_col = table.column("prediction");
  std::optional<std::size_t> family_col;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (table.header[i] == "family") family_col = i;
  }
  if (table.rows.empty()) throw ValidationError(fmt::format("{}: no predictions", table.source));

  ParsedMatrix out;
  const bool fixed_index = index != nullptr;
  std::vector<std::string> new_ids;
  std::unordered_map<std::string, std::size_t> new_pos;

  struct Cell {
    std::size_t pos;
    BinaryClass value;
    const csv::Row* row;
  };
  std::unordered_map<std::string, std::vector<Cell>> cells;

  for (const auto& row : table.rows) {
    auto run_id = trimmed(row.fields[run_col]);
    const auto inst = trimmed(row.fields[id_col]);
    if (run_id.empty()) throw ValidationError(fmt::format("{}: empty run_id", table.where(row)));
    std::size_t pos = 0;
    if (fixed_index) {
      const auto p = index->position(inst);
      if (!p) {
        throw ValidationError(fmt::format("{}: unknown instance '{}'", table.where(row), inst));
      }
      pos = *p;
    } else {
      if (inst.empty()) throw ValidationError(fmt::format("{}: empty instance_id", table.where(row)));
      auto [it, inserted] = new_pos.try_emplace(inst, new_ids.size());
      if (inserted) new_ids.push_back(inst);
      pos = it->second;
    }
    const auto value = coding.encode(trimmed(row.fields[pred_col]), table.where(row));
    auto [it, inserted] = out.runs.try_emplace(run_id);
    if (inserted) {
      out.run_order.push_back(run_id);
      it->second.family = family_col ? trimmed(row.fields[*family_col]) : "ingested";
      if (it->second.family.empty()) it->second.family = "ingested";
    }
    cells[run_id].push_back({pos, value, &row});
  }

  if (!fixed_index) index = make_index(index_name, std::move(new_ids));
  out.index = index;
  const std::size_t n = index->size();
  for (const auto& run_id : out.run_order) {
    auto& raw = out.runs.at(run_id);
    raw.values.assign(n, 0);
    raw.filled.assign(n, false);
    for (const auto& cell : cells.at(run_id)) {
      if (raw.filled[cell.pos]) {
        throw ValidationError(fmt::format("{}: duplicate row for run '{}', instance '{}'",
                                          table.where(*cell.row), run_id, index->id(cell.pos)));
      }
      raw.filled[cell.pos] = true;
      raw.values[cell.pos] = cell.value;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!raw.filled[i]) {
        throw ValidationError(fmt::format("{}: run '{}' has no prediction for instance '{}'",
                                          table.source, run_id, index->id(i)));
      }
    }
  }
  return out;
}

}  // namespace

std::vector<ModelRun> load_predictions(const fs::path& path, const LabelVector& labels,
                                       const ClassCoding& coding,
                                       const std::optional<fs::path>& fairness_path) {
  auto validation = parse_matrix(path, labels.index_ref(), coding, labels.index().name());
  std::optional<ParsedMatrix> fairness;
  if (fairness_path) {
    fairness = parse_matrix(*fairness_path, nullptr, coding, "fairness");
    for (const auto& run_id : validation.run_order) {
      if (!fairness->runs.contains(run_id)) {
        throw ValidationError(fmt::format("{}: run '{}' has no fairness predictions",
                                          fairness_path->string(), run_id));
      }
    }
    for (const auto& run_id : fairness->run_order) {
      if (!validation.runs.contains(run_id)) {
        throw ValidationError(fmt::format("{}: run '{}' is not in {}", fairness_path->string(),
                                          run_id, path.string()));
      }
    }
  }

  std::vector<ModelRun> runs;
  runs.reserve(validation.run_order.size());
  for (const auto& run_id : validation.run_order) {
    auto& raw = validation.runs.at(run_id);
    PredictionVector preds(validation.index, raw.values);
    std::optional<PredictionVector> fair;
    if (fairness) {
      fair.emplace(fairness->index, std::move(fairness->runs.at(run_id).values));
    } else {
      fair = preds;
    }
    runs.push_back(ModelRun::evaluate(run_id, raw.family, std::move(preds), std::move(fair), labels));
  }
  return runs;
}

GroupMap load_groups(const fs::path& path) {
  const auto table = csv::read(path);
  const auto id_col = table.column("instance_id");
  const auto group_col = table.column("group");
  GroupMap groups;
  for (const auto& row : table.rows) {
    auto id = trimmed(row.fields[id_col]);
    auto group = trimmed(row.fields[group_col]);
    if (group.empty()) throw ValidationError(fmt::format("{}: empty group", table.where(row)));
    if (!groups.emplace(id, std::move(group)).second) {
      throw ValidationError(fmt::format("{}: duplicate instance '{}'", table.where(row), id));
    }
  }
  return groups;
}

// Manifest.

namespace {

template <typename T>
T parse_unsigned(const std::string& value, const std::string& where) {
  T out{};
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) {
    throw ValidationError(fmt::format("{}: expected a non-negative integer, got '{}'", where, value));
  }
  return out;
}

fs::path resolve(const fs::path& base, const std::string& value, const std::string& where,
                 bool must_exist = true) {
  fs::path p(value);
  if (p.is_relative()) p = base / p;
  p = p.lexically_normal();
  if (must_exist && !fs::exists(p)) {
    throw ValidationError(fmt::format("{}: path '{}' does not exist", where, p.string()));
  }
  return p;
}

}  // namespace

Manifest parse_manifest(const std::string& text, const fs::path& source) {
  Manifest m;
  m.source = source;
  m.fold_id = source.stem().string();
  const fs::path base = source.has_parent_path() ? source.parent_path() : fs::path(".");
  std::optional<std::string> band_text;
  std::optional<std::string> tie_break_text;
  std::optional<std::string> anchors_text;
  std::set<std::string> seen;

  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string where = fmt::format("{}:{}", source.string(), line_no);
    const auto line = trimmed(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ValidationError(fmt::format("{}: expected 'key = value'", where));
    }
    const auto key = trimmed(std::string_view(line).substr(0, eq));
    const auto value = trimmed(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw ValidationError(fmt::format("{}: empty key", where));
    if (!seen.insert(key).second) throw ValidationError(fmt::format("{}: duplicate key '{}'", where, key));

    if (key.starts_with("provenance.")) {
      m.provenance[key.substr(11)] = value;
    } else if (key == "fold") {
      m.fold_id = value;
    } else if (key == "labels") {
      m.labels = resolve(base, value, where);
    } else if (key == "predictions") {
      m.predictions = resolve(base, value, where);
    } else if (key == "fairness_predictions") {
      m.fairness_predictions = resolve(base, value, where);
    } else if (key == "fairness_labels") {
      m.fairness_labels = resolve(base, value, where);
    } else if (key == "group_map") {
      m.group_map = resolve(base, value, where);
    } else if (key == "favourable_label") {
      m.favourable_label = value;
    } else if (key == "unfavourable_label") {
      m.unfavourable_label = value;
    } else if (key == "band") {
      band_text = value;
    } else if (key == "tie_break") {
      tie_break_text = value;
    } else if (key == "anchors") {
      anchors_text = value;
    } else if (key == "discrepancy_cap") {
      m.discrepancy_cap = parse_unsigned<std::size_t>(value, where);
    } else if (key == "seed") {
      m.seed = parse_unsigned<std::uint64_t>(value, where);
    } else if (key == "top_n") {
      m.top_n = parse_unsigned<std::size_t>(value, where);
    } else if (key == "max_instances") {
      m.max_instances = parse_unsigned<std::size_t>(value, where);
    } else if (key == "profile_variant") {
      if (value == "summary") {
        m.profile_variant = profiles::FairnessVariant::summary;
      } else if (value == "faithful") {
        m.profile_variant = profiles::FairnessVariant::faithful;
      } else {
        throw ValidationError(fmt::format("{}: profile_variant must be summary or faithful", where));
      }
    } else {
      throw ValidationError(fmt::format("{}: unknown key '{}'", where, key));
    }
  }

  if (m.labels.empty()) throw ValidationError(fmt::format("{}: missing 'labels'", source.string()));
  if (m.predictions.empty()) {
    throw ValidationError(fmt::format("{}: missing 'predictions'", source.string()));
  }
  if (m.fairness_labels && !m.fairness_predictions) {
    throw ValidationError(
        fmt::format("{}: fairness_labels requires fairness_predictions", source.string()));
  }
  try {
    if (band_text) m.banding = BandingPolicy::parse(*band_text);
    if (tie_break_text && !tie_break_text->empty()) m.banding.tie_break = parse_tie_break(*tie_break_text);
    if (anchors_text && !anchors_text->empty()) {
      std::istringstream list(*anchors_text);
      std::string item;
      while (std::getline(list, item, ',')) m.banding.anchors.push_back(ExactRatio::parse(trimmed(item)));
    }
    m.banding.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(fmt::format("{}: {}", source.string(), e.what()));
  }
  if (m.top_n == 0) throw ValidationError(fmt::format("{}: top_n must be >= 1", source.string()));
  if (m.max_instances == 0) {
    throw ValidationError(fmt::format("{}: max_instances must be >= 1", source.string()));
  }
  return m;
}

void apply_environment(Manifest& manifest) {
  const char* env = std::getenv("MULTIMAX_SEED");
  if (env == nullptr || *env == '\0') return;
  manifest.seed = parse_unsigned<std::uint64_t>(env, "MULTIMAX_SEED");
  manifest.seed_from_environment = true;
}

Manifest load_manifest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(fmt::format("cannot open manifest '{}'", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  auto m = parse_manifest(buffer.str(), path);
  apply_environment(m);
  return m;
}

std::string render_manifest(const Manifest& m) {
  const fs::path base = m.source.has_parent_path() ? m.source.parent_path() : fs::path(".");
  auto rel = [&](const fs::path& p) {
    auto r = p.lexically_relative(base);
    return (r.empty() ? p : r).generic_string();
  };
  std::string out;
  out += fmt::format("fold = {}\n", m.fold_id);
  out += fmt::format("labels = {}\n", rel(m.labels));
  out += fmt::format("predictions = {}\n", rel(m.predictions));
  if (m.fairness_predictions) out += fmt::format("fairness_predictions = {}\n", rel(*m.fairness_predictions));
  if (m.fairness_labels) out += fmt::format("fairness_labels = {}\n", rel(*m.fairness_labels));
  if (m.group_map) out += fmt::format("group_map = {}\n", rel(*m.group_map));
  out += fmt::format("favourable_label = {}\n", m.favourable_label);
  if (m.unfavourable_label) out += fmt::format("unfavourable_label = {}\n", *m.unfavourable_label);
  out += fmt::format("band = {}\n", m.banding.str());
  if (!m.banding.tie_break.empty()) {
    std::string tb;
    for (auto k : m.banding.tie_break) tb += (tb.empty() ? "" : ",") + std::string(to_string(k));
    out += fmt::format("tie_break = {}\n", tb);
  }
  if (!m.banding.anchors.empty()) {
    std::string a;
    for (const auto& r : m.banding.anchors) a += (a.empty() ? "" : ",") + r.str();
    out += fmt::format("anchors = {}\n", a);
  }
  out += fmt::format("discrepancy_cap = {}\n", m.discrepancy_cap);
  out += fmt::format("seed = {}\n", m.seed);
  out += fmt::format("top_n = {}\n", m.top_n);
  out += fmt::format("max_instances = {}\n", m.max_instances);
  out += fmt::format("profile_variant = {}\n",
                     m.profile_variant == profiles::FairnessVariant::summary ? "summary" : "faithful");
  for (const auto& [k, v] : m.provenance) out += fmt::format("provenance.{} = {}\n", k, v);
  return out;
}

AuditInput load_input(const Manifest& manifest) {
  auto [labels, coding] =
      load_labels(manifest.labels, manifest.favourable_label, manifest.unfavourable_label);
  auto runs = load_predictions(manifest.predictions, labels, coding, manifest.fairness_predictions);
  std::optional<LabelVector> fairness_labels;
  if (manifest.fairness_labels) {
    fairness_labels = load_labels_on(*manifest.fairness_labels, coding,
                                     runs.front().fairness().index_ref());
  }
  std::optional<GroupMap> groups;
  if (manifest.group_map) groups = load_groups(*manifest.group_map);
  return {manifest, coding, RunCatalog(std::move(labels), std::move(runs)), std::move(fairness_labels),
          std::move(groups)};
}

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
  return out;
}

}  // namespace

void write_labels(const fs::path& path, const LabelVector& labels, const ClassCoding& coding) {
  auto out = open_out(path);
  out << "instance_id,label\n";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out << csv::field(labels.index().id(i)) << ','
        << csv::field(labels[i] == kFavourable ? coding.favourable : coding.unfavourable) << '\n';
  }
}

void write_predictions(const fs::path& path, std::span<const ModelRun> runs, bool fairness,
                       const ClassCoding& coding) {
  auto out = open_out(path);
  out << "run_id,instance_id,prediction,family\n";
  for (const auto& run : runs) {
    const auto& preds = fairness ? run.fairness() : run.validation();
    const auto run_id = csv::field(run.id());
    const auto family = csv::field(run.family());
    for (std::size_t i = 0; i < preds.size(); ++i) {
      out << run_id << ',' << csv::field(preds.index().id(i)) << ','
          << (preds[i] == kFavourable ? coding.favourable : coding.unfavourable) << ',' << family
          << '\n';
    }
  }
}

}  // namespace multimax::ingest
