#include "rtmix/data.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <unordered_map>

#include "rtmix/error.hpp"
#include "rtmix/format.hpp"
#include "rtmix/random.hpp"

namespace rtmix {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
    s.remove_prefix(1);
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') {
      quoted = !quoted;
    } else if (line[i] == ',' && !quoted) {
      fields.push_back(trim(line.substr(start, i - start)));
      start = i + 1;
    }
  }
  fields.push_back(trim(line.substr(start)));
  return fields;
}

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isspace(c);
  });
}

std::size_t intern(std::unordered_map<std::string, std::size_t>& index,
                   std::vector<std::string>& labels, std::string_view label) {
  auto [it, inserted] = index.try_emplace(std::string(label), labels.size());
  if (inserted) labels.emplace_back(label);
  return it->second;
}

}  // namespace

double sum_code(Condition condition) noexcept {
  return condition == Condition::SubjectRelative ? -0.5 : 0.5;
}

std::optional<Condition> parse_condition(std::string_view text) {
  const std::string s = lower(trim(text));
  if (s == "sr" || s == "subj-ext") return Condition::SubjectRelative;
  if (s == "or" || s == "obj-ext") return Condition::ObjectRelative;
  return std::nullopt;
}

std::string_view condition_label(Condition condition) noexcept {
  return condition == Condition::SubjectRelative ? "SR" : "OR";
}

Dataset::Dataset(std::vector<Trial> trials,
                 std::vector<std::string> participant_labels,
                 std::vector<std::string> item_labels)
    : trials_(std::move(trials)),
      participant_labels_(std::move(participant_labels)),
      item_labels_(std::move(item_labels)) {
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (std::size_t n = 0; n < trials_.size(); ++n) {
    const Trial& t = trials_[n];
    if (!(std::isfinite(t.rt_ms) && t.rt_ms > 0.0))
      throw DomainError("trial " + std::to_string(n) +
                        ": reading time must be positive and finite");
    if (t.participant >= participant_labels_.size() ||
        t.item >= item_labels_.size())
      throw DomainError("trial " + std::to_string(n) +
                        ": participant or item index out of range");
    if (!seen.emplace(t.participant, t.item).second)
      throw DomainError("trial " + std::to_string(n) + ": participant " +
                        participant_labels_[t.participant] +
                        " saw item " + item_labels_[t.item] + " twice");
  }
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Dataset out;
  out.participant_labels_ = participant_labels_;
  out.item_labels_ = item_labels_;
  out.trials_.reserve(indices.size());
  for (std::size_t i : indices) out.trials_.push_back(trials_.at(i));
  return out;
}

Dataset read_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!blank(line)) break;
  }
  if (line_no == 0 || blank(line))
    throw FormatError("missing header row `participant,item,condition,rt`");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0)
    line.erase(0, 3);

  const auto header = split_fields(line);
  constexpr std::array<std::string_view, 4> required = {
      "participant", "item", "condition", "rt"};
  std::array<std::size_t, 4> column{};
  for (std::size_t r = 0; r < required.size(); ++r) {
    auto it = std::find_if(header.begin(), header.end(), [&](auto h) {
      return lower(h) == required[r];
    });
    if (it == header.end())
      throw FormatError("missing column `" + std::string(required[r]) + "`");
    column[r] = static_cast<std::size_t>(it - header.begin());
  }
  const std::size_t min_fields = *std::max_element(column.begin(), column.end()) + 1;

  std::vector<Trial> trials;
  std::vector<std::string> participants, items;
  std::unordered_map<std::string, std::size_t> participant_index, item_index;
  std::set<std::pair<std::size_t, std::size_t>> seen;

  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const auto fields = split_fields(line);
    if (fields.size() < min_fields)
      throw RowError(line_no, "expected at least " +
                                  std::to_string(min_fields) + " fields, got " +
                                  std::to_string(fields.size()));
    for (std::size_t c : column)
      if (fields[c].empty()) throw RowError(line_no, "missing field");

    const auto condition = parse_condition(fields[column[2]]);
    if (!condition)
      throw RowError(line_no, "unknown condition `" +
                                  std::string(fields[column[2]]) + "`");

    const std::string_view rt_text = fields[column[3]];
    double rt = 0.0;
    auto [end, ec] =
        std::from_chars(rt_text.data(), rt_text.data() + rt_text.size(), rt);
    if (ec != std::errc() || end != rt_text.data() + rt_text.size())
      throw RowError(line_no, "rt `" + std::string(rt_text) + "` is not a number");
    if (!(std::isfinite(rt) && rt > 0.0))
      throw RowError(line_no, "rt must be positive, got " + std::string(rt_text));

    Trial t;
    t.participant = intern(participant_index, participants, fields[column[0]]);
    t.item = intern(item_index, items, fields[column[1]]);
    t.condition = *condition;
    t.rt_ms = rt;
    if (!seen.emplace(t.participant, t.item).second)
      throw RowError(line_no, "duplicate participant/item pair");
    trials.push_back(t);
  }
  return Dataset(std::move(trials), std::move(participants), std::move(items));
}

Dataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return read_csv(in);
}

void write_csv(const Dataset& dataset, std::ostream& out) {
  out << "participant,item,condition,rt\n";
  for (const Trial& t : dataset.trials()) {
    out << dataset.participant_label(t.participant) << ','
        << dataset.item_label(t.item) << ',' << condition_label(t.condition)
        << ',' << format_double(t.rt_ms) << '\n';
  }
}

void save_csv(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  write_csv(dataset, out);
}

double mean_log_rt(const Dataset& dataset) {
  if (dataset.empty()) return 0.0;
  double sum = 0.0;
  for (const Trial& t : dataset.trials()) sum += std::log(t.rt_ms);
  return sum / static_cast<double>(dataset.size());
}

std::vector<std::size_t> FoldPlan::heldout(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignment.size(); ++i)
    if (assignment[i] == fold) out.push_back(i);
  return out;
}

std::vector<std::size_t> FoldPlan::training(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignment.size(); ++i)
    if (assignment[i] != fold) out.push_back(i);
  return out;
}

std::uint64_t FoldPlan::fingerprint() const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  };
  mix(k);
  mix(seed);
  mix(assignment.size());
  for (std::size_t f : assignment) mix(f);
  return h;
}

namespace {

// True when every group (participant or item) has trials in at least two
// folds, i.e. appears in every training set.
template <typename Key>
bool covers_all_training_sets(const Dataset& dataset,
                              const std::vector<std::size_t>& assignment,
                              std::size_t n_groups, Key key) {
  constexpr std::size_t unset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> first(n_groups, unset);
  std::vector<bool> spread(n_groups, false);
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const std::size_t g = key(dataset[i]);
    if (first[g] == unset)
      first[g] = assignment[i];
    else if (first[g] != assignment[i])
      spread[g] = true;
  }
  for (std::size_t g = 0; g < n_groups; ++g)
    if (first[g] != unset && !spread[g]) return false;
  return true;
}

}  // namespace

FoldPlan make_folds(const Dataset& dataset, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw DomainError("k must be at least 2");
  const std::size_t n = dataset.size();
  if (k > n)
    throw InfeasibleSplitError("k = " + std::to_string(k) + " exceeds the " +
                               std::to_string(n) + " available trials");

  std::vector<std::size_t> per_participant(dataset.n_participants(), 0);
  std::vector<std::size_t> per_item(dataset.n_items(), 0);
  for (const Trial& t : dataset.trials()) {
    ++per_participant[t.participant];
    ++per_item[t.item];
  }
  for (std::size_t p = 0; p < per_participant.size(); ++p)
    if (per_participant[p] == 1)
      throw InfeasibleSplitError(
          "participant " + dataset.participant_label(p) +
          " has a single trial and would be missing from one training set");
  for (std::size_t j = 0; j < per_item.size(); ++j)
    if (per_item[j] == 1)
      throw InfeasibleSplitError(
          "item " + dataset.item_label(j) +
          " has a single trial and would be missing from one training set");

  // Strata in (participant, condition) order; trial order within a stratum
  // follows the dataset.
  std::vector<std::vector<std::size_t>> strata(dataset.n_participants() * 2);
  for (std::size_t i = 0; i < n; ++i) {
    const Trial& t = dataset[i];
    strata[t.participant * 2 + (t.condition == Condition::ObjectRelative)]
        .push_back(i);
  }

  constexpr std::size_t max_attempts = 1000;
  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.assignment.assign(n, 0);
  for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
    Rng rng(derive_seed(seed, SeedStream::FoldPlan, attempt));
    std::size_t next = 0;
    for (auto stratum : strata) {
      std::shuffle(stratum.begin(), stratum.end(), rng);
      for (std::size_t i : stratum) {
        plan.assignment[i] = next;
        next = (next + 1) % k;
      }
    }
    const bool ok =
        covers_all_training_sets(dataset, plan.assignment,
                                 dataset.n_participants(),
                                 [](const Trial& t) { return t.participant; }) &&
        covers_all_training_sets(dataset, plan.assignment, dataset.n_items(),
                                 [](const Trial& t) { return t.item; });
    if (ok) return plan;
  }
  throw InfeasibleSplitError("no split with k = " + std::to_string(k) +
                             " keeps every item in every training set");
}

void write_csv(const FoldPlan& plan, std::ostream& out) {
  out << "trial_index,fold\n";
  for (std::size_t i = 0; i < plan.assignment.size(); ++i)
    out << i << ',' << plan.assignment[i] + 1 << '\n';
}

}  // namespace rtmix
