#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rtmix {

enum class Condition { SubjectRelative, ObjectRelative };

// Sum coding: subject relatives -0.5, object relatives +0.5.
double sum_code(Condition condition) noexcept;

// Accepts "SR"/"OR" and "subj-ext"/"obj-ext", case-insensitive.
std::optional<Condition> parse_condition(std::string_view text);

// "SR" or "OR".
std::string_view condition_label(Condition condition) noexcept;

// One reading-time observation. participant and item are zero-based indices
// into the owning Dataset's label tables.
struct Trial {
  std::size_t participant = 0;
  std::size_t item = 0;
  Condition condition = Condition::SubjectRelative;
  double rt_ms = 0.0;
};

class Dataset {
 public:
  Dataset() = default;

  // Validates every trial: rt finite and > 0, indices within the label
  // tables, and no (participant, item) pair repeated.
  Dataset(std::vector<Trial> trials, std::vector<std::string> participant_labels,
          std::vector<std::string> item_labels);

  const std::vector<Trial>& trials() const noexcept { return trials_; }
  const Trial& operator[](std::size_t i) const { return trials_[i]; }
  std::size_t size() const noexcept { return trials_.size(); }
  bool empty() const noexcept { return trials_.empty(); }

  std::size_t n_participants() const noexcept {
    return participant_labels_.size();
  }
  std::size_t n_items() const noexcept { return item_labels_.size(); }

  const std::string& participant_label(std::size_t i) const {
    return participant_labels_[i];
  }
  const std::string& item_label(std::size_t j) const { return item_labels_[j]; }

  // Trials at the given indices, in the given order. Participant and item
  // indexing (and therefore I and J) is inherited unchanged, so random
  // effects fitted on a subset line up with the full dataset.
  Dataset subset(std::span<const std::size_t> indices) const;

 private:
  std::vector<Trial> trials_;
  std::vector<std::string> participant_labels_;
  std::vector<std::string> item_labels_;
};

// Reads `participant,item,condition,rt` CSV (header required, column order
// free, extra columns ignored). Participants and items are relabeled to
// contiguous indices in order of first appearance.
Dataset read_csv(std::istream& in);
Dataset load_csv(const std::filesystem::path& path);

// Writes the same CSV format using the original labels.
void write_csv(const Dataset& dataset, std::ostream& out);
void save_csv(const Dataset& dataset, const std::filesystem::path& path);

double mean_log_rt(const Dataset& dataset);

// Assignment of every trial to one of k held-out sets.
struct FoldPlan {
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> assignment;  // zero-based fold per trial

  std::vector<std::size_t> heldout(std::size_t fold) const;
  std::vector<std::size_t> training(std::size_t fold) const;

  // Stable hash of (k, seed, assignment) used to check that two
  // cross-validation reports score the same partition.
  std::uint64_t fingerprint() const noexcept;
};

// Stratifies by participant x condition: each stratum is shuffled and dealt
// round-robin, continuing the deal across strata so held-out sizes differ by
// at most one. Every participant and every item keeps at least one trial in
// every training set; if a shuffle violates that for an item it is redrawn.
FoldPlan make_folds(const Dataset& dataset, std::size_t k, std::uint64_t seed);

// `trial_index,fold` with zero-based trial index and 1-based fold.
void write_csv(const FoldPlan& plan, std::ostream& out);

}  // namespace rtmix
