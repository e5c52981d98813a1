#pragma once

#include <string>

#include <json.hpp>

#include "panap/data.hpp"

namespace panap {

struct PrepareConfig {
  std::string jobs_path;
  std::string seekers_path;
  std::string applications_path;
  char delimiter = '\t';
  SessionMode mode = SessionMode::gap_split;
  int gap_minutes = 30;
  int test_days = 14;
};

// Reads the raw tables, sessionizes, splits the last test_days off the end,
// filters unseen test jobs, and writes a self-contained directory:
// jobs.tsv, seekers.tsv, train_sessions.tsv, test_sessions.tsv, and
// manifest.json with the run parameters and corpus statistics. Returns the
// manifest.
nlohmann::json prepare_dataset(const PrepareConfig& cfg,
                               const std::string& out_dir);

// Rebuilds the Dataset from a directory written by prepare_dataset.
Dataset load_prepared(const std::string& dir);

nlohmann::json read_manifest(const std::string& dir);

}  // namespace panap
