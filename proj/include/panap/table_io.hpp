#pragma once

#include <optional>
#include <string>
#include <vector>

#include "panap/data.hpp"

namespace panap {

// Tab is the default column separator of every table this toolkit reads or
// writes.
inline constexpr char kDefaultDelimiter = '\t';

struct ParseStats {
  size_t rows_read = 0;
  size_t rows_skipped = 0;
};

// Accepts raw epoch seconds or ISO-8601 ("2012-04-09 01:03:00" or the
// 'T'-separated form, optional fractional seconds and trailing 'Z').
std::optional<int64_t> parse_timestamp(const std::string& s);

// Required columns: job_id, title, description, requirements, city, state,
// country (header names case-insensitive, extra columns ignored). Blank
// metadata cells become UNKNOWN; rows without a job_id are skipped.
std::vector<Job> read_jobs(const std::string& path, char delimiter,
                           ParseStats* stats);

// Required columns: user_id, city, state, country, degree, major.
std::vector<JobSeeker> read_seekers(const std::string& path, char delimiter,
                                    ParseStats* stats);

// Required columns: user_id, job_id, timestamp. Rows with an unparsable
// timestamp or a blank id are skipped and counted.
std::vector<ApplicationEvent> read_applications(const std::string& path,
                                                char delimiter,
                                                ParseStats* stats);

// Tab-separated writers for the same tables; job tokens are joined into the
// title column and delimiter characters inside fields become spaces.
void write_jobs(const std::string& path, const std::vector<Job>& jobs);
void write_seekers(const std::string& path, const std::vector<JobSeeker>& seekers);
void write_applications(const std::string& path,
                        const std::vector<ApplicationEvent>& events);

// Session files carry one event per row: session_id, user_id, job_id,
// timestamp. Rows of one session are contiguous and time-ordered.
void write_sessions(const std::string& path, const std::vector<Session>& sessions);
std::vector<Session> read_sessions(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace panap
