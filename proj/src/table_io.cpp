#include "panap/table_io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "panap/common.hpp"

namespace panap {

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!cur.empty()) {
      if (cur.size() >= 2) out.push_back(cur);
      cur.clear();
    }
  }
  if (cur.size() >= 2) out.push_back(cur);
  return out;
}

std::string normalize_state(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return kUnknown;
  size_t e = s.find_last_not_of(" \t\r\n");
  std::string t = s.substr(b, e - b + 1);
  for (char& c : t) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return t.empty() ? kUnknown : t;
}

namespace {

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == delim) {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

// Maps required column names to indices; missing column is a schema error.
class HeaderIndex {
 public:
  HeaderIndex(const std::string& header_line, char delim,
              const std::vector<std::string>& required,
              const std::string& path) {
    auto cells = split_line(header_line, delim);
    for (size_t i = 0; i < cells.size(); ++i) cols_[lower(trim(cells[i]))] = i;
    for (const std::string& name : required)
      if (!cols_.count(name))
        data_error(path + ": header is missing required column '" + name + "'");
  }

  std::string get(const std::vector<std::string>& cells,
                  const std::string& name) const {
    size_t idx = cols_.at(name);
    if (idx >= cells.size()) return "";
    return trim(cells[idx]);
  }

 private:
  std::map<std::string, size_t> cols_;
};

std::string or_unknown(const std::string& s) { return s.empty() ? kUnknown : s; }

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) io_error("cannot open file: " + path);
  return in;
}

bool days_from_civil_checked(int64_t y, int64_t m, int64_t d, int64_t* out) {
  if (m < 1 || m > 12 || d < 1 || d > 31) return false;
  // Howard Hinnant's days_from_civil.
  y -= m <= 2;
  int64_t era = (y >= 0 ? y : y - 399) / 400;
  int64_t yoe = y - era * 400;
  int64_t doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  int64_t doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  *out = era * 146097 + doe - 719468;
  return true;
}

}  // namespace

std::optional<int64_t> parse_timestamp(const std::string& raw) {
  std::string s = trim(raw);
  if (s.empty()) return std::nullopt;
  // Raw epoch integer.
  bool all_digits = true;
  size_t start = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (start == s.size()) all_digits = false;
  for (size_t i = start; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) all_digits = false;
  if (all_digits) {
    try {
      return std::stoll(s);
    } catch (...) {
      return std::nullopt;
    }
  }
  // YYYY-MM-DD[ T]HH:MM:SS(.frac)?(Z)?
  int y, mo, d, h, mi, se;
  char sep;
  std::istringstream in(s);
  in >> y;
  if (in.get() != '-') return std::nullopt;
  in >> mo;
  if (in.get() != '-') return std::nullopt;
  in >> d;
  sep = static_cast<char>(in.get());
  if (sep != ' ' && sep != 'T') return std::nullopt;
  in >> h;
  if (in.get() != ':') return std::nullopt;
  in >> mi;
  if (in.get() != ':') return std::nullopt;
  in >> se;
  if (in.fail()) return std::nullopt;
  int c = in.get();
  if (c == '.') {  // drop fractional seconds
    while (std::isdigit(in.peek())) in.get();
    c = in.get();
  }
  if (c != std::istringstream::traits_type::eof() && c != 'Z') return std::nullopt;
  if (h < 0 || h > 23 || mi < 0 || mi > 59 || se < 0 || se > 60) return std::nullopt;
  int64_t days;
  if (!days_from_civil_checked(y, mo, d, &days)) return std::nullopt;
  return days * 86400 + h * 3600 + mi * 60 + se;
}

std::vector<Job> read_jobs(const std::string& path, char delimiter,
                           ParseStats* stats) {
  auto in = open_or_throw(path);
  std::string line;
  if (!std::getline(in, line)) data_error(path + ": empty file, no header row");
  HeaderIndex hdr(line, delimiter,
                  {"job_id", "title", "description", "requirements", "city",
                   "state", "country"},
                  path);
  std::vector<Job> jobs;
  ParseStats st;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++st.rows_read;
    auto cells = split_line(line, delimiter);
    Job j;
    j.job_id = hdr.get(cells, "job_id");
    if (j.job_id.empty()) {
      ++st.rows_skipped;
      continue;
    }
    std::string text = hdr.get(cells, "title") + " " +
                       hdr.get(cells, "description") + " " +
                       hdr.get(cells, "requirements");
    j.tokens = tokenize(text);
    j.city = or_unknown(hdr.get(cells, "city"));
    j.state = or_unknown(hdr.get(cells, "state"));
    j.country = or_unknown(hdr.get(cells, "country"));
    jobs.push_back(std::move(j));
  }
  if (stats) *stats = st;
  return jobs;
}

std::vector<JobSeeker> read_seekers(const std::string& path, char delimiter,
                                    ParseStats* stats) {
  auto in = open_or_throw(path);
  std::string line;
  if (!std::getline(in, line)) data_error(path + ": empty file, no header row");
  HeaderIndex hdr(line, delimiter,
                  {"user_id", "city", "state", "country", "degree", "major"},
                  path);
  std::vector<JobSeeker> seekers;
  ParseStats st;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++st.rows_read;
    auto cells = split_line(line, delimiter);
    JobSeeker s;
    s.user_id = hdr.get(cells, "user_id");
    if (s.user_id.empty()) {
      ++st.rows_skipped;
      continue;
    }
    s.city = or_unknown(hdr.get(cells, "city"));
    s.state = or_unknown(hdr.get(cells, "state"));
    s.country = or_unknown(hdr.get(cells, "country"));
    s.degree = or_unknown(hdr.get(cells, "degree"));
    s.major = or_unknown(hdr.get(cells, "major"));
    seekers.push_back(std::move(s));
  }
  if (stats) *stats = st;
  return seekers;
}

std::vector<ApplicationEvent> read_applications(const std::string& path,
                                                char delimiter,
                                                ParseStats* stats) {
  auto in = open_or_throw(path);
  std::string line;
  if (!std::getline(in, line)) data_error(path + ": empty file, no header row");
  HeaderIndex hdr(line, delimiter, {"user_id", "job_id", "timestamp"}, path);
  std::vector<ApplicationEvent> events;
  ParseStats st;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++st.rows_read;
    auto cells = split_line(line, delimiter);
    ApplicationEvent e;
    e.user_id = hdr.get(cells, "user_id");
    e.job_id = hdr.get(cells, "job_id");
    auto ts = parse_timestamp(hdr.get(cells, "timestamp"));
    if (e.user_id.empty() || e.job_id.empty() || !ts || *ts < 0) {
      ++st.rows_skipped;
      continue;
    }
    e.timestamp = *ts;
    events.push_back(std::move(e));
  }
  if (stats) *stats = st;
  return events;
}

namespace {

std::string clean_cell(std::string s) {
  for (char& c : s)
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  return s;
}

std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

}  // namespace

void write_jobs(const std::string& path, const std::vector<Job>& jobs) {
  std::ofstream out(path);
  if (!out) io_error("cannot write file: " + path);
  out << "job_id\ttitle\tdescription\trequirements\tcity\tstate\tcountry\n";
  for (const Job& j : jobs)
    out << clean_cell(j.job_id) << '\t' << clean_cell(join_tokens(j.tokens))
        << "\t\t\t" << clean_cell(j.city) << '\t' << clean_cell(j.state)
        << '\t' << clean_cell(j.country) << '\n';
  if (!out) io_error("failed writing file: " + path);
}

void write_seekers(const std::string& path,
                   const std::vector<JobSeeker>& seekers) {
  std::ofstream out(path);
  if (!out) io_error("cannot write file: " + path);
  out << "user_id\tcity\tstate\tcountry\tdegree\tmajor\n";
  for (const JobSeeker& s : seekers)
    out << clean_cell(s.user_id) << '\t' << clean_cell(s.city) << '\t'
        << clean_cell(s.state) << '\t' << clean_cell(s.country) << '\t'
        << clean_cell(s.degree) << '\t' << clean_cell(s.major) << '\n';
  if (!out) io_error("failed writing file: " + path);
}

void write_applications(const std::string& path,
                        const std::vector<ApplicationEvent>& events) {
  std::ofstream out(path);
  if (!out) io_error("cannot write file: " + path);
  out << "user_id\tjob_id\ttimestamp\n";
  for (const ApplicationEvent& e : events)
    out << clean_cell(e.user_id) << '\t' << clean_cell(e.job_id) << '\t'
        << e.timestamp << '\n';
  if (!out) io_error("failed writing file: " + path);
}

void write_sessions(const std::string& path,
                    const std::vector<Session>& sessions) {
  std::ofstream out(path);
  if (!out) io_error("cannot write file: " + path);
  out << "session_id\tuser_id\tjob_id\ttimestamp\n";
  for (size_t i = 0; i < sessions.size(); ++i) {
    for (const ApplicationEvent& e : sessions[i].events)
      out << "s" << i << '\t' << e.user_id << '\t' << e.job_id << '\t'
          << e.timestamp << '\n';
  }
  if (!out) io_error("failed writing file: " + path);
}

std::vector<Session> read_sessions(const std::string& path) {
  auto in = open_or_throw(path);
  std::string line;
  if (!std::getline(in, line)) data_error(path + ": empty session file");
  std::vector<Session> sessions;
  std::string current_sid;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto cells = split_line(line, '\t');
    if (cells.size() < 4) data_error(path + ": malformed session row: " + line);
    ApplicationEvent e;
    e.user_id = cells[1];
    e.job_id = cells[2];
    auto ts = parse_timestamp(cells[3]);
    if (!ts) data_error(path + ": bad timestamp in session row: " + line);
    e.timestamp = *ts;
    if (cells[0] != current_sid) {
      current_sid = cells[0];
      sessions.push_back(Session{e.user_id, {}});
    }
    sessions.back().events.push_back(std::move(e));
  }
  return sessions;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) io_error("cannot write file: " + path);
  out << content;
  if (!out) io_error("failed writing file: " + path);
}

std::string read_text_file(const std::string& path) {
  auto in = open_or_throw(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace panap
