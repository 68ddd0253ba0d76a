#include "bcv/edgelist.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace bcv {

namespace {

struct Token {
  const char* begin;
  const char* end;
};

// Splits on the configured delimiter; '\0' means any whitespace run.
std::vector<Token> split_tokens(const std::string& line, char delim) {
  std::vector<Token> out;
  const char* p = line.data();
  const char* stop = p + line.size();
  if (delim == '\0') {
    while (p < stop) {
      while (p < stop && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
      const char* start = p;
      while (p < stop && *p != ' ' && *p != '\t' && *p != '\r') ++p;
      if (p > start) out.push_back({start, p});
    }
  } else {
    while (p <= stop) {
      const char* start = p;
      while (p < stop && *p != delim) ++p;
      const char* e = p;
      while (e > start && (*(e - 1) == '\r' || *(e - 1) == ' ')) --e;
      const char* s = start;
      while (s < e && *s == ' ') ++s;
      if (e > s) out.push_back({s, e});
      ++p;
    }
  }
  return out;
}

long parse_index(const Token& t, std::int64_t line_no, const std::string& source) {
  long value = 0;
  const auto [ptr, ec] = std::from_chars(t.begin, t.end, value);
  if (ec != std::errc() || ptr != t.end) {
    throw std::runtime_error(source + ":" + std::to_string(line_no) +
                             ": cannot parse integer token '" + std::string(t.begin, t.end) + "'");
  }
  return value;
}

}  // namespace

IngestResult parse_edgelist(std::istream& in, const IngestOptions& options,
                            const std::string& source_name) {
  std::vector<std::pair<int, int>> edges;
  std::string line;
  std::int64_t line_no = 0;
  int max_i = -1;
  int max_j = -1;

  while (std::getline(in, line)) {
    ++line_no;
    if (line_no <= options.skip_lines) continue;
    const auto first_char = line.find_first_not_of(" \t\r");
    if (first_char == std::string::npos || line[first_char] == '#') continue;

    const auto tokens = split_tokens(line, options.delimiter);
    if (tokens.size() != 2) {
      throw std::runtime_error(source_name + ":" + std::to_string(line_no) + ": expected 2 tokens, got " +
                               std::to_string(tokens.size()));
    }
    long i = parse_index(tokens[0], line_no, source_name);
    long j = parse_index(tokens[1], line_no, source_name);
    if (options.one_indexed) {
      if (i < 1 || j < 1) {
        throw std::runtime_error(source_name + ":" + std::to_string(line_no) +
                                 ": index must be >= 1 under one-indexed input");
      }
      --i;
      --j;
    } else if (i < 0 || j < 0) {
      throw std::runtime_error(source_name + ":" + std::to_string(line_no) +
                               ": negative index under zero-indexed input");
    }
    if (i > std::numeric_limits<int>::max() - 1 || j > std::numeric_limits<int>::max() - 1) {
      throw std::runtime_error(source_name + ":" + std::to_string(line_no) +
                               ": index too large");
    }
    edges.emplace_back(static_cast<int>(i), static_cast<int>(j));
    max_i = std::max<long>(max_i, i);
    max_j = std::max<long>(max_j, j);
  }

  if (edges.empty()) {
    throw std::runtime_error(source_name + ": no edges; graph would have an empty side");
  }

  int n1 = options.n1 > 0 ? options.n1 : max_i + 1;
  int n2 = options.n2 > 0 ? options.n2 : max_j + 1;
  if (max_i >= n1 || max_j >= n2) {
    throw std::runtime_error(source_name + ": edge index exceeds declared side size");
  }

  std::sort(edges.begin(), edges.end());
  const auto unique_end = std::unique(edges.begin(), edges.end());
  const std::int64_t duplicates = edges.end() - unique_end;
  edges.erase(unique_end, edges.end());

  return IngestResult{BipartiteGraph(n1, n2, std::move(edges)), duplicates};
}

IngestResult ingest_edgelist(const std::string& path, const IngestOptions& options) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("ingest_edgelist: cannot open '" + path + "'");
  return parse_edgelist(in, options, path);
}

}  // namespace bcv
