#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "bcv/bipartite_graph.hpp"

namespace bcv {

struct IngestOptions {
  bool one_indexed = true;
  /// 0 means "any run of whitespace"; otherwise the exact separator byte.
  char delimiter = '\0';
  /// Number of leading lines to skip (header rows).
  int skip_lines = 0;
  /// Explicit side sizes; 0 means infer from the maximum index seen.
  int n1 = 0;
  int n2 = 0;
};

struct IngestResult {
  BipartiteGraph graph;
  /// Duplicate edges dropped during ingestion (real-world lists repeat pairs).
  std::int64_t duplicates_dropped = 0;
};

/// Parses "i j" pairs, one per line; lines starting with '#' and blank lines
/// are ignored. Throws std::runtime_error with the 1-based line number on
/// malformed input, indices outside the declared convention, or an empty
/// edge set (either side size would be 0).
IngestResult ingest_edgelist(const std::string& path, const IngestOptions& options = {});

/// Stream variant; `source_name` labels error messages.
IngestResult parse_edgelist(std::istream& in, const IngestOptions& options,
                            const std::string& source_name);

}  // namespace bcv
