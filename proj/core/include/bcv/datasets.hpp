#pragma once

#include "bcv/bipartite_graph.hpp"

namespace bcv {

/// The Davis "Southern Women" attendance network: 18 women (side 1) by
/// 14 social events (side 2), 89 attendances.
BipartiteGraph southern_women();

/// The same data as a one-indexed whitespace edgelist (one "woman event"
/// pair per line), usable as ingest test input or for export.
const char* southern_women_edgelist_text();

}  // namespace bcv
