#include "bcv/datasets.hpp"

#include <sstream>

#include "bcv/edgelist.hpp"

namespace bcv {

namespace {

// Davis/Gardner/Gardner 1941 incidence matrix, 18 women x 14 events, in the
// standard (UCINET) woman and event order. Row r, column c set means woman
// r+1 attended event c+1.
constexpr const char* kSouthernWomenMatrix[18] = {
    "11111101100000",  // Evelyn
    "11101111000000",  // Laura
    "01111111100000",  // Theresa
    "10111111000000",  // Brenda
    "00111010000000",  // Charlotte
    "00101101000000",  // Frances
    "00001111000000",  // Eleanor
    "00000101100000",  // Pearl
    "00001011100000",  // Ruth
    "00000011100100",  // Verne
    "00000001110100",  // Myrna
    "00000001110111",  // Katherine
    "00000011110111",  // Sylvia
    "00000110111111",  // Nora
    "00000011010110",  // Helen
    "00000001100000",  // Dorothy
    "00000000101000",  // Olivia
    "00000000101000",  // Flora
};

std::string build_edgelist_text() {
  std::ostringstream out;
  out << "# Southern Women attendance network (18 women x 14 events)\n";
  for (int i = 0; i < 18; ++i) {
    for (int j = 0; j < 14; ++j) {
      if (kSouthernWomenMatrix[i][j] == '1') out << (i + 1) << ' ' << (j + 1) << '\n';
    }
  }
  return out.str();
}

}  // namespace

const char* southern_women_edgelist_text() {
  static const std::string text = build_edgelist_text();
  return text.c_str();
}

BipartiteGraph southern_women() {
  std::istringstream in(southern_women_edgelist_text());
  IngestOptions options;
  options.n1 = 18;
  options.n2 = 14;
  return parse_edgelist(in, options, "southern-women").graph;
}

}  // namespace bcv
