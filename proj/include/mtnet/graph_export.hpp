#pragma once

// GEXF 1.2 and Graphviz DOT exports with node attributes (entity, token, ego
// flag, community, pagerank) and edge weights; backbone exports carry the
// per-edge kept_by marker.

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "mtnet/backbone.hpp"
#include "mtnet/error.hpp"
#include "mtnet/network.hpp"
#include "mtnet/strings.hpp"

namespace mtnet {

// Optional per-node / per-edge annotations; empty vectors omit the attribute.
struct ExportAttributes {
  std::vector<double> pagerank;     // aligned with node indices
  std::vector<std::uint32_t> community;
  std::vector<KeptBy> kept_by;      // aligned with edge indices
};

namespace detail {

inline std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

inline std::string dot_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size() + 2);
  out.push_back('"');
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline void check_attr_sizes(const MultiTokenNetwork& net, const ExportAttributes& attrs) {
  if (!attrs.pagerank.empty() && attrs.pagerank.size() != net.node_count())
    throw Error("pagerank attribute does not match node count");
  if (!attrs.community.empty() && attrs.community.size() != net.node_count())
    throw Error("community attribute does not match node count");
  if (!attrs.kept_by.empty() && attrs.kept_by.size() != net.edge_count())
    throw Error("kept_by attribute does not match edge count");
}

}  // namespace detail

inline void write_gexf(std::ostream& os, const MultiTokenNetwork& net,
                       const ExportAttributes& attrs = {}) {
  detail::check_attr_sizes(net, attrs);
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<gexf xmlns=\"http://www.gexf.net/1.2draft\" version=\"1.2\">\n"
     << "  <graph defaultedgetype=\"directed\">\n"
     << "    <attributes class=\"node\">\n"
     << "      <attribute id=\"0\" title=\"entity\" type=\"string\"/>\n"
     << "      <attribute id=\"1\" title=\"token\" type=\"string\"/>\n"
     << "      <attribute id=\"2\" title=\"is_ego\" type=\"boolean\"/>\n";
  if (!attrs.community.empty())
    os << "      <attribute id=\"3\" title=\"community\" type=\"long\"/>\n";
  if (!attrs.pagerank.empty())
    os << "      <attribute id=\"4\" title=\"pagerank\" type=\"double\"/>\n";
  os << "    </attributes>\n";
  if (!attrs.kept_by.empty()) {
    os << "    <attributes class=\"edge\">\n"
       << "      <attribute id=\"5\" title=\"kept_by\" type=\"string\"/>\n"
       << "    </attributes>\n";
  }

  os << "    <nodes>\n";
  for (std::uint32_t i = 0; i < net.node_count(); ++i) {
    const MtnNode& n = net.node(i);
    os << "      <node id=\"" << i << "\" label=\""
       << detail::xml_escape(n.entity + " | " + n.token) << "\">\n"
       << "        <attvalues>\n"
       << "          <attvalue for=\"0\" value=\"" << detail::xml_escape(n.entity) << "\"/>\n"
       << "          <attvalue for=\"1\" value=\"" << detail::xml_escape(n.token) << "\"/>\n"
       << "          <attvalue for=\"2\" value=\"" << (n.is_ego ? "true" : "false") << "\"/>\n";
    if (!attrs.community.empty())
      os << "          <attvalue for=\"3\" value=\"" << attrs.community[i] << "\"/>\n";
    if (!attrs.pagerank.empty())
      os << "          <attvalue for=\"4\" value=\"" << fmt_double(attrs.pagerank[i])
         << "\"/>\n";
    os << "        </attvalues>\n      </node>\n";
  }
  os << "    </nodes>\n    <edges>\n";
  for (std::uint32_t e = 0; e < net.edge_count(); ++e) {
    const MtnEdge& edge = net.edges()[e];
    os << "      <edge id=\"" << e << "\" source=\"" << edge.src << "\" target=\"" << edge.dst
       << "\" weight=\"" << edge.weight << "\"";
    if (!attrs.kept_by.empty()) {
      os << ">\n        <attvalues>\n          <attvalue for=\"5\" value=\""
         << kept_by_name(attrs.kept_by[e]) << "\"/>\n        </attvalues>\n      </edge>\n";
    } else {
      os << "/>\n";
    }
  }
  os << "    </edges>\n  </graph>\n</gexf>\n";
}

inline void write_dot(std::ostream& os, const MultiTokenNetwork& net,
                      const ExportAttributes& attrs = {}) {
  detail::check_attr_sizes(net, attrs);
  os << "digraph mtn {\n";
  for (std::uint32_t i = 0; i < net.node_count(); ++i) {
    const MtnNode& n = net.node(i);
    os << "  n" << i << " [label=" << detail::dot_escape(n.entity + " | " + n.token)
       << ", entity=" << detail::dot_escape(n.entity)
       << ", token=" << detail::dot_escape(n.token)
       << ", is_ego=" << (n.is_ego ? "true" : "false");
    if (!attrs.community.empty()) os << ", community=" << attrs.community[i];
    if (!attrs.pagerank.empty())
      os << ", pagerank=" << detail::dot_escape(fmt_double(attrs.pagerank[i]));
    os << "];\n";
  }
  for (std::uint32_t e = 0; e < net.edge_count(); ++e) {
    const MtnEdge& edge = net.edges()[e];
    os << "  n" << edge.src << " -> n" << edge.dst << " [weight=" << edge.weight;
    if (!attrs.kept_by.empty()) os << ", kept_by=" << kept_by_name(attrs.kept_by[e]);
    os << "];\n";
  }
  os << "}\n";
}

}  // namespace mtnet
