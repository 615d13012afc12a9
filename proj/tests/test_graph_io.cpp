#include <sstream>

#include <gtest/gtest.h>

#include "sbm_ising/graph_io.hpp"
#include "sbm_ising/sbm.hpp"

using namespace sbm_ising;

TEST(SparseGraph, CanonicalizesAndRejectsBadInput) {
  SparseGraph g(4, {{2, 1}, {0, 3}, {1, 0}});
  EXPECT_EQ(g.num_edges(), 3u);
  EXPECT_EQ(g.edges().front(), Edge(0, 1));
  EXPECT_TRUE(g.has_edge(1, 2));
  EXPECT_TRUE(g.has_edge(2, 1));
  EXPECT_FALSE(g.has_edge(2, 3));
  EXPECT_EQ(g.degree(0), 2u);
  EXPECT_EQ(g.max_degree(), 2u);
  EXPECT_THROW(SparseGraph(3, {{1, 1}}), parameter_error);
  EXPECT_THROW(SparseGraph(3, {{0, 1}, {1, 0}}), parameter_error);
  EXPECT_THROW(SparseGraph(3, {{0, 3}}), parameter_error);
  EXPECT_THROW(SparseGraph(3, {}, Labels{0, 1}), parameter_error);
  EXPECT_THROW(SparseGraph(2, {}, Labels{0, 2}), parameter_error);
}

TEST(GraphIo, ParsesMinimalFile) {
  const auto g = read_graph_string("3 2\n0 1\n1 2\n");
  EXPECT_EQ(g.num_vertices(), 3u);
  EXPECT_EQ(g.num_edges(), 2u);
  EXPECT_EQ(graph_to_string(g), "3 2\n0 1\n1 2\n");
}

TEST(GraphIo, NormalizesReversedPairs) {
  const auto g = read_graph_string("3 1\n2 0\n");
  EXPECT_EQ(g.edges().front(), Edge(0, 2));
}

TEST(GraphIo, ReportsLineOfBadEdge) {
  try {
    read_graph_string("3 2\n0 1\n1 1\n");
    FAIL() << "self-loop accepted";
  } catch (const parse_error& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(read_graph_string("3 2\n0 1\n1 0\n"), parse_error);
  EXPECT_THROW(read_graph_string("3 1\n0 5\n"), parse_error);
  EXPECT_THROW(read_graph_string("3 2\n0 1\n"), parse_error);
  EXPECT_THROW(read_graph_string("3 x\n"), parse_error);
  EXPECT_THROW(read_graph_string(""), parse_error);
}

TEST(GraphIo, RoundTripsSampledGraphs) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto g = sample_sbm(SbmParams::make(4.0, -0.3, 1.5, 300), s);
    const auto back = read_graph_string(graph_to_string(g));
    EXPECT_EQ(back.edges(), g.edges());
    EXPECT_EQ(back.num_vertices(), g.num_vertices());

    std::stringstream ls;
    write_labels(g.labels(), ls);
    EXPECT_EQ(read_labels(ls), g.labels());
  }
}

TEST(GraphIo, LabelParsing) {
  std::istringstream ok("0\n1\n1\n");
  EXPECT_EQ(read_labels(ok), (Labels{0, 1, 1}));
  std::istringstream bad("0\n2\n");
  EXPECT_THROW(read_labels(bad), parse_error);
}
